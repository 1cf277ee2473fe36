import io
import math
import random

import numpy as np
import pytest
import scipy.stats

from compsem.compose import PhraseSpec, similarity
from compsem.evaluation import (
    DatasetEntry,
    DatasetFormatError,
    UndefinedCorrelationError,
    evaluate_models,
    high_low_means,
    load_dataset,
    permutation_pvalue,
    render_report,
    report_json,
    save_dataset,
    score_entries,
    spearman_rho,
    ModelReport,
)
from compsem.relational import RelationInstance, learn_lexicon
from compsem.tensor import SemanticTensor, add, cosine

from conftest import SHOW_RELATIONS

TRANSITIVE_ROWS = """participant verb subject object landmark input hilo
p1 show table result express 6 HIGH
p2 show map location picture 2 LOW
"""

INTRANSITIVE_ROWS = """participant verb noun landmark input hilo
p1 glow face beam 7 HIGH
p2 glow face burn 1 LOW
"""


class TestLoadDataset:
    def test_transitive_row(self):
        entries = load_dataset(io.StringIO(TRANSITIVE_ROWS), "transitive")
        assert len(entries) == 2
        e = entries[0]
        assert e.annotator == "p1"
        assert e.target_verb == "show" and e.landmark_verb == "express"
        assert e.subject == "table" and e.object == "result"
        assert e.score == 6 and e.hilo == "HIGH"

    def test_intransitive_row(self):
        entries = load_dataset(io.StringIO(INTRANSITIVE_ROWS), "intransitive")
        assert entries[0].object is None
        assert entries[0].subject == "face"
        assert entries[0].target_phrase().pattern == "intransitive"

    def test_empty_file(self):
        assert load_dataset(io.StringIO(""), "transitive") == []

    def test_two_hundred_rows(self):
        rng = random.Random(4)
        lines = ["participant verb subject object landmark input hilo"]
        for i in range(200):
            lines.append(f"p{i % 25} v{i % 10} s o l{i % 7} {rng.randint(1, 7)} "
                         + ("HIGH" if i % 2 else "LOW"))
        entries = load_dataset(io.StringIO("\n".join(lines) + "\n"), "transitive")
        assert len(entries) == 200

    def test_wrong_column_count(self):
        bad = "participant verb subject object landmark input hilo\np1 show table result 6 HIGH\n"
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(io.StringIO(bad), "transitive")

    def test_score_out_of_range(self):
        bad = TRANSITIVE_ROWS.replace(" 6 HIGH", " 9 HIGH")
        with pytest.raises(DatasetFormatError, match="outside 1..7"):
            load_dataset(io.StringIO(bad), "transitive")

    def test_bad_hilo(self):
        bad = TRANSITIVE_ROWS.replace("HIGH", "MAYBE")
        with pytest.raises(DatasetFormatError, match="MAYBE"):
            load_dataset(io.StringIO(bad), "transitive")

    def test_roundtrip_identity(self):
        for text, arity in ((TRANSITIVE_ROWS, "transitive"), (INTRANSITIVE_ROWS, "intransitive")):
            entries = load_dataset(io.StringIO(text), arity)
            buf = io.StringIO()
            save_dataset(entries, buf, arity)
            buf.seek(0)
            assert load_dataset(buf, arity) == entries


@pytest.fixture(scope="module")
def toy_relations(toy_vectors):
    instances = [RelationInstance("show", args) for args in SHOW_RELATIONS]
    instances.append(RelationInstance("express", ("table", "result")))
    instances.append(RelationInstance("picture", ("location", "map")))
    return learn_lexicon(instances, toy_vectors)


class TestScoreEntries:
    def test_baseline_constant_per_verb_pair(self, toy_vectors):
        entries = [
            DatasetEntry("p1", "map", "location", "table", "result", 5, "HIGH"),
            DatasetEntry("p2", "map", "location", "location", "map", 3, "HIGH"),
        ]
        scored, skipped = score_entries(entries, "baseline", toy_vectors)
        assert skipped == 0
        assert scored[0][1] == scored[1][1]

    def test_additive_matches_direct_oracle(self, toy_vectors):
        entries = [DatasetEntry("p1", "map", "location", "table", "result", 5, "HIGH")]
        scored, _ = score_entries(entries, "additive", toy_vectors)
        v1 = add(add(toy_vectors["table"], toy_vectors["map"]), toy_vectors["result"])
        v2 = add(add(toy_vectors["table"], toy_vectors["location"]), toy_vectors["result"])
        assert scored[0][1] == pytest.approx(cosine(v1, v2), abs=1e-12)

    def test_categorical_shared_arguments_score_high(self, toy_vectors, toy_relations):
        # express was learned from the same argument pair as one of show's
        entry = DatasetEntry("p1", "show", "express", "table", "result", 7, "HIGH")
        scored, skipped = score_entries([entry], "categorical", toy_vectors, toy_relations)
        assert skipped == 0
        assert scored[0][1] > 0.9

    def test_missing_vocabulary_skipped(self, toy_vectors, toy_relations):
        entries = [
            DatasetEntry("p1", "show", "express", "table", "result", 6, "HIGH"),
            DatasetEntry("p2", "show", "vanish", "table", "result", 2, "LOW"),
            DatasetEntry("p3", "show", "express", "ghost", "result", 2, "LOW"),
        ]
        scored, skipped = score_entries(entries, "categorical", toy_vectors, toy_relations)
        assert len(scored) == 1 and skipped == 2


class TestSpearman:
    def test_identical_orderings(self):
        assert spearman_rho([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)

    def test_reversed_orderings(self):
        assert spearman_rho([1, 2, 3, 4], [8, 6, 4, 2]) == pytest.approx(-1.0)

    def test_hand_computed_four_points(self):
        # 1 - 6 * sum(d^2) / (n(n^2-1)) with d = (0,1,-1,0): 1 - 12/60
        assert spearman_rho([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_ties_match_rank_pearson_oracle(self):
        rng = random.Random(21)
        for _ in range(500):
            n = rng.randint(3, 30)
            xs = [rng.randint(0, 5) for _ in range(n)]
            ys = [rng.randint(0, 5) for _ in range(n)]
            # oracle ranks: count-based average rank, then numpy Pearson
            def oracle_ranks(vals):
                return [
                    sum(v < x for v in vals) + (sum(v == x for v in vals) + 1) / 2
                    for x in vals
                ]
            rx, ry = oracle_ranks(xs), oracle_ranks(ys)
            if len(set(xs)) < 2 or len(set(ys)) < 2:
                with pytest.raises(UndefinedCorrelationError):
                    spearman_rho(xs, ys)
                continue
            want = np.corrcoef(rx, ry)[0, 1]
            assert spearman_rho(xs, ys) == pytest.approx(want, abs=1e-9)

    def test_matches_scipy(self):
        rng = random.Random(23)
        for _ in range(100):
            n = rng.randint(3, 40)
            xs = [rng.uniform(0, 1) for _ in range(n)]
            ys = [rng.randint(1, 7) for _ in range(n)]
            if len(set(ys)) < 2:
                continue
            want = scipy.stats.spearmanr(xs, ys).statistic
            assert spearman_rho(xs, ys) == pytest.approx(want, abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = random.Random(29)
        for _ in range(50):
            n = rng.randint(3, 20)
            xs = [rng.uniform(-5, 5) for _ in range(n)]
            ys = [rng.uniform(-5, 5) for _ in range(n)]
            base = spearman_rho(xs, ys)
            assert spearman_rho([math.exp(x) for x in xs], ys) == pytest.approx(base, abs=1e-9)
            assert spearman_rho(xs, [y**3 for y in ys]) == pytest.approx(base, abs=1e-9)

    def test_bounds(self):
        rng = random.Random(31)
        for _ in range(200):
            n = rng.randint(2, 15)
            xs = [rng.randint(0, 3) for _ in range(n)]
            ys = [rng.randint(0, 3) for _ in range(n)]
            try:
                rho = spearman_rho(xs, ys)
            except UndefinedCorrelationError:
                continue
            assert -1.0 <= rho <= 1.0

    def test_errors(self):
        with pytest.raises(ValueError):
            spearman_rho([1, 2], [1])
        with pytest.raises(UndefinedCorrelationError):
            spearman_rho([1], [1])
        with pytest.raises(UndefinedCorrelationError):
            spearman_rho([2, 2, 2], [1, 2, 3])


class TestHighLowMeans:
    def test_all_equal(self):
        entries = [
            (DatasetEntry("p", "a", "b", "s", None, 4, tag), 0.5)
            for tag in ("HIGH", "LOW", "HIGH")
        ]
        assert high_low_means(entries) == (0.5, 0.5)

    def test_simple_arithmetic(self):
        rows = [
            (DatasetEntry("p", "a", "b", "s", None, 6, "HIGH"), 0.8),
            (DatasetEntry("p", "a", "b", "s", None, 6, "HIGH"), 0.6),
            (DatasetEntry("p", "a", "b", "s", None, 2, "LOW"), 0.3),
        ]
        high, low = high_low_means(rows)
        assert high == pytest.approx(0.7) and low == pytest.approx(0.3)

    def test_empty_class_absent(self):
        rows = [(DatasetEntry("p", "a", "b", "s", None, 6, "HIGH"), 0.9)]
        assert high_low_means(rows) == (0.9, None)

    def test_permutation_invariant(self):
        rng = random.Random(3)
        rows = [
            (DatasetEntry("p", "a", "b", "s", None, 4, rng.choice(["HIGH", "LOW"])), rng.random())
            for _ in range(30)
        ]
        shuffled = list(rows)
        rng.shuffle(shuffled)
        assert high_low_means(rows) == high_low_means(shuffled)


class TestPermutationPValue:
    def test_perfect_correlation_tiny_p(self):
        xs = list(range(10))
        ys = [2 * x + 1 for x in xs]
        assert permutation_pvalue(xs, ys, iterations=10000, seed=0) <= 0.001

    def test_constant_scores_error(self):
        with pytest.raises(UndefinedCorrelationError):
            permutation_pvalue([1, 1, 1, 1], [1, 2, 3, 4], iterations=1000)

    def test_independent_scores_not_significant(self):
        rng = random.Random(77)
        xs = [rng.random() for _ in range(50)]
        ys = [rng.random() for _ in range(50)]
        # frozen from a fixed-seed run; loose bound keeps it meaningful
        p = permutation_pvalue(xs, ys, iterations=2000, seed=1)
        assert p > 0.01

    def test_deterministic(self):
        xs = [3, 1, 4, 1, 5, 9, 2, 6]
        ys = [2, 7, 1, 8, 2, 8, 1, 8]
        a = permutation_pvalue(xs, ys, iterations=1000, seed=5)
        b = permutation_pvalue(xs, ys, iterations=1000, seed=5)
        assert a == b

    def test_too_few_iterations(self):
        with pytest.raises(ValueError):
            permutation_pvalue([1, 2], [1, 2], iterations=10)


class TestReports:
    def test_render_golden(self):
        reports = [
            ModelReport("baseline", 0.47, 0.44, 0.16, None, 200, 0),
            ModelReport("additive", 0.90, 0.90, 0.05, None, 200, 0),
            ModelReport("categorical", 0.732, 0.718, 0.21, None, 198, 2),
        ]
        assert render_report(reports) == (
            "Model               High     Low     rho\n"
            "baseline            0.47    0.44    0.16\n"
            "additive            0.90    0.90    0.05\n"
            "categorical         0.73    0.72    0.21\n"
        )

    def test_render_absent_as_dash(self):
        reports = [ModelReport("baseline", None, 0.5, None, None, 3, 1)]
        out = render_report(reports)
        assert "   -" in out.splitlines()[1]

    def test_evaluate_models_end_to_end(self, toy_vectors, toy_relations):
        rows = [
            DatasetEntry("p1", "show", "express", "table", "result", 7, "HIGH"),
            DatasetEntry("p2", "show", "express", "table", "result", 6, "HIGH"),
            DatasetEntry("p1", "show", "picture", "map", "location", 2, "LOW"),
            DatasetEntry("p2", "show", "picture", "map", "location", 1, "LOW"),
        ]
        reports = evaluate_models(
            rows, ["categorical", "baseline"], toy_vectors, toy_relations
        )
        assert [r.model for r in reports] == ["categorical", "baseline"]
        cat = reports[0]
        assert cat.entries == 4 and cat.skipped == 0
        assert cat.high_mean is not None and cat.low_mean is not None
        assert cat.rho is not None
        # baseline needs lexical verb vectors, which the toy lexicon lacks
        assert reports[1].entries == 0 and reports[1].skipped == 4
        assert reports[1].rho is None

    def test_report_json_fields(self):
        text = report_json([ModelReport("additive", 0.9, 0.9, 0.05, 0.5, 10, 2)])
        import json

        data = json.loads(text)
        row = data["models"][0]
        assert row == {
            "model": "additive",
            "high_mean": 0.9,
            "low_mean": 0.9,
            "rho": 0.05,
            "p_value": 0.5,
            "entries": 10,
            "skipped": 2,
        }
