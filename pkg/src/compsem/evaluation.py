"""Verb disambiguation evaluation: dataset loading, scoring, and statistics.

Each dataset row is one annotator judgement of a target/landmark verb pair
sharing a subject (and, for the transitive dataset, an object): a 1..7
similarity score plus a HIGH/LOW tag. A model scores a row with the cosine
of the two composed phrases; rows are then summarized by the mean model
score over HIGH and over LOW rows and by Spearman's rank correlation with
the annotator scores. Every annotator row counts once; no per-item
aggregation happens anywhere.

Significance, when asked for, is a fixed-seed permutation test on the
absolute correlation, since shuffling the human column is assumption-free.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Optional, Sequence

import numpy as np

from .compose import CompositionError, PhraseSpec, canonical_model_kind, similarity
from .relational import RelationalLexicon
from .tensor import SemanticTensor

__all__ = [
    "DatasetFormatError",
    "UndefinedCorrelationError",
    "DatasetEntry",
    "ModelReport",
    "load_dataset",
    "save_dataset",
    "score_entries",
    "spearman_rho",
    "high_low_means",
    "permutation_pvalue",
    "evaluate_models",
    "render_report",
    "report_json",
]

INTRANSITIVE_HEADER = ("participant", "verb", "noun", "landmark", "input", "hilo")
TRANSITIVE_HEADER = ("participant", "verb", "subject", "object", "landmark", "input", "hilo")


class DatasetFormatError(ValueError):
    """A dataset row violates the column layout."""


class UndefinedCorrelationError(ValueError):
    """Rank correlation is undefined (fewer than two points or zero rank
    variance on one side)."""


@dataclass(frozen=True)
class DatasetEntry:
    """One annotator judgement row."""

    annotator: str
    target_verb: str
    landmark_verb: str
    subject: str
    object: Optional[str]
    score: int
    hilo: str

    def target_phrase(self) -> PhraseSpec:
        if self.object is None:
            return PhraseSpec.intransitive(self.subject, self.target_verb)
        return PhraseSpec.transitive(self.subject, self.target_verb, self.object)

    def landmark_phrase(self) -> PhraseSpec:
        if self.object is None:
            return PhraseSpec.intransitive(self.subject, self.landmark_verb)
        return PhraseSpec.transitive(self.subject, self.landmark_verb, self.object)


def _parse_row(fields: list[str], arity: str, lineno: int) -> DatasetEntry:
    if arity == "transitive":
        if len(fields) != 7:
            raise DatasetFormatError(
                f"line {lineno}: expected 7 columns, got {len(fields)}"
            )
        participant, verb, subject, obj, landmark, score_text, hilo = fields
    else:
        if len(fields) != 6:
            raise DatasetFormatError(
                f"line {lineno}: expected 6 columns, got {len(fields)}"
            )
        participant, verb, subject, landmark, score_text, hilo = fields
        obj = None
    try:
        score = int(score_text)
    except ValueError as exc:
        raise DatasetFormatError(f"line {lineno}: bad score {score_text!r}") from exc
    if not 1 <= score <= 7:
        raise DatasetFormatError(f"line {lineno}: score {score} outside 1..7")
    if hilo not in ("HIGH", "LOW"):
        raise DatasetFormatError(f"line {lineno}: bad tag {hilo!r} (expected HIGH or LOW)")
    return DatasetEntry(
        annotator=participant,
        target_verb=verb,
        landmark_verb=landmark,
        subject=subject,
        object=obj,
        score=score,
        hilo=hilo,
    )


def load_dataset(fp: IO[str], arity: str) -> list[DatasetEntry]:
    """Parse a whitespace-separated dataset with one header line.

    Intransitive columns: participant verb noun landmark input hilo.
    Transitive columns: participant verb subject object landmark input hilo.
    """
    if arity not in ("intransitive", "transitive"):
        raise ValueError(f"arity must be intransitive or transitive, got {arity!r}")
    entries: list[DatasetEntry] = []
    header_seen = False
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        if not header_seen:
            header_seen = True
            continue
        entries.append(_parse_row(line.split(), arity, lineno))
    return entries


def save_dataset(entries: Sequence[DatasetEntry], fp: IO[str], arity: str) -> None:
    header = TRANSITIVE_HEADER if arity == "transitive" else INTRANSITIVE_HEADER
    fp.write(" ".join(header) + "\n")
    for e in entries:
        if arity == "transitive":
            fields = [e.annotator, e.target_verb, e.subject, e.object, e.landmark_verb]
        else:
            fields = [e.annotator, e.target_verb, e.subject, e.landmark_verb]
        fp.write(" ".join(fields + [str(e.score), e.hilo]) + "\n")


def score_entries(
    entries: Iterable[DatasetEntry],
    kind: str,
    vectors: Mapping[str, SemanticTensor],
    relations: Optional[RelationalLexicon] = None,
) -> tuple[list[tuple[DatasetEntry, float]], int]:
    """Model similarity score per row; returns (scored rows, skipped count).

    Rows whose vocabulary is missing from the lexicons are skipped and
    counted, never scored as zero, so they cannot bias the means.
    """
    kind = canonical_model_kind(kind)
    scored: list[tuple[DatasetEntry, float]] = []
    skipped = 0
    for entry in entries:
        try:
            value = similarity(
                entry.target_phrase(), entry.landmark_phrase(), kind, vectors, relations
            )
        except CompositionError:
            skipped += 1
            continue
        scored.append((entry, value))
    return scored, skipped


def _average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman_rho(model_scores: Sequence[float], human_scores: Sequence[float]) -> float:
    """Rank correlation: Pearson over averaged ranks, in [-1, 1]."""
    if len(model_scores) != len(human_scores):
        raise ValueError("score lists differ in length")
    if len(model_scores) < 2:
        raise UndefinedCorrelationError("need at least two score pairs")
    rx = np.asarray(_average_ranks(model_scores))
    ry = np.asarray(_average_ranks(human_scores))
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError("zero rank variance (all scores tied)")
    rho = float(np.dot(dx, dy)) / float(np.sqrt(vx) * np.sqrt(vy))
    return max(-1.0, min(1.0, rho))


def high_low_means(
    scored: Iterable[tuple[DatasetEntry, float]],
) -> tuple[Optional[float], Optional[float]]:
    """Arithmetic means of model scores over HIGH and LOW rows.

    An empty class yields None for that mean.
    """
    highs: list[float] = []
    lows: list[float] = []
    for entry, value in scored:
        (highs if entry.hilo == "HIGH" else lows).append(value)
    # fsum keeps the means independent of row order, bit for bit
    high = math.fsum(highs) / len(highs) if highs else None
    low = math.fsum(lows) / len(lows) if lows else None
    return high, low


def permutation_pvalue(
    model_scores: Sequence[float],
    human_scores: Sequence[float],
    iterations: int = 10000,
    seed: int = 0,
) -> float:
    """Fraction of shuffles of the human scores with |rho| at least the
    observed |rho|. Fixed seed, so reruns agree exactly."""
    if iterations < 1000:
        raise ValueError("need at least 1000 iterations for a stable estimate")
    observed = abs(spearman_rho(model_scores, human_scores))
    rng = random.Random(seed)
    shuffled = list(human_scores)
    hits = 0
    for _ in range(iterations):
        rng.shuffle(shuffled)
        if abs(spearman_rho(model_scores, shuffled)) >= observed:
            hits += 1
    return hits / iterations


@dataclass(frozen=True)
class ModelReport:
    """Aggregate results for one model over one dataset."""

    model: str
    high_mean: Optional[float]
    low_mean: Optional[float]
    rho: Optional[float]
    p_value: Optional[float]
    entries: int
    skipped: int


def evaluate_models(
    entries: Sequence[DatasetEntry],
    kinds: Sequence[str],
    vectors: Mapping[str, SemanticTensor],
    relations: Optional[RelationalLexicon] = None,
    permutations: int = 0,
    seed: int = 0,
) -> list[ModelReport]:
    """Score the dataset under each model and aggregate, in declared order.

    A model whose scores have no rank variance gets rho (and p) reported as
    None rather than failing the whole run.
    """
    reports: list[ModelReport] = []
    for kind in kinds:
        kind = canonical_model_kind(kind)
        scored, skipped = score_entries(entries, kind, vectors, relations)
        high, low = high_low_means(scored)
        rho: Optional[float] = None
        p_value: Optional[float] = None
        if len(scored) >= 2:
            model_scores = [value for _, value in scored]
            human_scores = [float(entry.score) for entry, _ in scored]
            try:
                rho = spearman_rho(model_scores, human_scores)
                if permutations:
                    p_value = permutation_pvalue(
                        model_scores, human_scores, iterations=permutations, seed=seed
                    )
            except UndefinedCorrelationError:
                rho = None
        reports.append(
            ModelReport(
                model=kind,
                high_mean=high,
                low_mean=low,
                rho=rho,
                p_value=p_value,
                entries=len(scored),
                skipped=skipped,
            )
        )
    return reports


def _cell(value: Optional[float]) -> str:
    return f"{value:.2f}" if value is not None else "-"


def render_report(reports: Sequence[ModelReport]) -> str:
    """Fixed-width text table, models in the given order, two decimals."""
    if not reports:
        raise ValueError("no model reports to render")
    lines = [f"{'Model':<16}{'High':>8}{'Low':>8}{'rho':>8}"]
    for r in reports:
        lines.append(
            f"{r.model:<16}{_cell(r.high_mean):>8}{_cell(r.low_mean):>8}{_cell(r.rho):>8}"
        )
    return "\n".join(lines) + "\n"


def report_json(reports: Sequence[ModelReport]) -> str:
    """The same aggregates as a machine-readable JSON document."""
    payload = [
        {
            "model": r.model,
            "high_mean": r.high_mean,
            "low_mean": r.low_mean,
            "rho": r.rho,
            "p_value": r.p_value,
            "entries": r.entries,
            "skipped": r.skipped,
        }
        for r in reports
    ]
    return json.dumps({"models": payload}, indent=2, sort_keys=True) + "\n"
