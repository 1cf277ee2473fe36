"""Co-occurrence counting and distributional word vectors.

The input corpus is UTF-8 text with one sentence per line and tokens
separated by single spaces. Each token is a lemma, optionally suffixed with
``_POS`` (an uppercase tag). The tag is ignored while counting contexts but
is preserved for the relation extractor, so a tagged and an untagged corpus
produce the same counts.

Counting slides a window over every sentence: each token within ``window``
positions of a target, in the same sentence, counts once as a context of
that target. Basis selection keeps the most frequent lemmas, and vectors are
weighted either by the probability ratio

    p(context | target) / p(context)

restricted to the basis, or by TF/IDF with sentences as documents.
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Literal, Mapping, Sequence

from .tensor import SemanticTensor, VocabIndex

__all__ = [
    "CorpusFormatError",
    "CooccurrenceModel",
    "WeightingScheme",
    "strip_pos",
    "read_corpus",
    "count_cooccurrences",
    "merge_models",
    "select_basis",
    "build_vector",
    "load_stoplist",
    "save_counts",
    "load_counts",
    "save_vector_lexicon",
    "load_vector_lexicon",
]

logger = logging.getLogger(__name__)

_POS_SUFFIX = re.compile(r"_[A-Z][A-Z0-9$]*\Z")


class CorpusFormatError(ValueError):
    """A corpus, counts, or lexicon file violates its line format."""


def strip_pos(token: str) -> str:
    """Drop a trailing ``_POS`` tag (uppercase) if present."""
    return _POS_SUFFIX.sub("", token)


def read_corpus(fp: IO[str]) -> Iterator[list[str]]:
    """Yield one token list per non-blank line, validating spacing.

    Tokens keep their POS suffixes; strip them with :func:`strip_pos` where
    only lemmas are wanted. Malformed lines (tabs, doubled or stray spaces)
    raise :class:`CorpusFormatError` with the line number.
    """
    for lineno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        if "\t" in line:
            raise CorpusFormatError(f"line {lineno}: tab character in corpus line")
        tokens = line.split(" ")
        if any(not t for t in tokens):
            raise CorpusFormatError(f"line {lineno}: empty token (check spacing)")
        yield tokens


@dataclass
class CooccurrenceModel:
    """Raw counts from which vectors are weighted.

    ``context_counts`` maps target lemma -> context lemma -> count;
    ``context_totals`` sums each lemma's appearances as a context, and
    ``doc_freq`` counts the sentences containing each lemma (for TF/IDF).
    Models are treated as immutable once counted.
    """

    target_counts: dict[str, int] = field(default_factory=dict)
    context_counts: dict[str, Counter] = field(default_factory=dict)
    context_totals: dict[str, int] = field(default_factory=dict)
    doc_freq: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0
    total_sentences: int = 0

    def context_count(self, target: str, context: str) -> int:
        ctx = self.context_counts.get(target)
        return ctx.get(context, 0) if ctx is not None else 0


def count_cooccurrences(sentences: Iterable[Sequence[str]], window: int) -> CooccurrenceModel:
    """Count sliding-window co-occurrences over tokenized sentences.

    POS suffixes are stripped from every token. Windows never cross sentence
    boundaries; blank sentences are skipped and not counted.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    model = CooccurrenceModel()
    target_counts = model.target_counts
    context_counts = model.context_counts
    context_totals = model.context_totals
    doc_freq = model.doc_freq
    for sentence in sentences:
        lemmas = [strip_pos(t) for t in sentence]
        if not lemmas:
            continue
        model.total_sentences += 1
        model.total_tokens += len(lemmas)
        for lemma in set(lemmas):
            doc_freq[lemma] = doc_freq.get(lemma, 0) + 1
        n = len(lemmas)
        for i, target in enumerate(lemmas):
            target_counts[target] = target_counts.get(target, 0) + 1
            ctx = context_counts.get(target)
            if ctx is None:
                ctx = context_counts[target] = Counter()
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j == i:
                    continue
                c = lemmas[j]
                ctx[c] += 1
                context_totals[c] = context_totals.get(c, 0) + 1
    return model


def merge_models(models: Iterable[CooccurrenceModel]) -> CooccurrenceModel:
    """Merge partial counts (for sharded counting) by plain addition."""
    merged = CooccurrenceModel()
    for m in models:
        merged.total_tokens += m.total_tokens
        merged.total_sentences += m.total_sentences
        for k, v in m.target_counts.items():
            merged.target_counts[k] = merged.target_counts.get(k, 0) + v
        for k, v in m.context_totals.items():
            merged.context_totals[k] = merged.context_totals.get(k, 0) + v
        for k, v in m.doc_freq.items():
            merged.doc_freq[k] = merged.doc_freq.get(k, 0) + v
        for t, ctx in m.context_counts.items():
            dest = merged.context_counts.get(t)
            if dest is None:
                merged.context_counts[t] = Counter(ctx)
            else:
                dest.update(ctx)
    return merged


@dataclass(frozen=True)
class WeightingScheme:
    """How raw counts become vector weights, plus the model knobs.

    ``kind`` is ``probability-ratio`` or ``tf-idf``; ``window`` is tokens per
    side; ``basis_size`` is the number of basis words kept.
    """

    kind: Literal["probability-ratio", "tf-idf"] = "probability-ratio"
    window: int = 5
    basis_size: int = 2000

    def __post_init__(self):
        if self.kind not in ("probability-ratio", "tf-idf"):
            raise ValueError(f"unknown weighting kind {self.kind!r}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.basis_size < 1:
            raise ValueError("basis_size must be >= 1")


def select_basis(model: CooccurrenceModel, k: int, stoplist: frozenset | set = frozenset()) -> VocabIndex:
    """The k most frequent lemmas, minus the stoplist.

    Ordered by descending token count, ties broken by ascending lemma so the
    basis is deterministic. Fewer than k candidates means all of them.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    candidates = [(lemma, c) for lemma, c in model.target_counts.items() if lemma not in stoplist]
    candidates.sort(key=lambda item: (-item[1], item[0]))
    return VocabIndex(lemma for lemma, _ in candidates[:k])


def build_vector(
    target: str,
    model: CooccurrenceModel,
    vocab: VocabIndex,
    scheme: WeightingScheme,
) -> SemanticTensor:
    """Weighted context vector of ``target`` over the basis.

    Probability-ratio weight for basis word n_i:

        [count(t, n_i) / sum_j count(t, n_j)] /
        [context_totals(n_i) / sum_j context_totals(n_j)]

    TF/IDF weight: count(t, n_i) * ln(total_sentences / doc_freq(n_i)).
    Unknown targets give an empty vector (logged, not an error).
    """
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    dim = len(vocab)
    ctx = model.context_counts.get(target)
    if ctx is None:
        logger.warning("no counts for target lemma %r; returning empty vector", target)
        return SemanticTensor.zero(1, dim)
    entries: dict[tuple[int, ...], float] = {}
    if scheme.kind == "probability-ratio":
        target_total = sum(ctx.get(w, 0) for w in vocab.basis_words)
        context_total = sum(model.context_totals.get(w, 0) for w in vocab.basis_words)
        if target_total == 0 or context_total == 0:
            return SemanticTensor.zero(1, dim)
        for i, w in enumerate(vocab.basis_words):
            c = ctx.get(w, 0)
            if c == 0:
                continue
            # c > 0 implies context_totals[w] >= c > 0
            entries[(i,)] = (c / target_total) / (model.context_totals[w] / context_total)
    else:  # tf-idf
        sentences = model.total_sentences
        for i, w in enumerate(vocab.basis_words):
            c = ctx.get(w, 0)
            if c == 0:
                continue
            df = model.doc_freq.get(w, 0)
            if df == 0:
                continue
            weight = c * math.log(sentences / df)
            if weight != 0.0:
                entries[(i,)] = weight
    return SemanticTensor(1, dim, entries)


def load_stoplist(fp: IO[str]) -> frozenset:
    return frozenset(line.strip() for line in fp if line.strip())


def save_counts(model: CooccurrenceModel, fp: IO[str]) -> None:
    """Persist a count model as sorted, deterministic TSV records.

    Record kinds: ``META`` (token and sentence totals), ``T`` (lemma token
    counts), ``D`` (lemma sentence frequencies, needed to rebuild TF/IDF
    weights), ``C`` (target/context pair counts).
    """
    fp.write(f"META\t{model.total_tokens}\t{model.total_sentences}\n")
    for lemma in sorted(model.target_counts):
        fp.write(f"T\t{lemma}\t{model.target_counts[lemma]}\n")
    for lemma in sorted(model.doc_freq):
        fp.write(f"D\t{lemma}\t{model.doc_freq[lemma]}\n")
    for target in sorted(model.context_counts):
        ctx = model.context_counts[target]
        for context in sorted(ctx):
            fp.write(f"C\t{target}\t{context}\t{ctx[context]}\n")


def load_counts(fp: IO[str]) -> CooccurrenceModel:
    model = CooccurrenceModel()
    saw_meta = False
    for lineno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        kind = fields[0]
        try:
            if kind == "META" and len(fields) == 3:
                model.total_tokens = int(fields[1])
                model.total_sentences = int(fields[2])
                saw_meta = True
            elif kind == "T" and len(fields) == 3:
                model.target_counts[fields[1]] = int(fields[2])
            elif kind == "D" and len(fields) == 3:
                model.doc_freq[fields[1]] = int(fields[2])
            elif kind == "C" and len(fields) == 4:
                target, context, count = fields[1], fields[2], int(fields[3])
                ctx = model.context_counts.setdefault(target, Counter())
                ctx[context] += count
                model.context_totals[context] = model.context_totals.get(context, 0) + count
            else:
                raise ValueError("unrecognized record")
        except ValueError as exc:
            raise CorpusFormatError(f"line {lineno}: bad counts record {line!r}") from exc
    if not saw_meta and (model.target_counts or model.context_counts):
        raise CorpusFormatError("counts file is missing its META record")
    return model


def save_vector_lexicon(
    vectors: Mapping[str, SemanticTensor], fp: IO[str], vocab_name: str
) -> None:
    """One word per line: ``lemma<TAB>i:weight...`` with ascending indices.

    The header line names the vocabulary file the indices refer to and its
    size. Weights keep 17 significant digits so reloading is exact.
    """
    dims = {v.dim for v in vectors.values()}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector dimensions: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    fp.write(f"#vocab\t{vocab_name}\tdim\t{dim}\n")
    for lemma in sorted(vectors):
        v = vectors[lemma]
        if v.order != 1:
            raise ValueError(f"lexicon entry {lemma!r} has order {v.order}, expected 1")
        cells = "\t".join(f"{key[0]}:{w:.17g}" for key, w in v.sorted_entries())
        fp.write(lemma + ("\t" + cells if cells else "") + "\n")


def load_vector_lexicon(fp: IO[str]) -> tuple[str, dict[str, SemanticTensor]]:
    """Read a vector lexicon; returns (vocabulary file name, lemma -> vector)."""
    header = fp.readline().rstrip("\n")
    fields = header.split("\t")
    if len(fields) != 4 or fields[0] != "#vocab" or fields[2] != "dim":
        raise CorpusFormatError(f"bad lexicon header: {header!r}")
    vocab_name = fields[1]
    dim = int(fields[3])
    vectors: dict[str, SemanticTensor] = {}
    for lineno, line in enumerate(fp, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        lemma = parts[0]
        entries: dict[tuple[int, ...], float] = {}
        last = -1
        for cell in parts[1:]:
            try:
                index_text, weight_text = cell.split(":", 1)
                index = int(index_text)
                weight = float(weight_text)
            except ValueError as exc:
                raise CorpusFormatError(f"line {lineno}: bad cell {cell!r}") from exc
            if index <= last:
                raise CorpusFormatError(f"line {lineno}: indices not ascending")
            last = index
            entries[(index,)] = weight
        try:
            vectors[lemma] = SemanticTensor(1, dim, entries)
        except ValueError as exc:
            raise CorpusFormatError(f"line {lineno}: {exc}") from exc
    return vocab_name, vectors
