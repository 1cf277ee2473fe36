"""Learning tensors for relational words from observed argument tuples.

A relational word (verb, adjective, adverb) with m argument slots is
represented as an order-m tensor built from the corpus occurrences of the
word with its arguments: for each occurrence, take the Kronecker product of
the argument vectors, then sum over occurrences. Summation is the default;
multiplying across occurrences instead is available behind a flag, although
with sparse vectors it tends to leave tensors empty.

Instances are accumulated in a canonical order (sorted by argument tuple),
so a learned lexicon is bit-identical no matter how the input stream was
ordered.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Literal, Mapping, Sequence

from .corpus import strip_pos
from .tensor import SemanticTensor, dumps_tensor, kron, pointwise, add, _parse_tensor_lines

__all__ = [
    "RelationDataError",
    "RelationInstance",
    "RelationalLexicon",
    "learn_tensor",
    "learn_lexicon",
    "extract_relations",
    "read_relations",
    "save_relations",
    "save_relational_lexicon",
    "load_relational_lexicon",
]

logger = logging.getLogger(__name__)

Accumulation = Literal["sum", "product"]


class RelationDataError(ValueError):
    """A relation instance or relations file is malformed."""


@dataclass(frozen=True)
class RelationInstance:
    """One corpus occurrence of a relational word with its ordered arguments."""

    head: str
    arguments: tuple[str, ...]

    def __post_init__(self):
        if not self.arguments:
            raise RelationDataError(f"instance of {self.head!r} has no arguments")

    @property
    def arity(self) -> int:
        return len(self.arguments)


@dataclass
class RelationalLexicon:
    """Learned tensors keyed by (lemma, arity).

    The same lemma may hold entries at several arities (transitive and
    intransitive uses are learned independently). ``provenance`` counts the
    instances actually accumulated per entry; ``skipped`` counts instances
    dropped because an argument had no vector.
    """

    entries: dict[tuple[str, int], SemanticTensor] = field(default_factory=dict)
    provenance: dict[tuple[str, int], int] = field(default_factory=dict)
    skipped: dict[tuple[str, int], int] = field(default_factory=dict)

    def get(self, lemma: str, arity: int) -> SemanticTensor | None:
        return self.entries.get((lemma, arity))

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelationalLexicon):
            return NotImplemented
        return self.entries == other.entries and self.provenance == other.provenance


def _lexicon_dim(vectors: Mapping[str, SemanticTensor]) -> int:
    for v in vectors.values():
        return v.dim
    raise ValueError("cannot learn from an empty vector lexicon")


def _accumulate(
    instances: list[RelationInstance],
    vectors: Mapping[str, SemanticTensor],
    arity: int,
    accumulation: Accumulation,
) -> tuple[SemanticTensor, int, int]:
    """Fold instances into one tensor; returns (tensor, used, skipped)."""
    dim = _lexicon_dim(vectors)
    total: SemanticTensor | None = None
    used = 0
    skipped = 0
    for inst in sorted(instances, key=lambda i: i.arguments):
        vecs = []
        missing = None
        for arg in inst.arguments:
            v = vectors.get(arg)
            if v is None:
                missing = arg
                break
            vecs.append(v)
        if missing is not None:
            skipped += 1
            continue
        term = vecs[0]
        for v in vecs[1:]:
            term = kron(term, v)
        used += 1
        if total is None:
            total = term
        elif accumulation == "sum":
            total = add(total, term)
        else:
            total = pointwise(total, term)
    if total is None:
        total = SemanticTensor.zero(arity, dim)
    return total, used, skipped


def learn_tensor(
    head: str,
    instances: Iterable[RelationInstance],
    vectors: Mapping[str, SemanticTensor],
    arity: int,
    accumulation: Accumulation = "sum",
) -> SemanticTensor:
    """Order-m tensor for ``head`` from its observed argument tuples.

    Every instance must carry exactly ``arity`` arguments for this head.
    Instances with an argument missing from the vector lexicon contribute
    nothing and are counted in a log message; an empty instance list gives
    the zero tensor.
    """
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}")
    batch = []
    for inst in instances:
        if inst.head != head:
            raise RelationDataError(f"instance head {inst.head!r} does not match {head!r}")
        if inst.arity != arity:
            raise RelationDataError(
                f"instance {inst.head} {' '.join(inst.arguments)} has arity "
                f"{inst.arity}, expected {arity}"
            )
        batch.append(inst)
    tensor, _, skipped = _accumulate(batch, vectors, arity, accumulation)
    if skipped:
        logger.warning("%s: skipped %d instance(s) with unknown arguments", head, skipped)
    return tensor


def learn_lexicon(
    relations: Iterable[RelationInstance],
    vectors: Mapping[str, SemanticTensor],
    accumulation: Accumulation = "sum",
) -> RelationalLexicon:
    """Learn one tensor per (head, arity) group of the instance stream.

    The result is independent of stream order. Per-instance problems are
    counted, not fatal.
    """
    groups: dict[tuple[str, int], list[RelationInstance]] = {}
    for inst in relations:
        groups.setdefault((inst.head, inst.arity), []).append(inst)
    lexicon = RelationalLexicon()
    for key in sorted(groups):
        tensor, used, skipped = _accumulate(groups[key], vectors, key[1], accumulation)
        lexicon.entries[key] = tensor
        lexicon.provenance[key] = used
        lexicon.skipped[key] = skipped
        if skipped:
            logger.warning(
                "%s/%d: skipped %d instance(s) with unknown arguments", key[0], key[1], skipped
            )
    return lexicon


def _pos_of(token: str) -> str:
    m = re.search(r"_([A-Z][A-Z0-9$]*)\Z", token)
    return m.group(1) if m else ""


def extract_relations(sentences: Iterable[Sequence[str]]) -> Iterator[RelationInstance]:
    """Heuristic verb-relation extractor over a POS-tagged corpus.

    For each verb-tagged token, the nearest noun-tagged token to its left is
    the subject and the nearest to its right the object, within the
    sentence. A verb with both yields a 2-argument instance, with only a
    subject a 1-argument one, and with neither nothing. This is a rough
    stand-in for a real parser; supply a relations file for anything better.
    """
    for tokens in sentences:
        tags = [_pos_of(t) for t in tokens]
        noun_positions = [i for i, tag in enumerate(tags) if tag.startswith("N")]
        for i, tag in enumerate(tags):
            if not tag.startswith("V"):
                continue
            left = max((p for p in noun_positions if p < i), default=None)
            right = min((p for p in noun_positions if p > i), default=None)
            if left is None:
                continue
            head = strip_pos(tokens[i])
            if right is None:
                yield RelationInstance(head, (strip_pos(tokens[left]),))
            else:
                yield RelationInstance(
                    head, (strip_pos(tokens[left]), strip_pos(tokens[right]))
                )


def save_relations(instances: Iterable[RelationInstance], fp: IO[str]) -> None:
    """One instance per line: ``head<TAB>arity<TAB>arg1<TAB>arg2...``."""
    for inst in instances:
        fp.write("\t".join([inst.head, str(inst.arity), *inst.arguments]) + "\n")


def read_relations(fp: IO[str]) -> Iterator[RelationInstance]:
    for lineno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise RelationDataError(f"line {lineno}: expected head, arity, arguments")
        head = fields[0]
        try:
            arity = int(fields[1])
        except ValueError as exc:
            raise RelationDataError(f"line {lineno}: bad arity {fields[1]!r}") from exc
        args = tuple(fields[2:])
        if len(args) != arity:
            raise RelationDataError(
                f"line {lineno}: instance {head!r} declares arity {arity} "
                f"but has {len(args)} argument(s)"
            )
        yield RelationInstance(head, args)


def save_relational_lexicon(lexicon: RelationalLexicon, fp: IO[str]) -> None:
    """Per-entry blocks: a ``WORD`` line, then the tensor serialization.

    ``WORD<TAB>lemma<TAB>arity<TAB>k`` where k is the instance count behind
    the entry. Blocks are sorted by (lemma, arity).
    """
    for key in sorted(lexicon.entries):
        lemma, arity = key
        k = lexicon.provenance.get(key, 0)
        fp.write(f"WORD\t{lemma}\t{arity}\t{k}\n")
        fp.write(dumps_tensor(lexicon.entries[key]))


def load_relational_lexicon(fp: IO[str]) -> RelationalLexicon:
    lexicon = RelationalLexicon()
    key: tuple[str, int] | None = None
    k = 0
    header: str | None = None
    entry_lines: list[str] = []

    def flush():
        if key is None:
            return
        if header is None:
            raise RelationDataError(f"entry {key} is missing its tensor header")
        tensor = _parse_tensor_lines(header, entry_lines)
        if tensor.order != key[1]:
            raise RelationDataError(
                f"entry {key} stores an order-{tensor.order} tensor"
            )
        lexicon.entries[key] = tensor
        lexicon.provenance[key] = k
        lexicon.skipped[key] = 0

    for lineno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("WORD\t"):
            flush()
            fields = line.split("\t")
            if len(fields) != 4:
                raise RelationDataError(f"line {lineno}: bad WORD record")
            try:
                key = (fields[1], int(fields[2]))
                k = int(fields[3])
            except ValueError as exc:
                raise RelationDataError(f"line {lineno}: bad WORD record") from exc
            header = None
            entry_lines = []
        elif key is None:
            raise RelationDataError(f"line {lineno}: content before first WORD record")
        elif line.startswith("order="):
            header = line
        else:
            entry_lines.append(line)
    flush()
    return lexicon
