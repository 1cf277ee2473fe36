"""Pregroup types, reduction search, and composition recipes.

A word carries a sequence of simple terms, each an atom with an integer
adjoint exponent z (0 plain, -1 left adjoint ``^l``, +1 right adjoint
``^r``; iterated adjoints beyond one step parse and reduce too). Adjacent
terms x^(z) x^(z+1) over the same atom cancel, and a word sequence is
grammatical for a target atom when some chain of cancellations leaves
exactly that atom standing.

The reduction witness records the cancelled pairs as cups over the
concatenated term sequence. ``recipe`` turns a witness into the composition
plan the semantics executes: which word is the head and which word feeds
each of its argument slots.

Concrete type syntax: atoms are single letters with optional digits (``n``,
``s``, ``n2``), adjoints are ``^l``/``^r`` suffixes (stackable, ``n^ll``),
``1`` is the empty type, and whitespace between atoms is optional, so
``n^rsn^l`` and ``n^r s n^l`` parse alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "TypeParseError",
    "UnsupportedStructureError",
    "SimpleTerm",
    "PregroupType",
    "ReductionWitness",
    "CompositionRecipe",
    "parse_type",
    "reduce",
    "recipe",
]


class TypeParseError(ValueError):
    """Bad concrete type syntax; ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class UnsupportedStructureError(ValueError):
    """A reduction whose cup pattern is not head-plus-arguments."""


@dataclass(frozen=True)
class SimpleTerm:
    base: str
    adjoint: int = 0

    def __str__(self) -> str:
        if self.adjoint > 0:
            return self.base + "^" + "r" * self.adjoint
        if self.adjoint < 0:
            return self.base + "^" + "l" * (-self.adjoint)
        return self.base


@dataclass(frozen=True)
class PregroupType:
    """Ordered simple terms; the empty sequence is the unit type 1."""

    terms: tuple[SimpleTerm, ...] = ()

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.terms) if self.terms else "1"

    def __len__(self) -> int:
        return len(self.terms)


def parse_type(text: str) -> PregroupType:
    """Parse concrete syntax into a type, reporting errors with a column."""
    terms: list[SimpleTerm] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "1":
            i += 1
            if i < n and text[i] == "^":
                raise TypeParseError("the unit type takes no adjoints", column=i + 1)
            continue
        if not ch.isalpha():
            raise TypeParseError(f"unexpected character {ch!r}", column=i + 1)
        j = i + 1
        while j < n and text[j].isdigit():
            j += 1
        base = text[i:j]
        i = j
        z = 0
        while i < n and text[i] == "^":
            i += 1
            if i >= n or text[i] not in "lr":
                raise TypeParseError("dangling '^' (expected 'l' or 'r')", column=i + 1)
            while i < n and text[i] in "lr":
                z += 1 if text[i] == "r" else -1
                i += 1
        terms.append(SimpleTerm(base, z))
    return PregroupType(tuple(terms))


@dataclass(frozen=True)
class ReductionWitness:
    """Cups are (i, j) index pairs over the concatenated terms, i < j.

    Cups are pairwise disjoint and non-crossing; survivors are the indices
    in no cup, in original order.
    """

    cups: frozenset[tuple[int, int]]
    survivors: tuple[int, ...]


def _contractible(left: tuple[str, int], right: tuple[str, int]) -> bool:
    return left[0] == right[0] and right[1] == left[1] + 1


def reduce(types: Sequence[PregroupType], target: str) -> Optional[ReductionWitness]:
    """Search for a reduction of the concatenated types to the target atom.

    Backtracks over every order of adjacent cancellations (with failure
    memoization), so a None result means no chain of cancellations works.
    Cups produced this way always nest, hence never cross.
    """
    terms = tuple(t for typ in types for t in typ.terms)
    flat = tuple((t.base, t.adjoint) for t in terms)
    n = len(flat)
    target_term = (target, 0)

    # parity screen: a cancellation removes two same-base terms, so the
    # target base must occur an odd number of times and every other base an
    # even number; this prunes nothing reachable
    counts: dict[str, int] = {}
    for base, _ in flat:
        counts[base] = counts.get(base, 0) + 1
    if counts.get(target, 0) % 2 != 1:
        return None
    if any(c % 2 for base, c in counts.items() if base != target):
        return None

    failed: set[tuple[int, ...]] = set()

    def search(remaining: tuple[int, ...]) -> Optional[list[tuple[int, int]]]:
        if len(remaining) == 1:
            return [] if flat[remaining[0]] == target_term else None
        if remaining in failed:
            return None
        for k in range(len(remaining) - 1):
            i, j = remaining[k], remaining[k + 1]
            if _contractible(flat[i], flat[j]):
                rest = search(remaining[:k] + remaining[k + 2:])
                if rest is not None:
                    rest.append((i, j))
                    return rest
        failed.add(remaining)
        return None

    cups = search(tuple(range(n)))
    if cups is None:
        return None
    in_cup = {i for cup in cups for i in cup}
    return ReductionWitness(
        cups=frozenset(cups),
        survivors=tuple(i for i in range(n) if i not in in_cup),
    )


@dataclass(frozen=True)
class CompositionRecipe:
    """Head word position, its argument count, and the word feeding each
    adjoint slot of the head, in the order the adjoints appear in its type."""

    head: int
    arity: int
    slots: tuple[int, ...]


def recipe(witness: ReductionWitness, word_types: Sequence[PregroupType]) -> CompositionRecipe:
    """Turn a witness into a head-and-arguments composition plan.

    Requires the supported shape: one word contributes the surviving term
    (the head) and every cup links an adjoint term of the head to a plain
    term of some other word. Anything else (cups between two non-head
    words, head-internal cups, reversed polarities) is rejected rather than
    guessed at.
    """
    terms = tuple(t for typ in word_types for t in typ.terms)
    word_of: list[int] = []
    for w, typ in enumerate(word_types):
        word_of.extend([w] * len(typ.terms))
    if witness.survivors and max(witness.survivors) >= len(terms):
        raise ValueError("witness does not match the given word types")
    if any(j >= len(terms) for _, j in witness.cups):
        raise ValueError("witness does not match the given word types")
    if len(witness.survivors) != 1:
        raise UnsupportedStructureError(
            f"expected exactly one surviving term, got {len(witness.survivors)}"
        )
    head = word_of[witness.survivors[0]]

    feeds: dict[int, int] = {}
    for i, j in sorted(witness.cups):
        wi, wj = word_of[i], word_of[j]
        if wi == head and wj == head:
            raise UnsupportedStructureError(f"cup ({i},{j}) links two terms of the head word")
        if wi != head and wj != head:
            raise UnsupportedStructureError(f"cup ({i},{j}) links two non-head words")
        head_end, arg_end = (i, j) if wi == head else (j, i)
        if terms[head_end].adjoint == 0:
            raise UnsupportedStructureError(
                f"cup ({i},{j}): head side must be an adjoint term"
            )
        if terms[arg_end].adjoint != 0:
            raise UnsupportedStructureError(
                f"cup ({i},{j}): argument side must be a plain term"
            )
        feeds[head_end] = word_of[arg_end]

    head_start = sum(len(t.terms) for t in word_types[:head])
    slots: list[int] = []
    for offset, term in enumerate(word_types[head].terms):
        if term.adjoint != 0:
            index = head_start + offset
            if index not in feeds:
                raise UnsupportedStructureError(
                    f"adjoint term {index} of the head is not cancelled"
                )
            slots.append(feeds[index])
    return CompositionRecipe(head=head, arity=len(slots), slots=tuple(slots))
