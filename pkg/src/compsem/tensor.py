"""Sparse tensors over a fixed semantic basis.

Every word meaning in this package is a sparse array of association weights
over a shared r-dimensional basis of context words: order 1 for atomic words
(nouns and ordinary lexical vectors), order 2 for transitive verbs, order 3
for ditransitives. Entries are stored as a map from index tuples to weights
and exact zeros are never stored, so two tensors are equal precisely when
their entry maps are equal.

All operations are pure: tensors are never mutated after construction and
may be shared freely across threads.
"""

from __future__ import annotations

import math
from types import MappingProxyType
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "ShapeMismatchError",
    "VocabIndex",
    "SemanticTensor",
    "kron",
    "pointwise",
    "add",
    "inner",
    "cosine",
    "dumps_tensor",
    "loads_tensor",
    "dump_tensor",
    "load_tensor",
]


class ShapeMismatchError(ValueError):
    """Operands have incompatible order or dimension."""


class VocabIndex:
    """Ordered basis of context words with lemma <-> index lookup.

    Indices are contiguous from 0, in the order the lemmas were given.
    """

    __slots__ = ("basis_words", "lookup")

    def __init__(self, basis_words: Iterable[str]):
        words = tuple(basis_words)
        lookup: dict[str, int] = {}
        for i, w in enumerate(words):
            if w in lookup:
                raise ValueError(f"duplicate basis lemma {w!r}")
            lookup[w] = i
        self.basis_words = words
        self.lookup = lookup

    def __len__(self) -> int:
        return len(self.basis_words)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.lookup

    def __iter__(self) -> Iterator[str]:
        return iter(self.basis_words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VocabIndex):
            return NotImplemented
        return self.basis_words == other.basis_words

    def __repr__(self) -> str:
        return f"VocabIndex({len(self)} words)"

    def index(self, lemma: str) -> int:
        return self.lookup[lemma]

    def save(self, fp: IO[str]) -> None:
        """Write one basis lemma per line; the line number is the index."""
        for w in self.basis_words:
            fp.write(w + "\n")

    @classmethod
    def load(cls, fp: IO[str]) -> "VocabIndex":
        return cls(line.rstrip("\n") for line in fp if line.rstrip("\n"))


class SemanticTensor:
    """Sparse order-m array of association weights over a fixed basis.

    Parameters
    ----------
    order:
        Number of axes, at least 1.
    dim:
        Size of every axis (the basis size r).
    entries:
        Mapping from m-tuples of indices to weights. Zero weights are
        dropped so the stored form is canonical.
    """

    __slots__ = ("order", "dim", "_entries")

    def __init__(self, order: int, dim: int, entries: Mapping[tuple[int, ...], float] = ()):
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        clean: dict[tuple[int, ...], float] = {}
        for key, value in dict(entries).items():
            key = tuple(int(i) for i in key)
            if len(key) != order:
                raise ValueError(f"index tuple {key} has length {len(key)}, expected {order}")
            if any(i < 0 or i >= dim for i in key):
                raise ValueError(f"index tuple {key} out of range for dim {dim}")
            value = float(value)
            if value != 0.0:
                clean[key] = value
        self.order = order
        self.dim = dim
        self._entries = clean

    @classmethod
    def _make(cls, order: int, dim: int, entries: dict[tuple[int, ...], float]) -> "SemanticTensor":
        # internal fast path; entries must already be canonical
        t = cls.__new__(cls)
        t.order = order
        t.dim = dim
        t._entries = entries
        return t

    @classmethod
    def zero(cls, order: int, dim: int) -> "SemanticTensor":
        return cls(order, dim, {})

    @classmethod
    def vector(cls, values: Iterable[float]) -> "SemanticTensor":
        """Build an order-1 tensor from a dense sequence of weights."""
        vals = list(values)
        return cls(1, len(vals), {(i,): v for i, v in enumerate(vals) if v})

    @classmethod
    def from_dense(cls, array: np.ndarray) -> "SemanticTensor":
        array = np.asarray(array, dtype=float)
        if array.ndim < 1 or len(set(array.shape)) != 1:
            raise ValueError(f"dense array must be hypercubic, got shape {array.shape}")
        entries = {tuple(int(i) for i in idx): float(array[idx]) for idx in np.ndindex(array.shape)}
        return cls(array.ndim, array.shape[0], entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.order)
        for key, value in self._entries.items():
            out[key] = value
        return out

    @property
    def entries(self) -> Mapping[tuple[int, ...], float]:
        """Read-only view of the canonical entry map."""
        return MappingProxyType(self._entries)

    def sorted_entries(self) -> list[tuple[tuple[int, ...], float]]:
        """Entries sorted lexicographically by index tuple (row-major for order 2)."""
        return sorted(self._entries.items())

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def norm(self) -> float:
        return math.sqrt(math.fsum(v * v for v in self._entries.values()))

    def __getitem__(self, key: int | tuple[int, ...]) -> float:
        if isinstance(key, int):
            key = (key,)
        if len(key) != self.order:
            raise KeyError(f"index tuple {key} has length {len(key)}, expected {self.order}")
        return self._entries.get(tuple(key), 0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemanticTensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and self._entries == other._entries
        )

    def __repr__(self) -> str:
        return f"SemanticTensor(order={self.order}, dim={self.dim}, nnz={self.nnz()})"


def _check_same_shape(a: SemanticTensor, b: SemanticTensor) -> None:
    if a.order != b.order or a.dim != b.dim:
        raise ShapeMismatchError(
            f"shape mismatch: order {a.order} dim {a.dim} vs order {b.order} dim {b.dim}"
        )


def kron(a: SemanticTensor, b: SemanticTensor) -> SemanticTensor:
    """Kronecker (outer) product; the result order is a.order + b.order.

    Entry (i1..ip, j1..jq) is a(i1..ip) * b(j1..jq). Not commutative.
    """
    if a.dim != b.dim:
        raise ShapeMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    entries: dict[tuple[int, ...], float] = {}
    for ka, va in a._entries.items():
        for kb, vb in b._entries.items():
            w = va * vb
            if w != 0.0:
                entries[ka + kb] = w
    return SemanticTensor._make(a.order + b.order, a.dim, entries)


def pointwise(a: SemanticTensor, b: SemanticTensor) -> SemanticTensor:
    """Entry-wise product; the support is the intersection of supports."""
    _check_same_shape(a, b)
    small, large = (a, b) if a.nnz() <= b.nnz() else (b, a)
    entries: dict[tuple[int, ...], float] = {}
    for key, v in small._entries.items():
        w = large._entries.get(key)
        if w is not None:
            p = v * w
            if p != 0.0:
                entries[key] = p
    return SemanticTensor._make(a.order, a.dim, entries)


def add(a: SemanticTensor, b: SemanticTensor) -> SemanticTensor:
    """Entry-wise sum; entries cancelling to exactly zero are dropped."""
    _check_same_shape(a, b)
    entries = dict(a._entries)
    for key, v in b._entries.items():
        s = entries.get(key, 0.0) + v
        if s == 0.0:
            entries.pop(key, None)
        else:
            entries[key] = s
    return SemanticTensor._make(a.order, a.dim, entries)


def inner(a: SemanticTensor, b: SemanticTensor) -> float:
    """Inner product over matching entries (the basis is orthonormal)."""
    _check_same_shape(a, b)
    small, large = (a, b) if a.nnz() <= b.nnz() else (b, a)
    return math.fsum(
        v * large._entries[key] for key, v in small._entries.items() if key in large._entries
    )


def cosine(a: SemanticTensor, b: SemanticTensor) -> float:
    """Cosine similarity in [-1, 1].

    Returns 0 when either operand has zero norm: sparse corpora legitimately
    produce empty tensors, and evaluation must still proceed.
    """
    _check_same_shape(a, b)
    if a._entries == b._entries:
        return 1.0 if a._entries else 0.0
    na = a.norm()
    nb = b.norm()
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = inner(a, b) / (na * nb)
    return max(-1.0, min(1.0, value))


def dumps_tensor(t: SemanticTensor) -> str:
    """Serialize to text: a header line, then one sorted entry per line.

    Format: ``order=<m> dim=<r>`` followed by ``i1<TAB>...<TAB>weight`` lines,
    weights printed with 17 significant digits so reloading is exact.
    """
    lines = [f"order={t.order} dim={t.dim}"]
    for key, value in t.sorted_entries():
        lines.append("\t".join(str(i) for i in key) + f"\t{value:.17g}")
    return "\n".join(lines) + "\n"


def loads_tensor(text: str) -> SemanticTensor:
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise ValueError("empty tensor serialization")
    return _parse_tensor_lines(lines[0], lines[1:])


def _parse_tensor_lines(header: str, entry_lines: Iterable[str]) -> SemanticTensor:
    fields = header.split()
    if len(fields) != 2 or not fields[0].startswith("order=") or not fields[1].startswith("dim="):
        raise ValueError(f"bad tensor header: {header!r}")
    order = int(fields[0][len("order="):])
    dim = int(fields[1][len("dim="):])
    entries: dict[tuple[int, ...], float] = {}
    for line in entry_lines:
        parts = line.split("\t")
        if len(parts) != order + 1:
            raise ValueError(f"bad tensor entry line: {line!r}")
        entries[tuple(int(p) for p in parts[:-1])] = float(parts[-1])
    return SemanticTensor(order, dim, entries)


def dump_tensor(t: SemanticTensor, fp: IO[str]) -> None:
    fp.write(dumps_tensor(t))


def load_tensor(fp: IO[str]) -> SemanticTensor:
    return loads_tensor(fp.read())
