"""The universal k-cube partial operation and preservation tests.

Rows of the input matrix are indexed by the nonzero v in {0,1}^k, listed
11..1 first (``"11", "10", "01"`` for k = 2). A column of type Coord(i)
carries bit v_i at row v; CoCoord(i) carries its complement.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, islice, product
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .predicates import SymmetricPredicate, TupleRelation, popcount

GENERIC_GUARD = 10**7
CHUNK = 1 << 14

ZERO, ONE, COORD, COCOORD = "zero", "one", "coord", "cocoord"


@dataclass(frozen=True, order=True)
class ColumnType:
    kind: str
    index: int = 0  # 1-based coordinate for coord/cocoord

    def __post_init__(self):
        if self.kind not in (ZERO, ONE, COORD, COCOORD):
            raise InvalidInputError(f"unknown column type {self.kind!r}")
        if (self.kind in (COORD, COCOORD)) != (self.index >= 1):
            raise InvalidInputError(f"bad index {self.index} for {self.kind}")

    def value(self, v: Sequence[int]) -> int:
        """Entry of this column at the row indexed by v."""
        if self.kind == ZERO:
            return 0
        if self.kind == ONE:
            return 1
        bit = v[self.index - 1]
        return bit if self.kind == COORD else 1 - bit

    def __str__(self):
        if self.kind in (ZERO, ONE):
            return self.kind.capitalize()
        return f"{'Coord' if self.kind == COORD else 'CoCoord'}({self.index})"


Zero = ColumnType(ZERO)
One = ColumnType(ONE)


def Coord(i: int) -> ColumnType:
    return ColumnType(COORD, i)


def CoCoord(i: int) -> ColumnType:
    return ColumnType(COCOORD, i)


def column_types(k: int) -> list[ColumnType]:
    """The 2k+2 domain column types in canonical order."""
    return [Zero, One] + [Coord(i) for i in range(1, k + 1)] + [CoCoord(i) for i in range(1, k + 1)]


def output_bit(ct: ColumnType) -> int:
    return 1 if ct.kind in (ONE, COCOORD) else 0


def row_indices(k: int) -> list[tuple[int, ...]]:
    return [v for v in product((1, 0), repeat=k) if any(v)]


def row_label(v: Sequence[int]) -> str:
    return "".join(map(str, v))


def materialize(columns: Sequence[ColumnType], k: int) -> tuple[list[int], int]:
    """Input rows (as tuple bitmasks, coordinate j at bit j) and the output row."""
    rows = [sum(ct.value(v) << j for j, ct in enumerate(columns)) for v in row_indices(k)]
    out = sum(output_bit(ct) << j for j, ct in enumerate(columns))
    return rows, out


@dataclass(frozen=True)
class MultiplicityVector:
    k: int
    counts: tuple[int, ...]  # aligned with column_types(k)

    def __post_init__(self):
        if len(self.counts) != 2 * self.k + 2 or any(c < 0 for c in self.counts):
            raise InvalidInputError(f"bad multiplicity vector {self.counts} for k={self.k}")

    @property
    def arity(self) -> int:
        return sum(self.counts)

    def __getitem__(self, ct: ColumnType) -> int:
        return self.counts[column_types(self.k).index(ct)]

    def columns(self) -> list[ColumnType]:
        """One column per coordinate, grouped by type in canonical order."""
        return [ct for ct, c in zip(column_types(self.k), self.counts) for _ in range(c)]

    def row_weight(self, v: Sequence[int]) -> int:
        k = self.k
        one = self.counts[1]
        coord = self.counts[2:2 + k]
        cocoord = self.counts[2 + k:]
        return one + sum(c for c, b in zip(coord, v) if b) + sum(c for c, b in zip(cocoord, v) if not b)

    def output_weight(self) -> int:
        return self.counts[1] + sum(self.counts[2 + self.k:])

    def to_json(self) -> dict:
        k = self.k
        return {
            "zero": self.counts[0],
            "one": self.counts[1],
            "coord": list(self.counts[2:2 + k]),
            "cocoord": list(self.counts[2 + k:]),
        }

    @classmethod
    def from_json(cls, k: int, obj: dict) -> "MultiplicityVector":
        try:
            counts = (obj["zero"], obj["one"], *obj["coord"], *obj["cocoord"])
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed counts: {obj!r}") from exc
        return cls(k, tuple(int(c) for c in counts))

    def nonzero(self) -> dict[ColumnType, int]:
        return {ct: c for ct, c in zip(column_types(self.k), self.counts) if c}


@dataclass(frozen=True)
class CubeFailure:
    k: int
    multiplicities: MultiplicityVector
    row_weights: dict[str, int]
    output_weight: int

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "counts": self.multiplicities.to_json(),
            "row_weights": dict(self.row_weights),
            "output_weight": self.output_weight,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CubeFailure":
        try:
            k = int(obj["k"])
            mv = MultiplicityVector.from_json(k, obj["counts"])
            return cls(k, mv, {str(a): int(b) for a, b in obj["row_weights"].items()},
                       int(obj["output_weight"]))
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidInputError(f"malformed cube failure: {exc}") from exc


def _check_k(pred_arity: int, k: int) -> None:
    if not isinstance(k, int) or not 2 <= k <= pred_arity:
        raise InvalidInputError(f"k must lie in [2, {pred_arity}], got {k!r}")


def preserves_symmetric(pred: SymmetricPredicate, k: int) -> Optional[CubeFailure]:
    """First multiplicity vector witnessing non-preservation, or None.

    Vectors are visited as sorted multisets of type indices
    (``combinations_with_replacement`` order), i.e. descending lexicographic
    order on the count vector.
    """
    pred.require_nontrivial()
    _check_k(pred.arity, k)
    types = column_types(k)
    rows = row_indices(k)
    # weight contribution of one column of each type, per row and at the output
    contrib = np.array([[ct.value(v) for v in rows] + [output_bit(ct)] for ct in types],
                       dtype=np.int16)
    in_w = np.zeros(pred.arity + 1, dtype=bool)
    in_w[list(pred.weights)] = True
    combos = combinations_with_replacement(range(len(types)), pred.arity)
    while True:
        block = np.array(list(islice(combos, CHUNK)), dtype=np.int64)
        if not block.size:
            return None
        counts = np.zeros((len(block), len(types)), dtype=np.int16)
        for j in range(pred.arity):
            counts[np.arange(len(block)), block[:, j]] += 1
        weights = counts @ contrib
        fails = in_w[weights[:, :-1]].all(axis=1) & ~in_w[weights[:, -1]]
        hits = np.flatnonzero(fails)
        if hits.size:
            i = hits[0]
            mv = MultiplicityVector(k, tuple(int(c) for c in counts[i]))
            labels = {row_label(v): int(w) for v, w in zip(rows, weights[i, :-1])}
            return CubeFailure(k, mv, labels, int(weights[i, -1]))


def preserves_generic(rel: TupleRelation, k: int) -> Optional[list[ColumnType]]:
    """First per-coordinate column assignment witnessing non-preservation."""
    if not isinstance(k, int) or k < 2:
        raise InvalidInputError(f"k must be >= 2, got {k!r}")
    types = column_types(k)
    if len(types) ** rel.arity > GENERIC_GUARD:
        raise SizeLimitError(f"(2k+2)^r = {len(types) ** rel.arity} exceeds {GENERIC_GUARD}")
    for columns in product(types, repeat=rel.arity):
        rows, out = materialize(columns, k)
        if out not in rel and all(row in rel for row in rows):
            return list(columns)
    return None


def lower_exponent(pred: SymmetricPredicate) -> int:
    pred.require_nontrivial()
    best = 1
    for k in range(2, pred.arity + 1):
        if preserves_symmetric(pred, k) is not None:
            best = k
    return best


def verify_cube_failure(failure: CubeFailure, pred: SymmetricPredicate) -> bool:
    """Re-check a failure certificate by building the actual input matrix."""
    mv = failure.multiplicities
    if mv.k != failure.k or mv.arity != pred.arity or failure.k < 2:
        return False
    columns = mv.columns()
    rows, out = materialize(columns, failure.k)
    labels = [row_label(v) for v in row_indices(failure.k)]
    actual = {label: popcount(row) for label, row in zip(labels, rows)}
    if actual != failure.row_weights or popcount(out) != failure.output_weight:
        return False
    return all(w in pred.weights for w in actual.values()) and failure.output_weight not in pred.weights
