"""Symmetric Boolean predicates, their tuple relations and canonical enumeration.

Tuples are bitmasks with coordinate 1 at the least-significant bit; the
string form ``"110"`` lists coordinates 1..r left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable

from .errors import InvalidInputError, SizeLimitError, TrivialPredicateError

MAX_EXPAND_ARITY = 16
MAX_ENUM_ARITY = 8


def popcount(x: int) -> int:
    return x.bit_count()


def tuple_to_str(x: int, r: int) -> str:
    return "".join(str(x >> i & 1) for i in range(r))


def str_to_tuple(s: str) -> int:
    if not s or set(s) - {"0", "1"}:
        raise InvalidInputError(f"not a bit string: {s!r}")
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


def format_weights(weights: Iterable[int]) -> str:
    """Render a weight set as ``{0,2,3}``."""
    return "{" + ",".join(str(w) for w in sorted(weights)) + "}"


def parse_weights(text: str) -> frozenset[int]:
    """Parse ``"0,2,3"`` (braces optional) into a weight set."""
    body = text.strip().strip("{}").strip()
    if not body:
        return frozenset()
    try:
        return frozenset(int(part) for part in body.split(","))
    except ValueError as exc:
        raise InvalidInputError(f"bad weight list: {text!r}") from exc


@dataclass(frozen=True)
class SymmetricPredicate:
    arity: int
    weights: frozenset[int]

    def __post_init__(self):
        if not isinstance(self.arity, int) or self.arity < 1:
            raise InvalidInputError(f"arity must be a positive integer, got {self.arity!r}")
        weights = frozenset(self.weights)
        bad = [w for w in weights if not isinstance(w, int) or not 0 <= w <= self.arity]
        if bad:
            raise InvalidInputError(f"weights {sorted(bad)} outside [0, {self.arity}]")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def of(cls, arity: int, *weights: int) -> "SymmetricPredicate":
        return cls(arity, frozenset(weights))

    @property
    def mask(self) -> int:
        """Weight-set bitmask: bit w is set iff w is accepted."""
        return sum(1 << w for w in self.weights)

    @property
    def is_trivial(self) -> bool:
        return not self.weights or len(self.weights) == self.arity + 1

    def require_nontrivial(self) -> None:
        if self.is_trivial:
            raise TrivialPredicateError(f"trivial predicate {self.label}")

    def accepts(self, x: int) -> bool:
        return popcount(x) in self.weights

    @property
    def label(self) -> str:
        return format_weights(self.weights)

    def relation_size(self) -> int:
        return sum(comb(self.arity, w) for w in self.weights)

    def to_json(self) -> dict:
        return {"arity": self.arity, "weights": sorted(self.weights)}

    @classmethod
    def from_json(cls, obj) -> "SymmetricPredicate":
        if not isinstance(obj, dict) or set(obj) != {"arity", "weights"}:
            raise InvalidInputError(f"predicate must be {{'arity', 'weights'}}, got {obj!r}")
        weights = obj["weights"]
        if not isinstance(weights, list) or len(set(weights)) != len(weights):
            raise InvalidInputError("weights must be a list without duplicates")
        if weights != sorted(weights):
            raise InvalidInputError("weights must be sorted ascending")
        return cls(obj["arity"], frozenset(weights))

    def __str__(self):
        return f"r={self.arity} W={self.label}"


@dataclass(frozen=True)
class TupleRelation:
    """Explicit relation; ``symmetric`` marks relations expanded from weights."""

    arity: int
    tuples: frozenset[int]
    symmetric: bool = False

    def __contains__(self, x: int) -> bool:
        return x in self.tuples

    def __len__(self):
        return len(self.tuples)

    def complement_tuples(self) -> "TupleRelation":
        """Coordinatewise complement of every tuple (the bit-flip image)."""
        full = (1 << self.arity) - 1
        return TupleRelation(self.arity, frozenset(x ^ full for x in self.tuples), self.symmetric)

    def sorted_tuples(self) -> list[int]:
        return sorted(self.tuples)


def expand(pred: SymmetricPredicate) -> TupleRelation:
    if pred.arity > MAX_EXPAND_ARITY:
        raise SizeLimitError(f"arity {pred.arity} exceeds expansion guard {MAX_EXPAND_ARITY}")
    tuples = frozenset(x for x in range(1 << pred.arity) if popcount(x) in pred.weights)
    return TupleRelation(pred.arity, tuples, symmetric=True)


def flip(pred: SymmetricPredicate) -> SymmetricPredicate:
    return SymmetricPredicate(pred.arity, frozenset(pred.arity - w for w in pred.weights))


def canonicalize(pred: SymmetricPredicate) -> tuple[SymmetricPredicate, bool]:
    """Pick the flip-class representative with the smaller weight bitmask."""
    other = flip(pred)
    if other.mask < pred.mask:
        return other, True
    return pred, False


def enumerate_nontrivial(r: int) -> list[SymmetricPredicate]:
    """Canonical non-trivial predicates of arity r in table order."""
    if not isinstance(r, int) or not 1 <= r <= MAX_ENUM_ARITY:
        raise SizeLimitError(f"arity must lie in [1, {MAX_ENUM_ARITY}], got {r!r}")
    full = (1 << (r + 1)) - 1
    out = []
    for mask in range(1, full):
        pred = SymmetricPredicate(r, frozenset(w for w in range(r + 1) if mask >> w & 1))
        if canonicalize(pred)[0].mask == mask:
            out.append(pred)
    return out
