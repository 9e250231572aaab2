"""Desk-scale CSP instances and exhaustive non-redundancy checking.

Assignments are bitmasks over the variables (variable 0 at bit 0); their
string form lists variables 0..n-1 left to right. Witness searches scan
assignments in ascending bitmask order and report the least witness.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .predicates import SymmetricPredicate, TupleRelation, str_to_tuple, tuple_to_str

DEFAULT_MAX_N = 24
CHUNK_BITS = 20

UNARY_MAPS = ("id", "neg", "zero", "one")
_MAP_ALIASES = {"identity": "id", "not": "neg", "0": "zero", "1": "one"}

Predicate = Union[SymmetricPredicate, TupleRelation]


def max_n() -> int:
    """The exhaustive-search ceiling; NRD_MAX_N overrides it at your own risk."""
    raw = os.environ.get("NRD_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"NRD_MAX_N must be an integer, got {raw!r}") from exc


def _check_guard(n: int) -> None:
    limit = max_n()
    if n > limit:
        raise SizeLimitError(f"n = {n} exceeds the exhaustive guard {limit} (set NRD_MAX_N)")


def _accepts(pred: Predicate, x: int) -> bool:
    if isinstance(pred, SymmetricPredicate):
        return pred.accepts(x)
    return x in pred


@dataclass(frozen=True)
class Instance:
    n: int
    predicate: Predicate
    constraints: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise InvalidInputError(f"n must be a non-negative integer, got {self.n!r}")
        r = self.predicate.arity
        scopes = tuple(tuple(int(v) for v in scope) for scope in self.constraints)
        seen, seen_sets = set(), set()
        for idx, scope in enumerate(scopes):
            if len(scope) != r:
                raise InvalidInputError(f"constraint {idx} has arity {len(scope)}, expected {r}")
            if any(not 0 <= v < self.n for v in scope):
                raise InvalidInputError(f"constraint {idx} uses a variable outside [0, {self.n})")
            if len(set(scope)) != r:
                raise InvalidInputError(f"constraint {idx} repeats a variable")
            if scope in seen:
                raise InvalidInputError(f"constraint {idx} duplicates an earlier scope")
            if isinstance(self.predicate, SymmetricPredicate):
                key = frozenset(scope)
                if key in seen_sets:
                    raise InvalidInputError(
                        f"constraint {idx} is a permutation of an earlier scope")
                seen_sets.add(key)
            seen.add(scope)
        object.__setattr__(self, "constraints", scopes)

    def __len__(self):
        return len(self.constraints)

    def restricted_tuple(self, scope: Sequence[int], assignment: int) -> int:
        return sum((assignment >> v & 1) << j for j, v in enumerate(scope))

    def to_json(self) -> dict:
        if not isinstance(self.predicate, SymmetricPredicate):
            raise InvalidInputError("only symmetric-predicate instances serialize to JSON")
        return {
            "n": self.n,
            "predicate": self.predicate.to_json(),
            "constraints": [list(scope) for scope in self.constraints],
        }

    @classmethod
    def from_json(cls, obj) -> "Instance":
        if not isinstance(obj, dict) or set(obj) != {"n", "predicate", "constraints"}:
            raise InvalidInputError("instance must have exactly the keys n, predicate, constraints")
        constraints = obj["constraints"]
        if not isinstance(constraints, list) or not all(
            isinstance(c, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in c)
            for c in constraints
        ):
            raise InvalidInputError("constraints must be lists of variable indices")
        return cls(obj["n"], SymmetricPredicate.from_json(obj["predicate"]),
                   tuple(tuple(c) for c in constraints))


def _as_assignment(n: int, assignment: Union[int, str]) -> int:
    if isinstance(assignment, str):
        if len(assignment) != n:
            raise InvalidInputError(f"assignment has length {len(assignment)}, expected {n}")
        return str_to_tuple(assignment) if n else 0
    if not 0 <= assignment < 1 << n:
        raise InvalidInputError(f"assignment {assignment} does not fit in {n} bits")
    return assignment


def evaluate(instance: Instance, assignment: Union[int, str]) -> list[bool]:
    x = _as_assignment(instance.n, assignment)
    return [_accepts(instance.predicate, instance.restricted_tuple(scope, x))
            for scope in instance.constraints]


@dataclass
class WitnessReport:
    n: int
    witnesses: list[Optional[int]]

    @property
    def non_redundant(self) -> bool:
        return all(w is not None for w in self.witnesses)

    @property
    def first_missing(self) -> Optional[int]:
        return next((i for i, w in enumerate(self.witnesses) if w is None), None)

    def to_json(self) -> dict:
        return {
            "non_redundant": self.non_redundant,
            "first_missing": self.first_missing,
            "witnesses": [None if w is None else tuple_to_str(w, self.n) for w in self.witnesses],
        }


def _weights_or_tuples(instance: Instance, scope: Sequence[int], xs: np.ndarray) -> np.ndarray:
    """Per-assignment Hamming weight (symmetric) or restricted tuple code (generic)."""
    if isinstance(instance.predicate, SymmetricPredicate):
        mask = sum(1 << v for v in scope)
        return np.bitwise_count(xs & mask).astype(np.int64)
    code = np.zeros_like(xs)
    for j, v in enumerate(scope):
        code |= ((xs >> v) & 1) << j
    return code


def _lookup(instance: Instance, accept: Optional[frozenset] = None) -> np.ndarray:
    """Boolean table indexed by weight (symmetric) or tuple code (generic)."""
    pred = instance.predicate
    if isinstance(pred, SymmetricPredicate):
        table = np.zeros(pred.arity + 1, dtype=bool)
        for w in (pred.weights if accept is None else accept):
            table[w] = True
        return table
    table = np.zeros(1 << pred.arity, dtype=bool)
    table[list(pred.tuples if accept is None else accept)] = True
    return table


def _compact(instance: Instance) -> tuple[Instance, list[int]]:
    """Drop variables that occur in no scope; returns the relabelled
    instance and the original index of each kept variable.

    Unused variables are 0 in any least witness, and relabelling keeps
    the relative bit order, so witnesses map back unchanged."""
    used = sorted({v for scope in instance.constraints for v in scope})
    if len(used) == instance.n:
        return instance, used
    pos = {v: i for i, v in enumerate(used)}
    scopes = tuple(tuple(pos[v] for v in scope) for scope in instance.constraints)
    return Instance(len(used), instance.predicate, scopes), used


def _scan(instance: Instance, falsify_ok: np.ndarray) -> WitnessReport:
    """Least assignment satisfying every other constraint while C takes a
    value marked in ``falsify_ok`` (which never overlaps the accepted set)."""
    full_n = instance.n
    instance, used = _compact(instance)
    _check_guard(instance.n)
    m = len(instance.constraints)
    accept = _lookup(instance)
    witnesses: list[Optional[int]] = [None] * m
    total = 1 << instance.n
    chunk = 1 << CHUNK_BITS
    for start in range(0, total, chunk):
        if all(w is not None for w in witnesses):
            break
        xs = np.arange(start, min(total, start + chunk), dtype=np.int64)
        values = [_weights_or_tuples(instance, scope, xs) for scope in instance.constraints]
        violated = np.zeros(xs.shape, dtype=np.int32)
        for val in values:
            violated += ~accept[val]
        for i, val in enumerate(values):
            if witnesses[i] is not None:
                continue
            hits = np.flatnonzero(falsify_ok[val] & (violated == 1))
            if hits.size:
                witnesses[i] = int(xs[hits[0]])
    if len(used) != full_n:
        witnesses = [None if w is None else sum(1 << v for j, v in enumerate(used) if w >> j & 1)
                     for w in witnesses]
    return WitnessReport(full_n, witnesses)


def non_redundancy_witnesses(instance: Instance) -> WitnessReport:
    return _scan(instance, ~_lookup(instance))


def conditional_witnesses(instance: Instance, relaxed: SymmetricPredicate) -> WitnessReport:
    """Witnesses must put the deleted constraint in the relaxed set minus R."""
    pred = instance.predicate
    if not isinstance(pred, SymmetricPredicate):
        raise InvalidInputError("conditional checking needs a symmetric predicate")
    if relaxed.arity != pred.arity or not pred.weights <= relaxed.weights:
        raise InvalidInputError(f"{relaxed} does not relax {pred}")
    return _scan(instance, _lookup(instance, relaxed.weights - pred.weights))


def or_clique_instance(k: int, n: int) -> Instance:
    if not (isinstance(k, int) and isinstance(n, int) and 2 <= k <= n <= DEFAULT_MAX_N):
        raise InvalidInputError(f"need 2 <= k <= n <= {DEFAULT_MAX_N}, got k={k}, n={n}")
    pred = SymmetricPredicate(k, frozenset(range(1, k + 1)))
    return Instance(n, pred, tuple(combinations(range(n), k)))


def block_instance(pred: SymmetricPredicate, n: int) -> Instance:
    pred.require_nontrivial()
    r = pred.arity
    if n < r:
        raise InvalidInputError(f"need n >= r = {r}, got {n}")
    return Instance(n, pred, tuple(tuple(range(b * r, b * r + r)) for b in range(n // r)))


# -- literal model -----------------------------------------------------------


def apply_map(g: str, bit: int) -> int:
    if g == "id":
        return bit
    if g == "neg":
        return 1 - bit
    return 0 if g == "zero" else 1


@dataclass(frozen=True)
class LiteralInstance:
    n: int
    predicate: SymmetricPredicate
    constraints: tuple[tuple[tuple[int, str], ...], ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise InvalidInputError(f"n must be a non-negative integer, got {self.n!r}")
        r = self.predicate.arity
        cleaned = []
        for idx, scope in enumerate(self.constraints):
            if len(scope) != r:
                raise InvalidInputError(f"constraint {idx} has arity {len(scope)}, expected {r}")
            entries = []
            for var, g in scope:
                g = _MAP_ALIASES.get(g, g)
                if g not in UNARY_MAPS:
                    raise InvalidInputError(f"constraint {idx}: unknown unary map {g!r}")
                if not isinstance(var, int) or not 0 <= var < self.n:
                    raise InvalidInputError(f"constraint {idx} uses a variable outside [0, {self.n})")
                entries.append((var, g))
            cleaned.append(tuple(entries))
        if len(set(cleaned)) != len(cleaned):
            raise InvalidInputError("duplicate literal constraints")
        object.__setattr__(self, "constraints", tuple(cleaned))

    def evaluate(self, assignment: int) -> list[bool]:
        return [
            self.predicate.accepts(
                sum(apply_map(g, assignment >> var & 1) << j for j, (var, g) in enumerate(scope)))
            for scope in self.constraints
        ]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "predicate": self.predicate.to_json(),
            "constraints": [[{"var": v, "map": g} for v, g in scope] for scope in self.constraints],
        }

    @classmethod
    def from_json(cls, obj) -> "LiteralInstance":
        if not isinstance(obj, dict) or set(obj) != {"n", "predicate", "constraints"}:
            raise InvalidInputError("literal instance must have exactly the keys n, predicate, constraints")
        try:
            constraints = tuple(
                tuple((entry["var"], entry["map"]) if isinstance(entry, dict) else (entry, "id")
                      for entry in scope)
                for scope in obj["constraints"]
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed literal constraint: {exc}") from exc
        return cls(obj["n"], SymmetricPredicate.from_json(obj["predicate"]), constraints)


def literal_non_redundancy_witnesses(lit: LiteralInstance) -> WitnessReport:
    """Plain exhaustive evaluator for the literal model."""
    _check_guard(lit.n)
    witnesses: list[Optional[int]] = [None] * len(lit.constraints)
    for x in range(1 << lit.n):
        values = lit.evaluate(x)
        if values.count(False) == 1:
            i = values.index(False)
            if witnesses[i] is None:
                witnesses[i] = x
    return WitnessReport(lit.n, witnesses)


def desugared_index(i: int, g: str, j: int, r: int) -> int:
    """Variable index of the copy of x_i tagged with map g at position j (1-based)."""
    return i * (len(UNARY_MAPS) * r) + UNARY_MAPS.index(g) * r + (j - 1)


def desugar_literals(lit: LiteralInstance) -> Instance:
    r = lit.predicate.arity
    scopes = tuple(
        tuple(desugared_index(var, g, j, r) for j, (var, g) in enumerate(scope, start=1))
        for scope in lit.constraints
    )
    return Instance(lit.n * len(UNARY_MAPS) * r, lit.predicate, scopes)
