"""Uniform set families with restricted intersections and witness sets.

Used for the two unresolved arity-5 predicates: a family whose pairwise
intersections avoid the forbidden sizes is a conditionally non-redundant
instance with witness X_A = A.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .instance import Instance
from .predicates import SymmetricPredicate

MAX_GREEDY_N = 30
MAX_EXACT_CANDIDATES = 20000
MAX_WITNESS_N = 20
DEFAULT_NODE_BUDGET = 1_000_000

OUTSIDE_W = "outside-W"


def _mask(s: Iterable[int]) -> int:
    return sum(1 << e for e in s)


@dataclass(frozen=True)
class Family:
    n: int
    block_size: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise InvalidInputError(f"n must be a non-negative integer, got {self.n!r}")
        cleaned = []
        for idx, s in enumerate(self.sets):
            t = tuple(sorted(int(e) for e in s))
            if len(set(t)) != len(t) or len(t) != self.block_size:
                raise InvalidInputError(f"set {idx} does not have {self.block_size} distinct elements")
            if any(not 0 <= e < self.n for e in t):
                raise InvalidInputError(f"set {idx} has an element outside [0, {self.n})")
            cleaned.append(t)
        if len(set(cleaned)) != len(cleaned):
            raise InvalidInputError("duplicate sets in family")
        object.__setattr__(self, "sets", tuple(cleaned))

    def __len__(self):
        return len(self.sets)

    def masks(self) -> list[int]:
        return [_mask(s) for s in self.sets]

    def to_json(self) -> dict:
        return {"n": self.n, "block_size": self.block_size, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_json(cls, obj) -> "Family":
        if not isinstance(obj, dict) or set(obj) != {"n", "block_size", "sets"}:
            raise InvalidInputError("family must have exactly the keys n, block_size, sets")
        try:
            return cls(obj["n"], obj["block_size"], tuple(tuple(s) for s in obj["sets"]))
        except TypeError as exc:
            raise InvalidInputError(f"malformed family: {exc}") from exc


def check_pairwise(fam: Family, allowed: Iterable[int]) -> Optional[tuple[int, int]]:
    """Indices (i, j), i < j, of the first pair whose intersection size is not allowed."""
    allowed = set(allowed)
    masks = fam.masks()
    for i, j in combinations(range(len(masks)), 2):
        if (masks[i] & masks[j]).bit_count() not in allowed:
            return i, j
    return None


def _check_bounds(n: int, s: int, limit: int) -> None:
    if not (isinstance(n, int) and isinstance(s, int) and 1 <= s <= n <= limit):
        raise SizeLimitError(f"need 1 <= s <= n <= {limit}, got n={n}, s={s}")


def greedy_family(n: int, s: int, allowed: Iterable[int], order_seed: int = 0) -> Family:
    _check_bounds(n, s, MAX_GREEDY_N)
    allowed = set(allowed)
    candidates = list(combinations(range(n), s))
    if order_seed:
        random.Random(order_seed).shuffle(candidates)
    kept, kept_masks = [], []
    for cand in candidates:
        m = _mask(cand)
        if all((m & k).bit_count() in allowed for k in kept_masks):
            kept.append(cand)
            kept_masks.append(m)
    return Family(n, s, tuple(kept))


@dataclass
class MaxFamilyResult:
    family: Family
    exact: bool  # False when the node budget ran out: the family is only a lower bound
    nodes: int


class _BudgetExhausted(Exception):
    pass


def _compatibility_graph(candidates: list[tuple[int, ...]], allowed: set[int]) -> list[int]:
    masks = np.array([_mask(c) for c in candidates], dtype=np.int64)
    ok = np.zeros(max(allowed | {0}) + 64, dtype=bool)
    ok[[a for a in allowed if a >= 0]] = True
    adj = []
    for i, m in enumerate(masks):
        row = ok[np.bitwise_count(masks & m)]
        row[i] = False
        bits = np.packbits(row, bitorder="little").tobytes()
        adj.append(int.from_bytes(bits, "little"))
    return adj


def _max_clique(adj: list[int], start: list[int], budget: int) -> tuple[list[int], bool, int]:
    """Branch and bound with a greedy-colouring bound; vertices in index order."""
    best = list(start)
    nodes = 0

    def colour_order(cand: int) -> list[tuple[int, int]]:
        order, uncoloured, colour = [], cand, 0
        while uncoloured:
            colour += 1
            q = uncoloured
            while q:
                v = (q & -q).bit_length() - 1
                q &= ~adj[v] & ~(1 << v)
                uncoloured &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(cand: int, clique: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise _BudgetExhausted
        for v, colour in reversed(colour_order(cand)):
            if len(clique) + colour <= len(best):
                return
            clique.append(v)
            nxt = cand & adj[v]
            if nxt:
                expand(nxt, clique)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    try:
        expand((1 << len(adj)) - 1, [])
    except _BudgetExhausted:
        return best, False, nodes
    return best, True, nodes


def exact_max_family(
    n: int, s: int, allowed: Iterable[int], node_budget: int = DEFAULT_NODE_BUDGET
) -> MaxFamilyResult:
    """Maximum family with all pairwise intersections in ``allowed``."""
    if not (isinstance(n, int) and isinstance(s, int) and 1 <= s <= n):
        raise SizeLimitError(f"need 1 <= s <= n, got n={n}, s={s}")
    if comb(n, s) > MAX_EXACT_CANDIDATES:
        raise SizeLimitError(f"C({n},{s}) = {comb(n, s)} exceeds {MAX_EXACT_CANDIDATES}")
    allowed = set(allowed)
    candidates = list(combinations(range(n), s))
    adj = _compatibility_graph(candidates, allowed)
    seed = greedy_family(n, s, allowed) if n <= MAX_GREEDY_N else Family(n, s, ())
    index = {c: i for i, c in enumerate(candidates)}
    clique, exact, nodes = _max_clique(adj, [index[c] for c in seed.sets], node_budget)
    sets = tuple(candidates[i] for i in sorted(clique))
    return MaxFamilyResult(Family(n, s, sets), exact, nodes)


@dataclass
class WitnessFamilyReport:
    witnesses: list[Optional[tuple[int, ...]]]

    @property
    def valid(self) -> bool:
        return all(w is not None for w in self.witnesses)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "witnesses": [None if w is None else list(w) for w in self.witnesses],
        }


def check_witness_family(
    fam: Family, W: Iterable[int], target: Union[str, Iterable[int]] = OUTSIDE_W
) -> WitnessFamilyReport:
    """Least X_A (by bitmask) with |A & X_A| on target and |B & X_A| in W for B != A.

    ``target`` is ``"outside-W"`` or an explicit set T of allowed sizes.
    """
    if fam.n > MAX_WITNESS_N:
        raise SizeLimitError(f"n = {fam.n} exceeds witness-search guard {MAX_WITNESS_N}")
    W = set(W)
    s = fam.block_size
    in_w = np.array([size in W for size in range(s + 1)])
    if isinstance(target, str):
        if target != OUTSIDE_W:
            raise InvalidInputError(f"target must be {OUTSIDE_W!r} or a set, got {target!r}")
        on_target = ~in_w
    else:
        T = set(target)
        on_target = np.array([size in T for size in range(s + 1)])
    xs = np.arange(1 << fam.n, dtype=np.int64)
    sizes = [np.bitwise_count(xs & m).astype(np.int64) for m in fam.masks()]
    outside = np.zeros(xs.shape, dtype=np.int32)
    for sz in sizes:
        outside += ~in_w[sz]
    witnesses: list[Optional[tuple[int, ...]]] = []
    for sz in sizes:
        others_ok = (outside - ~in_w[sz]) == 0
        hits = np.flatnonzero(on_target[sz] & others_ok)
        if hits.size:
            x = int(xs[hits[0]])
            witnesses.append(tuple(e for e in range(fam.n) if x >> e & 1))
        else:
            witnesses.append(None)
    return WitnessFamilyReport(witnesses)


def family_to_instance(fam: Family, pred: SymmetricPredicate) -> Instance:
    if pred.arity != fam.block_size:
        raise InvalidInputError(f"predicate arity {pred.arity} != block size {fam.block_size}")
    return Instance(fam.n, pred, fam.sets)
