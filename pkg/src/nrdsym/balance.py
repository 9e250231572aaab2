"""Degree-t lifts, t-balancedness and capturing polynomials.

A degree-t multilinear polynomial is a linear form in the lifted
coordinates plus a constant, so capture questions become integer-span
questions about the vectors ``(1, lift(a))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Iterable, Optional

import numpy as np

from .errors import (
    IncompleteSearchError,
    InvalidInputError,
    NoCertificateError,
    SizeLimitError,
)
from .intlin import SnfDecomposition, left_nullspace_mod, smith_normal_form, transpose
from .predicates import SymmetricPredicate, expand, popcount, str_to_tuple, tuple_to_str

MAX_ORACLE_TERMS = 7
MAX_ORACLE_MODULUS = 9
DEFAULT_COEFFICIENT_BOUND = 10**7


# -- lifts -------------------------------------------------------------------


@lru_cache(maxsize=None)
def lift_subsets(r: int, t: int) -> tuple[int, ...]:
    """Nonempty subsets of [r] with size <= t, as bitmasks, by size then value."""
    if r < 1 or t < 1:
        raise InvalidInputError(f"need r >= 1 and t >= 1, got r={r}, t={t}")
    subsets = [s for s in range(1, 1 << r) if popcount(s) <= t]
    return tuple(sorted(subsets, key=lambda s: (popcount(s), s)))


@dataclass(frozen=True)
class LiftIndex:
    arity: int
    degree: int
    subsets: tuple[int, ...]

    @classmethod
    def build(cls, r: int, t: int) -> "LiftIndex":
        return cls(r, t, lift_subsets(r, t))

    def __len__(self):
        return len(self.subsets)


@dataclass(frozen=True)
class LiftedPoint:
    coords: tuple[int, ...]
    source: int


def lift(x: int, r: int, t: int) -> LiftedPoint:
    if not 0 <= x < 1 << r:
        raise InvalidInputError(f"tuple {x} does not fit in {r} bits")
    return LiftedPoint(tuple(int(s & x == s) for s in lift_subsets(r, t)), x)


def ext(x: int, r: int, t: int) -> tuple[int, ...]:
    """``(1, lift(x))``: the lifted point with a leading constant coordinate."""
    return (1,) + lift(x, r, t).coords


def subset_key(s: int) -> str:
    """Subset bitmask -> comma-joined 1-based coordinates (``""`` for the empty set)."""
    return ",".join(str(i + 1) for i in range(s.bit_length()) if s >> i & 1)


def parse_subset_key(key: str) -> int:
    if key == "":
        return 0
    try:
        coords = [int(part) for part in key.split(",")]
    except ValueError as exc:
        raise InvalidInputError(f"bad subset key {key!r}") from exc
    if any(c < 1 for c in coords) or len(set(coords)) != len(coords):
        raise InvalidInputError(f"bad subset key {key!r}")
    return sum(1 << (c - 1) for c in coords)


# -- capturing polynomials ---------------------------------------------------


@dataclass(frozen=True)
class CapturingPolynomial:
    arity: int
    degree: int
    modulus: int
    coefficients: dict[int, int]  # subset bitmask (0 = constant term) -> residue
    target: int

    def evaluate(self, x: int) -> int:
        return sum(c for s, c in self.coefficients.items() if s & x == s) % self.modulus

    def to_json(self) -> dict:
        ordered = sorted(self.coefficients, key=lambda s: (popcount(s), s))
        return {
            "modulus": self.modulus,
            "target": tuple_to_str(self.target, self.arity),
            "degree": self.degree,
            "coefficients": {subset_key(s): self.coefficients[s] % self.modulus for s in ordered},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CapturingPolynomial":
        try:
            target = obj["target"]
            coefficients = {parse_subset_key(k): int(v) % int(obj["modulus"])
                            for k, v in obj["coefficients"].items()}
            return cls(len(target), int(obj["degree"]), int(obj["modulus"]),
                       coefficients, str_to_tuple(target))
        except (KeyError, TypeError, AttributeError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"malformed certificate: {exc}") from exc


def polynomial_from_integers(
    r: int, degree: int, modulus: int, coefficients: dict[int, int], target: int
) -> CapturingPolynomial:
    """Reduce integer coefficients mod q, dropping the ones that vanish."""
    reduced = {s: c % modulus for s, c in coefficients.items() if c % modulus}
    return CapturingPolynomial(r, degree, modulus, reduced, target)


def verify_capturing(poly: CapturingPolynomial, pred: SymmetricPredicate) -> bool:
    if poly.arity != pred.arity:
        raise InvalidInputError(f"polynomial arity {poly.arity} != predicate arity {pred.arity}")
    if poly.modulus < 2:
        return False
    full = (1 << poly.arity) - 1
    for s, c in poly.coefficients.items():
        if c % poly.modulus and (popcount(s) > poly.degree or s & ~full):
            return False
    if poly.evaluate(poly.target) == 0:
        return False
    return all(poly.evaluate(y) == 0 for y in expand(pred).tuples)


# -- balancedness ------------------------------------------------------------


@dataclass
class BalanceReport:
    predicate: SymmetricPredicate
    degree: int
    balanced: bool
    violating_point: Optional[int] = None
    # integer weights z_a with sum_a z_a * (1, lift(a)) == (1, lift(violating_point))
    combination: Optional[dict[int, int]] = field(default=None, repr=False)

    def to_json(self) -> dict:
        r = self.predicate.arity
        out = {"predicate": self.predicate.to_json(), "t": self.degree, "balanced": self.balanced}
        if self.violating_point is not None:
            out["violating_point"] = tuple_to_str(self.violating_point, r)
            out["lifted"] = list(lift(self.violating_point, r, self.degree).coords)
            out["combination"] = {tuple_to_str(a, r): z for a, z in self.combination.items() if z}
        return out


class _LiftedSystem:
    """Columns ``(1, lift(a))`` for a in R, with one shared Smith decomposition."""

    def __init__(self, pred: SymmetricPredicate, t: int):
        self.pred = pred
        self.t = t
        self.accepted = expand(pred).sorted_tuples()
        self.rejected = [x for x in range(1 << pred.arity) if not pred.accepts(x)]
        self.matrix = transpose([ext(a, pred.arity, t) for a in self.accepted])
        self.snf: SnfDecomposition = smith_normal_form(self.matrix)

    def target(self, f: int) -> tuple[int, ...]:
        return ext(f, self.pred.arity, self.t)

    def span_solution(self, f: int) -> Optional[list[int]]:
        return self.snf.solve(self.target(f))


def _check_degree(pred: SymmetricPredicate, t: int) -> None:
    if not isinstance(t, int) or not 1 <= t <= pred.arity:
        raise InvalidInputError(f"degree must lie in [1, {pred.arity}], got {t!r}")


@lru_cache(maxsize=512)
def _system(pred: SymmetricPredicate, t: int) -> _LiftedSystem:
    return _LiftedSystem(pred, t)


def is_t_balanced(pred: SymmetricPredicate, t: int) -> BalanceReport:
    pred.require_nontrivial()
    _check_degree(pred, t)
    system = _system(pred, t)
    for f in system.rejected:
        z = system.span_solution(f)
        if z is not None:
            return BalanceReport(pred, t, False, f, dict(zip(system.accepted, z)))
    return BalanceReport(pred, t, True)


def upper_exponent(pred: SymmetricPredicate) -> int:
    pred.require_nontrivial()
    for t in range(1, pred.arity + 1):
        if is_t_balanced(pred, t).balanced:
            return t
    # the degree-r indicator polynomial captures every rejected tuple
    raise AssertionError(f"{pred} is not r-balanced")


def _prime_factors(n: int) -> list[int]:
    n, p, out = abs(n), 2, []
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def _smallest_prime_not_dividing(n: int) -> int:
    p = 2
    while n % p == 0 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        p += 1
    return p


def candidate_moduli(system: _LiftedSystem, f: int) -> list[int]:
    """Prime powers to try when extracting a capture of f.

    Powers p^1..p^(v+1) for each prime p of a nonzero elementary divisor,
    where v is the largest p-adic valuation among the divisors; then 2 and
    3 when the lifted matrix is rank deficient, then the smallest prime not
    dividing some residual that the deficient rows leave on (1, lift(f)).
    """
    divisors = [d for d in system.snf.diagonal if d]
    primes = sorted({p for d in divisors for p in _prime_factors(d)})
    out = []
    for p in primes:
        top = max(_valuation(d, p) for d in divisors)
        out.extend(p**a for a in range(1, top + 2))
    out.sort()
    rows = len(system.matrix)
    if system.snf.rank < rows:
        residual = system.snf.residual(system.target(f))
        free_rows = [i for i in range(rows)
                     if i >= len(system.snf.diagonal) or system.snf.diagonal[i] == 0]
        extra = [2, 3]
        leftovers = [residual[i] for i in free_rows if residual[i]]
        if leftovers:
            extra.append(_smallest_prime_not_dividing(leftovers[0]))
        out.extend(q for q in extra if q not in out)
    return out


def find_capturing_polynomial(pred: SymmetricPredicate, f: int, t: int) -> CapturingPolynomial:
    pred.require_nontrivial()
    _check_degree(pred, t)
    r = pred.arity
    if not 0 <= f < 1 << r:
        raise InvalidInputError(f"target {f} does not fit in {r} bits")
    if pred.accepts(f):
        raise NoCertificateError(f"{tuple_to_str(f, r)} is accepted by {pred}")
    system = _system(pred, t)
    if system.span_solution(f) is not None:
        raise NoCertificateError(
            f"(1, lift({tuple_to_str(f, r)})) lies in the integer span at degree {t}")
    target = system.target(f)
    keys = (0,) + lift_subsets(r, t)
    for q in candidate_moduli(system, f):
        for gen in left_nullspace_mod(system.matrix, q, system.snf):
            if sum(g * x for g, x in zip(gen, target)) % q:
                poly = polynomial_from_integers(r, t, q, dict(zip(keys, gen)), f)
                if verify_capturing(poly, pred):
                    return poly
    raise IncompleteSearchError(
        f"no capture of {tuple_to_str(f, r)} for {pred} at degree {t} among candidate moduli")


# -- independent oracles -----------------------------------------------------


@dataclass(frozen=True)
class AlternatingSumViolation:
    target: int
    positives: tuple[int, ...]
    negatives: tuple[int, ...]

    @property
    def summands(self) -> list[tuple[int, int]]:
        """``[(+1, a1), (-1, a2), (+1, a3), ...]`` in alternating order."""
        out = []
        for i, a in enumerate(self.positives):
            out.append((1, a))
            if i < len(self.negatives):
                out.append((-1, self.negatives[i]))
        return out


def alternating_sum_oracle(
    pred: SymmetricPredicate, t: int, m_max: int
) -> Optional[AlternatingSumViolation]:
    """Search odd alternating sums of at most m_max lifted accepted tuples
    for one that lands on a lifted rejected tuple."""
    if not isinstance(m_max, int) or m_max < 1 or m_max % 2 == 0:
        raise InvalidInputError(f"m_max must be a positive odd integer, got {m_max!r}")
    if m_max > MAX_ORACLE_TERMS:
        raise SizeLimitError(f"m_max {m_max} exceeds guard {MAX_ORACLE_TERMS}")
    _check_degree(pred, t)
    r = pred.arity
    points = {x: np.array(lift(x, r, t).coords, dtype=np.int64) for x in range(1 << r)}
    accepted = [x for x in range(1 << r) if pred.accepts(x)]
    rejected = [x for x in range(1 << r) if not pred.accepts(x)]
    dim = len(lift_subsets(r, t))
    for m in range(3, m_max + 1, 2):
        n_neg = (m - 1) // 2
        neg_sums: dict[bytes, tuple[int, ...]] = {}
        for neg in combinations_with_replacement(accepted, n_neg):
            key = sum((points[a] for a in neg), np.zeros(dim, dtype=np.int64)).tobytes()
            neg_sums.setdefault(key, neg)
        for pos in combinations_with_replacement(accepted, n_neg + 1):
            pos_sum = sum(points[a] for a in pos)
            for f in rejected:
                neg = neg_sums.get((pos_sum - points[f]).tobytes())
                if neg is not None:
                    return AlternatingSumViolation(f, pos, neg)
    return None


def brute_force_capture_oracle(
    pred: SymmetricPredicate,
    f: int,
    t: int,
    moduli: Iterable[int],
    coefficient_bound: int = DEFAULT_COEFFICIENT_BOUND,
) -> Optional[CapturingPolynomial]:
    """Exhaustive search over all coefficient vectors in [0, q)^(1+N).

    ``coefficient_bound`` caps the number of vectors enumerated per modulus.
    """
    _check_degree(pred, t)
    r = pred.arity
    subsets = (0,) + lift_subsets(r, t)
    if r > 3 and len(subsets) - 1 > 8:
        raise SizeLimitError(f"lift dimension {len(subsets) - 1} too large for brute force")
    moduli = list(moduli)
    for q in moduli:
        if not 2 <= q <= MAX_ORACLE_MODULUS:
            raise SizeLimitError(f"modulus {q} outside [2, {MAX_ORACLE_MODULUS}]")
        if q ** len(subsets) > coefficient_bound:
            raise SizeLimitError(f"{q}^{len(subsets)} coefficient vectors exceed the bound")
    dim = len(subsets)
    accepted = expand(pred).sorted_tuples()
    # evaluation matrix: entry [x, S] = 1 iff S is contained in x
    acc = np.array([[int(s & a == s) for s in subsets] for a in accepted], dtype=np.int64)
    tgt = np.array([int(s & f == s) for s in subsets], dtype=np.int64)
    tail = min(dim, 4)
    for q in moduli:
        grid = np.array(list(product(range(q), repeat=tail)), dtype=np.int64)
        acc_tail = grid @ acc[:, dim - tail:].T
        tgt_tail = grid @ tgt[dim - tail:]
        for head in product(range(q), repeat=dim - tail):
            head_arr = np.array(head, dtype=np.int64)
            on_r = (acc[:, :dim - tail] @ head_arr + acc_tail) % q
            at_f = (tgt[:dim - tail] @ head_arr + tgt_tail) % q
            hits = np.flatnonzero((on_r == 0).all(axis=1) & (at_f != 0))
            if hits.size:
                coeffs = list(head) + grid[hits[0]].tolist()
                poly = polynomial_from_integers(r, t, q, dict(zip(subsets, coeffs)), f)
                if verify_capturing(poly, pred):
                    return poly
    return None


def lift_dimension(r: int, t: int) -> int:
    return sum(comb(r, s) for s in range(1, min(t, r) + 1))
