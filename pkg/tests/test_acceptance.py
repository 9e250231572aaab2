"""Acceptance gate: eight criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import random
import sys
import time
from itertools import combinations, product
from pathlib import Path

import pytest

from nrdsym.balance import (
    CapturingPolynomial,
    alternating_sum_oracle,
    find_capturing_polynomial,
    is_t_balanced,
    lift,
    polynomial_from_integers,
    upper_exponent,
    verify_capturing,
)
from nrdsym.cli import main as cli_main
from nrdsym.cube import (
    Coord,
    CubeFailure,
    Zero,
    lower_exponent,
    preserves_generic,
    preserves_symmetric,
    verify_cube_failure,
)
from nrdsym.instance import (
    Instance,
    LiteralInstance,
    UNARY_MAPS,
    block_instance,
    conditional_witnesses,
    desugar_literals,
    literal_non_redundancy_witnesses,
    non_redundancy_witnesses,
    or_clique_instance,
)
from nrdsym.intlin import in_integer_span, left_nullspace_mod, matmul, smith_normal_form, vecmat
from nrdsym.predicates import SymmetricPredicate, enumerate_nontrivial, expand, flip
from nrdsym.setfam import check_pairwise, exact_max_family, greedy_family
from nrdsym.table import classify

FIXTURES = Path(__file__).parent / "fixtures"


def bits(s: str) -> int:
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


def published_rows(arity: int) -> list[tuple]:
    with open(FIXTURES / f"table_arity{arity}.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    return [tuple(r) for r in rows[1:]]


def computed_rows(arity: int) -> list[tuple]:
    return [tuple(str(c) for c in rec.row()) for rec in classify(arity)]


def all_nontrivial(max_r: int) -> list[SymmetricPredicate]:
    """Every non-trivial weight set, both members of each flip pair."""
    out = []
    for r in range(1, max_r + 1):
        for p in enumerate_nontrivial(r):
            out.append(p)
            if flip(p) != p:
                out.append(flip(p))
    return out


# -- criteria --------------------------------------------------------------------

def criterion_1():
    total = 0
    for r, expected_count in zip(range(1, 5), (1, 4, 8, 18)):
        got = computed_rows(r)
        assert len(got) == expected_count, f"arity {r}: {len(got)} records"
        assert got == published_rows(r), f"arity {r} differs from the published table"
        assert all(row[5] == "no" for row in got), f"arity {r} flags a mismatch"
        total += len(got)
    assert total == 31


def criterion_2():
    got = computed_rows(5)
    assert len(got) == 34
    assert got == published_rows(5)
    flagged = {(row[1], row[3], row[4]) for row in got if row[5] == "yes"}
    assert flagged == {("{0,2,3}", "3", "2"), ("{1,2,4}", "3", "2")}


def criterion_3():
    nae = SymmetricPredicate.of(3, 1, 2)
    accepted = [(1,) + lift(a, 3, 2).coords for a in expand(nae).sorted_tuples()]
    for f in ("000", "111"):
        assert not in_integer_span(accepted, (1,) + lift(bits(f), 3, 2).coords)

    failure = preserves_symmetric(nae, 2)
    assert failure.multiplicities.nonzero() == {Coord(1): 1, Coord(2): 1, Zero: 1}
    assert [failure.row_weights[v] for v in ("11", "10", "01")] == [2, 1, 1]
    assert failure.output_weight == 0

    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli_main(["balance", "--arity", "3", "--weights", "1,2", "--t", "2", "--witness"])
    assert code == 0
    certs = [CapturingPolynomial.from_json(c) for c in json.loads(out.getvalue())["certificates"]]
    assert sorted(c.target for c in certs) == [bits("000"), bits("111")]
    assert all(c.degree == 2 and verify_capturing(c, nae) for c in certs)

    coeffs = {0: 2}
    coeffs.update({1 << i: -2 for i in range(3)})
    coeffs.update({(1 << i) | (1 << j): 2 for i, j in combinations(range(3), 2)})
    assert verify_capturing(polynomial_from_integers(3, 2, 4, coeffs, bits("000")), nae)


def criterion_4():
    checked_polys = checked_cubes = 0
    for pred in all_nontrivial(4):
        t = upper_exponent(pred)
        for f in range(1 << pred.arity):
            if not pred.accepts(f):
                poly = find_capturing_polynomial(pred, f, t)
                # re-verify from the serialized certificate
                assert verify_capturing(CapturingPolynomial.from_json(poly.to_json()), pred)
                checked_polys += 1
        k = lower_exponent(pred)
        if k >= 2:
            failure = CubeFailure.from_json(preserves_symmetric(pred, k).to_json())
            assert verify_cube_failure(failure, pred), str(pred)
            checked_cubes += 1
    assert checked_polys > 0 and checked_cubes > 0


def _brute_left_nullspace(M, q):
    return {a for a in product(range(q), repeat=len(M))
            if all(x % q == 0 for x in vecmat(a, M))}


def _span_mod(gens, q, length):
    seen = {tuple([0] * length)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                u = tuple((a + b) % q for a, b in zip(v, g))
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen


def criterion_5():
    preds5 = all_nontrivial(5)
    for pred in preds5:
        r = pred.arity
        verdicts = [is_t_balanced(pred, t).balanced for t in range(1, r + 1)]
        first = verdicts.index(True)
        assert all(verdicts[first:]), f"balancedness not monotone for {pred}"
        u, l = upper_exponent(pred), lower_exponent(pred)
        assert (u, l) == (upper_exponent(flip(pred)), lower_exponent(flip(pred)))
        assert l <= u <= r

    for pred in all_nontrivial(4):
        rel = expand(pred)
        for k in range(2, min(3, pred.arity) + 1):
            assert (preserves_symmetric(pred, k) is None) == (preserves_generic(rel, k) is None)

    rng = random.Random(20261016)
    for _ in range(150):
        M = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
        snf = smith_normal_form(M)
        assert matmul(matmul(snf.U, M), snf.V) == snf.D
        d = [x for x in snf.diagonal if x]
        assert all(b % a == 0 for a, b in zip(d, d[1:]))
        assert snf.diagonal[:len(d)] == d

    for _ in range(120):
        rows, cols, q = rng.randint(1, 4), rng.randint(1, 4), rng.randint(2, 9)
        M = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)]
        gens = left_nullspace_mod(M, q)
        assert _span_mod(gens, q, rows) == _brute_left_nullspace(M, q)

    for pred in all_nontrivial(4):
        for t in range(1, pred.arity + 1):
            if alternating_sum_oracle(pred, t, 3) is not None:
                assert not is_t_balanced(pred, t).balanced


def criterion_6():
    for k, n in [(2, 4), (2, 6), (3, 5), (3, 6)]:
        assert non_redundancy_witnesses(or_clique_instance(k, n)).non_redundant, (k, n)
    for r in range(1, 5):
        for pred in enumerate_nontrivial(r):
            assert non_redundancy_witnesses(block_instance(pred, 2 * r)).non_redundant, str(pred)
    inst = Instance(6, SymmetricPredicate.of(5, 1, 2, 4), tuple(combinations(range(6), 5)))
    report = conditional_witnesses(inst, SymmetricPredicate.of(5, 1, 2, 4, 5))
    assert report.non_redundant
    assert report.witnesses == [sum(1 << v for v in scope) for scope in inst.constraints]


def _random_literal(rng):
    r = rng.randint(1, 3)
    n = rng.randint(1, 4)
    pred = SymmetricPredicate(r, frozenset(w for w in range(r + 1) if rng.random() < 0.5))
    constraints = {tuple((rng.randrange(n), rng.choice(UNARY_MAPS)) for _ in range(r))
                   for _ in range(rng.randint(1, 4))}
    return LiteralInstance(n, pred, tuple(sorted(constraints)))


def criterion_7():
    rng = random.Random(7)
    non_redundant_seen = 0
    for _ in range(100):
        lit = _random_literal(rng)
        simp = desugar_literals(lit)
        assert len(simp.constraints) == len(lit.constraints)
        assert simp.n == lit.n * 4 * lit.predicate.arity
        if literal_non_redundancy_witnesses(lit).non_redundant:
            non_redundant_seen += 1
            assert non_redundancy_witnesses(simp).non_redundant
    assert non_redundant_seen > 0


def criterion_8():
    allowed = {1, 2, 4}
    assert len(exact_max_family(6, 5, allowed).family) == 6
    assert len(exact_max_family(5, 5, allowed).family) == 1
    for n in range(5, 13):
        for seed in range(3):
            assert check_pairwise(greedy_family(n, 5, allowed, seed), allowed) is None


CRITERIA = [
    (1, "table reproduction, arities 1-4", 5, criterion_1),
    (2, "table reproduction, arity 5", 60, criterion_2),
    (3, "NAE3 worked examples", 1, criterion_3),
    (4, "capture and cube certificates, r <= 4", 30, criterion_4),
    (5, "property suites", 120, criterion_5),
    (6, "non-redundancy checker", 60, criterion_6),
    (7, "literal-model desugaring", 30, criterion_7),
    (8, "set families", 30, criterion_8),
]


def run_criterion(number, name, limit, fn) -> tuple[bool, str]:
    start = time.perf_counter()
    error = None
    try:
        fn()
    except AssertionError as exc:
        error = f"assertion failed: {exc}" if str(exc) else "assertion failed"
    elapsed = time.perf_counter() - start
    if error is None and elapsed >= limit:
        error = f"took {elapsed:.2f}s, limit {limit}s"
    status = "PASS" if error is None else "FAIL"
    line = f"[{status}] criterion {number}: {name} ({elapsed:.2f}s / {limit}s)"
    if error:
        line += f" -- {error}"
    return error is None, line


@pytest.mark.parametrize("number, name, limit, fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_acceptance(number, name, limit, fn, capsys):
    ok, line = run_criterion(number, name, limit, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
