from itertools import product

import pytest

from nrdsym.balance import upper_exponent
from nrdsym.cube import (
    CoCoord,
    Coord,
    CubeFailure,
    MultiplicityVector,
    One,
    Zero,
    column_types,
    lower_exponent,
    materialize,
    preserves_generic,
    preserves_symmetric,
    row_indices,
    verify_cube_failure,
)
from nrdsym.errors import InvalidInputError, SizeLimitError, TrivialPredicateError
from nrdsym.predicates import SymmetricPredicate, enumerate_nontrivial, expand, flip, popcount


def P(r, *w):
    return SymmetricPredicate.of(r, *w)


def all_predicates(max_r):
    return [p for r in range(1, max_r + 1) for p in enumerate_nontrivial(r)]


def test_nae3_k2_failure():
    failure = preserves_symmetric(P(3, 1, 2), 2)
    assert failure.multiplicities.nonzero() == {Zero: 1, Coord(1): 1, Coord(2): 1}
    assert failure.row_weights == {"11": 2, "10": 1, "01": 1}
    assert failure.output_weight == 0
    assert verify_cube_failure(failure, P(3, 1, 2))


def test_nae3_generic_matches():
    cols = preserves_generic(expand(P(3, 1, 2)), 2)
    assert cols == [Zero, Coord(1), Coord(2)]


def test_simple_preserved_cases():
    assert preserves_symmetric(P(2, 1), 2) is None
    assert preserves_symmetric(P(4, 0), 2) is None
    assert preserves_symmetric(P(4, 0, 1), 2) is not None


def test_k_range_and_trivial():
    with pytest.raises(InvalidInputError):
        preserves_symmetric(P(3, 1, 2), 4)
    with pytest.raises(TrivialPredicateError):
        preserves_symmetric(P(3, 0, 1, 2, 3), 2)


def test_generic_guard():
    with pytest.raises(SizeLimitError):
        preserves_generic(expand(P(8, 1)), 4)


def test_materialize_row_order():
    rows, out = materialize([Coord(1), CoCoord(2), One], 2)
    # rows for v = 11, 10, 01
    assert rows == [0b101, 0b111, 0b100]
    assert out == 0b110


@pytest.mark.parametrize("k", [2, 3])
def test_row_weight_formula_matches_materialized_matrix(k):
    types = column_types(k)
    for r in range(1, 5):
        for columns in product(types, repeat=r):
            counts = tuple(columns.count(ct) for ct in types)
            mv = MultiplicityVector(k, counts)
            rows, out = materialize(columns, k)
            assert [popcount(x) for x in rows] == [mv.row_weight(v) for v in row_indices(k)]
            assert popcount(out) == mv.output_weight()


@pytest.mark.parametrize("pred", [p for p in all_predicates(4) if p.arity >= 2], ids=str)
def test_symmetric_agrees_with_generic(pred):
    rel = expand(pred)
    for k in range(2, min(3, pred.arity) + 1):
        sym = preserves_symmetric(pred, k)
        gen = preserves_generic(rel, k)
        assert (sym is None) == (gen is None)
        if sym is not None:
            assert verify_cube_failure(sym, pred)


@pytest.mark.parametrize("pred", all_predicates(5), ids=str)
def test_lower_exponent_properties(pred):
    l = lower_exponent(pred)
    assert 1 <= l <= upper_exponent(pred) <= pred.arity
    assert lower_exponent(flip(pred)) == l
    if l >= 2:
        failure = preserves_symmetric(pred, l)
        assert verify_cube_failure(CubeFailure.from_json(failure.to_json()), pred)


def test_tampered_certificate_rejected():
    failure = preserves_symmetric(P(3, 1, 2), 2)
    js = failure.to_json()
    js["output_weight"] = 1
    assert not verify_cube_failure(CubeFailure.from_json(js), P(3, 1, 2))
    js = failure.to_json()
    js["counts"] = {"zero": 0, "one": 1, "coord": [1, 1], "cocoord": [0, 0]}
    js["row_weights"] = {"11": 3, "10": 2, "01": 2}
    js["output_weight"] = 1
    assert not verify_cube_failure(CubeFailure.from_json(js), P(3, 1, 2))


def test_failure_json_shape():
    js = preserves_symmetric(P(3, 1, 2), 2).to_json()
    assert js == {
        "k": 2,
        "counts": {"zero": 1, "one": 0, "coord": [1, 1], "cocoord": [0, 0]},
        "row_weights": {"11": 2, "10": 1, "01": 1},
        "output_weight": 0,
    }


def reference_first_failure(pred, k):
    """Straight loop over sorted multisets of column types."""
    from itertools import combinations_with_replacement
    types = column_types(k)
    for combo in combinations_with_replacement(range(len(types)), pred.arity):
        mv = MultiplicityVector(k, tuple(combo.count(t) for t in range(len(types))))
        if mv.output_weight() in pred.weights:
            continue
        if all(mv.row_weight(v) in pred.weights for v in row_indices(k)):
            return mv
    return None


@pytest.mark.parametrize("pred", [p for p in all_predicates(5) if p.arity >= 2], ids=str)
def test_first_failure_matches_reference_loop(pred):
    for k in range(2, pred.arity + 1):
        got = preserves_symmetric(pred, k)
        ref = reference_first_failure(pred, k)
        assert (got is None) == (ref is None)
        if got is not None:
            assert got.multiplicities == ref
            assert got.row_weights == {"".join(map(str, v)): ref.row_weight(v) for v in row_indices(k)}


def test_arity5_examples():
    assert preserves_symmetric(P(5, 1, 2, 4), 3) is None
    failure = preserves_symmetric(P(5, 0, 1, 2, 3, 4), 5)
    assert failure is not None and failure.output_weight == 5
    assert verify_cube_failure(failure, P(5, 0, 1, 2, 3, 4))
