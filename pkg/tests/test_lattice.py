import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frametensor.errors import CapacityError, InvalidArgumentError, OutOfDomainError
from frametensor.lattice import (
    IndexSet,
    Weight,
    check_grs_condition,
    make_box_index_set,
    weight_eval,
    weight_violations,
)


def test_box_1d():
    I = make_box_index_set(1, [(0, 2)])
    assert I.points.ravel().tolist() == [0, 1, 2]


def test_box_2d_lexicographic():
    I = make_box_index_set(2, [(0, 1), (0, 1)])
    assert [tuple(p) for p in I.points] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_box_empty_range():
    with pytest.raises(InvalidArgumentError):
        make_box_index_set(1, [(5, 3)])


def test_box_capacity(monkeypatch):
    with pytest.raises(CapacityError):
        make_box_index_set(2, [(0, 99), (0, 99)])
    monkeypatch.setenv("FRAMETENSOR_MAX_SIZE", "10000")
    assert len(make_box_index_set(2, [(0, 99), (0, 99)])) == 10000


def test_index_set_rejects_unsorted_and_duplicates():
    with pytest.raises(InvalidArgumentError):
        IndexSet(1, np.array([[1], [0]]))
    with pytest.raises(InvalidArgumentError):
        IndexSet.from_points([(0,), (0,)])
    assert IndexSet.from_points([(2,), (0,)]).points.ravel().tolist() == [0, 2]


@given(st.sets(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=40))
def test_position_round_trip(pts):
    I = IndexSet.from_points(pts)
    for n in range(len(I)):
        assert I.position(I.point(n)) == n
    assert I.separation() >= 1


def test_position_unknown_point():
    with pytest.raises(InvalidArgumentError):
        make_box_index_set(1, [(0, 2)]).position((7,))


def test_product_order():
    P = make_box_index_set(1, [(0, 1)]).product(make_box_index_set(1, [(5, 6)]))
    assert [tuple(p) for p in P.points] == [(0, 5), (0, 6), (1, 5), (1, 6)]


def test_index_set_json_round_trip():
    I = make_box_index_set(2, [(-1, 1), (0, 2)])
    assert IndexSet.from_json(I.to_json()) == I


@pytest.mark.parametrize(
    "w, z, expected",
    [
        (Weight.polynomial(0), (7,), 1.0),
        (Weight.polynomial(2), (0,), 1.0),
        (Weight.polynomial(1), (3, 4), 6.0),
        (Weight.exponential_sub(1.0, 0.5), (4,), math.exp(2.0)),
    ],
)
def test_weight_eval(w, z, expected):
    assert weight_eval(w, z) == pytest.approx(expected, rel=1e-15)


def test_table_weight():
    w = Weight.table((-1,), [2.0, 1.0, 2.0])
    assert weight_eval(w, (1,)) == 2.0
    with pytest.raises(OutOfDomainError):
        weight_eval(w, (2,))


def test_grs_polynomial():
    seq = check_grs_condition(Weight.polynomial(1), (1,), 4)
    np.testing.assert_allclose(seq, [2, 3**0.5, 4 ** (1 / 3), 5**0.25], rtol=1e-15)


def test_grs_constant():
    np.testing.assert_array_equal(check_grs_condition(Weight.polynomial(0), (3, -2), 5), 1.0)


def test_grs_exponential_sub():
    seq = check_grs_condition(Weight.exponential_sub(1.0, 0.5), (1,), 3)
    np.testing.assert_allclose(seq, [math.e, math.exp(2**0.5 / 2), math.exp(3**0.5 / 3)], rtol=1e-14)


def test_grs_needs_two_samples():
    with pytest.raises(InvalidArgumentError):
        check_grs_condition(Weight.polynomial(1), (1,), 1)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 2.0, 3.7])
def test_polynomial_weight_peetre_and_symmetry(s):
    w = Weight.polynomial(s)
    z = np.arange(-10, 11)
    vals = w.evaluate(z[:, None])
    np.testing.assert_array_equal(vals, w.evaluate(-z[:, None]))
    for x in z:
        for y in z:
            assert weight_eval(w, (x + y,)) <= weight_eval(w, (x,)) * weight_eval(w, (y,)) * (1 + 1e-15)


@pytest.mark.parametrize(
    "w", [Weight.polynomial(2.5), Weight.exponential_sub(0.7, 0.3), Weight.symmetric_table(3, 2, lambda z: (1 + np.abs(z).sum()) ** 1.5)]
)
def test_weight_violations_zero_for_valid_weights(w):
    v = weight_violations(w, 2, 3)
    assert v["positivity"] == 0 and v["symmetry"] == 0
    assert v["submultiplicativity"] <= 1e-12


def test_weight_violations_detects_superexponential():
    bad = Weight.symmetric_table(3, 1, lambda z: math.exp(float(z @ z)))
    assert weight_violations(bad, 1, 3)["submultiplicativity"] > 1


def test_weight_json_round_trip():
    for w in (Weight.polynomial(2), Weight.exponential_sub(1, 0.5), Weight.table((-1,), [2, 1, 2])):
        w2 = Weight.from_json(w.to_json())
        assert w2.to_json() == w.to_json()


def test_weight_validation():
    with pytest.raises(InvalidArgumentError):
        Weight.polynomial(-1)
    with pytest.raises(InvalidArgumentError):
        Weight.exponential_sub(1, 1.0)
    with pytest.raises(InvalidArgumentError):
        Weight.table((0,), [1.0, 0.0])
