import math

import numpy as np
import pytest

from frametensor.algebras import (
    AlgebraSpec,
    AlgMatrix,
    algebra_norm,
    check_solidity,
    jaffard_norm,
    operator_norm,
    opvalued_norm,
    schur_norm,
    sjostrand_norm,
    weighted_lp_induced_norm,
)
from frametensor import algebras
from frametensor.errors import InvalidArgumentError, PreconditionError
from frametensor.lattice import IndexSet, Weight, make_box_index_set
from frametensor.sampling import dominated, line, random_complex, random_matrix, rng_for

FAMILIES = [
    AlgebraSpec.jaffard(2),
    AlgebraSpec.jaffard(0.5),
    AlgebraSpec.schur(1, 0),
    AlgebraSpec.schur(1, 1),
    AlgebraSpec.schur(2, 0.5),
    AlgebraSpec.schur(math.inf, 1),
    AlgebraSpec.sjostrand(Weight.polynomial(0)),
    AlgebraSpec.sjostrand(Weight.exponential_sub(1, 0.5)),
]


def mat(rows, index=None):
    a = np.asarray(rows, dtype=complex)
    index = index or line(a.shape[0])
    return AlgMatrix(index, index, a)


# brute-force oracles, one loop per definition


def nu(s, z):
    return (1 + math.sqrt(sum(int(c) ** 2 for c in z))) ** s


def jaffard_oracle(A, s):
    best = 0.0
    for a, i in enumerate(A.row_index.points):
        for b, j in enumerate(A.col_index.points):
            best = max(best, abs(A.entries[a, b]) * nu(s, i - j))
    return best


def schur_oracle(A, p, delta):
    R, C = A.row_index.points, A.col_index.points
    rows = [sum((abs(A.entries[a, b]) * nu(delta, R[a] - C[b])) ** p for b in range(len(C))) ** (1 / p) for a in range(len(R))]
    cols = [sum((abs(A.entries[a, b]) * nu(delta, R[a] - C[b])) ** p for a in range(len(R))) ** (1 / p) for b in range(len(C))]
    return max(max(rows), max(cols))


def sjostrand_oracle(A, theta):
    pts = [tuple(p) for p in A.row_index.points]
    sups = {}
    for a, j in enumerate(pts):
        for b, jm in enumerate(pts):
            i = tuple(x - y for x, y in zip(j, jm))
            sups[i] = max(sups.get(i, 0.0), abs(A.entries[a, b]))
    return sum(v * float(theta.evaluate(np.array(i))) for i, v in sups.items())


def test_jaffard_examples():
    I = line(3)
    assert jaffard_norm(AlgMatrix.identity(I), 5.0) == 1.0
    d = np.abs(np.subtract.outer(range(3), range(3)))
    assert jaffard_norm(mat(1.0 / (1 + d) ** 2), 1) == pytest.approx(1.0)
    assert jaffard_norm(mat(np.zeros((3, 3))), 2) == 0.0


def test_schur_examples():
    A = mat([[1, 2], [3, 4]])
    assert schur_norm(A, 1, 0) == 7.0
    assert schur_norm(A, math.inf, 0) == 4.0
    for p in (1, 1.5, 2, math.inf):
        assert schur_norm(AlgMatrix.identity(line(4)), p, 0.7) == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        schur_norm(A, 0.5, 0)


def test_schur_inf_is_weighted_sup():
    rng = rng_for(3)
    A = random_matrix(rng, line(5))
    assert schur_norm(A, math.inf, 1.5) == pytest.approx(jaffard_norm(A, 1.5), rel=1e-15)


def test_sjostrand_examples():
    I = line(3)
    nu0 = Weight.polynomial(0)
    assert sjostrand_norm(AlgMatrix.identity(I), nu0) == 1.0
    assert sjostrand_norm(mat(np.ones((2, 2))), nu0) == 3.0
    assert sjostrand_norm(mat(np.zeros((3, 3))), nu0) == 0.0


def test_sjostrand_needs_square():
    A = AlgMatrix(line(2), line(3), np.ones((2, 3)))
    with pytest.raises(InvalidArgumentError):
        sjostrand_norm(A, Weight.polynomial(0))


def test_norms_match_brute_force_2d_index():
    I = IndexSet.from_points([(0, 0), (0, 2), (1, 1), (3, -1), (2, 2)])
    for t in range(10):
        A = random_matrix(rng_for(11, t), I)
        assert jaffard_norm(A, 1.3) == pytest.approx(jaffard_oracle(A, 1.3), rel=1e-14)
        assert schur_norm(A, 1, 0.4) == pytest.approx(schur_oracle(A, 1, 0.4), rel=1e-14)
        assert schur_norm(A, 3, 0.4) == pytest.approx(schur_oracle(A, 3, 0.4), rel=1e-14)
        w = Weight.polynomial(0.8)
        assert sjostrand_norm(A, w) == pytest.approx(sjostrand_oracle(A, w), rel=1e-14)


def test_empty_index_sets_give_zero():
    E = IndexSet(1, np.zeros((0, 1)))
    A = AlgMatrix(E, E, np.zeros((0, 0)))
    for spec in FAMILIES:
        assert algebra_norm(A, spec) == 0.0
    assert operator_norm(A) == 0.0


def test_dimension_mismatch():
    A = AlgMatrix(line(2), make_box_index_set(2, [(0, 0), (0, 1)]), np.ones((2, 2)))
    with pytest.raises(InvalidArgumentError):
        jaffard_norm(A, 1)


def test_operator_norm_examples():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    assert operator_norm(np.array([[1.0, 1.0], [0.0, 1.0]])) == pytest.approx((1 + 5**0.5) / 2, rel=1e-14)
    assert operator_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)


def test_operator_norm_power_iteration_path(monkeypatch):
    rng = rng_for(5)
    M = random_complex(rng, (30, 20))
    dense = operator_norm(M)
    monkeypatch.setattr(algebras, "DENSE_SVD_LIMIT", 4)
    assert operator_norm(M) == pytest.approx(dense, rel=1e-9)


def test_algebra_norm_dispatch():
    assert algebra_norm(AlgMatrix.identity(line(3)), AlgebraSpec.jaffard(3)) == 1.0
    assert algebra_norm(mat([[1, 2], [3, 4]]), AlgebraSpec.schur(1, 0)) == 7.0
    assert algebra_norm(AlgMatrix.identity(line(3)), AlgebraSpec.sjostrand(Weight.polynomial(0))) == 1.0


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_norm_axioms(spec):
    I = line(5)
    for t in range(200):
        rng = rng_for(21, t)
        A, B = random_matrix(rng, I), random_matrix(rng, I)
        alpha = complex(*rng.uniform(-3, 3, 2))
        na, nb = algebra_norm(A, spec), algebra_norm(B, spec)
        assert algebra_norm(A.with_entries(alpha * A.entries), spec) == pytest.approx(abs(alpha) * na, rel=1e-12)
        assert algebra_norm(A.with_entries(A.entries + B.entries), spec) <= (na + nb) * (1 + 1e-12)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0])
def test_schur_p1_submultiplicative(delta):
    I = line(6)
    for t in range(200):
        rng = rng_for(22, t)
        A, B = random_matrix(rng, I), random_matrix(rng, I)
        assert schur_norm(A @ B, 1, delta) <= schur_norm(A, 1, delta) * schur_norm(B, 1, delta) + 1e-10


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_involution_isometry(spec):
    I = line(6)
    for t in range(50):
        A = random_matrix(rng_for(23, t), I)
        assert algebra_norm(A.adjoint(), spec) == pytest.approx(algebra_norm(A, spec), rel=1e-12)


def test_schur_test_bounds_operator_norm():
    I = line(6)
    for t in range(200):
        A = random_matrix(rng_for(24, t), I)
        assert operator_norm(A) <= schur_norm(A, 1, 0) + 1e-10


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_solidity_random_pairs(spec):
    I = line(5)
    for t in range(500):
        rng = rng_for(25, t)
        A = random_matrix(rng, I)
        assert check_solidity(spec, A, dominated(rng, A))


def test_solidity_examples():
    A = random_matrix(rng_for(26), line(4))
    for spec in FAMILIES:
        assert check_solidity(spec, A, A.with_entries(A.entries / 2))
        absA = A.with_entries(np.abs(A.entries))
        assert check_solidity(spec, A, absA)
        assert algebra_norm(absA, spec) == pytest.approx(algebra_norm(A, spec), rel=1e-15)
    B = np.array(A.entries)
    B[0, 0] = 2 * abs(B[0, 0]) + 1
    with pytest.raises(PreconditionError):
        check_solidity(FAMILIES[0], A, A.with_entries(B))


def test_opvalued_norm():
    inner = line(3)
    outer = line(2)
    Id = np.eye(3)
    Z = np.zeros((3, 3))
    assert opvalued_norm([[Id, Z], [Z, Id]], AlgebraSpec.jaffard(2), outer) == pytest.approx(1.0)
    M = random_complex(rng_for(27), (3, 3))
    assert opvalued_norm([[M]], AlgebraSpec.jaffard(2)) == pytest.approx(operator_norm(M), rel=1e-15)
    # blocks with operator norms 1, 2, 3, 4 reduce to the scalar example
    blocks = [[np.diag([1.0, 0, 0]), np.diag([0, 2.0, 0])], [np.diag([3.0, 0, 1]), np.diag([4.0, 4, 0])]]
    assert opvalued_norm(blocks, AlgebraSpec.schur(1, 0), outer) == pytest.approx(7.0)
    with pytest.raises(InvalidArgumentError):
        opvalued_norm([[Id, np.eye(2)], [Z, Id]], AlgebraSpec.jaffard(1), outer)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_opvalued_with_scalar_blocks_is_scalar_norm(spec):
    A = random_matrix(rng_for(28), line(5))
    blocks = [[np.array([[z]]) for z in row] for row in A.entries]
    assert opvalued_norm(blocks, spec, A.row_index) == algebra_norm(A, spec)


def test_weighted_lp_induced_norm():
    I = line(2)
    w = np.array([1.0, 2.0])
    assert weighted_lp_induced_norm(AlgMatrix.identity(I), 1, w) == 1.0
    A = mat([[0, 1], [0, 0]])
    assert weighted_lp_induced_norm(A, 1, w) == 0.5
    assert weighted_lp_induced_norm(A, math.inf, w) == 0.5
    with pytest.raises(InvalidArgumentError):
        weighted_lp_induced_norm(A, 1, np.array([1.0, 0.0]))
    with pytest.raises(InvalidArgumentError):
        weighted_lp_induced_norm(A, 2, w)


def test_weighted_lp_matches_scaled_matrix():
    I = make_box_index_set(1, [(-3, 3)])
    A = random_matrix(rng_for(29), I)
    w = Weight.polynomial(1.5)
    wv = w.evaluate(I.points)
    D = np.diag(wv) @ A.entries @ np.diag(1 / wv)
    assert weighted_lp_induced_norm(A, 1, w) == pytest.approx(np.abs(D).sum(axis=0).max(), rel=1e-14)
    assert weighted_lp_induced_norm(A, math.inf, w) == pytest.approx(np.abs(D).sum(axis=1).max(), rel=1e-14)


def test_spec_json_round_trip():
    for spec in FAMILIES:
        back = AlgebraSpec.from_json(spec.to_json())
        assert back.to_json() == spec.to_json()
