"""Rank-four tensors indexed by I1 x I2 x I2 x I1 and their Banach algebra.

Entries are stored densely as ``entries[i, k, l, j]``.  The doubly
contracted product behaves like matrix multiplication under the flattening
``M[(i, k), (j, l)] = A[i, k, l, j]``, which is a *-homomorphism onto
matrices over the product index set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import (
    AlgebraSpec,
    AlgMatrix,
    algebra_norm,
    batched_operator_norms,
    operator_norm,
)
from .errors import CapacityError, InvalidArgumentError, SingularityError
from .lattice import IndexSet

MAX_FLAT_SIZE = 512
CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class Tensor4:
    outer: IndexSet
    inner: IndexSet
    entries: np.ndarray

    def __post_init__(self):
        n1, n2 = len(self.outer), len(self.inner)
        if n1 * n2 > MAX_FLAT_SIZE:
            raise CapacityError(
                f"|I1|*|I2| = {n1 * n2} exceeds the tensor cap {MAX_FLAT_SIZE}"
            )
        a = np.array(self.entries, dtype=np.complex128)
        if a.shape != (n1, n2, n2, n1):
            raise InvalidArgumentError(
                f"entries have shape {a.shape}, expected {(n1, n2, n2, n1)}"
            )
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("tensor entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def identity(cls, outer: IndexSet, inner: IndexSet) -> Tensor4:
        n1, n2 = len(outer), len(inner)
        return cls(outer, inner, np.einsum("ij,kl->iklj", np.eye(n1), np.eye(n2)))

    @classmethod
    def zeros(cls, outer: IndexSet, inner: IndexSet) -> Tensor4:
        n1, n2 = len(outer), len(inner)
        return cls(outer, inner, np.zeros((n1, n2, n2, n1)))

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def with_entries(self, entries) -> Tensor4:
        return Tensor4(self.outer, self.inner, entries)

    def __add__(self, other: Tensor4) -> Tensor4:
        _check_same(self, other)
        return self.with_entries(self.entries + other.entries)

    def __sub__(self, other: Tensor4) -> Tensor4:
        _check_same(self, other)
        return self.with_entries(self.entries - other.entries)

    def __mul__(self, alpha: complex) -> Tensor4:
        return self.with_entries(alpha * self.entries)

    __rmul__ = __mul__

    def __truediv__(self, alpha: complex) -> Tensor4:
        return self.with_entries(self.entries / alpha)


@dataclass(frozen=True)
class TensorAlgebraSpec:
    """Pair of matrix algebras: ``spec1`` acts over I1^2, ``spec2`` over I2^2."""

    spec1: AlgebraSpec
    spec2: AlgebraSpec

    def label(self) -> str:
        return f"{self.spec1.label()} / {self.spec2.label()}"

    def to_json(self) -> dict:
        return {"spec1": self.spec1.to_json(), "spec2": self.spec2.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> TensorAlgebraSpec:
        try:
            return cls(AlgebraSpec.from_json(data["spec1"]), AlgebraSpec.from_json(data["spec2"]))
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed TensorAlgebraSpec JSON: {exc}") from None


def _check_same(A: Tensor4, B: Tensor4) -> None:
    if A.outer != B.outer or A.inner != B.inner:
        raise InvalidArgumentError("tensors are indexed by different index sets")


def flatten(A: Tensor4) -> AlgMatrix:
    """Matrix over (I1 x I2)^2 with ``M[(i, k), (j, l)] = A[i, k, l, j]``.

    Rows and columns follow the product order: i outer, k inner.
    """
    n1, n2 = len(A.outer), len(A.inner)
    prod = A.outer.product(A.inner)
    M = A.entries.transpose(0, 1, 3, 2).reshape(n1 * n2, n1 * n2)
    return AlgMatrix(prod, prod, M)


def unflatten(M: AlgMatrix | np.ndarray, outer: IndexSet, inner: IndexSet) -> Tensor4:
    """Inverse of :func:`flatten`."""
    m = M.entries if isinstance(M, AlgMatrix) else np.asarray(M)
    n1, n2 = len(outer), len(inner)
    if m.shape != (n1 * n2, n1 * n2):
        raise InvalidArgumentError(
            f"matrix has shape {m.shape}, expected {(n1 * n2, n1 * n2)}"
        )
    return Tensor4(outer, inner, m.reshape(n1, n2, n1, n2).transpose(0, 1, 3, 2))


def contract(A: Tensor4, B: Tensor4) -> Tensor4:
    """Doubly contracted product.

    ``(A:B)[i, k, l, j] = sum_{n in I2} sum_{m in I1} A[i, k, n, m] B[m, n, l, j]``,
    evaluated as a matrix product of the flattenings.
    """
    _check_same(A, B)
    prod = flatten(A).entries @ flatten(B).entries
    return unflatten(prod, A.outer, A.inner)


def contract_summation(A: Tensor4, B: Tensor4) -> Tensor4:
    """The double sum evaluated directly, without going through the flattening."""
    _check_same(A, B)
    return A.with_entries(np.einsum("iknm,mnlj->iklj", A.entries, B.entries))


def adjoint(A: Tensor4) -> Tensor4:
    """``A*[i, k, l, j] = conj(A[j, l, k, i])``."""
    return A.with_entries(A.entries.transpose(3, 2, 1, 0).conj())


def slice_inner(A: Tensor4, i, j) -> AlgMatrix:
    """Matrix ``(A[i, k, l, j])`` over I2 x I2 for fixed outer points i, j."""
    pi, pj = A.outer.position(i), A.outer.position(j)
    return AlgMatrix(A.inner, A.inner, A.entries[pi, :, :, pj])


def slice_outer(A: Tensor4, k, l) -> AlgMatrix:
    """Matrix ``(A[i, k, l, j])`` over I1 x I1 for fixed inner points k, l."""
    pk, pl = A.inner.position(k), A.inner.position(l)
    return AlgMatrix(A.outer, A.outer, A.entries[:, pk, pl, :])


def inner_envelope(A: Tensor4) -> AlgMatrix:
    """Operator norms of the inner slices, as a matrix over I1 x I1."""
    stack = A.entries.transpose(0, 3, 1, 2)
    return AlgMatrix(A.outer, A.outer, batched_operator_norms(stack))


def outer_envelope(A: Tensor4) -> AlgMatrix:
    """Operator norms of the outer slices, as a matrix over I2 x I2."""
    stack = A.entries.transpose(1, 2, 0, 3)
    return AlgMatrix(A.inner, A.inner, batched_operator_norms(stack))


def norm_a1_tilde(A: Tensor4, spec1: AlgebraSpec) -> float:
    return algebra_norm(inner_envelope(A), spec1)


def norm_a2_tilde(A: Tensor4, spec2: AlgebraSpec) -> float:
    return algebra_norm(outer_envelope(A), spec2)


def norm_a(A: Tensor4, spec: TensorAlgebraSpec) -> float:
    """Larger of the two nested norms."""
    return max(norm_a1_tilde(A, spec.spec1), norm_a2_tilde(A, spec.spec2))


def kronecker(G1: AlgMatrix, G2: AlgMatrix) -> Tensor4:
    """``T[i, k, l, j] = G1[i, j] * G2[k, l]``; no conjugation is applied."""
    if not (G1.is_square and G2.is_square):
        raise InvalidArgumentError("kronecker factors must be square over one index set")
    return Tensor4(
        G1.row_index, G2.row_index, np.einsum("ij,kl->iklj", G1.entries, G2.entries)
    )


@dataclass(frozen=True)
class InverseReport:
    norm_a: float
    norm_a_inverse: float
    operator_norm: float
    operator_norm_inverse: float
    residual: float
    condition: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def inverse_in_algebra(A: Tensor4, spec: TensorAlgebraSpec) -> tuple[Tensor4, InverseReport]:
    """Invert ``A`` in B(l2(I1 x I2)) and report its algebra norms.

    Raises :class:`SingularityError` when the flattening has condition
    number above 1e12 (or is exactly singular).
    """
    M = flatten(A).entries
    n = M.shape[0]
    cond = float(np.linalg.cond(M)) if n else 1.0
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularityError(f"tensor is singular or ill-conditioned (cond = {cond:.3e})", cond)
    Minv = np.linalg.inv(M)
    inv = unflatten(Minv, A.outer, A.inner)
    residual = operator_norm(M @ Minv - np.eye(n)) if n else 0.0
    report = InverseReport(
        norm_a=norm_a(A, spec),
        norm_a_inverse=norm_a(inv, spec),
        operator_norm=operator_norm(M),
        operator_norm_inverse=operator_norm(Minv),
        residual=residual,
        condition=cond,
    )
    return inv, report
