"""Spectral matrix-algebra norms on finite truncations.

Covers the Jaffard class, the weighted Schur-type algebras and the
Sjostrand algebra, their operator-valued versions (norm of the matrix of
block operator norms), the l2 operator norm, and weighted l1/l-infinity
boundedness diagnostics.  Every ``sup`` of the infinite-dimensional
definitions becomes a ``max`` over the finite index set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, PreconditionError
from .lattice import IndexSet, Weight

DENSE_SVD_LIMIT = 512
POWER_ITERATIONS = 10_000
POWER_RTOL = 1e-12
SOLIDITY_RTOL = 1e-12

FAMILIES = ("jaffard", "schur", "sjostrand")


@dataclass(frozen=True, eq=False)
class AlgMatrix:
    """Complex matrix whose rows and columns are labelled by index sets."""

    row_index: IndexSet
    col_index: IndexSet
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        shape = (len(self.row_index), len(self.col_index))
        if a.shape != shape:
            raise InvalidArgumentError(f"entries have shape {a.shape}, expected {shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def square(cls, index: IndexSet, entries) -> AlgMatrix:
        return cls(index, index, entries)

    @classmethod
    def identity(cls, index: IndexSet) -> AlgMatrix:
        return cls(index, index, np.eye(len(index)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def is_square(self) -> bool:
        return self.row_index == self.col_index

    def adjoint(self) -> AlgMatrix:
        return AlgMatrix(self.col_index, self.row_index, self.entries.conj().T)

    def with_entries(self, entries) -> AlgMatrix:
        return AlgMatrix(self.row_index, self.col_index, entries)

    def __matmul__(self, other: AlgMatrix) -> AlgMatrix:
        if self.col_index != other.row_index:
            raise InvalidArgumentError("inner index sets differ")
        return AlgMatrix(self.row_index, other.col_index, self.entries @ other.entries)


@dataclass(frozen=True)
class AlgebraSpec:
    """Choice of matrix algebra and its parameters.

    ``jaffard`` uses ``s``; ``schur`` uses ``p`` and ``delta``; ``sjostrand``
    uses ``weight``.
    """

    family: str
    s: float = 0.0
    p: float = 1.0
    delta: float = 0.0
    weight: Weight | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown algebra family {self.family!r}")
        if self.family == "jaffard" and not self.s >= 0:
            raise InvalidArgumentError(f"jaffard needs s >= 0, got {self.s}")
        if self.family == "schur":
            if not self.p >= 1:
                raise InvalidArgumentError(f"schur needs p in [1, inf], got {self.p}")
            if not self.delta >= 0:
                raise InvalidArgumentError(f"schur needs delta >= 0, got {self.delta}")
        if self.family == "sjostrand" and self.weight is None:
            object.__setattr__(self, "weight", Weight.polynomial(0.0))

    @classmethod
    def jaffard(cls, s: float) -> AlgebraSpec:
        return cls("jaffard", s=float(s))

    @classmethod
    def schur(cls, p: float, delta: float) -> AlgebraSpec:
        return cls("schur", p=float(p), delta=float(delta))

    @classmethod
    def sjostrand(cls, weight: Weight | None = None) -> AlgebraSpec:
        return cls("sjostrand", weight=weight)

    def label(self) -> str:
        if self.family == "jaffard":
            return f"jaffard(s={self.s:g})"
        if self.family == "schur":
            return f"schur(p={self.p:g},delta={self.delta:g})"
        w = self.weight.to_json()
        params = ",".join(f"{k}={v:g}" for k, v in w.items() if k not in ("kind", "lo", "values"))
        return f"sjostrand({w['kind']}{',' + params if params else ''})"

    def to_json(self) -> dict:
        if self.family == "jaffard":
            return {"family": "jaffard", "s": self.s}
        if self.family == "schur":
            p = "inf" if math.isinf(self.p) else self.p
            return {"family": "schur", "p": p, "delta": self.delta}
        return {"family": "sjostrand", "weight": self.weight.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> AlgebraSpec:
        try:
            family = data["family"]
            if family == "jaffard":
                return cls.jaffard(data["s"])
            if family == "schur":
                return cls.schur(float(data.get("p", 1)), data.get("delta", 0.0))
            if family == "sjostrand":
                w = data.get("weight")
                return cls.sjostrand(Weight.from_json(w) if w is not None else None)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed AlgebraSpec JSON: {exc}") from None
        raise InvalidArgumentError(f"unknown algebra family {family!r}")


def _check_dims(A: AlgMatrix) -> None:
    if A.row_index.dim != A.col_index.dim:
        raise InvalidArgumentError(
            f"row/column index dimensions differ: {A.row_index.dim} vs {A.col_index.dim}"
        )


def _offset_weights(A: AlgMatrix, w: Weight) -> np.ndarray:
    return w.evaluate(A.row_index.differences(A.col_index))


def jaffard_norm(A: AlgMatrix, s: float) -> float:
    """max |A_ij| (1 + |i - j|)^s."""
    _check_dims(A)
    if A.entries.size == 0:
        return 0.0
    return float((np.abs(A.entries) * _offset_weights(A, Weight.polynomial(s))).max())


def schur_norm(A: AlgMatrix, p: float, delta: float) -> float:
    """Larger of the worst weighted row and worst weighted column l^p norm."""
    if not p >= 1:
        raise InvalidArgumentError(f"p must be in [1, inf], got {p}")
    if not delta >= 0:
        raise InvalidArgumentError(f"delta must be >= 0, got {delta}")
    _check_dims(A)
    if A.entries.size == 0:
        return 0.0
    mags = np.abs(A.entries) * _offset_weights(A, Weight.polynomial(delta))
    if math.isinf(p):
        return float(mags.max())
    if p == 1:
        rows, cols = mags.sum(axis=1), mags.sum(axis=0)
    else:
        rows = np.sum(mags**p, axis=1) ** (1.0 / p)
        cols = np.sum(mags**p, axis=0) ** (1.0 / p)
    return float(max(rows.max(), cols.max()))


def diagonal_sups(A: AlgMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Realised offsets ``row - col`` (lexicographically sorted) and the
    largest entry modulus on each of those diagonals."""
    if not A.is_square:
        raise InvalidArgumentError("sjostrand norm needs identical row and column index sets")
    diffs = A.row_index.differences().reshape(-1, A.row_index.dim)
    offsets, inverse = np.unique(diffs, axis=0, return_inverse=True)
    sups = np.zeros(len(offsets))
    np.maximum.at(sups, inverse.ravel(), np.abs(A.entries).ravel())
    return offsets, sups


def sjostrand_norm(A: AlgMatrix, theta: Weight) -> float:
    """Weighted sum over realised diagonals of the diagonal sup.

    No cyclic wrap-around: a diagonal offset counts only where both ``j``
    and ``j - i`` lie in the index set.
    """
    if len(A.row_index) == 0 and len(A.col_index) == 0:
        return 0.0
    offsets, sups = diagonal_sups(A)
    # np.sum is pairwise and order-fixed for a given offset ordering
    return float(np.sum(sups * theta.evaluate(offsets)))


def batched_operator_norms(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a (..., m, n) stack."""
    stack = np.asarray(stack)
    if stack.shape[-1] == 0 or stack.shape[-2] == 0:
        return np.zeros(stack.shape[:-2])
    if stack.shape[-2:] == (1, 1):
        # exact modulus, so scalar blocks reproduce the scalar norms bit for bit
        return np.abs(stack[..., 0, 0])
    if min(stack.shape[-2:]) <= DENSE_SVD_LIMIT:
        return np.linalg.svd(stack, compute_uv=False)[..., 0]
    flat = stack.reshape(-1, *stack.shape[-2:])
    return np.array([_power_norm(m) for m in flat]).reshape(stack.shape[:-2])


def _power_norm(M: np.ndarray) -> float:
    n = M.shape[1]
    v = np.full(n, 1.0 / math.sqrt(n), dtype=M.dtype)
    est = 0.0
    for _ in range(POWER_ITERATIONS):
        w = M.conj().T @ (M @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        new = math.sqrt(nrm)
        if abs(new - est) <= POWER_RTOL * new:
            return new
        est = new
    return est


def operator_norm(A: AlgMatrix | np.ndarray) -> float:
    """Largest singular value.

    Dense SVD when the smaller side is at most 512; otherwise power
    iteration on A*A from the normalised all-ones vector.
    """
    M = A.entries if isinstance(A, AlgMatrix) else np.asarray(A)
    return float(batched_operator_norms(M))


def algebra_norm(A: AlgMatrix, spec: AlgebraSpec) -> float:
    if spec.family == "jaffard":
        return jaffard_norm(A, spec.s)
    if spec.family == "schur":
        return schur_norm(A, spec.p, spec.delta)
    return sjostrand_norm(A, spec.weight)


def dominates(A: AlgMatrix, B: AlgMatrix) -> bool:
    """Whether |B_ij| <= |A_ij| entrywise, up to a few ulps of rounding."""
    a, b = np.abs(A.entries), np.abs(B.entries)
    return bool(np.all(b <= a * (1 + 8 * np.finfo(float).eps)))


def check_solidity(spec: AlgebraSpec, A: AlgMatrix, B: AlgMatrix) -> bool:
    """Check the solidity inequality ``||B|| <= ||A||`` for a dominated pair."""
    if A.row_index != B.row_index or A.col_index != B.col_index:
        raise InvalidArgumentError("A and B must share index sets")
    if not dominates(A, B):
        raise PreconditionError("B is not entrywise dominated by A in modulus")
    na = algebra_norm(A, spec)
    return algebra_norm(B, spec) <= na + SOLIDITY_RTOL * na


def block_norm_matrix(blocks: Sequence[Sequence], outer: IndexSet) -> AlgMatrix:
    """Scalar matrix of operator norms of the blocks, over ``outer`` x ``outer``."""
    n = len(outer)
    if len(blocks) != n or any(len(row) != n for row in blocks):
        raise InvalidArgumentError(f"expected a {n}x{n} array of blocks")
    shapes = {np.shape(b.entries if isinstance(b, AlgMatrix) else b) for row in blocks for b in row}
    if len(shapes) > 1:
        raise InvalidArgumentError(f"ragged blocks: shapes {sorted(shapes)}")
    if n == 0:
        return AlgMatrix(outer, outer, np.zeros((0, 0)))
    stack = np.array(
        [[b.entries if isinstance(b, AlgMatrix) else np.asarray(b) for b in row] for row in blocks]
    )
    return AlgMatrix(outer, outer, batched_operator_norms(stack))


def opvalued_norm(
    blocks: Sequence[Sequence], spec: AlgebraSpec, outer: IndexSet | None = None
) -> float:
    """Norm of an operator-valued matrix: the algebra norm of its block-norm envelope.

    ``outer`` defaults to the one-dimensional set 0..n-1.
    """
    if outer is None:
        outer = IndexSet(1, np.arange(len(blocks)).reshape(-1, 1))
    return algebra_norm(block_norm_matrix(blocks, outer), spec)


def weighted_lp_induced_norm(A: AlgMatrix, p: float, w) -> float:
    """Induced l^p norm (p in {1, inf}) of D_w A D_w^{-1}.

    ``w`` is either a positive vector over the index set or a
    :class:`Weight` sampled at the index points.
    """
    if not A.is_square:
        raise InvalidArgumentError("weighted induced norm needs a square matrix")
    if isinstance(w, Weight):
        w = w.evaluate(A.row_index.points)
    w = np.asarray(w, dtype=float)
    if w.shape != (len(A.row_index),):
        raise InvalidArgumentError(f"weight vector has shape {w.shape}, expected ({len(A.row_index)},)")
    if not np.all(w > 0):
        raise InvalidArgumentError("weights must be strictly positive")
    if A.entries.size == 0:
        return 0.0
    scaled = np.abs(A.entries) * (w[:, None] / w[None, :])
    if p == 1:
        return float(scaled.sum(axis=0).max())
    if math.isinf(p):
        return float(scaled.sum(axis=1).max())
    raise InvalidArgumentError(f"only p = 1 and p = inf are supported, got {p}")
