"""Frames in C^N and frames of Hilbert-Schmidt operators.

Conventions used throughout:

* ``<x, y> = sum_t x_t conj(y_t)`` (linear in the first argument);
* the elementary tensor ``f1 (x) f2`` is the operator ``f -> <f, f1> f2``,
  i.e. the N2 x N1 matrix ``f2 f1^H``;
* ``<O, O'>_HS = trace(O'^H O)``.

With these, ``<f1 (x) f2, g1 (x) g2>_HS = conj(<f1, g1>) <f2, g2>``, so the
Gram tensor of a tensor product frame is ``conj(G1)[i, j] * G2[k, l]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import AlgebraSpec, AlgMatrix, algebra_norm
from .errors import InvalidArgumentError, NotAFrameError
from .lattice import IndexSet
from .tensor4 import Tensor4, unflatten

FRAME_THRESHOLD = 1e-10


def inner(x, y) -> complex:
    """``sum_t x_t conj(y_t)``."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


def hs_inner(O, Op) -> complex:
    """Hilbert-Schmidt inner product ``trace(Op^H O)``."""
    return complex(np.vdot(np.asarray(Op), np.asarray(O)))


def _line_index(n: int) -> IndexSet:
    return IndexSet(1, np.arange(n).reshape(-1, 1))


@dataclass(frozen=True, eq=False)
class Frame:
    """Finite family of vectors in C^N, one per point of ``index``.

    ``vectors`` has shape ``(len(index), space_dim)``.  Spanning is not
    enforced here; see :func:`frame_bounds`.
    """

    space_dim: int
    index: IndexSet
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.complex128)
        if v.ndim == 1 and len(self.index) == 1:
            v = v.reshape(1, -1)
        if v.shape != (len(self.index), self.space_dim):
            raise InvalidArgumentError(
                f"vectors have shape {v.shape}, expected {(len(self.index), self.space_dim)}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("frame vectors must be finite")
        if not np.any(v != 0):
            raise InvalidArgumentError("a frame needs at least one nonzero vector")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_vectors(cls, vectors, index: IndexSet | None = None) -> Frame:
        v = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
        return cls(v.shape[1], index if index is not None else _line_index(v.shape[0]), v)

    def __len__(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True, eq=False)
class HSFrame:
    """Family of N2 x N1 operators (Hilbert-Schmidt maps C^N1 -> C^N2).

    ``operators`` has shape ``(len(index), N2, N1)``.  When ``outer`` and
    ``inner`` are given, ``index`` is their product and the family is
    ordered with the outer point varying slowest.
    """

    dims: tuple
    index: IndexSet
    operators: np.ndarray
    outer: IndexSet | None = None
    inner: IndexSet | None = None

    def __post_init__(self):
        n1, n2 = (int(d) for d in self.dims)
        ops = np.array(self.operators, dtype=np.complex128)
        if ops.shape != (len(self.index), n2, n1):
            raise InvalidArgumentError(
                f"operators have shape {ops.shape}, expected {(len(self.index), n2, n1)}"
            )
        if not np.all(np.isfinite(ops)):
            raise InvalidArgumentError("operators must be finite")
        if (self.outer is None) != (self.inner is None):
            raise InvalidArgumentError("outer and inner index sets go together")
        if self.outer is not None and self.outer.product(self.inner) != self.index:
            raise InvalidArgumentError("index is not the product of outer and inner")
        ops.setflags(write=False)
        object.__setattr__(self, "dims", (n1, n2))
        object.__setattr__(self, "operators", ops)

    @property
    def has_product_structure(self) -> bool:
        return self.outer is not None

    def as_frame(self) -> Frame:
        """The same family viewed as vectors in C^(N2*N1) (row-major)."""
        n1, n2 = self.dims
        return Frame(n1 * n2, self.index, self.operators.reshape(len(self.index), n2 * n1))

    def with_operators(self, operators) -> HSFrame:
        return HSFrame(self.dims, self.index, operators, self.outer, self.inner)


def gram_matrix(F: Frame) -> AlgMatrix:
    """``G[i', i] = <psi_i', psi_i>``."""
    V = F.vectors
    return AlgMatrix(F.index, F.index, V @ V.conj().T)


def frame_operator(F: Frame) -> np.ndarray:
    """``S = sum_i psi_i psi_i^H``."""
    V = F.vectors
    return V.T @ V.conj()


def frame_bounds(F: Frame) -> tuple[float, float]:
    """Optimal frame bounds: extreme eigenvalues of the frame operator.

    ``F`` is a frame iff the lower bound is positive; nothing is raised
    for deficient families.
    """
    ev = np.linalg.eigvalsh(frame_operator(F))
    return max(float(ev[0]), 0.0), max(float(ev[-1]), 0.0)


def is_frame(F: Frame) -> bool:
    lower, upper = frame_bounds(F)
    return lower > FRAME_THRESHOLD * upper


def analysis(F: Frame, f) -> np.ndarray:
    """Coefficients ``c_i = <f, psi_i>``."""
    f = np.asarray(f)
    if f.shape != (F.space_dim,):
        raise InvalidArgumentError(f"vector has shape {f.shape}, expected ({F.space_dim},)")
    return F.vectors.conj() @ f


def synthesis(F: Frame, c) -> np.ndarray:
    """``sum_i c_i psi_i``."""
    c = np.asarray(c)
    if c.shape != (len(F),):
        raise InvalidArgumentError(f"coefficients have shape {c.shape}, expected ({len(F)},)")
    return F.vectors.T @ c


def canonical_dual(F: Frame) -> Frame:
    """Frame ``S^{-1} psi_i``; raises :class:`NotAFrameError` if S is numerically singular."""
    lower, upper = frame_bounds(F)
    if not lower > FRAME_THRESHOLD * upper:
        raise NotAFrameError(
            f"family is not numerically a frame (bounds {lower:.3e}, {upper:.3e})"
        )
    S = frame_operator(F)
    dual = np.linalg.solve(S, F.vectors.T).T
    return Frame(F.space_dim, F.index, dual)


def elementary_tensor(f1, f2) -> np.ndarray:
    """Rank-one operator ``f -> <f, f1> f2`` as the matrix ``f2 f1^H``."""
    return np.outer(np.asarray(f2), np.asarray(f1).conj())


def tensor_product_frame(F1: Frame, F2: Frame) -> HSFrame:
    """All elementary tensors ``psi1_i (x) psi2_k``, outer index i, inner index k."""
    ops = np.einsum("kt,is->ikts", F2.vectors, F1.vectors.conj())
    n1, n2 = len(F1), len(F2)
    ops = ops.reshape(n1 * n2, F2.space_dim, F1.space_dim)
    return HSFrame(
        (F1.space_dim, F2.space_dim),
        F1.index.product(F2.index),
        ops,
        outer=F1.index,
        inner=F2.index,
    )


def hs_canonical_dual(F: HSFrame) -> HSFrame:
    n1, n2 = F.dims
    dual = canonical_dual(F.as_frame())
    return F.with_operators(dual.vectors.reshape(len(F.index), n2, n1))


def gram_tensor4(F: HSFrame) -> Tensor4:
    """``G[i, k, l, j] = <Omega_{i,k}, Omega_{j,l}>_HS``."""
    if not F.has_product_structure:
        raise InvalidArgumentError("the Gram tensor needs a family indexed by I1 x I2")
    V = F.as_frame().vectors
    return unflatten(V @ V.conj().T, F.outer, F.inner)


@dataclass(frozen=True)
class LocalisationReport:
    spec: AlgebraSpec
    norm: float
    profile: tuple  # ((distance, max |G_ij| at that distance), ...)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "norm": self.norm,
            "decay_profile": [{"distance": d, "max_abs": m} for d, m in self.profile],
        }


def decay_profile(G: AlgMatrix) -> tuple:
    """Largest entry modulus at each realised Euclidean distance ``|i - j|``."""
    diffs = G.row_index.differences(G.col_index)
    dist = np.sqrt(np.sum(diffs.astype(float) ** 2, axis=-1)).ravel()
    mags = np.abs(G.entries).ravel()
    levels, inverse = np.unique(dist, return_inverse=True)
    best = np.zeros(len(levels))
    np.maximum.at(best, inverse.ravel(), mags)
    return tuple((float(d), float(m)) for d, m in zip(levels, best))


def localisation_report(F: Frame, spec: AlgebraSpec) -> LocalisationReport:
    G = gram_matrix(F)
    return LocalisationReport(spec, algebra_norm(G, spec), decay_profile(G))


# Fixture frames


def orthonormal_basis(n: int) -> Frame:
    return Frame.from_vectors(np.eye(n))


def union_of_bases(n: int) -> Frame:
    """Standard basis followed by the unitary DFT basis; a tight frame with bounds (2, 2)."""
    dft = np.fft.fft(np.eye(n), norm="ortho")
    return Frame.from_vectors(np.vstack([np.eye(n), dft]))


def decaying_window(n: int, rate: float) -> np.ndarray:
    """``exp(-rate * d(t, 0))`` with the cyclic distance d on Z_n."""
    t = np.arange(n)
    return np.exp(-rate * np.minimum(t, n - t))


def shift_invariant_frame(n: int, rate: float = 1.0, window=None) -> Frame:
    """All cyclic shifts of a window on Z_n; ``psi_m[t] = g[(t - m) mod n]``."""
    g = decaying_window(n, rate) if window is None else np.asarray(window, dtype=complex)
    if g.shape != (n,):
        raise InvalidArgumentError(f"window must have length {n}")
    return Frame.from_vectors(np.array([np.roll(g, m) for m in range(n)]))


def circulant_frame_bounds(window) -> tuple[float, float]:
    """Frame bounds of the cyclic-shift frame of ``window``: extremes of ``|DFT(window)|^2``."""
    spec = np.abs(np.fft.fft(np.asarray(window))) ** 2
    return float(spec.min()), float(spec.max())


def circulant_autocorrelation(window) -> np.ndarray:
    """``c[d] = sum_t g[t + d] conj(g[t])``, computed through the DFT.

    The Gram matrix of the cyclic-shift frame is ``G[m, n] = c[(n - m) mod N]``.
    """
    g = np.asarray(window)
    return np.fft.ifft(np.abs(np.fft.fft(g)) ** 2)
