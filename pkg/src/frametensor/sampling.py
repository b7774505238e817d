"""Seeded random inputs for the property suites.

All randomness comes from numpy's counter-based Philox generator keyed by
``(seed, stream)``, so every trial draws from its own reproducible stream
independent of platform and of how many trials ran before it.
"""
from __future__ import annotations

import numpy as np

from .algebras import AlgMatrix
from .frames import Frame, frame_bounds
from .lattice import IndexSet
from .tensor4 import Tensor4

MASK64 = (1 << 64) - 1


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    key = (int(seed) & MASK64) | ((int(stream) & MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Independent real and imaginary parts, uniform on [-1, 1]."""
    return rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)


def line(n: int) -> IndexSet:
    """The index set {0, ..., n-1} in Z."""
    return IndexSet(1, np.arange(n).reshape(-1, 1))


def random_matrix(rng, index: IndexSet) -> AlgMatrix:
    return AlgMatrix(index, index, random_complex(rng, (len(index), len(index))))


def random_tensor(rng, outer: IndexSet, inner: IndexSet) -> Tensor4:
    n1, n2 = len(outer), len(inner)
    return Tensor4(outer, inner, random_complex(rng, (n1, n2, n2, n1)))


def dominated(rng, A: AlgMatrix) -> AlgMatrix:
    """Random B with |B| <= |A| entrywise: shrink moduli, rotate phases."""
    shrink = rng.uniform(0.0, 1.0, A.shape)
    phase = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, A.shape))
    return A.with_entries(np.abs(A.entries) * shrink * phase)


def random_frame(rng, n_vectors: int, space_dim: int, max_ratio: float = 1e6) -> Frame:
    """Random frame whose bound ratio B/A stays below ``max_ratio``."""
    for _ in range(1000):
        F = Frame.from_vectors(random_complex(rng, (n_vectors, space_dim)))
        lower, upper = frame_bounds(F)
        if lower > 0 and upper / lower <= max_ratio:
            return F
    raise RuntimeError("could not draw a well-conditioned frame")
