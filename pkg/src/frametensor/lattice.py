"""Finite index sets in Z^d and weight functions on lattice differences."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InvalidArgumentError, OutOfDomainError

DEFAULT_MAX_SIZE = 4096
MAX_SIZE_ENV = "FRAMETENSOR_MAX_SIZE"


def max_index_size() -> int:
    """Size cap for index sets; ``FRAMETENSOR_MAX_SIZE`` overrides the default."""
    raw = os.environ.get(MAX_SIZE_ENV)
    if raw is None:
        return DEFAULT_MAX_SIZE
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{MAX_SIZE_ENV} must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidArgumentError(f"{MAX_SIZE_ENV} must be positive, got {value}")
    return value


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class IndexSet:
    """Ordered set of distinct points of Z^d.

    Points are kept in strict lexicographic order, which fixes the
    linearisation of every matrix and tensor indexed by the set.
    """

    dim: int
    points: np.ndarray
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidArgumentError(f"dim must be positive, got {self.dim}")
        pts = np.asarray(self.points)
        if pts.size == 0:
            pts = np.zeros((0, self.dim), dtype=np.int64)
        if pts.ndim == 1 and self.dim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise InvalidArgumentError(
                f"points must have shape (n, {self.dim}), got {pts.shape}"
            )
        if not np.issubdtype(pts.dtype, np.integer):
            if not np.all(np.equal(np.round(pts), pts)):
                raise InvalidArgumentError("index points must be integer vectors")
        pts = np.ascontiguousarray(pts, dtype=np.int64)
        rows = [tuple(int(v) for v in p) for p in pts]
        for a, b in zip(rows, rows[1:]):
            if not a < b:
                raise InvalidArgumentError(
                    f"points must be distinct and strictly lexicographic; {a} !< {b}"
                )
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "_lookup", {p: n for n, p in enumerate(rows)})

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], dim: int | None = None) -> IndexSet:
        """Build from points in any order; duplicates are rejected."""
        rows = [tuple(int(v) for v in np.atleast_1d(p)) for p in points]
        if dim is None:
            if not rows:
                raise InvalidArgumentError("dim is required for an empty index set")
            dim = len(rows[0])
        if len(set(rows)) != len(rows):
            raise InvalidArgumentError("index points must be distinct")
        rows.sort()
        return cls(dim, np.array(rows, dtype=np.int64).reshape(-1, dim))

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self._lookup)

    def __contains__(self, point) -> bool:
        return self._key(point) in self._lookup

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.points, other.points)

    def __hash__(self) -> int:
        return hash((self.dim, self.points.tobytes()))

    def _key(self, point) -> tuple:
        key = tuple(int(v) for v in np.atleast_1d(point))
        if len(key) != self.dim:
            raise InvalidArgumentError(
                f"point {key} has dimension {len(key)}, expected {self.dim}"
            )
        return key

    def position(self, point) -> int:
        """Linear position of a lattice point."""
        key = self._key(point)
        try:
            return self._lookup[key]
        except KeyError:
            raise InvalidArgumentError(f"point {key} is not in the index set") from None

    def point(self, position: int) -> tuple:
        return tuple(int(v) for v in self.points[position])

    def differences(self, other: IndexSet | None = None) -> np.ndarray:
        """Array of shape (len(self), len(other), dim) holding ``i - j``."""
        other = self if other is None else other
        if other.dim != self.dim:
            raise InvalidArgumentError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return self.points[:, None, :] - other.points[None, :, :]

    def separation(self) -> float:
        """Minimum pairwise l-infinity distance (inf for fewer than two points)."""
        if len(self) < 2:
            return math.inf
        d = np.abs(self.differences()).max(axis=-1).astype(float)
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def product(self, other: IndexSet) -> IndexSet:
        """Cartesian product as a set in Z^(d1+d2); order is self outer, other inner."""
        n, m = len(self), len(other)
        pts = np.concatenate(
            [np.repeat(self.points, m, axis=0), np.tile(other.points, (n, 1))], axis=1
        )
        return IndexSet(self.dim + other.dim, pts)

    def to_json(self) -> dict:
        return {"dim": self.dim, "points": self.points.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> IndexSet:
        try:
            dim = int(data["dim"])
            points = data["points"]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed IndexSet JSON: {exc}") from None
        return cls.from_points(points, dim=dim)


def make_box_index_set(
    dim: int, extents: Sequence[tuple[int, int] | range], max_size: int | None = None
) -> IndexSet:
    """Full integer box ``lo..hi`` (inclusive) per axis, in lexicographic order.

    >>> make_box_index_set(1, [(0, 2)]).points.ravel().tolist()
    [0, 1, 2]
    """
    if dim < 1:
        raise InvalidArgumentError(f"dim must be positive, got {dim}")
    if len(extents) != dim:
        raise InvalidArgumentError(f"expected {dim} extents, got {len(extents)}")
    axes = []
    for ext in extents:
        if isinstance(ext, range):
            axis = list(ext)
        else:
            lo, hi = ext
            axis = list(range(int(lo), int(hi) + 1))
        if not axis:
            raise InvalidArgumentError(f"empty range {ext!r}")
        axes.append(axis)
    cap = max_index_size() if max_size is None else max_size
    size = math.prod(len(a) for a in axes)
    if size > cap:
        raise CapacityError(f"index set of size {size} exceeds the cap {cap}")
    pts = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(size, dim)
    return IndexSet(dim, pts)


WEIGHT_KINDS = ("polynomial", "exponential-sub", "table")


@dataclass(frozen=True, eq=False)
class Weight:
    """Positive symmetric weight on lattice differences.

    ``polynomial``: (1 + |z|)^s.  ``exponential-sub``: exp(b |z|^gamma) with
    0 < gamma < 1.  ``table``: explicit values on the box ``lo..hi``.
    ``|z|`` is the Euclidean norm.
    """

    kind: str
    s: float = 0.0
    b: float = 1.0
    gamma: float = 0.5
    lo: tuple = ()
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise InvalidArgumentError(f"unknown weight kind {self.kind!r}")
        if self.kind == "polynomial" and not self.s >= 0:
            raise InvalidArgumentError(f"polynomial weight needs s >= 0, got {self.s}")
        if self.kind == "exponential-sub":
            if not self.b > 0:
                raise InvalidArgumentError(f"b must be positive, got {self.b}")
            if not 0 < self.gamma < 1:
                raise InvalidArgumentError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.kind == "table":
            vals = np.asarray(self.values, dtype=float)
            lo = tuple(int(v) for v in self.lo)
            if vals.ndim != len(lo) or vals.size == 0:
                raise InvalidArgumentError("table values must be a nonempty d-dim array")
            if not np.all(np.isfinite(vals)) or not np.all(vals > 0):
                raise InvalidArgumentError("table weight values must be finite and positive")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "values", _frozen(vals.copy()))

    @classmethod
    def polynomial(cls, s: float) -> Weight:
        return cls("polynomial", s=float(s))

    @classmethod
    def exponential_sub(cls, b: float, gamma: float) -> Weight:
        return cls("exponential-sub", b=float(b), gamma=float(gamma))

    @classmethod
    def table(cls, lo: Sequence[int], values) -> Weight:
        return cls("table", lo=tuple(lo), values=np.asarray(values, dtype=float))

    @classmethod
    def symmetric_table(cls, radius: int, dim: int, func) -> Weight:
        """Tabulate ``func(z)`` on the box [-radius, radius]^dim."""
        axis = range(-radius, radius + 1)
        shape = (2 * radius + 1,) * dim
        vals = np.array([func(np.array(z)) for z in itertools.product(axis, repeat=dim)])
        return cls.table((-radius,) * dim, vals.reshape(shape))

    @property
    def dim(self) -> int | None:
        """Fixed dimension for table weights, ``None`` for dimension-free kinds."""
        return len(self.lo) if self.kind == "table" else None

    @property
    def hi(self) -> tuple:
        return tuple(l + n - 1 for l, n in zip(self.lo, np.shape(self.values)))

    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)

    def evaluate(self, z) -> np.ndarray:
        """Evaluate on integer vectors stored along the last axis of ``z``."""
        z = np.asarray(z)
        if z.ndim == 0:
            z = z.reshape(1)
        if self.kind == "table":
            if z.shape[-1] != len(self.lo):
                raise InvalidArgumentError(
                    f"vector dimension {z.shape[-1]} does not match table dimension {len(self.lo)}"
                )
            offset = z.astype(np.int64) - np.asarray(self.lo, dtype=np.int64)
            shape = np.asarray(np.shape(self.values))
            if np.any(offset < 0) or np.any(offset >= shape):
                raise OutOfDomainError(
                    f"table weight queried outside its box {self.lo}..{self.hi}"
                )
            return self.values[tuple(np.moveaxis(offset, -1, 0))]
        r = np.sqrt(np.sum(np.asarray(z, dtype=float) ** 2, axis=-1))
        if self.kind == "polynomial":
            return (1.0 + r) ** self.s
        return np.exp(self.b * r**self.gamma)

    def to_json(self) -> dict:
        if self.kind == "polynomial":
            return {"kind": "polynomial", "s": self.s}
        if self.kind == "exponential-sub":
            return {"kind": "exponential-sub", "b": self.b, "gamma": self.gamma}
        return {"kind": "table", "lo": list(self.lo), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> Weight:
        try:
            kind = data["kind"]
            if kind == "polynomial":
                return cls.polynomial(data["s"])
            if kind == "exponential-sub":
                return cls.exponential_sub(data["b"], data["gamma"])
            if kind == "table":
                return cls.table(data["lo"], data["values"])
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed Weight JSON: {exc}") from None
        raise InvalidArgumentError(f"unknown weight kind {kind!r}")


def weight_eval(w: Weight, z) -> float:
    """Scalar evaluation of ``w`` at a single lattice vector."""
    z = np.atleast_1d(np.asarray(z))
    if z.ndim != 1:
        raise InvalidArgumentError("weight_eval takes a single vector")
    return float(w.evaluate(z))


def check_grs_condition(w: Weight, z, n_max: int) -> np.ndarray:
    """Sampled sequence ``w(n z)^(1/n)`` for n = 1..n_max.

    Only a diagnostic: the limit condition cannot be decided from samples.
    """
    if n_max < 2:
        raise InvalidArgumentError(f"n_max must be at least 2, got {n_max}")
    z = np.atleast_1d(np.asarray(z, dtype=np.int64))
    n = np.arange(1, n_max + 1)
    vals = w.evaluate(n[:, None] * z[None, :])
    return vals ** (1.0 / n)


def weight_violations(w: Weight, dim: int, radius: int) -> dict:
    """Largest violations of positivity, symmetry and sub-multiplicativity on a box.

    Triples are restricted to those with ``x``, ``y`` and ``x + y`` in
    ``[-radius, radius]^dim``.  Returns non-negative numbers; zero means no
    violation was found.
    """
    axis = np.arange(-radius, radius + 1)
    grid = np.array(list(itertools.product(axis, repeat=dim)), dtype=np.int64)
    vals = w.evaluate(grid)
    sym = np.abs(vals - w.evaluate(-grid)).max()
    pos = max(0.0, float(-vals.min()))
    sums = grid[:, None, :] + grid[None, :, :]
    inside = np.all(np.abs(sums) <= radius, axis=-1)
    prod = vals[:, None] * vals[None, :]
    lhs = np.zeros_like(prod)
    lhs[inside] = w.evaluate(sums[inside])
    sub = np.where(inside, lhs - prod, 0.0).max()
    return {
        "positivity": pos,
        "symmetry": float(sym),
        "submultiplicativity": max(0.0, float(sub)),
    }
