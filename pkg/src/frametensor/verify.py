"""Seeded property suite over the tensor algebra and the frame machinery.

Each check runs a number of trials, records the largest violation it saw
and passes iff that violation does not exceed its tolerance.  Violations
are relative errors or relative excesses over an inequality's right-hand
side, clipped at zero for one-sided checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import frames as fr
from .algebras import AlgebraSpec, algebra_norm, check_solidity, operator_norm
from .lattice import Weight
from .sampling import dominated, line, random_complex, random_frame, random_matrix, random_tensor, rng_for
from .tensor4 import (
    Tensor4,
    TensorAlgebraSpec,
    adjoint,
    contract,
    contract_summation,
    flatten,
    inverse_in_algebra,
    kronecker,
    norm_a,
    norm_a1_tilde,
    norm_a2_tilde,
)

DEFAULT_SPEC_PAIRS = (
    TensorAlgebraSpec(AlgebraSpec.jaffard(2), AlgebraSpec.jaffard(3)),
    TensorAlgebraSpec(AlgebraSpec.schur(1, 0), AlgebraSpec.sjostrand(Weight.polynomial(0))),
    TensorAlgebraSpec(AlgebraSpec.jaffard(2), AlgebraSpec.schur(1, 1)),
)

SCALAR_FAMILIES = (
    AlgebraSpec.jaffard(2),
    AlgebraSpec.schur(1, 0.5),
    AlgebraSpec.schur(2, 1),
    AlgebraSpec.sjostrand(Weight.polynomial(1)),
)

DEFAULT_TOLERANCES = {
    "submultiplicativity": 1e-10,
    "involution_isometry": 1e-12,
    "anti_homomorphism": 1e-13,
    "flatten_homomorphism": 1e-13,
    "contraction_oracle": 1e-13,
    "scalar_solidity": 1e-12,
    "non_solidity_witness": 0.0,
    "neumann_inverse_bound": 1e-8,
    "neumann_series": 1e-10,
    "inversion_residual": 1e-10,
    "reconstruction": 1e-10,
    "dft_frame_bounds": 1e-10,
    "gram_factorisation": 1e-13,
    "norm_factorisation": 1e-10,
}

DEFAULT_TRIALS = {
    "submultiplicativity": 500,
    "involution_isometry": 500,
    "anti_homomorphism": 500,
    "flatten_homomorphism": 200,
    "contraction_oracle": 20,
    "scalar_solidity": 500,
    "non_solidity_witness": 1000,
    "neumann_inverse_bound": 5,
    "neumann_series": 5,
    "inversion_residual": 5,
    "reconstruction": 50,
    "dft_frame_bounds": 13,
    "gram_factorisation": 50,
    "norm_factorisation": 50,
}

INVERSE_SIZES = (2, 3, 4)
NEUMANN_RADIUS = 0.5

# stream families keep the samples of different checks independent, while
# checks sharing a family (e.g. the algebra laws) see identical samples
_STREAM_TENSOR_PAIRS = 1 << 32
_STREAM_SOLIDITY = 2 << 32
_STREAM_WITNESS = 3 << 32
_STREAM_INVERSE = 4 << 32
_STREAM_FRAMES = 5 << 32
_STREAM_FRAME_PAIRS = 6 << 32


@dataclass
class RunConfig:
    seed: int = 0
    outer_size: int = 4
    inner_size: int = 4
    trials: int | None = None
    tolerances: dict = field(default_factory=dict)
    spec_pairs: tuple = DEFAULT_SPEC_PAIRS

    def __post_init__(self):
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown check names: {sorted(unknown)}")
        for name, tol in self.tolerances.items():
            if not tol >= 0:
                raise ValueError(f"tolerance for {name} must be non-negative, got {tol}")
        if self.outer_size < 1 or self.inner_size < 1:
            raise ValueError("index set sizes must be positive")

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def n_trials(self, name: str) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[name]


@dataclass
class CheckRecord:
    name: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "trials": self.trials,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    environment: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "environment": self.environment,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def _rel(a, b) -> float:
    """Max-entry relative difference of ``a`` against reference ``b``."""
    a, b = np.asarray(a), np.asarray(b)
    scale = np.abs(b).max() if b.size else 0.0
    diff = np.abs(a - b).max() if a.size else 0.0
    return float(diff / scale) if scale > 0 else float(diff)


def _tensor_pairs(cfg: RunConfig, n: int):
    I1, I2 = line(cfg.outer_size), line(cfg.inner_size)
    for t in range(n):
        rng = rng_for(cfg.seed, _STREAM_TENSOR_PAIRS + t)
        yield random_tensor(rng, I1, I2), random_tensor(rng, I1, I2)


def check_submultiplicativity(cfg: RunConfig, n: int):
    worst = 0.0
    for A, B in _tensor_pairs(cfg, n):
        for spec in cfg.spec_pairs:
            lhs = norm_a(contract(A, B), spec)
            rhs = norm_a(A, spec) * norm_a(B, spec)
            worst = max(worst, lhs / rhs - 1.0)
    return worst, {}


def check_involution_isometry(cfg: RunConfig, n: int):
    worst = 0.0
    for A, _ in _tensor_pairs(cfg, n):
        Astar = adjoint(A)
        for spec in cfg.spec_pairs:
            worst = max(worst, _rel(norm_a(Astar, spec), norm_a(A, spec)))
    return worst, {}


def check_anti_homomorphism(cfg: RunConfig, n: int):
    worst = 0.0
    for A, B in _tensor_pairs(cfg, n):
        lhs = adjoint(contract(A, B)).entries
        rhs = contract(adjoint(B), adjoint(A)).entries
        worst = max(worst, _rel(lhs, rhs))
    return worst, {}


def check_flatten_homomorphism(cfg: RunConfig, n: int):
    worst = 0.0
    for A, B in _tensor_pairs(cfg, n):
        fA, fB = flatten(A).entries, flatten(B).entries
        worst = max(
            worst,
            _rel(flatten(contract(A, B)).entries, fA @ fB),
            _rel(flatten(adjoint(A)).entries, fA.conj().T),
        )
    return worst, {}


def check_contraction_oracle(cfg: RunConfig, n: int):
    worst = 0.0
    for A, B in _tensor_pairs(cfg, n):
        worst = max(worst, _rel(contract(A, B).entries, contract_summation(A, B).entries))
    return worst, {}


def check_scalar_solidity(cfg: RunConfig, n: int):
    index = line(max(cfg.outer_size, cfg.inner_size))
    worst, failures = 0.0, {}
    for f, spec in enumerate(SCALAR_FAMILIES):
        bad = 0
        for t in range(n):
            rng = rng_for(cfg.seed, _STREAM_SOLIDITY + f * 100_000 + t)
            A = random_matrix(rng, index)
            B = dominated(rng, A)
            na, nb = algebra_norm(A, spec), algebra_norm(B, spec)
            worst = max(worst, (nb - na) / na)
            bad += not check_solidity(spec, A, B)
        failures[spec.label()] = bad
    return max(worst, 0.0), {"failed_pairs": failures}


def find_non_solidity_witness(cfg: RunConfig, n: int):
    """Search sign patterns A (entries +-1) against B = |A| for ``||B|| > ||A||``."""
    I1, I2 = line(cfg.outer_size), line(cfg.inner_size)
    shape = (len(I1), len(I2), len(I2), len(I1))
    for t in range(n):
        rng = rng_for(cfg.seed, _STREAM_WITNESS + t)
        A = Tensor4(I1, I2, rng.choice([-1.0, 1.0], size=shape))
        B = A.with_entries(np.abs(A.entries))
        for spec in cfg.spec_pairs:
            na, nb = norm_a(A, spec), norm_a(B, spec)
            if nb > na * (1 + 1e-9):
                return t + 1, (A, B, spec, na, nb)
    return n, None


def check_non_solidity_witness(cfg: RunConfig, n: int):
    searched, found = find_non_solidity_witness(cfg, n)
    if found is None:
        return 1.0, {"searched": searched}
    _, _, spec, na, nb = found
    return 0.0, {"searched": searched, "spec": spec.label(), "norm_A": na, "norm_B": nb}


def neumann_case(seed: int, size: int, trial: int, spec: TensorAlgebraSpec, radius: float):
    """Identity plus a random perturbation scaled to algebra norm ``radius``."""
    I = line(size)
    rng = rng_for(seed, _STREAM_INVERSE + 1000 * size + trial)
    R = random_tensor(rng, I, I)
    R = R * (radius / norm_a(R, spec))
    return Tensor4.identity(I, I) + R, R


def neumann_series(R: Tensor4, terms_tol: float = 1e-17, max_terms: int = 500) -> Tensor4:
    """Partial sums of ``sum_n (-R)^n`` until the term norm drops below ``terms_tol``."""
    term = Tensor4.identity(R.outer, R.inner)
    total = term
    for _ in range(max_terms):
        term = contract(term, R * -1.0)
        total = total + term
        if np.abs(term.entries).max() < terms_tol:
            break
    return total


def _inverse_trials(cfg: RunConfig, n: int):
    for size in INVERSE_SIZES:
        for spec in cfg.spec_pairs:
            for t in range(n):
                A, R = neumann_case(cfg.seed, size, t, spec, NEUMANN_RADIUS)
                yield spec, A, R


def check_neumann_inverse_bound(cfg: RunConfig, n: int):
    bound = 1.0 / (1.0 - NEUMANN_RADIUS)
    worst, largest = 0.0, 0.0
    for spec, A, _ in _inverse_trials(cfg, n):
        _, rep = inverse_in_algebra(A, spec)
        largest = max(largest, rep.norm_a_inverse)
        worst = max(worst, rep.norm_a_inverse - bound)
    return worst, {"bound": bound, "largest_inverse_norm": largest}


def check_neumann_series(cfg: RunConfig, n: int):
    worst = 0.0
    for spec, A, R in _inverse_trials(cfg, n):
        inv, _ = inverse_in_algebra(A, spec)
        worst = max(worst, _rel(neumann_series(R).entries, inv.entries))
    return worst, {}


def check_inversion_residual(cfg: RunConfig, n: int):
    worst = 0.0
    for spec, A, _ in _inverse_trials(cfg, n):
        _, rep = inverse_in_algebra(A, spec)
        worst = max(worst, rep.residual)
    return worst, {}


def _circulant_fixtures(n: int):
    for t in range(n):
        size = 4 + t
        rate = 0.5 + 0.25 * (t % 4)
        yield fr.shift_invariant_frame(size, rate), fr.decaying_window(size, rate)


def check_reconstruction(cfg: RunConfig, n: int):
    worst = 0.0
    frames_ = []
    for t in range(n):
        rng = rng_for(cfg.seed, _STREAM_FRAMES + t)
        space = 2 + t % 5
        frames_.append((rng, random_frame(rng, space + 1 + t % 4, space)))
    for F, _ in _circulant_fixtures(DEFAULT_TRIALS["dft_frame_bounds"] if n > 1 else 1):
        frames_.append((rng_for(cfg.seed, _STREAM_FRAMES + 10**6 + len(F)), F))
    for rng, F in frames_:
        dual = fr.canonical_dual(F)
        for _ in range(3):
            f = random_complex(rng, F.space_dim)
            scale = np.linalg.norm(f)
            r1 = np.linalg.norm(fr.synthesis(dual, fr.analysis(F, f)) - f) / scale
            r2 = np.linalg.norm(fr.synthesis(F, fr.analysis(dual, f)) - f) / scale
            worst = max(worst, r1, r2)
    return worst, {"frames": len(frames_)}


def check_dft_frame_bounds(cfg: RunConfig, n: int):
    worst = 0.0
    for F, g in _circulant_fixtures(n):
        lower, upper = fr.frame_bounds(F)
        lo_ref, up_ref = fr.circulant_frame_bounds(g)
        worst = max(worst, abs(lower - lo_ref) / lo_ref, abs(upper - up_ref) / up_ref)
    return worst, {}


def _frame_pairs(cfg: RunConfig, n: int):
    for t in range(n):
        rng = rng_for(cfg.seed, _STREAM_FRAME_PAIRS + t)
        yield random_frame(rng, 6, 4), random_frame(rng, 5, 3)


def check_gram_factorisation(cfg: RunConfig, n: int):
    worst = 0.0
    for F1, F2 in _frame_pairs(cfg, n):
        G = fr.gram_tensor4(fr.tensor_product_frame(F1, F2))
        G1, G2 = fr.gram_matrix(F1), fr.gram_matrix(F2)
        K = kronecker(G1.with_entries(G1.entries.conj()), G2)
        worst = max(worst, _rel(G.entries, K.entries))
    return worst, {}


def check_norm_factorisation(cfg: RunConfig, n: int):
    worst = 0.0
    finite = True
    for F1, F2 in _frame_pairs(cfg, n):
        G = fr.gram_tensor4(fr.tensor_product_frame(F1, F2))
        G1, G2 = fr.gram_matrix(F1), fr.gram_matrix(F2)
        for spec in cfg.spec_pairs:
            rhs1 = operator_norm(G2) * algebra_norm(G1, spec.spec1)
            rhs2 = operator_norm(G1) * algebra_norm(G2, spec.spec2)
            worst = max(
                worst,
                _rel(norm_a1_tilde(G, spec.spec1), rhs1),
                _rel(norm_a2_tilde(G, spec.spec2), rhs2),
                _rel(norm_a(G, spec), max(rhs1, rhs2)),
            )
            finite &= math.isfinite(norm_a(G, spec))
    return (worst if finite else math.inf), {}


CHECKS = {
    "submultiplicativity": check_submultiplicativity,
    "involution_isometry": check_involution_isometry,
    "anti_homomorphism": check_anti_homomorphism,
    "flatten_homomorphism": check_flatten_homomorphism,
    "contraction_oracle": check_contraction_oracle,
    "scalar_solidity": check_scalar_solidity,
    "non_solidity_witness": check_non_solidity_witness,
    "neumann_inverse_bound": check_neumann_inverse_bound,
    "neumann_series": check_neumann_series,
    "inversion_residual": check_inversion_residual,
    "reconstruction": check_reconstruction,
    "dft_frame_bounds": check_dft_frame_bounds,
    "gram_factorisation": check_gram_factorisation,
    "norm_factorisation": check_norm_factorisation,
}


def run_check(name: str, cfg: RunConfig) -> CheckRecord:
    n = cfg.n_trials(name)
    violation, detail = CHECKS[name](cfg, n)
    tol = cfg.tolerance(name)
    violation = float(violation)
    return CheckRecord(name, n, violation, tol, bool(violation <= tol), detail)


def run_verification(cfg: RunConfig, names=None) -> VerificationReport:
    names = list(CHECKS) if names is None else list(names)
    environment = {
        "seed": cfg.seed,
        "sizes": {"outer": cfg.outer_size, "inner": cfg.inner_size},
        "spec_pairs": [s.to_json() for s in cfg.spec_pairs],
        "trials_override": cfg.trials,
    }
    return VerificationReport(environment, [run_check(name, cfg) for name in names])
