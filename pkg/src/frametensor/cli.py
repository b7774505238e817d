"""Command-line harness.

Exit codes: 0 when everything passed, 1 when a verification check failed,
2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import frames as fr
from . import io as fio
from .algebras import AlgebraSpec, algebra_norm, operator_norm
from .errors import FrameTensorError, SingularityError
from .lattice import Weight
from .sampling import line, random_complex, random_frame, rng_for
from .tensor4 import Tensor4, TensorAlgebraSpec, inverse_in_algebra, norm_a, norm_a1_tilde, norm_a2_tilde
from .verify import CHECKS, DEFAULT_TOLERANCES, RunConfig, run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_spec(text: str) -> AlgebraSpec:
    """Parse ``jaffard:s=2``, ``schur:p=1,delta=0.5``, ``sjostrand:s=1`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return AlgebraSpec.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad spec JSON: {exc}") from None
    family, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad spec parameter {item!r}")
        params[key.strip()] = value.strip()
    try:
        if family == "jaffard":
            return AlgebraSpec.jaffard(float(params.get("s", 0)))
        if family == "schur":
            return AlgebraSpec.schur(float(params.get("p", 1)), float(params.get("delta", 0)))
        if family == "sjostrand":
            kind = params.pop("kind", "polynomial")
            if kind == "polynomial":
                return AlgebraSpec.sjostrand(Weight.polynomial(float(params.get("s", 0))))
            if kind == "exponential-sub":
                return AlgebraSpec.sjostrand(
                    Weight.exponential_sub(float(params.get("b", 1)), float(params.get("gamma", 0.5)))
                )
            raise UsageError(f"unsupported sjostrand weight kind {kind!r}")
    except ValueError as exc:
        raise UsageError(f"bad spec {text!r}: {exc}") from None
    raise UsageError(f"unknown algebra family {family!r}")


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or ():
        name, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"--tol expects CHECK=VALUE, got {item!r}")
        if name not in DEFAULT_TOLERANCES:
            raise UsageError(f"unknown check {name!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
        try:
            tol = float(value)
        except ValueError:
            raise UsageError(f"bad tolerance {value!r}") from None
        if not tol >= 0:
            raise UsageError(f"tolerance must be non-negative, got {tol}")
        out[name] = tol
    return out


def parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise UsageError("sizes must be positive integers")
    return sizes


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a - b)


def cmd_gen_frame(args) -> int:
    n = args.size
    if args.kind == "orthonormal":
        F = fr.orthonormal_basis(n)
    elif args.kind == "union-of-bases":
        F = fr.union_of_bases(n)
    elif args.kind == "shift-invariant":
        F = fr.shift_invariant_frame(n, args.rate)
    else:
        F = random_frame(rng_for(args.seed), args.elements or n + 1, n)
    _emit(json.dumps(fio.frame_to_json(F)) + "\n", args.out)
    return EXIT_OK


def cmd_gram(args) -> int:
    F = fio.read_frame(args.frame)
    spec = parse_spec(args.spec)
    rep = fr.localisation_report(F, spec)
    G = fr.gram_matrix(F)
    if args.format == "csv":
        _emit(_csv(rep.profile, ["distance", "max_abs"]), args.out)
        return EXIT_OK
    lower, upper = fr.frame_bounds(F)
    report = {
        "frame": {"space_dim": F.space_dim, "size": len(F)},
        **rep.to_json(),
        "operator_norm": operator_norm(G),
        "frame_bounds": [lower, upper],
        "is_frame": fr.is_frame(F),
        "gram": fio.complex_to_json(G.entries),
    }
    _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_tensor(args) -> int:
    F1, F2 = fio.read_frame(args.frame1), fio.read_frame(args.frame2)
    spec = TensorAlgebraSpec(parse_spec(args.spec1), parse_spec(args.spec2))
    HS = fr.tensor_product_frame(F1, F2)
    G = fr.gram_tensor4(HS)
    G1, G2 = fr.gram_matrix(F1), fr.gram_matrix(F2)
    computed = {
        "norm_a1_tilde": norm_a1_tilde(G, spec.spec1),
        "norm_a2_tilde": norm_a2_tilde(G, spec.spec2),
        "norm_a": norm_a(G, spec),
    }
    f1 = operator_norm(G2) * algebra_norm(G1, spec.spec1)
    f2 = operator_norm(G1) * algebra_norm(G2, spec.spec2)
    factorised = {"norm_a1_tilde": f1, "norm_a2_tilde": f2, "norm_a": max(f1, f2)}
    rel = {k: _rel(computed[k], factorised[k]) for k in computed}
    if args.tensor_out:
        fio.write_tensor(G, args.tensor_out)
    if args.format == "csv":
        rows = [(k, computed[k], factorised[k], rel[k]) for k in computed]
        _emit(_csv(rows, ["quantity", "computed", "factorised", "relative_difference"]), args.out)
        return EXIT_OK
    report = {
        "spec_pair": spec.to_json(),
        "sizes": {"outer": len(F1), "inner": len(F2)},
        "computed": computed,
        "factorised": factorised,
        "relative_difference": rel,
        "frame_bounds": {
            "factor1": list(fr.frame_bounds(F1)),
            "factor2": list(fr.frame_bounds(F2)),
            "product": list(fr.frame_bounds(HS.as_frame())),
        },
    }
    _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cfg = RunConfig(
            seed=args.seed,
            outer_size=args.outer_size,
            inner_size=args.inner_size,
            trials=args.trials,
            tolerances=parse_tolerances(args.tol),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    names = args.check or None
    if names:
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}")
    report = run_verification(cfg, names)
    if args.format == "csv":
        rows = [(c.name, c.trials, repr(c.max_violation), repr(c.tolerance), c.passed) for c in report.checks]
        _emit(_csv(rows, ["name", "trials", "max_violation", "tolerance", "passed"]), args.out)
    else:
        _emit(_dump(report.to_json()), args.out)
    for c in report.failures():
        print(f"FAILED {json.dumps(c.to_json())}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def trend_perturbation(size: int, seed: int, kind: str, decay: float, spec: TensorAlgebraSpec) -> Tensor4:
    """Unit-norm perturbation on I1 = I2 = {0..size-1}.

    ``random``: random entries damped by (1+|i-j|)^-decay (1+|k-l|)^-decay;
    ``identity``: minus the identity tensor.
    """
    I = line(size)
    if kind == "identity":
        return Tensor4.identity(I, I) * -1.0
    rng = rng_for(seed, size)
    d = np.abs(np.subtract.outer(np.arange(size), np.arange(size)))
    damp = (1.0 + d) ** -decay
    entries = random_complex(rng, (size,) * 4) * np.einsum("ij,kl->iklj", damp, damp)
    R = Tensor4(I, I, entries)
    return R / norm_a(R, spec)


def cmd_inverse_trend(args) -> int:
    spec = TensorAlgebraSpec(parse_spec(args.spec1), parse_spec(args.spec2))
    sizes = parse_sizes(args.sizes)
    rows = []
    for size in sizes:
        R = trend_perturbation(size, args.seed, args.kind, args.decay, spec)
        I = line(size)
        A = Tensor4.identity(I, I) + R * args.perturbation
        try:
            _, rep = inverse_in_algebra(A, spec)
        except SingularityError as exc:
            rows.append({"size": size, "norm_a": norm_a(A, spec), "status": f"singular (cond={exc.condition:.3e})"})
            continue
        rows.append({"size": size, **rep.to_json(), "status": "ok"})
    fields = ["size", "norm_a", "norm_a_inverse", "operator_norm", "operator_norm_inverse", "residual", "condition", "status"]
    if args.format == "json":
        clean = [{k: (v if not isinstance(v, float) or math.isfinite(v) else str(v)) for k, v in r.items()} for r in rows]
        _emit(_dump({"spec_pair": spec.to_json(), "perturbation": args.perturbation, "rows": clean}), args.out)
    else:
        table = [[repr(r[f]) if isinstance(r.get(f), float) else r.get(f, "") for f in fields] for r in rows]
        _emit(_csv(table, fields), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), help="report format (default json; csv for inverse-trend)")

    p = argparse.ArgumentParser(prog="frametensor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-frame", parents=[common], help="write a fixture frame as JSON")
    g.add_argument("--kind", choices=("orthonormal", "union-of-bases", "shift-invariant", "random"), default="orthonormal")
    g.add_argument("--size", type=int, default=8, help="ambient dimension N")
    g.add_argument("--rate", type=float, default=1.0, help="window decay rate (shift-invariant)")
    g.add_argument("--elements", type=int, help="number of vectors (random; default N+1)")
    g.set_defaults(func=cmd_gen_frame)

    g = sub.add_parser("gram", parents=[common], help="Gram matrix, algebra norm and decay profile")
    g.add_argument("frame")
    g.add_argument("--spec", default="jaffard:s=2")
    g.set_defaults(func=cmd_gram)

    g = sub.add_parser("tensor", parents=[common], help="Gram tensor norms of a tensor product frame")
    g.add_argument("frame1")
    g.add_argument("frame2")
    g.add_argument("--spec1", default="jaffard:s=2")
    g.add_argument("--spec2", default="jaffard:s=3")
    g.add_argument("--tensor-out", help="also write the Gram tensor (JSON header + CSV payload)")
    g.set_defaults(func=cmd_tensor)

    g = sub.add_parser("verify", parents=[common], help="run the seeded property suite")
    g.add_argument("--outer-size", type=int, default=4)
    g.add_argument("--inner-size", type=int, default=4)
    g.add_argument("--trials", type=int, help="override the trial count of every check")
    g.add_argument("--tol", action="append", metavar="CHECK=VALUE", help="tolerance override")
    g.add_argument("--check", action="append", metavar="NAME", help="run only these checks")
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("inverse-trend", parents=[common], help="inverse norms along growing truncations")
    g.add_argument("--sizes", default="2,3,4")
    g.add_argument("--perturbation", type=float, default=0.5, help="algebra norm of the perturbation")
    g.add_argument("--kind", choices=("random", "identity"), default="random")
    g.add_argument("--decay", type=float, default=2.0, help="off-diagonal decay of random perturbations")
    g.add_argument("--spec1", default="jaffard:s=2")
    g.add_argument("--spec2", default="jaffard:s=3")
    g.set_defaults(func=cmd_inverse_trend)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "inverse-trend" else "json"
    try:
        return args.func(args)
    except (UsageError, FrameTensorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
