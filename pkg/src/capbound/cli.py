"""Command line front end: bound runs, analytic bounds, checks, codes, export.

Output is JSON by default (deterministic: sorted keys, fixed indentation,
and a timestamp that --no-timestamp removes). Exit codes: 0 success,
2 configuration error, 3 solver failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from typing import Optional

from .certify import (
    AnalyticInapplicable,
    bound_example1,
    bound_example2,
    certificate_from_solution,
    verify_certificate,
)
from .codes import Code, cap_subcode, distance_distribution, dn_roots, e8_roots, min_angle
from .conic import SolverConfig, export_sdpa, solve
from .harness import (
    kernel_reproduce_test,
    mass_report,
    orthogonality_report,
    positivity_sample_test,
    quadrature_rule,
    total_mass,
)
from .polyalg import tripoly_to_json
from .relax import CapParams, assemble_distance_lp_comparison, build_cap_sdp
from .zonal import MatrixCoefficients, reconstruct, zonal_family

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

# cosines of the angles that must stay exact end to end
_EXACT_ANGLES = {
    "0": Fraction(1),
    "pi/3": Fraction(1, 2),
    "pi/2": Fraction(0),
    "2pi/3": Fraction(-1, 2),
    "pi": Fraction(-1),
}

# comparison columns for the summary row: best known lower bounds and the
# previously best published upper bounds, by dimension
TABLE1_LOWER = {3: 9, 4: 18, 5: 32, 6: 51, 7: 93, 8: 183}
TABLE1_PREV = {3: 9, 4: 18, 5: 35, 6: 64, 7: 110, 8: 186, 9: 309}


class ConfigError(ValueError):
    pass


def parse_angle(text: str) -> Fraction | float:
    """Cosine of an angle given as "pi/3"-style text or a float in radians.

    The five angles whose cosines are the rationals 1, 1/2, 0, -1/2, -1
    come back exact; anything else degrades to float with a warning.
    """
    key = text.strip().lower().replace(" ", "").replace("*", "")
    if key in _EXACT_ANGLES:
        return _EXACT_ANGLES[key]
    try:
        radians = float(key)
    except ValueError:
        raise ConfigError(
            f"cannot parse angle {text!r}: use one of {sorted(_EXACT_ANGLES)} or radians"
        ) from None
    print(
        f"warning: angle {text!r} is not one of the exact cases; "
        "using a float cosine (constraints stay exact, the geometry does not)",
        file=sys.stderr,
    )
    return math.cos(radians)


def _cosine_option(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse cosine {text!r} as a rational (use e.g. 1/2)") from None


def _resolve_params(args) -> CapParams:
    cos_theta = (
        _cosine_option(args.cos_theta) if args.cos_theta is not None else parse_angle(args.theta)
    )
    cos_phi = _cosine_option(args.cos_phi) if args.cos_phi is not None else parse_angle(args.phi)
    try:
        return CapParams(
            n=args.n,
            cos_theta=Fraction(cos_theta),
            cos_phi=Fraction(cos_phi),
            d=args.d,
            N=args.N,
            radial_margin=args.radial_margin,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(payload: dict, args) -> None:
    if not getattr(args, "no_timestamp", False):
        payload = {**payload, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)


def _summary_row(n: int, bound: float) -> str:
    lower = TABLE1_LOWER.get(n, "-")
    prev = TABLE1_PREV.get(n, "-")
    return f"{n} | {lower} | {prev} | <={bound:.4g}"


def _cmd_bound(args) -> int:
    params = _resolve_params(args)
    problem = build_cap_sdp(params)
    config = SolverConfig(
        tolerance=args.tolerance, max_iterations=args.max_iterations, verbose=args.verbose
    )
    solution = solve(problem, config)
    if not solution.converged:
        print(
            f"solver failed: status {solution.status} after {solution.iterations} iterations "
            f"(residuals {json.dumps(solution.residuals, sort_keys=True)})",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    certificate = verify_certificate(
        certificate_from_solution(params, solution),
        problem=problem,
        tolerance=args.verify_tolerance,
    )
    if certificate.verdict != "verified":
        failed = [c["name"] for c in certificate.checks if not c["passed"]]
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY

    if args.certificate_out:
        with open(args.certificate_out, "w") as fh:
            fh.write(certificate.to_json() + "\n")

    payload = {
        "params": certificate.params,
        "bound": certificate.bound,
        "objective": 1.0 + float(certificate.scalars["M"]),
        "verdict": certificate.verdict,
        "solver_status": solution.status,
        "summary_row": _summary_row(params.n, certificate.bound),
        "checks": certificate.checks,
    }
    if args.dump_poly:
        payload["certified_polynomial"] = json.loads(_dump_poly(params, certificate))
    if args.format == "table":
        print(payload["summary_row"])
    else:
        _emit(payload, args)
    return EXIT_OK


def _dump_poly(params: CapParams, certificate) -> str:
    """Exact expansion of sum_k <F_k, bar Y_k> from the certified matrices."""
    degree = max(
        int(label[2:]) + len(rows) - 1
        for label, rows in certificate.matrix_coefficients.items()
    )
    family = zonal_family(params.n, degree)
    matrices = []
    for k in family.blocks:
        size = family.block_size(k)
        label = f"F_{k}"
        if label in certificate.matrix_coefficients:
            mat = [
                [Fraction(float(x)) for x in row]
                for row in certificate.matrix_coefficients[label]
            ]
            mat += [[Fraction(0)] * size for _ in range(size - len(mat))]
            mat = [row + [Fraction(0)] * (size - len(row)) for row in mat]
        else:
            mat = [[Fraction(0)] * size for _ in range(size)]
        matrices.append(mat)
    coeffs = MatrixCoefficients(n=params.n, d=degree, matrices=matrices)
    return tripoly_to_json(reconstruct(coeffs, family))


def _cmd_analytic(args) -> int:
    cos_theta = (
        _cosine_option(args.cos_theta) if args.cos_theta is not None else parse_angle(args.theta)
    )
    cos_phi = _cosine_option(args.cos_phi) if args.cos_phi is not None else parse_angle(args.phi)
    try:
        if args.example == 1:
            bound = bound_example1(cos_theta, cos_phi)
            detail = {}
        else:
            result = bound_example2(args.n, cos_theta, cos_phi)
            bound = result.bound
            detail = {"a_opt": str(result.a_opt), "f0_max": str(result.f0_max)}
    except AnalyticInapplicable as exc:
        print(f"analytic bound inapplicable: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    payload = {
        "example": args.example,
        "n": args.n,
        "cos_theta": str(Fraction(cos_theta)),
        "cos_phi": str(Fraction(cos_phi)),
        "bound": float(bound),
        "bound_exact": str(bound),
        **detail,
    }
    _emit(payload, args)
    return EXIT_OK


def _cmd_verify(args) -> int:
    n, d = args.n, args.d
    if args.suite == "orthogonality":
        report = orthogonality_report(n, d)
        passed = report["max_deviation"] <= args.suite_tolerance
    elif args.suite == "kernel":
        worst = kernel_reproduce_test(n, d, trials=args.trials, seed=args.seed)
        report = {"n": n, "d": d, "trials": args.trials, "max_deviation": worst}
        passed = worst <= args.suite_tolerance
    elif args.suite == "positivity":
        worst = positivity_sample_test(n, d, trials=args.trials, seed=args.seed)
        report = {"n": n, "d": d, "trials": args.trials, "min_value": worst}
        passed = worst >= -args.suite_tolerance
    else:
        rule = quadrature_rule(n, 2 * d)
        mass = total_mass(rule)
        report = {
            "n": n,
            "d": d,
            "total_mass": mass,
            "mass_deviation": abs(mass - 1.0),
            "per_dimension": mass_report(),
        }
        passed = abs(mass - 1.0) <= args.suite_tolerance
    passed = bool(passed)
    _emit({"suite": args.suite, "passed": passed, "report": report}, args)
    return EXIT_OK if passed else EXIT_VERIFY


def _build_family_code(args) -> Code:
    if args.family == "e8":
        return e8_roots()
    if args.n is None:
        raise ConfigError("--family dn needs --n")
    return dn_roots(args.n)


def _cmd_codes(args) -> int:
    code = _build_family_code(args)
    cos_phi = _cosine_option(args.cos_cap) if args.cos_cap is not None else parse_angle(args.cap)
    sub = cap_subcode(code, code.points[0], cos_phi)
    if args.format == "text":
        lines = [" ".join(str(c) for c in p) for p in sub.points]
        body = "\n".join(lines)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(body + "\n")
            print(f"wrote {args.output}")
        else:
            print(body)
        return EXIT_OK
    distribution = distance_distribution(sub)
    histogram = {
        f"u={str(k[0])},v={str(k[1])},t={str(k[2])}": str(w)
        for k, w in sorted(distribution.items())
    }
    angle = min_angle(sub)
    payload = {
        "family": args.family,
        "dimension": code.dimension,
        "total_points": len(code),
        "cap_cos": str(Fraction(cos_phi)),
        "points_in_cap": len(sub),
        "min_angle_radians": angle,
        "min_angle_degrees": math.degrees(angle),
        "distribution": histogram,
        "pole": " ".join(str(c) for c in sub.pole),
    }
    _emit(payload, args)
    return EXIT_OK


def _cmd_export(args) -> int:
    params = _resolve_params(args)
    problem = (
        assemble_distance_lp_comparison(params) if args.lp else build_cap_sdp(params)
    )
    export_sdpa(problem, args.output)
    sizes = {label: size for label, size in problem.blocks}
    print(
        f"wrote {args.output}: {len(problem.constraints)} rows, "
        f"{len(problem.blocks)} blocks, sizes {json.dumps(sizes, sort_keys=True)}"
    )
    return EXIT_OK


def _add_geometry(parser: argparse.ArgumentParser, with_sizes: bool = True) -> None:
    parser.add_argument("--n", type=int, required=True, help="ambient dimension")
    parser.add_argument("--theta", default="pi/3", help='min angle, e.g. "pi/3" (default)')
    parser.add_argument("--phi", default="pi/2", help='cap angle, e.g. "pi/2" (default)')
    parser.add_argument("--cos-theta", help="rational cosine override, e.g. 1/2")
    parser.add_argument("--cos-phi", help="rational cosine override, e.g. 0")
    if with_sizes:
        parser.add_argument("--d", type=int, default=10, help="family degree (default 10)")
        parser.add_argument("--N", type=int, default=10, help="multiplier degree (default 10)")
        parser.add_argument(
            "--radial-margin",
            type=int,
            default=1,
            help="extra radial basis rows per block (default 1; 0 is the minimal space)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capbound",
        description="Certified upper bounds for codes in spherical caps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="build, solve, and verify a cap bound")
    _add_geometry(p_bound)
    p_bound.add_argument("--tolerance", type=float, default=1e-8, help="solver tolerance")
    p_bound.add_argument(
        "--verify-tolerance", type=float, default=1e-7, help="certification tolerance"
    )
    p_bound.add_argument("--max-iterations", type=int, default=200)
    p_bound.add_argument("--format", choices=("json", "table"), default="json")
    p_bound.add_argument("--output", help="write the JSON report to a file")
    p_bound.add_argument("--certificate-out", help="write the full certificate to a file")
    p_bound.add_argument(
        "--dump-poly",
        action="store_true",
        help="include the exact certified polynomial in the report",
    )
    p_bound.add_argument("--no-timestamp", action="store_true")
    p_bound.add_argument("--verbose", action="store_true", help="log solver iterations")
    p_bound.set_defaults(func=_cmd_bound)

    p_analytic = sub.add_parser("analytic", help="closed-form bounds from small witnesses")
    p_analytic.add_argument("--example", type=int, choices=(1, 2), required=True)
    _add_geometry(p_analytic, with_sizes=False)
    p_analytic.add_argument("--output")
    p_analytic.add_argument("--no-timestamp", action="store_true")
    p_analytic.set_defaults(func=_cmd_analytic)

    p_verify = sub.add_parser("verify", help="run a numerical check suite")
    p_verify.add_argument(
        "--suite",
        choices=("orthogonality", "kernel", "positivity", "quadrature"),
        required=True,
    )
    p_verify.add_argument("--n", type=int, default=4)
    p_verify.add_argument("--d", type=int, default=3)
    p_verify.add_argument("--trials", type=int, default=50)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument(
        "--suite-tolerance", type=float, default=1e-8, help="pass/fail threshold"
    )
    p_verify.add_argument("--output")
    p_verify.add_argument("--no-timestamp", action="store_true")
    p_verify.set_defaults(func=_cmd_verify)

    p_codes = sub.add_parser("codes", help="explicit codes and their cap statistics")
    p_codes.add_argument("--family", choices=("e8", "dn"), required=True)
    p_codes.add_argument("--n", type=int, help="dimension for --family dn")
    p_codes.add_argument("--cap", default="pi/2", help='cap angle (default "pi/2")')
    p_codes.add_argument("--cos-cap", help="rational cosine override for the cap")
    p_codes.add_argument("--format", choices=("json", "text"), default="json")
    p_codes.add_argument("--output")
    p_codes.add_argument("--no-timestamp", action="store_true")
    p_codes.set_defaults(func=_cmd_codes)

    p_export = sub.add_parser("export", help="write the problem in SDPA sparse format")
    _add_geometry(p_export)
    p_export.add_argument("--lp", action="store_true", help="export the univariate relaxation")
    p_export.add_argument("--output", required=True, help="path of the .dat-s file")
    p_export.set_defaults(func=_cmd_export)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryError:
        print("out of memory: reduce --d/--N (the defaults are large)", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
