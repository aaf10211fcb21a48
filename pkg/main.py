"""
Description: Command-line entry point. Subcommands compute mixed volumes (mixedvol), intrinsic
             volumes (intrinsics), inequality reports (check), stability certificates and lemma
             checks (stability) and equality diagnostics (bracket) for the bodies of a JSON body
             file. Exit codes: 0 ok or not applicable, 1 parse error or invalid input,
             2 applicability, 3 budget, 4 inequality violated.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import argparse
import dataclasses
import logging
import sys

import numpy as np
import pandas as pd

from analysis import run_fuzz, summarize
from bodies import UnitBall, ball_polytope
from bodyfile import dumps, format_agreement, format_number, load_body_file
from config import DEFAULT_TOLERANCES, MC_SAMPLES, MC_SEED
from errors import ApplicabilityError, ConfigError, ZonovolError
from inequalities import INEQUALITY_IDS, check, equality_diagnostics
from linalg import orthonormalize
from oracle import EXACT, MONTECARLO, polarization_mixed_volume
from stability import (LEMMA_4_6, PROP_4_5, THM_1_5, THM_5_1, ball_intrinsic_ratio, check_stability,
                       cm_intrinsic_check, projstab_check)
from zonoid import intrinsic_volume, mixed_volume

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 4
INCONSISTENCY = "NUMERICAL INCONSISTENCY — file a bug"

STABILITY_TARGETS = {"thm15": THM_1_5, "thm51": THM_5_1, "prop45": PROP_4_5, "lemma46": LEMMA_4_6,
                     "projstab": None, "lemma52": None, "lemma53": None}


class _Parser(argparse.ArgumentParser):
    """argparse reporting usage errors as ConfigError (exit 1) instead of exiting."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _float_rows(text):
    try:
        return [[float(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError:
        raise ConfigError(f"expected rows like '1,0,0;0,1,0', got {text!r}") from None


def _tolerances(args):
    overrides = {}
    if args.tol_holds is not None:
        overrides["holds"] = args.tol_holds
    if args.tol_equality is not None:
        overrides["equality"] = args.tol_equality
    return dataclasses.replace(DEFAULT_TOLERANCES, **overrides)


def _evaluator(args):
    return EXACT if args.exact else MONTECARLO


def _load(args):
    if not args.bodies:
        raise ConfigError("--bodies FILE is required for this command")
    return load_body_file(args.bodies)


def _entries(args, body_file):
    return body_file.entries(_int_list(args.mult) if args.mult else None)


def _emit(args, record, lines):
    if args.format == "json":
        print(dumps(record))
    else:
        print("\n".join(lines))


def _estimate_lines(estimate):
    lines = [format_number(estimate.value)]
    if not estimate.exact:
        lines.append(f"stderr: {format_number(estimate.stderr)}")
        lines.append(f"samples: {estimate.samples} seed: {estimate.seed} ({estimate.algorithm})")
    return lines


def cmd_mixedvol(args):
    """
    Desc: Prints the mixed volume of the file's bodies; with --oracle also the polarization
          value and the absolute difference between the two.
    returns:
    (int): Exit code.
    """
    tol = _tolerances(args)
    body_file = _load(args)
    entries = _entries(args, body_file)
    estimate = mixed_volume(entries, _evaluator(args), args.mc_samples, args.seed, tol)
    record = {"command": "mixedvol", "value": estimate.value, "stderr": estimate.stderr,
              "samples": estimate.samples}
    lines = _estimate_lines(estimate)
    if args.oracle:
        approximate = any(isinstance(b, UnitBall) for b, _ in entries)
        slots = []
        for body, mult in entries:
            slot = ball_polytope(body.ambient_dim) if isinstance(body, UnitBall) else body
            slots.extend([slot] * mult)
        oracle_value = polarization_mixed_volume(slots, tol)
        agreement = abs(oracle_value - estimate.value)
        record.update({"oracle": oracle_value, "oracle_approximate": approximate, "agreement": agreement})
        label = "oracle (approximate ball)" if approximate else "oracle"
        lines += [f"{label}: {format_number(oracle_value)}", f"agreement: {format_agreement(agreement)}"]
    _emit(args, record, lines)
    return EXIT_OK


def cmd_intrinsics(args):
    """Prints V_0, ..., V_n of every body (stderr columns for Monte Carlo values)."""
    tol = _tolerances(args)
    body_file = _load(args)
    n = body_file.dimension
    rows, records = [], []
    for name, body in zip(body_file.names, body_file.bodies):
        estimates = [intrinsic_volume(body, j, _evaluator(args), args.mc_samples, args.seed, tol)
                     for j in range(n + 1)]
        records.append({"name": name, "values": [e.value for e in estimates],
                        "stderr": [e.stderr for e in estimates]})
        for j, e in enumerate(estimates):
            rows.append({"body": name, "j": j, "V_j": format_number(e.value),
                         "stderr": "exact" if e.exact else format_number(e.stderr)})
    table = pd.DataFrame(rows, columns=["body", "j", "V_j", "stderr"])
    _emit(args, {"command": "intrinsics", "dimension": n, "bodies": records}, [table.to_string(index=False)])
    return EXIT_OK


def _report_lines(report):
    lines = [f"inequality: {report.inequality_id}", f"lhs: {format_number(report.lhs)}",
             f"rhs: {format_number(report.rhs)}",
             f"epsilon: {format_number(report.epsilon) if report.epsilon is not None else 'degenerate'}",
             f"holds: {str(report.holds).lower()}", f"equality: {str(report.equality_within).lower()}"]
    diag = report.diagnostics
    if "dims" in diag:
        lines.append(f"dims: {diag['dims']} multiplicities: {diag['multiplicities']}")
    if diag.get("bracket") is not None:
        lines.append(f"bracket: {format_number(diag['bracket'])}")
    if diag.get("outside_equality_hypotheses"):
        lines.append("note: outside equality-characterization hypotheses (dim K_i < alpha_i)")
    return lines


def _fuzz(args):
    df = run_fuzz(args.fuzz, seed=args.seed, tol=_tolerances(args))
    summary = summarize(df)
    failures = df[~df["holds"]]
    failure_records = failures.astype(object).where(failures.notna(), None).to_dict(orient="records")
    record = {"command": "check", "fuzz": args.fuzz, "seed": args.seed,
              "summary": summary.to_dict(orient="records"), "failures": failure_records}
    _emit(args, record, [summary.to_string(index=False), f"failures: {len(failures)}"])
    if len(failures):
        print(INCONSISTENCY, file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_check(args):
    """Runs one inequality check (or a fuzz batch with --fuzz) and maps a violation to exit 4."""
    if args.fuzz:
        return _fuzz(args)
    if args.inequality is None:
        raise ConfigError("check needs an inequality id or --fuzz N")
    body_file = _load(args)
    entries = _entries(args, body_file)
    report = check(entries, args.inequality, args.gamma, args.beta, _evaluator(args), args.mc_samples,
                   args.seed, _tolerances(args))
    _emit(args, report.to_json(), _report_lines(report))
    if report.holds:
        return EXIT_OK
    if report.proven:
        print(INCONSISTENCY, file=sys.stderr)
    return EXIT_VIOLATED


def _certificate_lines(cert):
    lines = [f"theorem: {cert.theorem_id}", f"applicable: {str(cert.applicable).lower()}"]
    if not cert.applicable:
        return lines + [f"reason: {cert.diagnostics.get('reason', '')}"]
    lines += [f"epsilon: {format_number(cert.epsilon)}", f"bracket: {format_number(cert.bracket_value)}",
              f"bound: {format_number(cert.bracket_bound)}"
              + (" (trivially satisfied)" if cert.trivial_bound else ""),
              "slacks: " + ", ".join(format_number(s) for s in cert.containment_slacks),
              f"holds: {str(cert.holds).lower()}"]
    return lines


def _check_lines(result):
    lines = [f"check: {result.check_id}", f"applicable: {str(result.applicable).lower()}"]
    if not result.applicable:
        return lines + [f"reason: {result.diagnostics.get('reason', '')}"]
    return lines + [f"lhs: {format_number(result.lhs)}", f"rhs: {format_number(result.rhs)}",
                    f"holds: {str(result.holds).lower()}"]


def _lemma52(args):
    if not args.n or args.n < 1:
        raise ConfigError("lemma52 needs --n N with N >= 1")
    rows = []
    for j in range(1, args.n + 1):
        ratio, bound, holds = ball_intrinsic_ratio(args.n, j)
        rows.append({"n": args.n, "j": j, "ratio": ratio, "bound": bound, "holds": holds})
    table = pd.DataFrame(rows)
    all_hold = bool(table["holds"].all())
    _emit(args, {"command": "stability", "target": "lemma52", "rows": rows, "holds": all_hold},
          [table.to_string(index=False, float_format=format_number)])
    return EXIT_OK if all_hold else EXIT_VIOLATED


def _first_body(args):
    body_file = _load(args)
    return body_file.bodies[0]


def cmd_stability(args):
    """Stability certificates and the projection, ball-ratio and flat-closeness lemma checks."""
    tol = _tolerances(args)
    target = args.target
    if target == "lemma52":
        return _lemma52(args)
    if target == "projstab":
        if args.beta is None:
            raise ConfigError("projstab needs --beta B")
        result = projstab_check(_first_body(args), args.beta, args.mc_samples, args.seed, tol)
    elif target == "lemma53":
        if not args.subspace or args.alpha is None:
            raise ConfigError("lemma53 needs --subspace 'v1;v2;...' and --alpha A")
        body = _first_body(args)
        A = orthonormalize(_float_rows(args.subspace), body.ambient_dim)
        offset = np.array(_float_rows(args.offset)[0]) if args.offset else None
        result = cm_intrinsic_check(body, A, args.alpha, args.eta, offset, args.mc_samples, args.seed, tol)
    else:
        entries = _entries(args, _load(args))
        cert = check_stability(STABILITY_TARGETS[target], entries, args.mc_samples, args.seed, tol)
        _emit(args, cert.to_json(), _certificate_lines(cert))
        if cert.applicable and not cert.holds:
            print(INCONSISTENCY, file=sys.stderr)
            return EXIT_VIOLATED
        return EXIT_OK
    _emit(args, result.to_json(), _check_lines(result))
    if result.applicable and not result.holds:
        print(INCONSISTENCY, file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_bracket(args):
    """Dimensions, pairwise brackets and the full bracket of the bodies' linear hulls."""
    body_file = _load(args)
    mults = _int_list(args.mult) if args.mult else list(body_file.multiplicities or [1] * len(body_file.bodies))
    entries = body_file.entries(mults)
    diag = equality_diagnostics(entries, _tolerances(args))
    names = [name for name, m in zip(body_file.names, mults) if m > 0]
    matrix = pd.DataFrame(diag["pairwise_brackets"], index=names, columns=names)
    lines = [f"dims: {diag['dims']}", f"multiplicities: {diag['multiplicities']}",
             matrix.to_string(float_format=format_number, na_rep="-"),
             f"bracket: {format_number(diag['bracket'])}",
             f"dims match multiplicities: {str(diag['dims_match_multiplicities']).lower()}"]
    _emit(args, dict({"command": "bracket", "names": names}, **diag), lines)
    return EXIT_OK


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--bodies", metavar="FILE", help="JSON body definition file")
    common.add_argument("--mult", metavar="A1,A2,...", help="multiplicities, one per body (0 drops a body)")
    common.add_argument("--gamma", type=int, help="multiplicity of the general body K (THM_1_3)")
    common.add_argument("--beta", type=int, help="gamma plus ball copies (THM_1_3); projection dimension (projstab)")
    common.add_argument("--alpha", type=int, help="intrinsic volume index (lemma53)")
    common.add_argument("--mc-samples", type=int, default=MC_SAMPLES, help="Monte Carlo samples")
    common.add_argument("--seed", type=int, default=MC_SEED, help="random seed")
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    common.add_argument("--exact", action="store_true", help="refuse Monte Carlo evaluation")
    common.add_argument("--oracle", action="store_true", help="cross-check by polarization")
    common.add_argument("--fuzz", type=int, default=0, metavar="N", help="check N random configurations")
    common.add_argument("--n", type=int, help="dimension for lemma52")
    common.add_argument("--eta", type=float, help="closeness parameter for lemma53")
    common.add_argument("--subspace", help="spanning vectors of A, e.g. '1,0,0;0,1,0' (lemma53)")
    common.add_argument("--offset", help="a point of the flat offset + A (lemma53)")
    common.add_argument("--tol-holds", type=float, help="override the holds tolerance")
    common.add_argument("--tol-equality", type=float, help="override the equality tolerance")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")

    parser = _Parser(prog="zonovol", description="Exact mixed volumes of zonotopes and polytopes, "
                                                 "reverse Alexandrov-Fenchel checks and stability certificates.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mixedvol", parents=[common], help="mixed volume of the bodies").set_defaults(handler=cmd_mixedvol)
    sub.add_parser("intrinsics", parents=[common], help="intrinsic volumes of each body") \
        .set_defaults(handler=cmd_intrinsics)
    check_parser = sub.add_parser("check", parents=[common], help="inequality report")
    check_parser.add_argument("inequality", nargs="?", choices=INEQUALITY_IDS)
    check_parser.set_defaults(handler=cmd_check)
    stability_parser = sub.add_parser("stability", parents=[common], help="stability certificates")
    stability_parser.add_argument("target", choices=tuple(STABILITY_TARGETS))
    stability_parser.set_defaults(handler=cmd_stability)
    sub.add_parser("bracket", parents=[common], help="equality diagnostics").set_defaults(handler=cmd_bracket)
    return parser


def main(argv=None):
    """
    Desc: Parses arguments, configures logging and runs one subcommand.
    Parameters:
        argv (list of str): Arguments without the program name; sys.argv[1:] when None.
    returns:
    (int): Process exit code.
    """
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.handler(args)
    except ApplicabilityError as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return exc.exit_code
    except ZonovolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
