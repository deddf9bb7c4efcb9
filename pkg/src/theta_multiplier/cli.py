"""Command-line interface.

Every subcommand writes line-delimited JSON to stdout.  Exit codes: 0 on
success, 1 when a verification fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import character as ch
from . import lagrangian as lg
from . import symplectic as sp
from . import theta as th
from .selftest import run_selftest

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


class InvalidInput(ValueError):
    pass


def emit(record: dict) -> None:
    print(json.dumps(record, sort_keys=True), flush=True)


def load_json_arg(text: str):
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON: {exc}") from None


def parse_matrix(text: str, n: int) -> np.ndarray:
    rows = load_json_arg(text)
    try:
        m = np.array(rows, dtype=np.int64)
    except (TypeError, ValueError):
        raise InvalidInput("matrix must be a JSON array of integer rows") from None
    if m.shape != (n, n):
        raise InvalidInput(f"matrix must be {n}x{n}, got shape {m.shape}")
    return m


def parse_lagrangian(text: str, form: sp.QuadraticForm) -> lg.OrientedLagrangian:
    obj = load_json_arg(text)
    if not isinstance(obj, dict) or "basis" not in obj:
        raise InvalidInput('lagrangian must be a JSON object {"basis": [[...], ...]}')
    try:
        return lg.OrientedLagrangian.from_vectors(form, obj["basis"])
    except (ValueError, TypeError) as exc:
        raise InvalidInput(f"invalid oriented lagrangian: {exc}") from None


def check_genus(g: int, top: int = 10) -> None:
    if not 1 <= g <= top:
        raise InvalidInput(f"--g must be between 1 and {top}")


def cmd_lambda(args) -> int:
    check_genus(args.g)
    form = sp.standard_form(args.g, args.parity)
    m = parse_matrix(args.matrix, 2 * args.g)
    if not sp.is_member(form, m):
        emit({"member": False})
        print("matrix is not in the theta group", file=sys.stderr)
        return EXIT_INVALID
    rep = ch.lambda_report(form, m)
    emit(
        {
            "member": True,
            "lambda": rep.value,
            "dickson": sp.dickson(form, m % 2),
            "word_length": rep.word_length,
            "word": rep.to_json()["word"],
        }
    )
    return EXIT_OK


def cmd_table(args) -> int:
    table = ch.character_table_g1(args.parity)
    for mat, value in sorted(table.items()):
        emit({"matrix": [list(r) for r in mat], "lambda": value})
    emit({"order": len(table), "parity": args.parity})
    return EXIT_OK


def cmd_jm(args) -> int:
    check_genus(args.g, 6)
    form = sp.standard_form(args.g, "even")
    L1 = parse_lagrangian(args.l1, form)
    if args.matrix is not None:
        gamma_mat = parse_matrix(args.matrix, 2 * args.g)
        if not sp.is_member(form, gamma_mat):
            raise InvalidInput("matrix is not in the theta group of the even form")
        gamma = sp.ThetaGroupElement(form, gamma_mat)
        emit(
            {
                "lambda_jm": lg.lambda_jm(gamma, L1, seed=args.seed),
                "lambda": ch.theta_lambda(form, gamma),
            }
        )
        return EXIT_OK
    if args.l2 is None:
        raise InvalidInput("jm needs --l2 (pairing) or --matrix (lambda_jm)")
    L2 = parse_lagrangian(args.l2, form)
    emit(
        {
            "m_jm": lg.m_jm(L1, L2, seed=args.seed),
            "sigma": lg.sigma(L1, L2, seed=args.seed),
            "intersection_dim": lg.intersection_dim(L1, L2),
            "lambda_transport": lg.m_transport(L1, L2),
        }
    )
    return EXIT_OK


def cmd_verify_theta(args) -> int:
    if args.tol < 0:
        raise InvalidInput("--tol must be nonnegative")
    if args.tau is not None or args.matrix is not None:
        if args.tau is None or args.matrix is None:
            raise InvalidInput("single-point mode needs both --tau and --matrix")
        try:
            tau = th.SiegelPoint.from_json(load_json_arg(args.tau))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"invalid tau: {exc}") from None
        try:
            M = th.IntSymplectic(parse_matrix(args.matrix, 2 * tau.g))
        except th.NotSymplectic as exc:
            raise InvalidInput(str(exc)) from None
        if not th.is_theta_group_int(M):
            raise InvalidInput("matrix is not in the theta group (odd diagonal in AB^T or CD^T)")
        rep = th.functional_equation_report(M, tau)
        emit(rep.to_json() | {"passed": rep.residual <= args.tol})
        return EXIT_OK if rep.residual <= args.tol else EXIT_FAILED

    if args.g not in (1, 2, 3):
        raise InvalidInput("--g must be 1, 2 or 3")
    if args.count < 1:
        raise InvalidInput("--count must be at least 1")
    if args.seed is None:
        raise InvalidInput("--seed is required for random sweeps")
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for i in range(args.count):
        M = th.random_theta_group_element(args.g, args.word_length, rng.integers(1 << 62))
        tau = th.random_siegel_point(args.g, rng)
        rep = th.functional_equation_report(M, tau)
        worst = max(worst, rep.residual)
        emit({"index": i} | rep.to_json())
    passed = worst <= args.tol if args.tol > 0 else False
    emit({"max_residual": worst, "tol": args.tol, "count": args.count, "passed": passed})
    return EXIT_OK if passed else EXIT_FAILED


def cmd_selftest(args) -> int:
    if args.seed is None:
        raise InvalidInput("--seed is required")
    report = run_selftest(args.seed)
    for row in report:
        emit(row)
    ok = all(r["passed"] for r in report)
    emit({"items": len(report), "failed": sum(not r["passed"] for r in report), "passed": ok})
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="theta-multiplier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambda", help="theta character of one matrix over Z/4")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--matrix", required=True, help="JSON array of rows, or a file containing one")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("table", help="genus-one character table")
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("jm", help="Johnson-Millson pairing of oriented lagrangians (even form)")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--l1", required=True, help='JSON {"basis": [[...], ...]}')
    p.add_argument("--l2")
    p.add_argument("--matrix", help="theta-group element; prints lambda_JM(matrix) with L0 = --l1")
    p.add_argument("--seed", type=int, default=0, help="seed for the common-transversal search")
    p.set_defaults(func=cmd_jm)

    p = sub.add_parser("verify-theta", help="numerical check of the squared theta transformation law")
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--word-length", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int)
    p.add_argument("--tau", help='JSON {"re": [[...]], "im": [[...]]} (single-point mode)')
    p.add_argument("--matrix", help="integer symplectic matrix (single-point mode)")
    p.set_defaults(func=cmd_verify_theta)

    p = sub.add_parser("selftest", help="run every invariant check")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
