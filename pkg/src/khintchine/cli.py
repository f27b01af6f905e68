"""Command line front end.

Results go to stdout (or ``--out``) as JSON with a fixed key order, or CSV
with a header row.  A reproducibility header is attached to every written
file and echoed to stderr.  Exit codes: 0 ok, 1 failed verdict, 2 bad
arguments, 3 domain error, 4 infeasible construction (report still written).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__, kernels, selftest
from .approx import NormLift, PlaneLift, approx_from_json, Constant, Power, Table
from .counterexample import Certificate, build_psi, certify, DEFAULT_PRIME_BUDGET
from .errors import CapacityError, DomainError, InfeasibleError
from .gauge import parse_gauge
from .measures import SlabSpec, measure_B, measure_B_prime, measure_B_prime_bounds
from .montecarlo import (
    MCConfig,
    SCHMIDT_COLUMNS,
    SlabPredicate,
    count_solutions,
    expected_count_check,
    mc_measure,
    qia_report,
    sample_block,
    schmidt_residual,
)
from .numtheory import format_rational, parse_rational
from .series import CONVENTIONS, khintchine_partial_sum, schmidt_table, sum_B_prime_measures

EXIT_OK, EXIT_VERDICT, EXIT_PARSE, EXIT_DOMAIN, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


class _ParseError(Exception):
    pass


# --- argument helpers -------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _delta(text: str) -> Fraction:
    d = _rational(text)
    if not 0 < d < Fraction(1, 2):
        raise argparse.ArgumentTypeError(f"delta must lie in (0, 1/2), got {text}")
    return d


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load_psi(text: str) -> tuple[Any, str | None]:
    """``--psi`` as a JSON file, a JSON literal, or ``power:c[,tau]`` /
    ``constant:c`` / ``table:h=v;h=v``.  Returns the function and a file digest."""
    digest = None
    if os.path.isfile(text):
        with open(text, "rb") as fh:
            raw = fh.read()
        digest = hashlib.sha256(raw).hexdigest()
        text = raw.decode()
    text = text.strip()
    try:
        if text.startswith("{"):
            return approx_from_json(json.loads(text)), digest
        kind, _, args = text.partition(":")
        kind = kind.lower()
        if kind == "power":
            c, _, tau = args.partition(",")
            return Power(parse_rational(c), parse_rational(tau or "1")), digest
        if kind == "constant":
            return Constant(parse_rational(args)), digest
        if kind == "table":
            vals = {}
            for item in args.split(";"):
                h, _, v = item.partition("=")
                vals[int(h)] = parse_rational(v)
            return Table(vals), digest
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _ParseError(f"cannot parse --psi: {exc}") from None
    raise _ParseError(f"unknown --psi form {text!r}")


def _json_default(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    raise TypeError(type(x))


def _header(args: argparse.Namespace, digests: dict[str, str]) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "format")}
    return {
        "tool": "khintchine",
        "version": __version__,
        "command": args.command,
        "parameters": json.loads(json.dumps(params, default=_json_default)),
        "conventions": {
            "phi": getattr(args, "convention", None),
            "rational_format": "a/b",
            "rng": "philox, key = seed | chunk << 64, chunk = 65536 rows",
            "sphere_shell": "8l for n=2",
        },
        "kernel_backend": kernels.BACKEND,
        "input_digests": digests,
    }


def _csv_text(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else _json_default(r[c]) if isinstance(r.get(c), Fraction) else r.get(c) for c in columns])
    return buf.getvalue()


def _emit(args, result: Any, digests: dict[str, str], rows: list[dict] | None = None, columns=None) -> None:
    header = _header(args, digests)
    print(json.dumps(header, default=_json_default), file=sys.stderr)
    if args.format == "csv" and rows is not None:
        body = _csv_text(rows, columns or list(rows[0]) if rows else [])
        file_body = "".join(f"# {k}: {json.dumps(v, default=_json_default)}\n" for k, v in header.items()) + body
    else:
        body = json.dumps(result, indent=2, default=_json_default) + "\n"
        file_body = json.dumps({"header": header, "result": result}, indent=2, default=_json_default) + "\n"
    sys.stdout.write(body)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(file_body)


def _cfg(args) -> MCConfig:
    return MCConfig(seed=args.seed, samples=args.samples, workers=args.workers)


# --- subcommands ------------------------------------------------------------


def cmd_measure(args) -> int:
    if args.q is None or args.delta is None:
        raise _ParseError("measure needs --q and --delta")
    s = SlabSpec(tuple(args.q), args.delta, args.m, args.coprime)
    exact = measure_B_prime(s) if args.coprime else measure_B(s)
    result: dict[str, Any] = {"exact": format_rational(exact)}
    if args.bounds:
        lo, hi = measure_B_prime_bounds(s)
        result["bounds"] = [format_rational(lo), format_rational(hi)]
    if args.mc:
        est = mc_measure(SlabPredicate(s), s.dims, _cfg(args))
        result["mc"] = est.to_json()
        result["within_4se"] = est.within(exact)
    _emit(args, result, {})
    return EXIT_OK


def cmd_series(args) -> int:
    psi, dg = _load_psi(args.psi)
    digests = {"psi": dg} if dg else {}
    if args.schmidt:
        Psi = PlaneLift(psi, args.n) if args.plane else NormLift(psi, args.n)
        rows = schmidt_table(Psi, args.m, args.N, args.convention)
        _emit(args, rows, digests, rows, ["h", "Phi", "chi", "partial_sum"])
        return EXIT_OK
    rows = []
    for N in args.N:
        ks = khintchine_partial_sum(psi, args.n, args.m, N)
        row: dict[str, Any] = {"N": N, "khintchine_sum": ks, "S_N": None, "ratio": None}
        if args.n * args.m > 1:
            S = sum_B_prime_measures(psi, args.n, args.m, N)
            row["S_N"] = S
            row["ratio"] = float(S / ks) if ks else None
        rows.append(row)
    _emit(args, rows, digests, rows, ["N", "khintchine_sum", "S_N", "ratio"])
    return EXIT_OK


def cmd_count(args) -> int:
    psi, dg = _load_psi(args.psi)
    digests = {"psi": dg} if dg else {}
    h = args.h[0]
    if args.x is not None:
        c = count_solutions(np.asarray(args.x), NormLift(psi, args.n), h, args.coprime, args.m)
        _emit(args, {"h": h, "count": c, "coprime": args.coprime}, digests)
        return EXIT_OK
    rep = expected_count_check(psi, args.n, args.m, h, _cfg(args))
    _emit(args, rep.to_json(), digests)
    return EXIT_OK if rep.passed else EXIT_VERDICT


def cmd_qia(args) -> int:
    psi, dg = _load_psi(args.psi)
    digests = {"psi": dg} if dg else {}
    reps = [qia_report(psi, args.n, args.m, N, _cfg(args), args.method).to_json() for N in args.N]
    _emit(args, reps, digests, reps, ["N", "S_N", "D_N_diag", "ratio", "ratio_std_error", "bc_lower_bound"])
    return EXIT_OK


def cmd_schmidt(args) -> int:
    psi, dg = _load_psi(args.psi)
    digests = {"psi": dg} if dg else {}
    X = sample_block(args.seed, 0, args.samples, args.n * args.m)
    rows = schmidt_residual(X, NormLift(psi, args.n), args.m, args.h, args.epsilon, args.workers)
    _emit(args, rows, digests, rows, list(SCHMIDT_COLUMNS))
    return EXIT_OK


def cmd_counterexample(args) -> int:
    F = parse_gauge(args.gauge)
    if args.certificate:
        with open(args.certificate, encoding="utf-8") as fh:
            raw = fh.read()
        obj = json.loads(raw)
        obj = obj.get("result", obj)
        cert = Certificate.from_json(obj["certificate"])
        psi = approx_from_json(obj["psi"])
        rep = certify(psi, cert.gauge, 2, cert.m, cert)
        _emit(args, rep.to_json(), {"certificate": hashlib.sha256(raw.encode()).hexdigest()})
        return EXIT_OK if rep.passed else EXIT_VERDICT
    try:
        psi, cert = build_psi(F, args.m, args.blocks, args.prime_budget, args.convention)
    except InfeasibleError as exc:
        _emit(args, {"status": "infeasible", "message": str(exc), "report": exc.report}, {})
        return EXIT_INFEASIBLE
    result = {"status": "certified" if all(cert.verdicts.values()) else "failed", "certificate": cert.to_json(), "psi": psi.to_json()}
    _emit(args, result, {})
    return EXIT_OK if all(cert.verdicts.values()) else EXIT_VERDICT


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest.run(lambda s: print(s, file=sys.stderr)) else EXIT_VERDICT


# --- parser -----------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, samples: int = 100_000, convention: str = "theorem") -> None:
    # added per subcommand: argparse shares action objects between parents
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--convention", choices=CONVENTIONS, default=convention)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="also write the result (with header) to this file")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khintchine", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("measure", help="exact slab measure, optional MC check")
    _add_common(s)
    s.add_argument("--q", type=_int_list)
    s.add_argument("--delta", type=_delta)
    s.add_argument("--coprime", action="store_true")
    s.add_argument("--bounds", action="store_true", help="include the prime-free bounds")
    s.add_argument("--mc", action="store_true", help="add a Monte Carlo estimate")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("series", help="exact partial sums")
    _add_common(s)
    s.add_argument("--psi", required=True)
    s.add_argument("--N", type=_int_list, required=True, help="comma-separated horizons")
    s.add_argument("--schmidt", action="store_true", help="emit Phi/chi rows instead")
    s.add_argument("--plane", action="store_true", help="with --schmidt, use the plane lift")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("count", help="solution counts and their mean")
    _add_common(s)
    s.add_argument("--psi", required=True)
    s.add_argument("--h", type=_int_list, required=True)
    s.add_argument("--x", type=_float_list, help="count for this point instead of sampling")
    s.add_argument("--coprime", action="store_true")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("qia", help="second-moment diagnostics")
    _add_common(s)
    s.add_argument("--psi", required=True)
    s.add_argument("--N", type=_int_list, required=True)
    s.add_argument("--method", choices=("hybrid", "mc"), default="hybrid")
    s.set_defaults(func=cmd_qia)

    s = sub.add_parser("schmidt", help="count residuals along a grid of h")
    _add_common(s, samples=100)
    s.add_argument("--psi", required=True)
    s.add_argument("--h", type=_int_list, required=True)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.set_defaults(func=cmd_schmidt)

    s = sub.add_parser("counterexample", help="build and certify a primorial counterexample")
    _add_common(s, convention="proof")
    s.add_argument("--gauge", default="log")
    s.add_argument("--blocks", type=int, default=5)
    s.add_argument("--prime-budget", type=int, default=DEFAULT_PRIME_BUDGET)
    s.add_argument("--certificate", help="replay an existing certificate file instead of building")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("selftest", help="brute-force invariant checks")
    _add_common(s)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ParseError as exc:
        parser.error(str(exc))
    except (DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
