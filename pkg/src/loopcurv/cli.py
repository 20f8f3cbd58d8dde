"""loopcurv command-line interface.

Usage:
    loopcurv symbols   --algebra su2 --X '<field json>' --s 3/2
    loopcurv curvature --algebra su2 --X @x.json --Y @y.json --s 2 --format json
    loopcurv verify-order --s 3/4 --N 512            (su2 example fields by default)
    loopcurv trace-check  --s 2 --N 512
    loopcurv jacobi-check --algebra abelian3
    loopcurv reproduce-paper

Exit codes: 0 success, 1 a verification failed, 2 invalid input.
The environment variable LOOPCURV_THREADS caps BLAS/LAPACK threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field

from threadpoolctl import threadpool_limits

from . import __version__
from .algebra import ad_invariance_residual, antisymmetry_residual, jacobi_residual
from .checklist import Context, example_fields, run_checklist
from .errors import InputError, LoopCurvError, RankDeficient
from .geometry import SobolevParam, connection_symbol, curvature_symbol, leading_order
from .serialize import field_to_json, parse_algebra, parse_field_spec, parse_rational, symbol_to_json
from .spectral import curvature_matrix, estimate_order, trace_partial_sums
from .trig import format_exp

log = logging.getLogger("loopcurv")

COMMANDS = ("symbols", "curvature", "verify-order", "trace-check", "jacobi-check", "reproduce-paper")
FORMATS = ("table", "json", "csv")
CONVENTION_NOTE = (
    "connection 2 nabla_X = ad_X - A^-1 ad_(A X) + A^-1 ad_X A (minus sign on the middle term; "
    "the plus sign is not torsion-free)"
)


@dataclass
class JobSpec:
    command: str
    algebra: str = "su2"
    X: str | None = None
    Y: str | None = None
    s: str = "2"
    space: str = "free"
    cutoff: str | None = None
    N: int = 512
    window: tuple = (32, 256)
    tol: float = 0.1
    format: str = "table"
    output: str | None = None
    verbose: bool = False
    convention: str = "minus"


@dataclass
class Report:
    code: int
    payload: dict
    text: str = ""
    csv_rows: list = field(default_factory=list)


def _read_arg(value: str) -> str:
    if value.startswith("@"):
        path = value[1:]
        try:
            with open(path, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}", value) from None
    return value


def _param(job: JobSpec) -> SobolevParam:
    s = parse_rational(job.s, "--s")
    return SobolevParam(s, job.space)


def _cutoff(job: JobSpec):
    if job.cutoff is None:
        return None
    c = parse_rational(job.cutoff, "--cutoff")
    if c > 0:
        raise InputError("cutoff must be <= 0", "--cutoff")
    return c


def _fields(job: JobSpec, need_y: bool, allow_example: bool):
    if job.X is None and job.Y is None and allow_example:
        L, X, Y = example_fields()
        if job.algebra.strip().lower() != "su2":
            raise InputError("the default example fields live over su2; pass --X/--Y", "--algebra")
        return L, X, Y
    L = parse_algebra(job.algebra)
    if job.X is None:
        raise InputError("missing field", "--X")
    X = parse_field_spec(_read_arg(job.X), L)
    Y = None
    if need_y:
        if job.Y is None:
            raise InputError("missing field", "--Y")
        Y = parse_field_spec(_read_arg(job.Y), L)
    return L, X, Y


def _provenance(job: JobSpec, p: SobolevParam | None = None, **extra) -> dict:
    out = {"command": job.command, "version": __version__, "algebra": job.algebra}
    if p is not None:
        out.update({"s": str(p.s), "regime": p.regime.value, "space": p.space})
    out["convention"] = job.convention
    out["convention_note"] = CONVENTION_NOTE
    out.update(extra)
    return out


def _prov_lines(prov: dict) -> list[str]:
    return [f"# {k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in prov.items()]


def _symbol_rows(sym, labels) -> list[list[str]]:
    rows = []
    for t in sym.terms:
        for i, row in enumerate(t.coeff):
            for k, e in enumerate(row):
                if e is None:
                    continue
                rows.append(
                    [t.grade.label(), str(t.grade.value), str(t.parity), f"{i + 1}", f"{k + 1}",
                     f"{labels[i]},{labels[k]}", format_exp(e)]
                )
    return rows


def _symbol_report(job: JobSpec, wrapped, L, prov: dict) -> Report:
    sym = wrapped.symbol
    payload = symbol_to_json(sym, prov, wrapped.audit if job.verbose else None)
    rows = _symbol_rows(sym, L.labels)
    lines = _prov_lines(prov)
    if rows:
        lines.append(f"{'grade':>8} {'value':>8} {'sgn':>3}  {'entry':<12} coefficient")
        for g, v, par, i, k, names, val in rows:
            lines.append(f"{g:>8} {v:>8} {par:>3}  {f'({i},{k}) {names}':<12} {val}")
    else:
        lines.append("(empty down to the cutoff)")
    header = ["grade", "grade_value", "parity", "row", "col", "labels", "coefficient"]
    return Report(0, payload, "\n".join(lines), [header] + rows)


def cmd_symbols(job: JobSpec) -> Report:
    L, X, _ = _fields(job, need_y=False, allow_example=False)
    p = _param(job)
    C = connection_symbol(L, X, p, _cutoff(job), job.convention)
    prov = _provenance(job, p, cutoff=str(C.cutoff), operator="nabla_X", X=field_to_json(X))
    return _symbol_report(job, C, L, prov)


def cmd_curvature(job: JobSpec) -> Report:
    L, X, Y = _fields(job, need_y=True, allow_example=False)
    p = _param(job)
    C = curvature_symbol(L, X, Y, p, _cutoff(job), job.convention)
    lead = leading_order(C)
    prov = _provenance(
        job, p, cutoff=str(C.cutoff), operator="Omega(X,Y)",
        leading_order=None if lead is None else str(lead),
        X=field_to_json(X), Y=field_to_json(Y),
    )
    return _symbol_report(job, C, L, prov)


def cmd_verify_order(job: JobSpec) -> Report:
    L, X, Y = _fields(job, need_y=True, allow_example=True)
    p = _param(job)
    C = curvature_symbol(L, X, Y, p, _cutoff(job), job.convention)
    expected = leading_order(C)
    M = curvature_matrix(L, X, Y, p.s, job.N, p.space, job.convention)
    try:
        est = estimate_order(M, job.window)
    except RankDeficient:
        est = None
    if est is None:
        # numerically zero on the window: consistent only with an empty symbol
        ok = expected is None
        target = "empty symbol" if expected is None else str(expected)
        slope_text = "operator numerically zero on the window"
    elif expected is None:
        # empty symbol: the operator must decay faster than the certified cutoff
        ok = est.slope <= float(C.cutoff) + job.tol
        target = f"<= {C.cutoff}"
        slope_text = f"fitted slope: {est.slope:.4f}  (r^2 = {est.r_squared:.6f})"
    else:
        ok = abs(est.slope - float(expected)) <= job.tol
        target = str(expected)
        slope_text = f"fitted slope: {est.slope:.4f}  (r^2 = {est.r_squared:.6f})"
    prov = _provenance(job, p, N=job.N, window=list(job.window), tolerance=job.tol)
    payload = {
        "provenance": prov,
        "expected_order": target,
        "estimate": None if est is None else est.to_json(),
        "pass": ok,
    }
    text = "\n".join(_prov_lines(prov) + [f"expected order (symbolic): {target}", slope_text, "PASS" if ok else "FAIL"])
    rows = list(csv.reader(io.StringIO(est.to_csv()))) if est is not None else [["n", "norm", "fitted"]]
    return Report(0 if ok else 1, payload, text, rows)


def cmd_trace_check(job: JobSpec) -> Report:
    L, X, Y = _fields(job, need_y=True, allow_example=True)
    p = _param(job)
    M = curvature_matrix(L, X, Y, p.s, job.N, p.space, job.convention)
    rep = trace_partial_sums(M)
    ok = rep.cauchy_tail_ok(2.0)
    prov = _provenance(job, p, N=job.N)
    payload = {"provenance": prov, "trace": rep.to_json(), "pass": ok}
    lines = _prov_lines(prov)
    lines += [f"K={k:>4}  tail[K,2K) = {v:.6e}" for k, v in rep.tail_sums.items()]
    lines += [f"tail(K)/tail(2K) at K={k}: {r:.4f}" for k, r in rep.tail_ratios.items()]
    lines.append("PASS" if ok else "FAIL")
    rows = [["rank", "singular_value", "partial_sum"]] + [
        [str(i + 1), repr(float(v)), repr(float(ps))]
        for i, (v, ps) in enumerate(zip(rep.singular_values, rep.partial_sums))
    ]
    return Report(0 if ok else 1, payload, "\n".join(lines), rows)


def cmd_jacobi_check(job: JobSpec) -> Report:
    L = parse_algebra(job.algebra)
    res = {
        "jacobi": jacobi_residual(L),
        "antisymmetry": antisymmetry_residual(L),
        "ad_invariance": ad_invariance_residual(L),
    }
    ok = all(v == 0 for v in res.values())
    prov = _provenance(job)
    payload = {"provenance": prov, "residuals": {k: str(v) for k, v in res.items()}, "pass": ok}
    text = "\n".join([f"{k:>14}: {v}" for k, v in res.items()] + ["PASS" if ok else "FAIL"])
    rows = [["check", "residual"]] + [[k, str(v)] for k, v in res.items()]
    return Report(0 if ok else 1, payload, text, rows)


def cmd_reproduce(job: JobSpec) -> Report:
    ctx = Context(convention=job.convention, N=job.N)
    t0 = time.perf_counter()
    results = run_checklist(ctx)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results)
    prov = _provenance(job, N=job.N, seconds=round(elapsed, 2))
    payload = {"provenance": prov, "rows": [r.to_json() for r in results], "pass": ok}
    lines = [f"{'row':>3}  {'status':<6} {'time':>7}  claim"]
    for r in results:
        lines.append(f"{r.row:>3}  {'PASS' if r.passed else 'FAIL':<6} {r.seconds:>6.2f}s  {r.claim}")
        lines.append(f"{'':>20}{r.detail}")
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} rows pass in {elapsed:.1f}s")
    rows = [["row", "status", "seconds", "claim", "detail"]] + [
        [str(r.row), "PASS" if r.passed else "FAIL", f"{r.seconds:.3f}", r.claim, r.detail] for r in results
    ]
    return Report(0 if ok else 1, payload, "\n".join(lines), rows)


HANDLERS = {
    "symbols": cmd_symbols,
    "curvature": cmd_curvature,
    "verify-order": cmd_verify_order,
    "trace-check": cmd_trace_check,
    "jacobi-check": cmd_jacobi_check,
    "reproduce-paper": cmd_reproduce,
}


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.payload, indent=2, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(report.csv_rows)
        return buf.getvalue().rstrip("\n")
    return report.text


def run(job: JobSpec) -> tuple[int, str]:
    """Execute a job; returns (exit code, rendered output)."""
    if job.format not in FORMATS:
        return 2, f"error: unknown format {job.format!r}"
    try:
        report = HANDLERS[job.command](job)
    except (LoopCurvError, ValueError) as exc:
        return 2, f"error: {exc}"
    return report.code, render(report, job.format)


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must be 'n_min,n_max'") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", default="su2", help="su2, so3, abelianN or inline JSON")
    common.add_argument("--X", dest="X", help="field JSON or @file")
    common.add_argument("--Y", dest="Y", help="field JSON or @file")
    common.add_argument("--s", default="2", help="Sobolev parameter as 'p/q' (> 1/2)")
    common.add_argument("--space", choices=("free", "based"), default="free")
    common.add_argument("--cutoff", help="lowest certified grade (rational <= 0)")
    common.add_argument("--N", type=int, default=512, help="frequency truncation")
    common.add_argument("--window", type=_window, default=(32, 256), help="order-fit window 'n_min,n_max'")
    common.add_argument("--tol", type=float, default=0.1, help="slope tolerance for verify-order")
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true", help="include the (a)/(b)/(c) audit trail")
    common.add_argument("--debug-plus-convention", action="store_true", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="loopcurv",
        description="Symbols of the Levi-Civita connection and curvature on Sobolev loop groups.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("symbols", "graded symbol of the connection nabla_X"),
        ("curvature", "graded symbol of the curvature Omega(X, Y)"),
        ("verify-order", "fit the numeric order of the curvature matrix"),
        ("trace-check", "singular-value partial sums of the curvature matrix"),
        ("jacobi-check", "Jacobi, antisymmetry and ad-invariance residuals"),
        ("reproduce-paper", "run the full reproduction checklist"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    job = JobSpec(
        command=args.command,
        algebra=args.algebra,
        X=args.X,
        Y=args.Y,
        s=args.s,
        space=args.space,
        cutoff=args.cutoff,
        N=args.N,
        window=args.window,
        tol=args.tol,
        format=args.format,
        output=args.output,
        verbose=args.verbose,
        convention="plus" if args.debug_plus_convention else "minus",
    )
    threads = os.environ.get("LOOPCURV_THREADS")
    limit = None
    if threads:
        try:
            limit = max(1, int(threads))
        except ValueError:
            print(f"error: LOOPCURV_THREADS must be an integer, got {threads!r}", file=sys.stderr)
            return 2
    with threadpool_limits(limits=limit):
        code, text = run(job)
    if code == 2:
        print(text, file=sys.stderr)
        return code
    if job.output:
        with open(job.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        log.info("wrote %s", job.output)
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
