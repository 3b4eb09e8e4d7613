"""Command-line front end: run jobs, dump lattice sets, expand continued fractions, run the suite."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import jobs
from .cfrac import Surd, cf_convergents, cf_quotients
from .errors import NormalFormError, StructureError
from .lattice import ConvergentFrame, lattice_csv, resonance_frame
from .normalform import pipeline_theorem1, pipeline_theorem2
from .verify import DEFAULT_MATRIX, audit_outcome, conjugacy_oracle, decay_violations, verify_suite

log = logging.getLogger("saddlenf")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDING = 2


def run_pipeline(job: jobs.Job):
    if job.mode == "theorem1":
        return pipeline_theorem1(job.map, job.frame, job.degree)
    return pipeline_theorem2(job.map, job.frame, job.degree, job.R)


def _error_report(data, kind: str, message: str, findings=()) -> dict:
    return {
        "job": data,
        "status": kind,
        "error": message,
        "findings": list(findings),
    }


def _lattice_rows(frame, maxdeg: int) -> list:
    text = lattice_csv(frame, maxdeg)
    return [line.split(",") for line in text.splitlines()[1:]]


def build_report(job: jobs.Job, outcome) -> dict:
    audit = audit_outcome(outcome)
    checks = dict(audit.checks)
    findings = list(audit.findings)
    if job.verify:
        oracle = conjugacy_oracle(job.map, outcome)
        checks["conjugacy_oracle"] = oracle.passed
        mu1, mu2 = job.map.mu1, job.map.mu2
        bad = [] if isinstance(job.frame, ConvergentFrame) and job.R is None else decay_violations(
            job.frame, mu1, mu2, R=job.R
        )
        checks["decay_estimates"] = not bad
        findings.extend({"check": "decay_estimates", "witness": {"set": t, "exponent": list(m)}} for t, m in bad)
    report = {
        "job": job.data,
        "status": "ok" if all(checks.values()) and not findings else "finding",
        "frame": jobs.frame_to_json(job.frame),
        "outcome": jobs.outcome_to_json(outcome),
        "diagnostics": outcome.diagnostics,
        "checks": checks,
        "findings": findings,
    }
    if job.emit_lattice:
        report["lattice"] = _lattice_rows(job.frame, job.degree - 1)
    return report


def run_job(path, out_path=None) -> int:
    """Run one job file; returns the process exit code."""
    data = None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        report, code = _error_report(None, "error", f"cannot read job: {exc}"), EXIT_ERROR
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            pass
        try:
            job = jobs.load_job(text)
            outcome = run_pipeline(job)
        except StructureError as exc:
            witnesses = [
                {"component": i, "exponent": list(k), "detail": str(d)} for i, k, d in exc.witnesses
            ]
            report = _error_report(data, "finding", f"StructureError: {exc}", witnesses)
            code = EXIT_FINDING
        except (NormalFormError, ValueError) as exc:
            report = _error_report(data, "error", f"{type(exc).__name__}: {exc}")
            code = EXIT_ERROR
        else:
            report = build_report(job, outcome)
            code = EXIT_OK if report["status"] == "ok" else EXIT_FINDING
    if code != EXIT_OK:
        print(report["error"] if "error" in report else "audit failed", file=sys.stderr)
        for w in report["findings"]:
            print(f"  witness: {json.dumps(w)}", file=sys.stderr)
    text = jobs.dumps(report)
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")
    return code


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_run(args) -> int:
    return run_job(args.job, args.out)


def cmd_lattice(args) -> int:
    frame = resonance_frame(args.p, args.q, args.N)
    text = lattice_csv(frame, args.maxdeg)
    if args.csv in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.csv).write_text(text, encoding="utf-8")
    return EXIT_OK


def cf_table(spec, terms: int) -> list[tuple[int, int, int, int]]:
    """Rows ``(n, a_n, q_n, p_n)``."""
    quotients = cf_quotients(spec, terms).quotients
    conv = cf_convergents(quotients)
    return [(n + 1, a, q, p) for n, (a, (q, p)) in enumerate(zip(quotients, conv))]


def cmd_cf(args) -> int:
    if args.surd is not None:
        if len(args.surd) != 4:
            raise NormalFormError("--surd takes a,b,c,d for (a + b*sqrt(d))/c")
        a, b, c, d = args.surd
        spec = Surd(a, b, d, c)
    elif args.quotients is not None:
        spec = args.quotients
    elif args.rational is not None:
        spec = args.rational
    else:
        spec = args.float
    print("n,a_n,q_n,p_n")
    for row in cf_table(spec, args.terms):
        print(",".join(str(v) for v in row))
    return EXIT_OK


def _suite_entry(entry) -> dict:
    return verify_suite([entry])


def cmd_verify(args) -> int:
    matrix = DEFAULT_MATRIX
    if args.matrix:
        matrix = json.loads(Path(args.matrix).read_text(encoding="utf-8"))
        if not isinstance(matrix, list) or not all(isinstance(e, dict) and {"p", "q"} <= set(e) for e in matrix):
            raise NormalFormError("matrix file must be a JSON list of {p, q, N} objects")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(pool.map(_suite_entry, matrix))
    else:
        parts = [_suite_entry(e) for e in matrix]
    failed = 0
    for part in parts:
        for name, ok in part.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
            failed += not ok
    print(f"{failed} failed" if failed else "all checks passed")
    return EXIT_FINDING if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saddlenf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a job file and write a JSON report")
    p.add_argument("job")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("lattice", help="dump cone memberships as CSV")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--maxdeg", type=int, default=10)
    p.add_argument("--csv", help="output path (default: stdout)")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("cf", help="continued fraction quotients and convergents")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--surd", type=_parse_int_list, help="a,b,c,d for (a + b*sqrt(d))/c")
    src.add_argument("--quotients", type=_parse_int_list)
    src.add_argument("--rational", help="a/b")
    src.add_argument("--float", type=float)
    p.add_argument("--terms", type=int, default=10)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("verify", help="run the property suite over a frame matrix")
    p.add_argument("--matrix", help="JSON list of {p, q, N}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (NormalFormError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
