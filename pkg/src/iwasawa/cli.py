"""Command-line driver: ``iwasawa <subcommand> ...``.

Every subcommand builds a JSON report::

    {"schema_version": 1, "command": ..., "job": {...}, "status": ..., "result": ...}

JSON is the source of truth; ``--format human`` prints a flattened
projection of the same object.  Exit codes: 0 PASS, 1 FAIL, 2 PARTIAL or ERROR.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cache import cache_get_or_compute

SCHEMA_VERSION = 1
EXIT = {"PASS": 0, "FAIL": 1, "PARTIAL": 2, "ERROR": 2}
DEFAULT_SEED = 1


def _ints(text):
    if text is None or text == "":
        return []
    return [int(x) for x in str(text).split(",") if x.strip()]


def _coeff_strings(series):
    R = series.ring
    return [str(c.coords[0]) if R.d == 1 else [str(x) for x in c.coords] for c in series.coeffs]


# ---------------------------------------------------------------------------
# subcommands; each returns (status, result)


def _branch_payload(job):
    from .characters import DirichletCharacter
    from .klseries import build_kl_series, mu_lambda_invariants, verify_interpolation

    psi = DirichletCharacter.parse(job["chi"])
    B = build_kl_series(psi, job["p"], job["N"], job["M"], strategy=job["strategy"],
                        sigma=job["sigma"], level=job.get("level"))
    out = {
        "character": psi.notation(),
        "strategy": B.strategy,
        "series": B.series.to_dict(),
        "coefficients": _coeff_strings(B.series),
        "ledger": list(B.series.ledger),
        "meta": B.meta,
    }
    try:
        mu, lam = mu_lambda_invariants(B)
        out["mu"], out["lambda"] = mu, lam
    except Exception as exc:  # invariants are reported, not required
        out["mu"] = out["lambda"] = None
        out["invariants_error"] = "%s: %s" % (type(exc).__name__, exc)
    K = job.get("verify", 0)
    if K:
        out["verification"] = verify_interpolation(B, K)
    return out


def cmd_lp(args, job):
    job.update(p=args.p, chi=args.chi, N=args.N, M=args.M, strategy=args.strategy,
               sigma=sorted(set(_ints(args.sigma)) | {args.p}), verify=args.verify, level=args.level)
    res = cache_get_or_compute(job, lambda: _branch_payload(job), args.cache_dir, enabled=not args.no_cache)
    recs = res.get("verification", [])
    status = "PASS" if all(r["ok"] for r in recs) else "FAIL"
    return status, res


def cmd_invariants(args, job):
    from .characters import teichmuller_power

    if args.teichmuller_scan:
        chis = [teichmuller_power(args.p, i).notation() for i in range(2, args.p - 1, 2)]
    elif args.chi:
        chis = [args.chi]
    else:
        raise ValueError("give --chi or --teichmuller-scan")
    job.update(p=args.p, chis=chis, N=args.N, M=args.M, strategy=args.strategy,
               sigma=sorted(set(_ints(args.sigma)) | {args.p}))
    rows = []
    for chi in chis:
        sub = {"command": "lp", "p": args.p, "chi": chi, "N": args.N, "M": args.M,
               "strategy": args.strategy, "sigma": job["sigma"], "verify": 0, "level": None}
        res = cache_get_or_compute(sub, lambda: _branch_payload(sub), args.cache_dir, enabled=not args.no_cache)
        rows.append({"chi": chi, "mu": res["mu"], "lambda": res["lambda"], "strategy": res["strategy"]})
    status = "PASS" if all(r["lambda"] is not None for r in rows) else "PARTIAL"
    summary = {"branches": len(rows), "lambda_positive": [r["chi"] for r in rows if r["lambda"]]}
    return status, {"branches": rows, "summary": summary}


def _load_modules(path, ring):
    from .modules import ElementaryModule

    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("modules", [data])
    return [ElementaryModule.from_json(ring, d) for d in data]


def cmd_euler_char(args, job):
    from .checks import ec_identity_case
    from .padic import make_coeff_ring

    ring = make_coeff_ring(args.p, args.m, args.N)
    ns = _ints(args.n)
    job.update(p=args.p, m=args.m, N=args.N, module=Path(args.module).read_text(), n=ns)
    lines, rows, ok_all = [], [], True
    for i, M in enumerate(_load_modules(args.module, ring)):
        for n in ns:
            ok, (lhs, rhs) = ec_identity_case(M, n)
            ok_all &= ok
            rows.append({"module": i, "n": n, "lhs": str(lhs), "rhs": str(rhs), "ok": ok})
            lines.append("module %d, n = %d: v(ch(u^n-1)) = v(h1) - v(h0): %s" % (i, n, "OK" if ok else "FAIL"))
    return ("PASS" if ok_all else "FAIL"), {"rows": rows, "lines": lines}


def cmd_module_ec(args, job):
    from .checks import ec_identity_suite

    job.update(p=args.p, seed=args.seed, count=args.count)
    rng = random.Random(args.seed)
    rep = ec_identity_suite(rng, args.count, primes=(args.p,))
    return ("PASS" if rep["failures"] == 0 else "FAIL"), rep


def cmd_ktheory(args, job):
    from .characters import DirichletCharacter
    from .klseries import build_kl_series, lp_norm_at
    from .ktheory import (
        cohomology_csv, cohomology_table, fib_orders, homotopy_csv, poitou_tate_consistency,
    )

    sigma = sorted(set(_ints(args.sigma)) | {args.p})
    ns = _ints(args.n)
    job.update(p=args.p, chi=args.chi, n=ns, N=args.N, M=args.M, sigma=sigma, strategy=args.strategy)
    B = build_kl_series(DirichletCharacter.parse(args.chi), args.p, args.N, args.M,
                        strategy=args.strategy, sigma=sigma)
    out, statuses, csvs = [], [], []
    for n in ns:
        table = cohomology_table(args.p, B, n, sigma)
        hot = fib_orders(table)
        norm = lp_norm_at(B, n)
        rep = poitou_tate_consistency(table, hot, norm)
        statuses.append(rep["status"])
        out.append({"n": n, "norm": str(norm), "cohomology_csv": cohomology_csv(table),
                    "homotopy_csv": homotopy_csv(hot), "consistency": rep, "meta": table.meta})
        csvs.append((n, cohomology_csv(table), homotopy_csv(hot)))
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for n, a, b in csvs:
            (d / ("cohomology_n%d.csv" % n)).write_text(a)
            (d / ("homotopy_n%d.csv" % n)).write_text(b)
    status = "FAIL" if "FAIL" in statuses else ("PARTIAL" if "PARTIAL" in statuses else "PASS")
    return status, {"instances": out}


def cmd_bockstein(args, job):
    from .bockstein import PerfectComplex, bockstein_cohomology, evaluation_target, _alternating
    from .padic import cyclotomic_u

    text = Path(args.complex).read_text()
    job.update(complex=json.loads(text), c=args.c, n=args.n, twist_mode=args.twist_mode)
    X = PerfectComplex.from_json(json.loads(text))
    R = X.ring
    if args.c is not None:
        c = R.scalar(args.c)
    elif args.n is not None:
        c = cyclotomic_u(R) ** args.n
    else:
        c = R.one
    res = bockstein_cohomology(X, c, args.twist_mode)
    out = res.to_json()
    status = "PASS"
    if res.semisimple:
        ec = _alternating(res, R.p)
        out["euler_characteristic"] = str(ec)
        try:
            target = evaluation_target(X, c, args.twist_mode)
            out["evaluation_target"] = str(target)
            if target != ec:
                status = "FAIL"
        except Exception as exc:
            out["evaluation_target"] = None
            out["note"] = "%s: %s" % (type(exc).__name__, exc)
    else:
        status = "PARTIAL"
        out["euler_characteristic"] = None
    return status, out


def cmd_selftest(args, job):
    from .checks import run_selftest

    job.update(seed=args.seed, p=args.p, scale=args.scale)
    rep = run_selftest(args.seed, args.p, args.scale)
    return rep["status"], rep


COMMANDS = {
    "lp": cmd_lp, "invariants": cmd_invariants, "euler-char": cmd_euler_char,
    "module-ec": cmd_module_ec, "ktheory": cmd_ktheory, "bockstein": cmd_bockstein,
    "selftest": cmd_selftest,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="iwasawa", description="Rank-one Iwasawa theory toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "human")):
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--cache-dir", default=None, help="overrides $IWASAWA_CACHE_DIR")
        sp.add_argument("--no-cache", action="store_true")

    def branch(sp):
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--N", type=int, default=30)
        sp.add_argument("--M", type=int, default=12)
        sp.add_argument("--strategy", choices=("interpolation", "stickelberger"), default=None)
        sp.add_argument("--sigma", default="", help="extra primes removed from L, comma separated")

    sp = sub.add_parser("lp", help="build and verify a branch series")
    branch(sp)
    sp.add_argument("--chi", required=True, help='character "f:e1,e2,..."')
    sp.add_argument("--verify", type=int, default=3)
    sp.add_argument("--level", type=int, default=None)
    common(sp)

    sp = sub.add_parser("invariants", help="mu and lambda of branch series")
    branch(sp)
    sp.add_argument("--chi", default=None)
    sp.add_argument("--teichmuller-scan", action="store_true", help="all even powers of omega")
    common(sp)

    sp = sub.add_parser("euler-char", help="Euler characteristic identity on modules from a JSON file")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--N", type=int, default=30)
    sp.add_argument("--module", required=True)
    sp.add_argument("--n", default="0")
    common(sp)

    sp = sub.add_parser("module-ec", help="randomized Euler characteristic identity run")
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, default=200)
    common(sp)

    sp = sub.add_parser("ktheory", help="order tables and consistency report")
    branch(sp)
    sp.add_argument("--chi", required=True)
    sp.add_argument("--n", required=True, help="comma separated, multiples of p-1")
    sp.add_argument("--out-dir", default=None, help="write the CSV tables here")
    common(sp, ("json", "human", "csv"))

    sp = sub.add_parser("bockstein", help="Bockstein cohomology of a complex file")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--c", type=int, default=None, help="rho(gamma) as an integer")
    sp.add_argument("--n", type=int, default=None, help="rho(gamma) = u^n")
    sp.add_argument("--twist-mode", choices=("rho", "adjoint"), default="rho")
    common(sp)

    sp = sub.add_parser("selftest", help="all invariant suites")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--scale", type=float, default=1.0)
    common(sp)
    return ap


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], "%s.%s" % (prefix, k) if prefix else str(k))
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, x in enumerate(obj):
            yield from _flatten(x, "%s[%d]" % (prefix, i))
    else:
        if isinstance(obj, str):
            text = obj.strip().replace("\n", " | ")
        else:
            text = json.dumps(obj, sort_keys=True)
        yield "%s: %s" % (prefix, text)


def render(report, fmt):
    if fmt == "human":
        return "\n".join(_flatten(report)) + "\n"
    if fmt == "csv":
        parts = []
        for inst in report.get("result", {}).get("instances", []):
            parts.append(inst["cohomology_csv"])
            parts.append(inst["homotopy_csv"])
        return "\n".join(parts)
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv=None):
    """Parse ``argv``, dispatch, and return ``(exit_code, report_text)``."""
    args = build_parser().parse_args(argv)
    job = {"command": args.command}
    try:
        status, result = COMMANDS[args.command](args, job)
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, "job": job,
                  "status": status, "result": result}
    except Exception as exc:
        status = "ERROR"
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, "job": job,
                  "status": status, "error": "%s: %s" % (type(exc).__name__, exc)}
    fmt = args.format if status != "ERROR" or args.format != "csv" else "json"
    return EXIT[status], render(report, fmt)


def main(argv=None):
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
