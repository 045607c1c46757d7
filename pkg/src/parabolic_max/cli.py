"""Command-line front end: ``parabolic-max <command> [flags]``.

Tables go to stdout or ``--out FILE`` as CSV (17 significant digits) or, with
``--json``, as one JSON object carrying the run manifest.  A CSV written to a
file gets its manifest alongside as ``FILE.manifest.json``.

Exit codes: 0 success, 2 usage error, 3 validation or consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from ._backend import NAME as BACKEND
from .airy import DomainError
from .series import (
    SeriesConfig,
    hitting_cumulative,
    hitting_density_values,
    moments,
    series_fN,
    series_G,
)

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 2, 3
QUANTITIES = ("en", "em", "en2", "em2", "var_n", "var_m")
ROUTES = ("series", "integral", "mc")
DETERMINISTIC_TOL = 1e-8  # series vs integral
MC_SIGMAS = 3.0


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def parse_grid(text):
    """'a:b:n' -> n equispaced points from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid must look like a:b:n, got {text!r}") from None
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)) or (n > 1 and b <= a):
        raise UsageError("grid needs finite a < b and n >= 1")
    return np.linspace(a, b, n)


def _count(text):
    """Integer flag that also accepts forms like 1e6."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _series_config(args):
    if args.tail is None:
        return SeriesConfig.auto(args.terms)
    return SeriesConfig(K=args.terms, tail_mode=args.tail)


# ------------------------------------------------------------ commands


def cmd_moments(args, warnings):
    routes = ROUTES if args.route == "all" else (args.route,)
    cfg = _series_config(args)
    config = {"route": args.route, "terms": cfg.K, "tail": cfg.tail_mode}
    results = {}
    for route in routes:
        if route == "series":
            ms = moments(cfg)
        elif route == "integral":
            from .integrals import integral_moments

            ms = integral_moments(cfg)
        else:
            from .montecarlo import McConfig, mc_moments

            mcfg = McConfig(T=args.horizon, h=args.step, n=args.paths, seed=args.seed)
            config.update(paths=mcfg.n, seed=mcfg.seed, horizon=mcfg.T, step=mcfg.h, coarsen=mcfg.coarsen)
            ms = mc_moments(mcfg)
        results[route] = ms

    rows = [
        (route, q, getattr(ms, q), ms.err_est.get(q, float("nan")))
        for route, ms in results.items()
        for q in QUANTITIES
    ]
    consistent = True
    if len(results) > 1:
        base = results["series"]
        for q in QUANTITIES:
            ref, ref_err = getattr(base, q), base.err_est[q]
            for route in ("integral", "mc"):
                ms = results[route]
                gap = abs(getattr(ms, q) - ref)
                if route == "mc":
                    bound = MC_SIGMAS * ms.err_est[q] + ref_err
                else:
                    bound = max(DETERMINISTIC_TOL, ref_err + ms.err_est[q])
                if gap > bound:
                    consistent = False
                    warnings.append(f"{q}: {route} differs from series by {gap:.3g} (bound {bound:.3g})")
    extra = {
        "results": {r: {"values": ms.as_dict(), "err_est": dict(ms.err_est)} for r, ms in results.items()},
        "consistent": consistent,
    }
    return config, ["route", "quantity", "value", "err_est"], rows, extra, EXIT_OK if consistent else EXIT_FAILED


def cmd_dist(args, warnings):
    cfg = _series_config(args)
    if (args.grid is None) == (args.x is None):
        raise UsageError("give exactly one of --grid and --x")
    x = parse_grid(args.grid) if args.grid is not None else np.array([args.x])
    if np.any(x < 0):
        raise UsageError("x must be nonnegative")
    g = series_G(x, cfg)
    clamped = g.clamped
    if args.what == "cdf":
        cdf_n = 1.0 - g.values
        values = cdf_n if args.dist == "N" else cdf_n * cdf_n
    else:
        f = series_fN(x, cfg, include_zero=True)
        clamped += f.clamped
        values = f.values if args.dist == "N" else 2.0 * (1.0 - g.values) * f.values
    if clamped:
        warnings.append(f"{clamped} series values clamped into range")
    config = {"what": args.what, "dist": args.dist, "grid": args.grid, "x": args.x, "terms": cfg.K, "tail": cfg.tail_mode}
    column = f"{args.what}_{args.dist}"
    return config, ["x", column], list(zip(x, values)), {}, EXIT_OK


def cmd_hitting(args, warnings):
    cfg = _series_config(args)
    if not (math.isfinite(args.x) and args.x > 0):
        raise UsageError("--x must be positive")
    t = parse_grid(args.grid)
    if t[0] < 0:
        raise UsageError("hitting times are nonnegative")
    density, _ = hitting_density_values(args.x, t, cfg, include_zero=True)
    if t[0] == 0.0:
        cumulative = hitting_cumulative(args.x, t, cfg)
    else:
        cumulative = hitting_cumulative(args.x, np.concatenate([[0.0], t]), cfg)[1:]
    config = {"x": args.x, "grid": args.grid, "terms": cfg.K, "tail": cfg.tail_mode}
    return config, ["t", "f_tau", "cumulative"], list(zip(t, density, cumulative)), {}, EXIT_OK


def cmd_zeros(args, warnings):
    from .zeros import zero_table

    if args.count < 1:
        raise UsageError("--count must be positive")
    tab = zero_table(args.count)
    rows = list(zip(tab.k, tab.a, tab.aip, tab.bi, tab.hi, tab.phi))
    return {"count": args.count}, ["k", "a_k", "aip", "bi", "hi", "phi"], rows, {}, EXIT_OK


def cmd_validate(args, warnings):
    from .validation import run

    checks = run(args.suite, paths=args.paths, seed=args.seed)
    rows = [(c.suite, c.name, c.gap, c.tol, c.passed) for c in checks]
    passed = all(c.passed for c in checks)
    for c in checks:
        if not c.passed:
            warnings.append(f"{c.suite}: {c.name} failed ({c.gap:.3g} > {c.tol:.3g})")
    config = {"suite": args.suite, "paths": args.paths, "seed": args.seed}
    return config, ["suite", "check", "gap", "tol", "passed"], rows, {"passed": passed}, EXIT_OK if passed else EXIT_FAILED


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON object instead of CSV")
    common.add_argument("--out", metavar="FILE", help="write to FILE instead of stdout")

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--terms", type=int, default=200, metavar="K", help="series cutoff (default 200)")
    series.add_argument(
        "--tail", choices=("none", "asymptotic"), default=None, help="tail mode (default: asymptotic when K >= 200)"
    )

    p = argparse.ArgumentParser(prog="parabolic-max", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("moments", parents=[common, series], help="means, second moments and variances")
    m.add_argument("--route", choices=ROUTES + ("all",), default="series")
    m.add_argument("--paths", type=_count, default=10**5, help="Monte Carlo draws (default 1e5)")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--horizon", type=float, default=4.0, help="Monte Carlo horizon T")
    m.add_argument("--step", type=float, default=1e-4, help="Monte Carlo grid step h")
    m.set_defaults(func=cmd_moments)

    d = sub.add_parser("dist", parents=[common, series], help="CDF or density of N or M")
    d.add_argument("--what", choices=("cdf", "pdf"), required=True)
    d.add_argument("--dist", choices=("N", "M"), required=True)
    d.add_argument("--grid", metavar="a:b:n")
    d.add_argument("--x", type=float)
    d.set_defaults(func=cmd_dist)

    h = sub.add_parser("hitting", parents=[common, series], help="hitting-time density and its running integral")
    h.add_argument("--x", type=float, required=True)
    h.add_argument("--grid", metavar="a:b:n", required=True)
    h.set_defaults(func=cmd_hitting)

    z = sub.add_parser("zeros", parents=[common], help="Airy zeros with companion values")
    z.add_argument("--count", type=_count, default=10)
    z.set_defaults(func=cmd_zeros)

    v = sub.add_parser("validate", parents=[common], help="run self-check suites")
    v.add_argument("--suite", choices=("airy", "identities", "series", "mc", "all"), required=True)
    v.add_argument("--paths", type=_count, default=2 * 10**5, help="Monte Carlo draws for the mc suite")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)
    return p


# ---------------------------------------------------------------- output


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _report_text(rows, extra):
    lines = [f"{'PASS' if ok else 'FAIL'}  {suite:<10} {name}  gap={gap:.3g} tol={tol:.3g}" for suite, name, gap, tol, ok in rows]
    lines.append("all checks passed" if extra["passed"] else "some checks FAILED")
    return "\n".join(lines) + "\n"


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on bad flags
    warnings = []
    start = time.perf_counter()
    try:
        config, columns, rows, extra, code = args.func(args, warnings)
    except (UsageError, DomainError, ValueError) as exc:
        parser.error(f"{args.command}: {exc}")
    manifest = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "config": config,
        "version": __version__,
        "backend": BACKEND,
        "wall_time_s": time.perf_counter() - start,
        "warnings": warnings,
    }
    if args.json:
        payload = {"schema": SCHEMA, "manifest": manifest, "columns": columns, "rows": rows, **extra}
        _write(json.dumps(_jsonable(payload), indent=2) + "\n", args.out)
    else:
        if args.command == "validate":
            text = _report_text(rows, extra)
        else:
            text = _csv_text(columns, rows)
        _write(text, args.out)
        if args.out is not None:
            _write(json.dumps(_jsonable({"schema": SCHEMA, "manifest": manifest}), indent=2) + "\n", args.out + ".manifest.json")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
