"""Command-line harness: verify | scan | walk | tables | bench."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import backend, report
from .report import ConfigError, RunConfig, config_from_dict, load_config


def _parse_lambda(text: str):
    return tuple(complex(tok.strip().replace(" ", "")) for tok in text.split(",") if tok.strip())


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override its fields")
    sub.add_argument("--q", type=int)
    sub.add_argument("--p", type=float)
    sub.add_argument("--l", type=float)
    sub.add_argument("--lambda", dest="lam", type=_parse_lambda,
                     help="comma-separated spectral values, e.g. '0.5,1+0.3j'")
    sub.add_argument("--n", dest="n_samples", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", dest="output_path")


def _build_config(args, suite: str) -> RunConfig:
    base = load_config(args.config).as_dict() if args.config else {}
    if "lam" in base:
        base["lam"] = tuple(complex(x) for x in base["lam"])
    for name in ("q", "p", "l", "lam", "n_samples", "seed", "output_path"):
        val = getattr(args, name, None)
        if val is not None:
            base[name] = val
    base["suite"] = suite
    return config_from_dict(base)


def _cmd_verify(args) -> int:
    cfg = _build_config(args, "verify")
    rep = report.run_verify(cfg)
    for chk in rep["checks"]:
        status = "PASS" if chk["pass"] else "FAIL"
        extra = f" stderr={chk['stderr']:.3g}" if chk["stderr"] else ""
        print(f"{status} [{chk['grade']:6s}] {chk['check']:24s} "
              f"value={chk['value']:.6g} tol={chk['tol']:.3g}{extra}")
    print(f"report written to {cfg.output_path} (backend: {rep['backend']}, "
          f"seed: {cfg.seed})")
    return 0 if rep["all_pass"] else 1


def _cmd_scan(args) -> int:
    cfg = _build_config(args, "scan")
    grid = _parse_float_grid(args.l_grid) if args.l_grid else None
    out = args.output_path or "weylconv_scan.json"
    res = report.run_scan(cfg, grid, out)
    for row in res["rows"]:
        print(f"l={row['l']:+.4f}  min_weight={row['min_weight']:+.6e}  "
              f"frac_negative={row['frac_negative']:.4f}")
    print(f"scan written to {out}")
    return 0


def _parse_float_grid(text: str):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _cmd_walk(args) -> int:
    cfg = _build_config(args, "walk")
    out = args.output_path or "weylconv_walk.json"
    res = report.run_walk(cfg, steps=args.steps, out_path=out)
    print(json.dumps({k: res[k] for k in ("steps", "final_top", "final_theta",
                                          "support_violations", "pass")}, indent=2))
    print(f"walk written to {out}")
    return 0 if res["pass"] else 1


def _cmd_tables(args) -> int:
    cfg = _build_config(args, "tables")
    written = report.run_tables(cfg, out_dir=args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_bench(args) -> int:
    from . import sampling

    names = ["python"] + (["ext"] if backend.have_extension() else [])
    print(f"{'q':>2s} {'n':>9s}  " + "  ".join(f"{nm:>14s}" for nm in names) + "   speedup")
    for q in args.q_list:
        rng = np.random.default_rng(0)
        t = np.sort(rng.uniform(0, 2, q))[::-1].copy()
        s = np.sort(rng.uniform(0, 2, q))[::-1].copy()
        g = sampling.draw_su_gaussian(q, args.n, rng)
        dirs, radii = sampling.draw_ball_primitives(2 * q + 0.5, q, args.n, rng)
        rates = []
        for nm in names:
            mod = backend.get_backend(nm)
            mod.conv_kernel_batch(t, s, g[:1000], dirs[:1000], radii[:1000])  # warm up
            t0 = time.perf_counter()
            mod.conv_kernel_batch(t, s, g, dirs, radii)
            dt = time.perf_counter() - t0
            rates.append(args.n / dt)
        line = f"{q:2d} {args.n:9d}  " + "  ".join(f"{r:11.0f}/s" for r in rates)
        if len(rates) == 2:
            line += f"   {rates[1] / rates[0]:6.1f}x"
        print(line)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="weylconv",
        description="Verification harness for the chamber convolution structures")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("verify", help="run the invariant check suite")
    _add_common(sub)

    sub = subs.add_parser("scan", help="positivity scan over a grid of l")
    _add_common(sub)
    sub.add_argument("--l-grid", help="comma-separated l values")

    sub = subs.add_parser("walk", help="convolution random walk")
    _add_common(sub)
    sub.add_argument("--steps", type=int, default=200)

    sub = subs.add_parser("tables", help="emit kappa/c-function/density/positivity CSVs")
    _add_common(sub)
    sub.add_argument("--out-dir", default=".")

    sub = subs.add_parser("bench", help="compare the compiled and numpy backends")
    sub.add_argument("--n", type=int, default=200_000)
    sub.add_argument("--q-list", type=lambda s: [int(x) for x in s.split(",")],
                     default=[1, 2, 3])

    args = parser.parse_args(argv)
    try:
        handler = {"verify": _cmd_verify, "scan": _cmd_scan, "walk": _cmd_walk,
                   "tables": _cmd_tables, "bench": _cmd_bench}[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
