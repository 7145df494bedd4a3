"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 MC validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

from .capacity import channel_capacity
from .channel import ChannelParams, transition_matrix
from .errors import NumericsError
from .experiments import (FIG1_R, FIG1_SIGMA_MAX, FIG1_SIGMA_STEPS, FIG1_TAU, SweepSpec,
                          fig1_spec, optimal_sigma, sigma_grid, sweep)
from .oracle_mc import MIN_SAMPLES, estimate_transition, z_score
from .quadist import NumericsConfig

SCHEMA_VERSION = "1.0"
SWEEP_COLUMNS = ("theta", "sigma", "p00", "p01", "p1_star", "capacity_bits")
EXIT_USAGE = 2
EXIT_NUMERICS = 3
EXIT_VALIDATION = 4
Z_LIMIT = 4.0


def fmt(x) -> str:
    """Locale-independent float text that round-trips exactly."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _positive(text: str) -> float:
    v = _nonneg(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None
    if not math.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {text}")
    return v


def _theta_list(text: str) -> tuple[float, ...]:
    return tuple(_nonneg(t) for t in text.split(",") if t.strip())


def _add_common(p: argparse.ArgumentParser, *, r_required: bool = False,
                theta_required: bool = False):
    p.add_argument("--r", type=_positive, required=r_required,
                   default=None if r_required else FIG1_R, help="coherent amplitude of symbol 1")
    p.add_argument("--tau", type=_nonneg, default=FIG1_TAU, help="damping parameter")
    p.add_argument("--theta", type=_nonneg, required=theta_required,
                   default=None if theta_required else 4.2, help="detection threshold")
    p.add_argument("--tol", type=_positive, default=1e-10, help="quadrature tolerance")
    p.add_argument("--tail-tol", type=_positive, default=1e-12,
                   help="Poisson truncation mass")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=1)


def _add_grid(p: argparse.ArgumentParser, steps: bool = True):
    p.add_argument("--sigma-min", type=_nonneg, default=0.0)
    p.add_argument("--sigma-max", type=_nonneg, default=FIG1_SIGMA_MAX)
    if steps:
        p.add_argument("--sigma-steps", type=int, default=FIG1_SIGMA_STEPS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisecap",
        description="Capacity of a damped bosonic channel with noisy threshold decoding.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="transition matrix and capacity at one point")
    _add_common(p, r_required=True, theta_required=True)
    p.add_argument("--sigma", type=_nonneg, default=0.0)

    p = sub.add_parser("sweep", help="capacity over a sigma grid")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--theta-list", type=_theta_list, default=None,
                   help="comma-separated thresholds (overrides --theta)")

    p = sub.add_parser("optimize", help="noise width maximizing capacity")
    _add_common(p)
    _add_grid(p, steps=False)

    p = sub.add_parser("fig1", help="reference sweep: r=5, tau=0.5, four thresholds")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--theta-list", type=_theta_list, default=None)

    p = sub.add_parser("validate", help="check quadrature against Monte Carlo")
    _add_common(p)
    p.add_argument("--sigma", type=_nonneg, default=1.0)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=42)
    return parser


def _cfg(args) -> NumericsConfig:
    return NumericsConfig(tail_tol=args.tail_tol, quad_tol=args.tol)


def _echo(args) -> dict:
    skip = {"command", "format", "out", "threads"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _cmd_capacity(args):
    p = ChannelParams(args.r, args.tau, args.theta, args.sigma)
    tm = transition_matrix(p, _cfg(args))
    res = channel_capacity(tm)
    row = {"p00": tm.p00, "p01": tm.p01, "p10": tm.p10, "p11": tm.p11,
           "p1_star": res.p1_star, "wp": res.wp, "capacity_bits": res.capacity_bits,
           "method": res.method}
    return [row], tuple(row), 0


def _sweep_rows(args, spec):
    rows = [asdict(r) for r in sweep(spec, threads=args.threads)]
    return rows, SWEEP_COLUMNS, 0


def _grid(args, parser):
    if args.sigma_steps < 1:
        parser.error("--sigma-steps must be >= 1")
    if not args.sigma_min < args.sigma_max:
        parser.error("--sigma-min must be < --sigma-max")
    return sigma_grid(args.sigma_min, args.sigma_max, args.sigma_steps)


def _cmd_sweep(args, parser):
    thetas = args.theta_list or (args.theta,)
    spec = SweepSpec(ChannelParams(args.r, args.tau, thetas[0], 0.0),
                     _grid(args, parser), thetas, _cfg(args))
    return _sweep_rows(args, spec)


def _cmd_fig1(args, parser):
    base = fig1_spec(_cfg(args))
    spec = SweepSpec(ChannelParams(args.r, args.tau, base.base.theta, 0.0),
                     _grid(args, parser), args.theta_list or base.theta_list, base.cfg)
    return _sweep_rows(args, spec)


def _cmd_optimize(args, parser):
    if not args.sigma_min < args.sigma_max:
        parser.error("--sigma-min must be < --sigma-max")
    cfg = _cfg(args)
    base = ChannelParams(args.r, args.tau, args.theta, 0.0)
    opt = optimal_sigma(base, args.sigma_min, args.sigma_max, cfg)
    c0 = channel_capacity(transition_matrix(base, cfg)).capacity_bits
    row = {"sigma_star": opt.sigma_star, "capacity_at_star": opt.capacity_at_star,
           "capacity_at_zero": c0, "noise_benefit": opt.capacity_at_star > c0,
           "at_boundary": opt.at_boundary}
    return [row], tuple(row), 0


def _cmd_validate(args, parser):
    if args.samples < MIN_SAMPLES:
        parser.error(f"--samples must be >= {MIN_SAMPLES}")
    if args.seed < 0:
        parser.error("--seed must be >= 0")
    p = ChannelParams(args.r, args.tau, args.theta, args.sigma)
    tm = transition_matrix(p, _cfg(args))
    e00, e01 = estimate_transition(p, args.samples, args.seed, threads=args.threads)
    rows = []
    for name, ref, est in (("p00", tm.p00, e00), ("p01", tm.p01, e01)):
        rows.append({"quantity": name, "quadrature": ref, "mc": est.p_hat,
                     "std_err": est.std_err, "z": z_score(est, ref)})
    ok = all(abs(r["z"]) <= Z_LIMIT for r in rows)
    for r in rows:
        r["pass"] = abs(r["z"]) <= Z_LIMIT
    return rows, ("quantity", "quadrature", "mc", "std_err", "z", "pass"), \
        0 if ok else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        if args.command == "capacity":
            rows, columns, code = _cmd_capacity(args)
        elif args.command == "sweep":
            rows, columns, code = _cmd_sweep(args, parser)
        elif args.command == "fig1":
            rows, columns, code = _cmd_fig1(args, parser)
        elif args.command == "optimize":
            rows, columns, code = _cmd_optimize(args, parser)
        else:
            rows, columns, code = _cmd_validate(args, parser)
    except NumericsError as exc:
        print(f"noisecap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS

    if args.format == "json":
        record = {"schema_version": SCHEMA_VERSION, "command": args.command,
                  "params": _echo(args), "rows": rows}
        text = json.dumps(record, indent=2, allow_nan=False) + "\n"
    else:
        text = to_csv(rows, columns)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
