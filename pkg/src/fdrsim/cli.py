"""Command-line entry point for parameter sweeps (`simulate`)."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import SystemParams
from .harness import SweepConfig, run_sweep

# CLI sweep names -> SystemParams field names.
SWEEP_FIELDS = {"sigma_e2": "sigma_e2", "q": "q_db", "g": "g_db", "i": "i_db"}

# Grids used when --values is omitted; they bracket the interesting regions.
DEFAULT_GRIDS = {
    "sigma_e2": tuple(10.0 ** np.arange(-4.0, -0.75, 0.5)),
    "q": tuple(np.arange(0.0, 12.1, 2.0)),
    "g": tuple(np.arange(0.0, 24.1, 2.0)),
    "i": tuple(np.arange(0.0, 30.1, 3.0)),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Monte Carlo ergodic sum-rate sweeps for the relay-aided "
        "multiuser MIMO downlink (FDR/HDR/no-relay ZFBF).",
    )
    p.add_argument("--sweep", required=True, choices=sorted(SWEEP_FIELDS),
                   help="parameter to sweep")
    p.add_argument("--values", default=None,
                   help="comma-separated sweep values (default: built-in grid)")
    p.add_argument("--trials", type=int, default=2000,
                   help="Monte Carlo trials per point (default 2000)")
    p.add_argument("--seed", type=int, default=12345, help="master seed")
    p.add_argument("--schemes", default="fdr,hdr,baseline",
                   help="comma-separated subset of fdr,hdr,baseline")
    p.add_argument("--l", type=int, default=2, help="BS antennas")
    p.add_argument("--n1", type=int, default=4, help="MS-1 group size")
    p.add_argument("--n2", type=int, default=4, help="MS-2 group size")
    p.add_argument("--pt-bs", type=float, default=100.0, help="BS power (linear)")
    p.add_argument("--pt-rs", type=float, default=50.0, help="RS power (linear)")
    p.add_argument("--q-db", type=float, default=6.0, help="RS-to-MS variance (dB)")
    p.add_argument("--g-db", type=float, default=20.0, help="BS-to-RS gain (dB)")
    p.add_argument("--i-db", type=float, default=10.0, help="self-interference gain (dB)")
    p.add_argument("--sigma-e2", type=float, default=0.0, help="CSI error variance")
    p.add_argument("--out", required=True, help="output CSV path")
    return p


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    base = SystemParams(
        L=args.l,
        n1=args.n1,
        n2=args.n2,
        pt_bs=args.pt_bs,
        pt_rs=args.pt_rs,
        q_db=args.q_db,
        g_db=args.g_db,
        i_db=args.i_db,
        sigma_e2=args.sigma_e2,
    )
    if args.values is None:
        values = DEFAULT_GRIDS[args.sweep]
    else:
        try:
            values = tuple(float(v) for v in args.values.split(",") if v.strip())
        except ValueError as exc:
            raise ValueError(f"could not parse --values {args.values!r}: {exc}") from exc
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    return SweepConfig(
        base_params=base,
        sweep_variable=SWEEP_FIELDS[args.sweep],
        sweep_values=values,
        trials=args.trials,
        master_seed=args.seed,
        schemes=schemes,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"simulate: config error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_sweep(config, args.out)
    except OSError as exc:
        print(f"simulate: i/o error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
