#!/usr/bin/env python3
"""Run the four standard parameter sweeps and write one CSV per sweep.

Defaults reproduce the reference scenario (L=2, N=4, P_BS=100, P_RS=50,
Q=6, G=20, I=10): a CSI-error sweep, a Q sweep and an I sweep at
sigma_e2=0.01, and a G sweep with perfect CSI.  Use --trials 10000 for
publication-quality curves (slow); the default 2000 is desk-scale.
"""

import argparse
import pathlib
import sys

from fdrsim.channel import SystemParams
from fdrsim.cli import DEFAULT_GRIDS
from fdrsim.harness import SweepConfig, run_sweep

SWEEPS = {
    "sigma_e2.csv": ("sigma_e2", DEFAULT_GRIDS["sigma_e2"], {}),
    "q_db.csv": ("q_db", DEFAULT_GRIDS["q"], {"sigma_e2": 0.01}),
    "g_db.csv": ("g_db", DEFAULT_GRIDS["g"], {"sigma_e2": 0.0}),
    "i_db.csv": ("i_db", DEFAULT_GRIDS["i"], {"sigma_e2": 0.01}),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument("--out-dir", default="sweeps")
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for filename, (variable, values, overrides) in SWEEPS.items():
        config = SweepConfig(
            base_params=SystemParams(**overrides),
            sweep_variable=variable,
            sweep_values=tuple(values),
            trials=args.trials,
            master_seed=args.seed,
        )
        path = out_dir / filename
        rows = run_sweep(config, path)
        print(f"{path}: {len(rows)} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
