"""Run the homophily-vs-separability sweep and print the correlations.

Writes sweep.tsv and correlations.json into the output directory (default
runs/sweep). The default grid matches the batch pipeline's sweep settings;
pass --quick for a 2x2 smoke grid that finishes in seconds.

Usage: python3 scripts/run_sweep.py [--out DIR] [--seed S] [--quick]
"""
from __future__ import annotations

import argparse
from pathlib import Path

from glembed.config import SweepSettings
from glembed.synth import correlate_sweep, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/sweep")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="tiny grid, n=60")
    args = ap.parse_args()

    defaults = SweepSettings()
    if args.quick:
        grid = dict(p_in_values=[0.3, 0.9], p_out_values=[0.05, 0.4], n=60, d=8)
    else:
        grid = dict(
            p_in_values=list(defaults.p_in),
            p_out_values=list(defaults.p_out),
            n=defaults.n,
            d=defaults.dimension,
        )

    result = sweep(
        communities=defaults.communities, seed=args.seed, progress=True, **grid
    )
    report = correlate_sweep(result)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.tsv").write_text(result.to_tsv())
    (out / "correlations.json").write_text(report.to_json())

    print(f"{len(result.rows)} rows, {len(result.skipped)} skipped cells")
    for name, (r, p) in sorted(report.correlations.items()):
        print(f"  {name:8s} vs f1: r={r:+.4f}  p={p:.3g}")
    print(f"written to {out}/")


if __name__ == "__main__":
    main()
