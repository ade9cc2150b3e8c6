"""Regenerate the full curve suite (8 figures x 5 panels x 2 curves) and plots.

    python scripts/reproduce_figures.py --out figures --workers 4
"""

import argparse
import time
from pathlib import Path

from nvsinglet.config import RunConfig, banner, load_config
from nvsinglet.plotting import plot_figures
from nvsinglet.sweep import figure_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--config", type=Path)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else RunConfig()
    print(banner(cfg))
    t0 = time.perf_counter()
    manifest = figure_suite(cfg.rates, args.out, workers=args.workers)
    print(f"{len(manifest['curves'])} curves in {time.perf_counter() - t0:.1f} s -> {args.out}")
    if not args.no_plot:
        for path in plot_figures(args.out, manifest):
            print(f"  {path}")


if __name__ == "__main__":
    main()
