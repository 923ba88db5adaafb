"""Write the CSV dataset behind every figure preset to results/."""

import argparse
import time
from pathlib import Path

from mwrn.cli import FIGURES, cmd_figure


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--frames", type=int, help="override frames per SNR point")
    parser.add_argument("--bits-per-frame", type=int)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("figures", nargs="*", default=list(FIGURES))
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.figures:
        t0 = time.perf_counter()
        cmd_figure(name, str(out / f"{name}.csv"), args.frames, args.bits_per_frame, args.seed)
        print(f"{name}: {out / (name + '.csv')} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
