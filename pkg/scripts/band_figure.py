"""Write the inclusion band of a system as CSV for external plotting."""

import argparse
import sys

from intdelay import benchmark_systems as bs
from intdelay.cli import RunConfig, emit_band, write_table

COLUMNS = ["omega", "re_center", "im_center", "half_width_re", "half_width_im"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-max", type=float, default=60.0)
    ap.add_argument("--samples", type=int, default=1200)
    ap.add_argument("--output", default="-")
    args = ap.parse_args()
    rows = emit_band(RunConfig(system=bs.band_demo_2x2()), 0.0, args.omega_max, args.samples)
    if args.output == "-":
        write_table(rows, sys.stdout, COLUMNS)
    else:
        with open(args.output, "w", newline="") as fh:
            write_table(rows, fh, COLUMNS)


if __name__ == "__main__":
    main()
