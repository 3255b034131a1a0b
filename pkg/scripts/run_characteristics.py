#!/usr/bin/env python3
"""Build relay characteristics for every fault type on the bundled network.

Writes CSV/JSON/SVG artifacts per fault type into an output directory and
prints per-characteristic wall-clock times. Point at a different network
file to study your own system.
"""

import argparse
import sys

from incrrelay import fourbus_path
from incrrelay.cli import main as cli_main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--network", default=fourbus_path())
    ap.add_argument("--fault", default="all")
    ap.add_argument(
        "--grid",
        default="paper22",
        help="paper22 | corners4 | dense:NxM | perimeter:N",
    )
    ap.add_argument("--mhat", default="0.5,1", help="nominal fault point MT,MF")
    ap.add_argument("--outdir", default="characteristics")
    return ap.parse_args()


def main():
    args = parse_args()
    return cli_main(
        [
            "characteristic",
            "--network",
            args.network,
            "--fault",
            args.fault,
            "--grid",
            args.grid,
            "--mhat",
            args.mhat,
            "--out",
            f"{args.outdir}/characteristic",
        ]
    )


if __name__ == "__main__":
    sys.exit(main())
