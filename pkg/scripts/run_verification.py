#!/usr/bin/env python3
"""Sweep the pipeline-vs-simulator residuals over a dense fault grid.

Prints the residual table for all fault types and exits nonzero if any
residual exceeds the documented thresholds. Useful as a quick health check
after editing a network file.
"""

import argparse
import sys

from incrrelay import fourbus_path
from incrrelay.cli import main as cli_main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--network", default=fourbus_path())
    ap.add_argument("--fault", default="all")
    ap.add_argument("--grid", default="dense:5x5")
    ap.add_argument("--out", default=None, help="optional residual CSV path")
    return ap.parse_args()


def main():
    args = parse_args()
    argv = [
        "verify",
        "--network",
        args.network,
        "--fault",
        args.fault,
        "--grid",
        args.grid,
    ]
    if args.out:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
