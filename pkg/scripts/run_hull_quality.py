#!/usr/bin/env python3
"""Measure how well the hull characteristic covers the exact impedance set.

For each fault type: builds the hull from the default 22-point grid, samples
a dense exact cloud, and reports the containment rate plus the largest
signed distance of any sample outside a hull edge (0 when fully covered).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from incrrelay import (
    FAULT_TYPES,
    FaultSpec,
    exact_sampled,
    fourbus_path,
    grid_dense,
    hull_characteristic,
    parse_network,
    simulate,
)
from incrrelay.incremental import OmegaCache


def outside_distance(hull_vertices, z):
    """Largest positive distance of z beyond any hull edge (0 if inside)."""
    verts = list(hull_vertices)
    worst = 0.0
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        edge = b - a
        d = -((edge.real * (z - a).imag - edge.imag * (z - a).real) / abs(edge))
        worst = max(worst, d)
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--network", default=fourbus_path())
    ap.add_argument("--dense", default="100x100", help="dense grid size NxM")
    ap.add_argument("--mhat", default="0.5,0.5", help="window fault point MT,MF")
    ap.add_argument("--slack", type=float, default=0.01, help="fraction of |z|")
    args = ap.parse_args()

    net = parse_network(Path(args.network).read_text(encoding="utf-8"))
    n_t, n_f = (int(v) for v in args.dense.split("x"))
    m_t_hat, m_f_hat = (float(v) for v in args.mhat.split(","))
    slack = args.slack * abs(net.protected.z1)

    print(f"{'eta':<6}{'rate':>8}{'max outside dist':>18}{'hull verts':>12}")
    worst_rate = 1.0
    for eta in FAULT_TYPES:
        window = simulate(
            net, FaultSpec(eta, m_t_hat, m_f_hat, net.r_fault_max)
        ).window
        cache = OmegaCache(net)
        hull = hull_characteristic(net, eta, window, cache=cache)
        dense = exact_sampled(net, eta, window, grid_dense(n_t, n_f), cache)
        dists = np.array(
            [outside_distance(hull.vertices, z) for z in dense.samples]
        )
        rate = float(np.mean(dists <= slack))
        worst_rate = min(worst_rate, rate)
        print(f"{eta:<6}{rate:>8.4f}{dists.max():>18.3e}{len(hull.vertices):>12}")
    return 0 if worst_rate >= 0.99 else 1


if __name__ == "__main__":
    sys.exit(main())
