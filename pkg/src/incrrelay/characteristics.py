"""Relay characteristics in the complex impedance plane.

Three constructions over the fault uncertainty (m_t, m_f) in [0,1]^2:
the exact sampled point cloud, the parallelogram from a point estimate of
the remote current, and the convex hull of sampled apparent impedances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .admittance import FaultSpec
from .incremental import OmegaCache, remote_current
from .loops import apparent_impedance, fault_resistance_direction
from .network import NetworkModel
from .phasors import MeasurementWindow

GRID_PRESETS = ("paper22", "corners4")


@dataclass(frozen=True)
class Characteristic:
    kind: str  # exact-sampled | parallelogram | convex-hull
    vertices: tuple[complex, ...]
    eta: str
    samples: tuple[complex, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def is_polygon(self) -> bool:
        return self.kind in ("parallelogram", "convex-hull")


def grid_paper22() -> tuple[tuple[float, float], ...]:
    """The 22-point default: both bolted endpoints plus a 5x4 grid.

    Locations run over {0, .25, .5, .75, 1} and resistance fractions over
    {.25, .5, .75, 1}.
    """
    pts = [(0.0, 0.0), (1.0, 0.0)]
    for m_f in (0.25, 0.5, 0.75, 1.0):
        for m_t in (0.0, 0.25, 0.5, 0.75, 1.0):
            pts.append((m_t, m_f))
    return tuple(pts)


def grid_corners4() -> tuple[tuple[float, float], ...]:
    return ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0))


def grid_dense(n_t: int, n_f: int) -> tuple[tuple[float, float], ...]:
    ts = np.linspace(0.0, 1.0, n_t)
    fs = np.linspace(0.0, 1.0, n_f)
    return tuple((float(t), float(f)) for f in fs for t in ts)


def grid_perimeter(n: int) -> tuple[tuple[float, float], ...]:
    """n points per edge on the boundary of the [0,1]^2 uncertainty square."""
    vals = np.linspace(0.0, 1.0, n)
    pts: list[tuple[float, float]] = []
    for v in vals:
        pts.extend(
            [(float(v), 0.0), (float(v), 1.0), (0.0, float(v)), (1.0, float(v))]
        )
    return tuple(dict.fromkeys(pts))


def _sample_cloud(
    net: NetworkModel,
    eta: str,
    window: MeasurementWindow,
    grid,
    cache: OmegaCache | None,
) -> tuple[list[complex], list[tuple[float, float]]]:
    if not grid:
        raise ValueError("grid must be non-empty")
    cache = cache or OmegaCache(net)
    line = net.protected
    points: list[complex] = []
    clamped: list[tuple[float, float]] = []
    for m_t_raw, m_f in grid:
        m_t = config.clamp_location(m_t_raw)
        fault = FaultSpec(eta, m_t, m_f, net.r_fault_max)
        try:
            if m_f == 0.0:
                z = apparent_impedance(eta, window, line, None, fault)
            else:
                sigma = remote_current(cache.get(fault), window)
                z = apparent_impedance(eta, window, line, sigma, fault)
        except Exception as exc:
            raise type(exc)(
                f"{exc} [at grid point (m_t={m_t_raw}, m_f={m_f})]"
            ) from exc
        points.append(z)
        clamped.append((m_t, m_f))
    return points, clamped


def exact_sampled(
    net: NetworkModel,
    eta: str,
    window: MeasurementWindow,
    grid,
    cache: OmegaCache | None = None,
) -> Characteristic:
    """Point cloud of apparent impedances over a grid of fault realizations."""
    points, clamped = _sample_cloud(net, eta, window, grid, cache)
    return Characteristic(
        kind="exact-sampled",
        vertices=tuple(points),
        eta=eta,
        samples=tuple(points),
        meta={"grid": clamped},
    )


def parallelogram(
    net: NetworkModel,
    eta: str,
    window: MeasurementWindow,
    m_hat: tuple[float, float],
) -> Characteristic:
    """Minkowski sum of the line segment [0, z1] and the resistance segment.

    The remote current is frozen at the nominal fault point m_hat; the
    resistance segment direction is the m_f = 1 endpoint.
    """
    m_t_hat = config.clamp_location(m_hat[0])
    m_f_hat = m_hat[1]
    if not 0.0 < m_f_hat <= 1.0:
        raise ValueError(f"m_f_hat must lie in (0, 1], got {m_f_hat}")
    line = net.protected
    fault = FaultSpec(eta, m_t_hat, m_f_hat, net.r_fault_max)
    sigma_hat = remote_current(OmegaCache(net).get(fault), window)
    w = fault_resistance_direction(eta, window, line, sigma_hat, net.r_fault_max)
    z = line.z1
    meta = {"m_hat": (m_t_hat, m_f_hat)}
    if abs(w) < 1e-12 * abs(z):
        meta["degenerate"] = True
        return Characteristic(
            kind="parallelogram", vertices=(0j, z), eta=eta, meta=meta
        )
    if _cross(z, w) >= 0.0:
        verts = (0j, z, z + w, w)
    else:
        verts = (0j, w, z + w, z)
    return Characteristic(kind="parallelogram", vertices=verts, eta=eta, meta=meta)


def _cross(u: complex, v: complex) -> float:
    return u.real * v.imag - u.imag * v.real


def convex_hull(points) -> list[complex]:
    """Counterclockwise convex hull by gift wrapping.

    Collinear points are pruned (the farthest candidate wins each wrap step);
    one- and two-point inputs come back unchanged as degenerate polygons.
    """
    uniq = list(dict.fromkeys(complex(p) for p in points))
    if not uniq:
        raise ValueError("need at least one point")
    if len(uniq) <= 2:
        return sorted(uniq, key=lambda p: (p.imag, p.real))
    if _collinear_set(uniq):
        # degenerate cloud: take the lexicographic extremes along the line
        lo = min(uniq, key=lambda p: (p.real, p.imag))
        hi = max(uniq, key=lambda p: (p.real, p.imag))
        return sorted({lo, hi}, key=lambda p: (p.imag, p.real))

    start = min(uniq, key=lambda p: (p.imag, p.real))
    hull = [start]
    cur = start
    while True:
        cand = None
        for p in uniq:
            if p == cur:
                continue
            if cand is None:
                cand = p
                continue
            cr = _cross(cand - cur, p - cur)
            if cr < 0.0:
                cand = p
            elif cr == 0.0:
                d_p, d_c = abs(p - cur), abs(cand - cur)
                same_dir = (
                    (p - cur).real * (cand - cur).real
                    + (p - cur).imag * (cand - cur).imag
                ) > 0.0
                # farthest wins; an exact distance tie means the coordinates
                # differ below float resolution, so break it canonically to
                # stay independent of input ordering
                if d_p > d_c or (
                    d_p == d_c
                    and same_dir
                    and (p.real, p.imag) < (cand.real, cand.imag)
                ):
                    cand = p
        if cand is None or cand == start:
            break
        hull.append(cand)
        cur = cand
        if len(hull) > len(uniq):
            raise RuntimeError("gift wrapping failed to terminate")
    return hull


def _collinear_set(points: list[complex]) -> bool:
    if len(points) < 3:
        return True
    p0, p1 = points[0], points[1]
    return all(_cross(p1 - p0, p - p0) == 0.0 for p in points[2:])


def hull_characteristic(
    net: NetworkModel,
    eta: str,
    window: MeasurementWindow,
    grid=None,
    cache: OmegaCache | None = None,
) -> Characteristic:
    """Convex hull of the exact sampled cloud (default: the 22-point grid)."""
    if grid is None:
        grid = grid_paper22()
    points, clamped = _sample_cloud(net, eta, window, grid, cache)
    hull = convex_hull(points)
    return Characteristic(
        kind="convex-hull",
        vertices=tuple(hull),
        eta=eta,
        samples=tuple(points),
        meta={"grid": clamped},
    )


def _diameter(vertices) -> float:
    vs = list(vertices)
    return max((abs(p - q) for p in vs for q in vs), default=0.0)


def contains(ch: Characteristic, point: complex, tol: float | None = None) -> bool:
    """Point-in-polygon test with boundary slack.

    Default slack is 1e-9 times the polygon diameter; pass ``tol`` to widen
    it (e.g. a fraction of the line impedance for hull-quality checks).
    """
    if not ch.is_polygon():
        raise ValueError(f"characteristic kind {ch.kind!r} is not a polygon")
    verts = list(ch.vertices)
    if tol is None:
        tol = 1e-9 * max(_diameter(verts), 1e-300)
    if len(verts) == 1:
        return abs(point - verts[0]) <= tol
    if len(verts) == 2:
        return _segment_distance(verts[0], verts[1], point) <= tol
    for i, v in enumerate(verts):
        edge = verts[(i + 1) % len(verts)] - v
        if _cross(edge, point - v) < -tol * abs(edge):
            return False
    return True


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = max(0.0, min(1.0, ((p - a).real * ab.real + (p - a).imag * ab.imag) / denom))
    return abs(p - (a + t * ab))
