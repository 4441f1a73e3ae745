"""Small planar helpers: polygon membership and polyline distances."""
from __future__ import annotations

import numpy as np


def inside_polygon(points, poly) -> np.ndarray:
    """Even-odd crossing test for complex ``points`` against closed polygon ``poly``."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    v = np.asarray(poly, dtype=complex)
    if v[0] != v[-1]:
        v = np.append(v, v[0])
    x0, y0 = v[:-1].real, v[:-1].imag
    x1, y1 = v[1:].real, v[1:].imag
    out = np.zeros(pts.shape, dtype=bool)
    # chunk to keep the (points x edges) table modest
    step = max(1, 2_000_000 // max(len(x0), 1))
    for s in range(0, len(pts), step):
        px = pts[s:s + step].real[:, None]
        py = pts[s:s + step].imag[:, None]
        straddle = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        hits = straddle & (px < xc)
        out[s:s + step] = (hits.sum(axis=1) % 2) == 1
    return out


def distance_to_polyline(points, line) -> np.ndarray:
    """Euclidean distance from each point to an open polyline."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    a = np.asarray(line[:-1], dtype=complex)
    b = np.asarray(line[1:], dtype=complex)
    d = b - a
    L2 = np.abs(d) ** 2
    L2[L2 == 0] = 1.0
    out = np.empty(pts.shape)
    step = max(1, 2_000_000 // max(len(a), 1))
    for s in range(0, len(pts), step):
        p = pts[s:s + step, None]
        t = np.clip(((p - a) * np.conj(d)).real / L2, 0.0, 1.0)
        out[s:s + step] = np.nanmin(np.abs(p - (a + t * d)), axis=1)
    return out


def nearest_on_polyline(p: complex, line):
    """(segment index, fraction, distance) of the closest point of ``line`` to ``p``."""
    a = np.asarray(line[:-1], dtype=complex)
    d = np.asarray(line[1:], dtype=complex) - a
    L2 = np.abs(d) ** 2
    L2[L2 == 0] = 1.0
    t = np.clip(((p - a) * np.conj(d)).real / L2, 0.0, 1.0)
    dist = np.abs(p - (a + t * d))
    k = int(np.nanargmin(dist))
    return k, float(t[k]), float(dist[k])
