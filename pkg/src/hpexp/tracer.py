"""Predictor-corrector tracing of the level set Re phi = 0 from a branch point.

phi = (H(w_a) - H(w_b)) / 2 with H(w) = 3 z w - log(w (w^2 - 1)), where
w_a, w_b are the two roots that coalesce at the starting branch point.
Its derivative is (3/2)(w_a - w_b), so the curve direction is
i * conj(w_a - w_b) up to sign.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .surface import BP, d2z_dw2, track_roots


class StepUnderflowError(RuntimeError):
    pass


class NonTerminationError(RuntimeError):
    pass


def _logabs_h(w):
    return math.log(abs(w * (w * w - 1)))


def re_phi(z, wa, wb) -> float:
    return 0.5 * ((3 * z * (wa - wb)).real - _logabs_h(wa) + _logabs_h(wb))


def _hcap(z, hmax):
    # fine steps in the bounded part of the picture, coarser far out
    return min(2.0, hmax * max(1.0, abs(z)) ** 1.5)


def departure_angles(k: int):
    """The three directions (radians, ascending in [0, 2pi)) of Re phi = 0 at z_k."""
    a = d2z_dw2(BP.w[k - 1]) / 2
    base = (math.pi + cmath.phase(a)) / 3
    return sorted((base + 2 * math.pi * j / 3) % (2 * math.pi) for j in range(3))


@dataclass
class RawTrace:
    start: int
    direction: int
    z: np.ndarray
    roots: np.ndarray  # (N, 3): the coalescing pair first, then the third root
    end: str  # 'branch:k', 'radius'
    crossings: list = field(default_factory=list)


def _project(z, roots, tol, maxit=10):
    """Newton projection onto Re phi = 0 along the gradient.

    Converged when |Re phi| <= tol or the Newton step (the distance to the
    level set) drops below 1e-14 |z|.
    """
    for _ in range(maxit):
        wa, wb, _ = roots
        u = re_phi(z, wa, wb)
        g = 1.5 * (wa - wb)
        dz = -u * g.conjugate() / abs(g) ** 2
        if abs(u) <= tol or abs(dz) <= 1e-14 * max(1.0, abs(z)):
            return z, roots, True
        z = z + dz
        roots = track_roots(z, roots)
    return z, roots, False


def trace(start: int, direction: int, tol: float = 1e-11, radius: float = 50.0,
          end_tol: float = 1e-7, h0: float = 1e-3, hmax: float = 0.01,
          seed_eps: float = 1e-6, max_nodes: int = 200_000) -> RawTrace:
    zk = BP.z[start - 1]
    wk = BP.w[start - 1]
    theta = departure_angles(start)[direction]
    # same-family partner: the other branch point with a root coalescing on the same side
    partner = {1: 2, 2: 1, 3: 4, 4: 3}[start]
    zt = BP.z[partner - 1]

    z = zk + seed_eps * cmath.exp(1j * theta)
    ws = sorted(np.roots([z, -1.0, -z, 1 / 3]), key=lambda w: abs(w - wk))
    roots = (complex(ws[0]), complex(ws[1]), complex(ws[2]))
    z, roots, ok = _project(z, roots, tol)
    zs = [zk, z]
    rs = [(wk, wk, roots[2]), roots]

    def tangent(zz, rr):
        g = 1.5 * (rr[0] - rr[1])
        return 1j * g.conjugate() / abs(g)

    T = tangent(z, roots)
    sigma = 1 if (T * cmath.exp(-1j * theta)).real > 0 else -1
    h = max(h0, 2 * seed_eps)
    crossings = []
    end = None
    while len(zs) < max_nodes:
        T0 = sigma * tangent(z, roots)
        dt = abs(z - zt)
        hh = min(h, _hcap(z, hmax))
        if dt < 4 * hh:
            hh = max(dt / 2, end_tol / 4)
        zm = z + 0.5 * hh * T0
        rm = track_roots(zm, roots)
        Tm = sigma * tangent(zm, rm)
        zp = z + hh * Tm
        rp = track_roots(zp, rm)
        # Re phi ~ |z - zt|^(3/2) near the partner, so a fixed phi tolerance
        # would let the path drift past the capture radius
        ptol = max(tol * max(1.0, abs(zp)) * min(1.0, dt) ** 1.5, min(tol, 1e-12))
        zc, rc, ok = _project(zp, rp, ptol)
        T1 = sigma * tangent(zc, rc)
        turn = abs(cmath.phase(T1 / T0))
        corr = abs(zc - zp)
        if not ok or turn > 0.02 or corr > 0.05 * hh:
            h = hh / 2
            if h < 1e-14:
                raise StepUnderflowError(f"step underflow near z={z}")
            continue
        for part, axis in ((lambda c: c.real, "imag_axis"), (lambda c: c.imag, "real_axis")):
            if part(z) * part(zc) < 0:
                crossings.append((axis, len(zs)))
        z, roots = zc, rc
        zs.append(z)
        rs.append(roots)
        if abs(z - zt) < end_tol:
            zs.append(zt)
            rs.append((BP.w[partner - 1], BP.w[partner - 1], roots[2]))
            end = f"branch:{partner}"
            break
        if abs(z) >= radius:
            end = "radius"
            break
        h = min(hh * 1.5, _hcap(z, hmax)) if turn < 0.008 else hh
    if end is None:
        raise NonTerminationError("trajectory exceeded max_nodes")
    return RawTrace(start, direction, np.array(zs), np.array(rs), end, crossings)
