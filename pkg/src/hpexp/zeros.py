"""Zeros of P_n, Q_n, R_n (polynomials) and E_n (entire, inside a box).

Polynomial roots: Aberth-Ehrlich in mpmath from a jittered circle sized
by the Cauchy root bound, first at moderate and then at full precision,
followed by a residual certificate.  Double precision is not enough here:
the monomial coefficients of P_n span more than 20 decades.  Remainder zeros: argument principle on adaptively
subdivided cells for f_n = E_n / z^{3n+2}, which has no zero at the origin.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import mpmath as mp
import numpy as np

from . import exact
from .exact import RationalPoly
from .planar import nearest_on_polyline


class NonConvergenceError(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class BoundaryZeroError(RuntimeError):
    pass


@dataclass
class ZeroSet:
    target: str
    n: int
    zeros: list
    multiplicities: list = field(default_factory=list)
    residuals: list = field(default_factory=list)

    def __post_init__(self):
        if not self.multiplicities:
            self.multiplicities = [1] * len(self.zeros)

    def __len__(self):
        return sum(self.multiplicities)

    def as_array(self) -> np.ndarray:
        return np.array([complex(z) for z in self.zeros])

    def to_csv(self) -> str:
        lines = ["target,n,re,im,residual"]
        for z, r in zip(self.zeros, self.residuals or [float("nan")] * len(self.zeros)):
            z = complex(z)
            lines.append(f"{self.target},{self.n},{z.real:.17g},{z.imag:.17g},{float(r):.3e}")
        return "\n".join(lines) + "\n"


# --- polynomial roots -------------------------------------------------------

def _order_key(z):
    return (round(float(z.real), 12) + 0.0, round(float(z.imag), 12) + 0.0)


def _start_radius(c):
    """|c_0/c_d|^(1/d), the geometric mean of the root moduli."""
    a = [abs(x) for x in c]
    d = len(a) - 1
    if a[0] == 0:
        k = next(i for i, x in enumerate(a) if x != 0)
        return (a[k] / a[-1]) ** (1.0 / (d - k))
    return (a[0] / a[-1]) ** (1.0 / d)


def _circle_start(d, radius, seed=0):
    rng = np.random.default_rng(seed)
    ang = 2 * np.pi * (np.arange(d) + 0.4) / d + 0.1 * rng.random(d)
    return radius * np.exp(1j * ang)


def _horner_mp(cs, z):
    acc = mp.mpc(0)
    dacc = mp.mpc(0)
    for c in reversed(cs):
        dacc = dacc * z + acc
        acc = acc * z + c
    return acc, dacc


def _abs_horner(cs, r):
    acc = mp.mpf(0)
    for c in reversed(cs):
        acc = acc * r + abs(c)
    return acc


def _aberth_mp(cs, zs, bits, maxit):
    """Aberth sweeps until every residual sits at rounding level
    (|p(z)| <= 2^(10-bits) sum |c_k||z|^k) or the steps are below 2^(-bits)."""
    d = len(zs)
    noise = mp.mpf(2) ** (10 - bits)
    tiny = mp.mpf(2) ** (-bits)
    for _ in range(maxit):
        done = True
        for i in range(d):
            pv, dv = _horner_mp(cs, zs[i])
            if abs(pv) <= noise * _abs_horner(cs, abs(zs[i])):
                continue
            r = pv / dv
            s = mp.fsum(1 / (zs[i] - zs[j]) for j in range(d) if j != i)
            w = r / (1 - r * s)
            zs[i] -= w
            if abs(w) > tiny * max(abs(zs[i]), 1):
                done = False
        if done:
            return zs
    raise NonConvergenceError("Aberth iteration did not converge", zs)


def poly_roots(poly: RationalPoly, precision_bits: int = 192, target: str = "poly", n: int = 0,
               maxit: int = 60, seed: int = 0) -> ZeroSet:
    """All roots of ``poly`` with certified residuals.

    The certificate is |p(root)| <= 2^(-precision_bits/2) * sum |c_k| |root|^k.
    """
    d = poly.degree
    if d < 1:
        raise ValueError("degree must be at least 1")
    if d == 1:
        z0 = [-poly.coeffs[0] / poly.coeffs[1]]
        with mp.workprec(precision_bits):
            zs = [mp.mpc(mp.mpf(z.numerator) / z.denominator) for z in z0]
        return ZeroSet(target, n, zs, [1], [0.0])
    zs = [mp.mpc(complex(v)) for v in _circle_start(d, _start_radius(poly.coeffs), seed)]
    # a cheap pass at moderate precision, then sweeps at full precision
    for bits in (min(precision_bits, 96), precision_bits):
        with mp.workprec(bits + 20):
            cs = [mp.mpf(c.numerator) / c.denominator for c in poly.coeffs]
            zs = _aberth_mp(cs, [mp.mpc(v) for v in zs], bits, maxit)
    with mp.workprec(precision_bits + 20):
        cs = [mp.mpf(c.numerator) / c.denominator for c in poly.coeffs]
        bound = mp.mpf(2) ** (-precision_bits / 2)
        res = []
        for zz in zs:
            pv, _ = _horner_mp(cs, zz)
            scale = _abs_horner(cs, abs(zz))
            rel = abs(pv) / scale
            if rel > bound:
                raise NonConvergenceError(f"residual {mp.nstr(rel, 3)} above certificate", zs)
            res.append(float(rel))
    with mp.workprec(precision_bits):
        zs = [+v for v in zs]
    order = sorted(range(d), key=lambda i: _order_key(zs[i]))
    return ZeroSet(target, n, [zs[i] for i in order], [1] * d, [res[i] for i in order])


def polynomial_zeros(n: int, target: str, precision_bits: int = 192) -> ZeroSet:
    t = exact.residue_polynomials(n)
    poly = {"P": t.p, "Q": t.q, "R": t.r}[target]
    return poly_roots(poly, precision_bits, target, n)


# --- zeros of E_n -----------------------------------------------------------

def _deriv(poly: RationalPoly) -> RationalPoly:
    c = poly.coeffs
    return RationalPoly(tuple(k * c[k] for k in range(1, len(c))) or (Fraction(0),))


def _add(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    m = max(len(a.coeffs), len(b.coeffs))
    ca = list(a.coeffs) + [Fraction(0)] * (m - len(a.coeffs))
    cb = list(b.coeffs) + [Fraction(0)] * (m - len(b.coeffs))
    return RationalPoly(tuple(x + y for x, y in zip(ca, cb)))


def _float_coeffs(poly: RationalPoly) -> np.ndarray:
    return np.array([float(c) for c in poly.coeffs])


class RemainderFunction:
    """f_n(z) = E_n(z) z^{-(3n+2)} and E_n'(z).

    ``phase`` returns f_n/|f_n| for many points at once: a double-precision
    pass, with points that fail a cancellation test redone in mpmath.
    """

    def __init__(self, n: int, precision_bits: int = 256):
        self.n = n
        self.bits = precision_bits
        self.t = exact.residue_polynomials(n)
        s = self.t.scale
        self.m = 3 * n + 2
        self.dt = SimpleNamespace(
            p=_add(_deriv(self.t.p), self.t.p * (-s)), q=_deriv(self.t.q),
            r=_add(_deriv(self.t.r), self.t.r * s), scale=s)
        self.series_radius = 1.0 / s
        ser = exact.remainder_series(self.t, self.m + 90)
        with mp.workprec(precision_bits + 20):
            self.coeffs = [mp.mpf(c.numerator) / c.denominator for c in ser.coeffs]
        self._fc = {k: _float_coeffs(getattr(self.t, k)) for k in "pqr"}
        self._fser = np.array([float(c) for c in ser.coeffs])

    def f(self, z):
        """E_n(z) / z^{3n+2} in mpmath."""
        z = complex(z)
        with mp.workprec(self.bits):
            if abs(z) < self.series_radius:
                zz = mp.mpc(z)
                acc = mp.mpc(0)
                for c in reversed(self.coeffs):
                    acc = acc * zz + c
                return acc
            return exact.eval_remainder(self.t, z, self.bits) / mp.mpc(z) ** self.m

    def E(self, z):
        return exact.eval_remainder(self.t, z, self.bits)

    def dE(self, z):
        return exact.eval_remainder(self.dt, z, self.bits)

    def scale(self, z):
        """max of |P e^{-sz}|, |Q|, |R e^{sz}|: the size E_n is measured against."""
        with mp.workprec(self.bits):
            z = mp.mpc(z)
            s = self.t.scale
            return max(abs(exact.eval_poly(self.t.p, z, self.bits) * mp.exp(-s * z)),
                       abs(exact.eval_poly(self.t.q, z, self.bits)),
                       abs(exact.eval_poly(self.t.r, z, self.bits) * mp.exp(s * z)))

    def phase(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.full(zs.shape, np.nan, dtype=complex)
        small = np.abs(zs) < self.series_radius
        with np.errstate(all="ignore"):
            if small.any():
                v = np.polynomial.polynomial.polyval(zs[small], self._fser)
                out[small] = v / np.abs(v)
            zb = zs[~small]
            s = self.t.scale
            ok = np.ones(zb.shape, dtype=bool)
            vals = []
            for k, e in (("p", np.exp(-s * zb)), ("q", 1.0), ("r", np.exp(s * zb))):
                c = self._fc[k]
                v = np.polynomial.polynomial.polyval(zb, c)
                av = np.polynomial.polynomial.polyval(np.abs(zb), np.abs(c))
                ok &= np.abs(v) > 1e-6 * av
                vals.append(v * e)
            tot = vals[0] + vals[1] + vals[2]
            big = np.maximum(np.maximum(np.abs(vals[0]), np.abs(vals[1])), np.abs(vals[2]))
            ok &= np.isfinite(tot) & np.isfinite(big) & (np.abs(tot) > 1e-6 * big)
            u = tot / np.abs(tot) * np.exp(-1j * self.m * np.angle(zb))
            res = np.where(ok, u, np.nan)
            out[~small] = res
        for i in np.flatnonzero(~np.isfinite(out)):
            v = self.f(zs[i])
            if v == 0:
                raise BoundaryZeroError(f"zero on a cell edge at {zs[i]}")
            out[i] = complex(v / abs(v))
        return out


def _key(z):
    return (round(z.real, 13), round(z.imag, 13))


class _PhaseCache:
    def __init__(self, fun):
        self.fun = fun
        self.d = {}

    def get(self, pts):
        keys = [_key(p) for p in pts]
        need = [p for p, k in zip(pts, keys) if k not in self.d]
        if need:
            for p, v in zip(need, self.fun.phase(need)):
                self.d[_key(p)] = v
        return np.array([self.d[k] for k in keys])


def _edge_increment(cache, a, b, h, max_depth=14):
    """Change of arg f along [a, b]; sampled at spacing <= h, then bisected
    wherever a single step turns by more than 0.4 rad."""
    n = max(2, math.ceil(abs(b - a) / h - 1e-9))
    t = np.linspace(0.0, 1.0, n + 1)
    for _ in range(max_depth):
        pts = a + (b - a) * t
        u = cache.get(pts)
        d = np.angle(u[1:] * np.conj(u[:-1]))
        bad = np.abs(d) >= 0.4
        if not bad.any():
            return float(d.sum())
        t = np.sort(np.concatenate([t, (t[:-1][bad] + t[1:][bad]) / 2]))
    raise BoundaryZeroError(f"argument jump on [{a}, {b}]")


def _count(cache, x0, x1, y0, y1, h):
    """Winding number of f around the cell (x0, x1, y0, y1).

    f_n turns at a rate of about 3n along the edges, so ``h`` must resolve it.
    """
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    tot = sum(_edge_increment(cache, corners[k], corners[(k + 1) % 4], h) for k in range(4))
    w = tot / (2 * math.pi)
    k = round(w)
    if abs(w - k) > 0.25:
        raise BoundaryZeroError(f"winding {w:.3f} does not snap to an integer")
    return k


def entire_zeros_in_box(n: int, box, precision_bits: int = 256, min_cell: float = 1e-3,
                        retries: int = 3) -> ZeroSet:
    """All zeros of E_n (origin excluded) inside box = (x0, x1, y0, y1)."""
    fun = RemainderFunction(n, precision_bits)
    x0, x1, y0, y1 = map(float, box)
    for attempt in range(retries + 1):
        try:
            return _box_search(fun, x0, x1, y0, y1, min_cell)
        except BoundaryZeroError:
            if attempt == retries:
                raise
            # nudge the outer box and retry
            e = 1.7e-4 * (attempt + 1) * math.sqrt(2)
            x0, x1, y0, y1 = x0 - e, x1 + e, y0 - e * 0.77, y1 + e * 1.31


def _box_search(fun, x0, x1, y0, y1, min_cell):
    cache = _PhaseCache(fun)
    h = 0.3 / (3 * fun.n + 2)
    found = []
    stack = [(x0, x1, y0, y1)]
    total = _count(cache, x0, x1, y0, y1, h)
    while stack:
        a, b, c, d = stack.pop()
        k = _count(cache, a, b, c, d, h)
        if k == 0:
            continue
        size = max(b - a, d - c)
        if k == 1 and size < 0.05:
            z = _newton_in_cell(fun, complex((a + b) / 2, (c + d) / 2), (a, b, c, d))
            if z is not None:
                found.append(z)
                continue
        if size < min_cell:
            # a cluster that does not separate: report the centre with multiplicity k
            found.extend([mp.mpc(complex((a + b) / 2, (c + d) / 2))] * k)
            continue
        mx, my = (a + b) / 2 + 1e-9 * size, (c + d) / 2 - 1.3e-9 * size
        stack += [(a, mx, c, my), (mx, b, c, my), (a, mx, my, d), (mx, b, my, d)]
    if len(found) != total:
        raise BoundaryZeroError(f"cell totals {len(found)} differ from box winding {total}")
    res = [float(abs(fun.E(z)) / fun.scale(z)) for z in found]
    order = sorted(range(len(found)), key=lambda i: _order_key(found[i]))
    return ZeroSet("E", fun.n, [found[i] for i in order], [1] * len(found), [res[i] for i in order])


def _newton_in_cell(fun, z, cell, maxit=60):
    a, b, c, d = cell
    with mp.workprec(fun.bits):
        z = mp.mpc(z)
        for _ in range(maxit):
            e = fun.E(z)
            de = fun.dE(z)
            if de == 0:
                return None
            step = e / de
            z -= step
            if not (a - 1e-9 <= z.real <= b + 1e-9 and c - 1e-9 <= z.imag <= d + 1e-9):
                return None
            if abs(step) < mp.mpf(2) ** (-fun.bits // 2) * max(1, abs(z)):
                return z
    return None


def winding_number(n: int, radius: float, center=0j, N: int = 512, precision_bits: int = 256) -> int:
    """Winding of E_n (not divided by z^{3n+2}) around a circle."""
    t = exact.residue_polynomials(n)
    tot = 0.0
    prev = None
    for k in range(N + 1):
        z = center + radius * cmath.exp(2j * math.pi * k / N)
        e = exact.eval_remainder(t, z, precision_bits)
        v = complex(e / abs(e))
        if prev is not None:
            tot += cmath.phase(v / prev)
        prev = v
    return round(tot / (2 * math.pi))


# --- comparison with limit measures ------------------------------------------

def mass_profile(arc, m: int = 24) -> np.ndarray:
    """Cumulative mu-mass at every node of ``arc`` (start node has 0)."""
    from .potentials import _arc_density, _is_branch, _segment_integral, integrate_arc

    f = lambda zz, r: _arc_density(arc, r)  # noqa: E731
    pieces = integrate_arc(arc, f, m, cumulative=True)
    z = arc.z
    M = np.full(len(z), np.nan)
    M[0] = 0.0
    acc = 0.0
    for i, j, v in pieces:
        if j - i > 1:
            # graded span: fill inner nodes by direct integrals from the branch end
            for k in range(i + 1, j):
                if i == 0 and _is_branch(arc, 0):
                    M[k] = _segment_integral(f, z[0], z[k], arc.roots[k], 2 * m, True).real
                else:
                    M[k] = acc + v.real + _segment_integral(f, z[-1], z[k], arc.roots[k], 2 * m, True).real
        acc += v.real
        M[j] = acc
    return M


def _position(arc, M, s):
    k, t, dist = nearest_on_polyline(s, arc.z)
    return M[k] + t * (M[k + 1] - M[k]), dist


def empirical_vs_limit(zs: ZeroSet, which: str, geom, m: int = 24) -> dict:
    """(a) max distance to the carrier, (b) Kolmogorov-type discrepancy along
    the carrier, (c) piece fractions and, for E, the |s|^-2 weighted totals."""
    from .potentials import CARRIERS, arc_mass

    names = CARRIERS[which]
    arcs = [geom.arcs[c] for c in names]
    zeros = [complex(z) for z in zs.zeros]
    offs, profiles = [], []
    off = 0.0
    for a in arcs:
        M = mass_profile(a, m)
        profiles.append(M)
        offs.append(off)
        off += np.nanmax(M) if which != "E" else 0.0
    total = off
    pos, dist, piece = [], [], []
    for s in zeros:
        best = None
        for i, (a, M) in enumerate(zip(arcs, profiles)):
            p, d = _position(a, M, s)
            if best is None or d < best[1]:
                best = (offs[i] + p, d, i)
        pos.append(best[0])
        dist.append(best[1])
        piece.append(best[2])
    out = {"max_distance": max(dist) if dist else 0.0}
    N = len(zeros)
    counts = {names[i]: piece.count(i) / max(N, 1) for i in range(len(names))}
    out["piece_fractions"] = counts
    if which != "E" and N:
        u = np.sort(np.array(pos) / total)
        emp_hi = np.arange(1, N + 1) / N
        emp_lo = np.arange(0, N) / N
        out["discrepancy"] = float(max(np.max(np.abs(emp_hi - u)), np.max(np.abs(u - emp_lo))))
        out["piece_masses"] = {c: arc_mass(geom.arcs[c], m).real / total for c in names}
    if which == "E" and N:
        out["weighted_empirical"] = sum(1 / abs(s) ** 2 for s in zeros) / zs.n
    return out


def q_piece_split(zs: ZeroSet, geom) -> dict:
    """Fractions of Q-zeros nearest to each of the three Gamma_Q pieces."""
    groups = ("gammaQ_P", "gammaQ_seg", "gammaQ_R")
    from .planar import distance_to_polyline

    cnt = dict.fromkeys(groups, 0)
    for s in zs.zeros:
        s = complex(s)
        d = {g: distance_to_polyline(s, geom.arcs[g].z)[0] for g in groups}
        cnt[min(d, key=d.get)] += 1
    N = len(zs.zeros)
    return {g: c / N for g, c in cnt.items()}


def closest_zero(zs: ZeroSet, point) -> complex:
    return min((complex(z) for z in zs.zeros), key=lambda z: abs(z - point))
