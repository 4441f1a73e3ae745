"""Traced arcs, the assembled curve system and the region partition.

Arc names: gammaP, gammaR, gammaPstar, gammaRstar, gammaE1..gammaE4, and
the three pieces of Gamma_Q (gammaQ_P, gammaQ_R, gammaQ_seg).  Every arc
stores its nodes together with the labeled root triple at each node:
column 0 is psi_Q, column 1 the arc's own sheet (P or R), column 2 the
remaining sheet.  On the cuts gammaP and gammaR the + side boundary
values are stored.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import tracer
from .planar import distance_to_polyline, inside_polygon, nearest_on_polyline
from .surface import OnCutError, track_roots

ON_CURVE_TOL = 1e-7
NEAR = 2e-3  # below this distance sides are decided analytically
LIFT = 5e-3
FAR = 1e6

REGIONS = ("D_P", "D_R", "D_inf_P", "D_inf_R", "D_inf_U", "D_inf_L")


def _h(w):
    return w * (w * w - 1)


def _phi_nodes(z, wq, ws):
    """phi = (H(wq) - H(ws))/2 along an arc with a continuous log, phi(start)=0 mod pi i."""
    logs = np.log(_h(wq) / _h(ws))
    im = np.unwrap(logs.imag)
    lg = logs.real + 1j * im
    ph = 0.5 * (3 * z * (wq - ws) - lg)
    # remove the pi*i offset of the branch chosen at the start node
    off = 1j * math.pi * round(ph[0].imag / math.pi)
    return ph - off


@dataclass
class CurveTrace:
    label: str
    family: str  # 'P' or 'R': which phi vanishes on the arc
    z: np.ndarray
    roots: np.ndarray  # (N, 3): (psi_Q, psi_family, psi_other)
    sigma: int  # tangent = sigma * i * conj(psi_Q - psi_family) / |.|
    start: str
    end: str
    t: np.ndarray = field(default=None)
    phi: np.ndarray = field(default=None)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        self.roots = np.asarray(self.roots, dtype=complex)
        if self.t is None:
            self.t = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(self.z)))])
        if self.phi is None and self.family in ("P", "R"):
            self.phi = _phi_nodes(self.z, self.roots[:, 0], self.roots[:, 1])

    def __len__(self):
        return len(self.z)

    def reversed(self, label=None) -> "CurveTrace":
        return CurveTrace(label or self.label, self.family, self.z[::-1].copy(),
                          self.roots[::-1].copy(), -self.sigma, self.end, self.start)

    def tangent_at_node(self, i: int) -> complex:
        if self.family == "seg":
            return complex(np.sign((self.z[-1] - self.z[0]).imag)) * 1j
        d = self.roots[i, 0] - self.roots[i, 1]
        if abs(d) < 1e-12:
            j = 1 if i == 0 else len(self.z) - 2
            seg = self.z[j] - self.z[i] if i == 0 else self.z[i] - self.z[j]
            return seg / abs(seg)
        return self.sigma * 1j * d.conjugate() / abs(d)

    def tangent_at(self, z) -> complex:
        k, t, _ = nearest_on_polyline(complex(z), self.z)
        seg = self.z[k + 1] - self.z[k]
        return seg / abs(seg)

    def slice(self, i0: int, i1: int, label: str, start=None, end=None) -> "CurveTrace":
        return CurveTrace(label, self.family, self.z[i0:i1 + 1].copy(),
                          self.roots[i0:i1 + 1].copy(), self.sigma,
                          start or f"node{i0}", end or f"node{i1}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["label", "t", "re_z", "im_z", "re_phi", "im_phi"])
        phi = self.phi if self.phi is not None else np.full(len(self.z), np.nan)
        for zi, ti, pi in zip(self.z, self.t, phi):
            wr.writerow([self.label, f"{ti:.15e}", f"{zi.real:.15e}", f"{zi.imag:.15e}",
                         f"{pi.real:.15e}", f"{pi.imag:.15e}"])
        return buf.getvalue()


def _continue(z_from, roots_from, z_to, steps=4):
    """Carry a root triple along the straight segment z_from -> z_to."""
    r = tuple(complex(x) for x in roots_from)
    for k in range(1, steps + 1):
        r = track_roots(z_from + (z_to - z_from) * k / steps, r)
    return r


def _interior_node(arc: CurveTrace, z) -> int:
    d = np.abs(arc.z - z)
    if len(arc.z) > 2:
        d[0] = d[-1] = np.inf
    return int(np.nanargmin(d))


def side_of(arc: CurveTrace, z) -> int:
    """+1 if z is left of the oriented arc, -1 if right, decided by sign of Re phi."""
    if arc.family == "seg":
        s = np.sign((arc.z[-1] - arc.z[0]).imag) * np.sign(-z.real)
        return int(s) if s != 0 else 0
    i = _interior_node(arc, z)
    wq, ws, wo = _continue(arc.z[i], arc.roots[i], z)
    u = tracer.re_phi(z, wq, ws)
    return 1 if arc.sigma * u < 0 else -1


def _lift(arc: CurveTrace, z, side: int, dist: float = LIFT) -> complex:
    k, t, _ = nearest_on_polyline(z, arc.z)
    seg = arc.z[k + 1] - arc.z[k]
    nrm = 1j * seg / abs(seg)
    return z + side * dist * nrm


@dataclass
class RegionTag:
    region: str  # one of REGIONS or 'on_curve'
    arc: str | None = None
    side: int = 0
    in_DPstar: bool = False
    in_DRstar: bool = False


@dataclass
class Geometry:
    arcs: dict
    ystar: float
    radius: float
    tol: float
    loop_P: np.ndarray = None
    loop_R: np.ndarray = None
    cut_P_plus: np.ndarray = None
    cut_R_plus: np.ndarray = None
    polys: dict = None

    # --- ψ-plane data ---
    def lune(self, arc) -> np.ndarray:
        return np.asarray(arc)

    def nearest_cut(self, z):
        a, b = self.arcs["gammaP"], self.arcs["gammaR"]
        da = distance_to_polyline(z, a.z)[0]
        db = distance_to_polyline(z, b.z)[0]
        return a if da <= db else b

    # --- classification ---
    boundary_names = ("gammaP", "gammaR", "gammaQ_P", "gammaQ_R", "gammaQ_seg",
                      "gammaE1", "gammaE2", "gammaE3", "gammaE4")

    def _polygon_region(self, z) -> str:
        for name in ("D_P", "D_R", "D_inf_P", "D_inf_R"):
            if inside_polygon(z, self.polys[name])[0]:
                return name
        return "D_inf_U" if z.imag > 0 else "D_inf_L"

    def nearest_boundary(self, z, names=None):
        names = names or self.boundary_names
        best = (None, math.inf)
        for nm in names:
            d = distance_to_polyline(z, self.arcs[nm].z)[0]
            if d < best[1]:
                best = (nm, d)
        return best

    def classify(self, z) -> RegionTag:
        z = complex(z)
        nm, d = self.nearest_boundary(z)
        if d < ON_CURVE_TOL:
            return RegionTag("on_curve", nm)
        zz, side = z, 0
        if d < NEAR:
            side = side_of(self.arcs[nm], z)
            zz = _lift(self.arcs[nm], z, side)
        tag = RegionTag(self._polygon_region(zz), None, side)
        tag.in_DPstar = self._in_star(z, "P")
        tag.in_DRstar = self._in_star(z, "R")
        return tag

    def _in_star(self, z, fam) -> bool:
        names = ("gammaP", "gammaPstar") if fam == "P" else ("gammaR", "gammaRstar")
        nm, d = self.nearest_boundary(z, names)
        zz = z
        if d < NEAR:
            zz = _lift(self.arcs[nm], z, side_of(self.arcs[nm], z))
        return bool(inside_polygon(zz, self.polys["D_Pstar" if fam == "P" else "D_Rstar"])[0])

    # --- labels ---
    def labels(self, z):
        """(psi_P, psi_Q, psi_R) at z off the cuts."""
        from .surface import label_roots
        z = complex(z)
        nm, d = self.nearest_boundary(z, ("gammaP", "gammaR"))
        if d < ON_CURVE_TOL:
            raise OnCutError(f"z={z} lies on {nm}")
        if d >= NEAR:
            return label_roots(z, self)
        arc = self.arcs[nm]
        side = side_of(arc, z)
        zl = _lift(arc, z, side)
        wl = label_roots(zl, self)
        return _continue(zl, wl, z, steps=6)

    def labels_side(self, z, arc_name: str, side: int):
        """Boundary values (psi_P, psi_Q, psi_R) on a cut from the given side."""
        from .surface import label_roots
        arc = self.arcs[arc_name]
        zl = _lift(arc, complex(z), side)
        wl = label_roots(zl, self)
        return _continue(zl, wl, complex(z), steps=6)


# --- tracing and assembly ---------------------------------------------------

def trace_trajectory(start: int, direction: int, tol: float = 1e-11,
                     radius: float = 50.0) -> tracer.RawTrace:
    """Trace Re phi = 0 from branch point z_start along departure sector ``direction``."""
    return tracer.trace(start, direction, tol=tol, radius=radius)


def _identify(raws):
    """Sort the three trajectories from one branch point into (cut, star, escape)."""
    out = {}
    for r in raws:
        axes = [c[0] for c in r.crossings]
        if r.end == "radius":
            out["E"] = r
        elif "imag_axis" in axes:
            out["star"] = r
        else:
            out["cut"] = r
    if set(out) != {"E", "star", "cut"}:
        raise RuntimeError("unexpected trajectory structure")
    return out


def _as_trace(raw, label, family, labeler):
    """Turn a raw trace into a labeled CurveTrace using ``labeler(z, roots)->(iQ, iS)``."""
    z = raw.z
    R = raw.roots
    i = len(z) // 2
    iq, isf = labeler(z[i], R[i])
    io_ = 3 - iq - isf
    roots = R[:, [iq, isf, io_]]
    d = roots[i, 0] - roots[i, 1]
    T = 1j * d.conjugate() / abs(d)
    seg = z[i + 1] - z[i]
    sigma = 1 if (T * seg.conjugate()).real > 0 else -1
    return CurveTrace(label, family, z, roots, sigma, f"z{raw.start}", raw.end)


def _pair_loop(raw):
    """Closed w-loop made by the two coalescing root tracks of a cut trajectory."""
    a = raw.roots[:, 0]
    b = raw.roots[:, 1]
    return np.concatenate([a, b[::-1]])


def _split_at_axis(arc: CurveTrace, y_abs: float, labeler):
    """Insert the two imaginary-axis crossings at +-i y_abs and return node indices."""
    z = list(arc.z)
    roots = [tuple(r) for r in arc.roots]
    idx = []
    k = 0
    while k < len(z) - 1:
        if z[k].real * z[k + 1].real < 0:
            zc = 1j * y_abs * np.sign(z[k].imag + z[k + 1].imag)
            rc = _continue(z[k], roots[k], zc)
            z.insert(k + 1, zc)
            roots.insert(k + 1, rc)
            idx.append(k + 1)
            k += 2
        else:
            k += 1
    new = CurveTrace(arc.label, arc.family, np.array(z), np.array(roots), arc.sigma,
                     arc.start, arc.end)
    return new, idx


def compute_ystar(geom_or_arcs, lo: float = 0.05, hi: float = 2.0) -> float:
    """Positive root of Re phi_P(iy) = 0 on the imaginary axis."""
    geom = geom_or_arcs

    def f(y):
        wp, wq, wr = geom.labels(1j * y)
        return tracer.re_phi(1j * y, wq, wp)

    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise RuntimeError("no sign change of Re phi_P on the imaginary axis")
    return brentq(f, lo, hi, xtol=1e-15)


def _ext(z_end):
    return complex(z_end.real, math.copysign(FAR, z_end.imag))


def _build_polys(arcs, ystar):
    gP, gR = arcs["gammaP"], arcs["gammaR"]
    qP, qR, seg = arcs["gammaQ_P_lo"], arcs["gammaQ_R_lo"], arcs["gammaQ_seg"]
    qPu, qRu = arcs["gammaQ_P_up"], arcs["gammaQ_R_up"]
    E = {k: arcs[f"gammaE{k}"] for k in range(1, 5)}
    # outward copies z_k -> infinity
    out = {k: (E[k].z if abs(E[k].z[0]) < abs(E[k].z[-1]) else E[k].z[::-1]) for k in E}
    polys = {}
    polys["D_P"] = np.concatenate([gP.z, qP.z, seg.z, qPu.z])
    polys["D_R"] = np.concatenate([gR.z, qRu.z, seg.z[::-1], qR.z])
    polys["D_inf_P"] = np.concatenate([[_ext(out[1][-1])], out[1][::-1], gP.z, out[2],
                                       [_ext(out[2][-1]), -FAR - 1j * FAR, -FAR + 1j * FAR]])
    polys["D_inf_R"] = np.concatenate([[_ext(out[3][-1])], out[3][::-1], gR.z, out[4],
                                       [_ext(out[4][-1]), FAR + 1j * FAR, FAR - 1j * FAR]])
    polys["D_Pstar"] = np.concatenate([gP.z, arcs["gammaPstar"].z])
    polys["D_Rstar"] = np.concatenate([gR.z, arcs["gammaRstar"].z])
    return polys


@lru_cache(maxsize=4)
def build_geometry(tol: float = 1e-11, radius: float = 50.0) -> Geometry:
    from .surface import label_roots

    rawP = _identify([trace_trajectory(1, d, tol, radius) for d in range(3)])
    rawR = _identify([trace_trajectory(3, d, tol, radius) for d in range(3)])
    # escaping arcs from z2 and z4
    rawE2 = _escape_from(2, tol, radius)
    rawE4 = _escape_from(4, tol, radius)

    geom = Geometry({}, float("nan"), radius, tol)
    geom.loop_P = _pair_loop(rawP["cut"])
    geom.loop_R = _pair_loop(rawR["cut"])

    def plus_side_labels(raw, fam):
        z, R = raw.z, raw.roots
        i = len(z) // 2
        seg = z[i + 1] - z[i]
        nrm = 1j * seg / abs(seg)
        zo = z[i] + 1e-3 * nrm
        ro = _continue(z[i], R[i], zo)
        loop = geom.loop_P if fam == "P" else geom.loop_R
        inside = inside_polygon(np.array(ro[:2]), loop)
        if inside.sum() != 1:
            raise RuntimeError("cannot identify + side boundary values")
        isf = int(np.argmax(inside))
        return 1 - isf, isf

    gP = _as_trace(rawP["cut"], "gammaP", "P", lambda z, r: plus_side_labels(rawP["cut"], "P"))
    gR = _as_trace(rawR["cut"], "gammaR", "R", lambda z, r: plus_side_labels(rawR["cut"], "R"))
    geom.cut_P_plus = gP.roots[:, 1].copy()
    geom.cut_R_plus = gR.roots[:, 1].copy()
    geom.arcs.update(gammaP=gP, gammaR=gR)

    def global_labeler(fam):
        def lab(z, roots):
            wp, wq, wr = label_roots(z, geom)
            ws = wp if fam == "P" else wr
            iq = int(np.argmin(np.abs(roots - wq)))
            isf = int(np.argmin(np.abs(roots - ws)))
            return iq, isf
        return lab

    # Γ_P* oriented z2 -> z1, Γ_R* oriented z4 -> z3
    gPs = _as_trace(rawP["star"], "gammaPstar", "P", global_labeler("P")).reversed()
    gRs = _as_trace(rawR["star"], "gammaRstar", "R", global_labeler("R"))
    if gRs.start != "z4":
        gRs = gRs.reversed()
    gRs.start, gRs.end = "z4", "z3"
    gPs.start, gPs.end = "z2", "z1"
    # Γ_R from z3 to z4
    if gR.start != "z3":
        raise RuntimeError("gammaR must start at z3")
    E1 = _as_trace(rawP["E"], "gammaE1", "P", global_labeler("P"))
    E2 = _as_trace(rawE2, "gammaE2", "P", global_labeler("P"))
    E3 = _as_trace(rawR["E"], "gammaE3", "R", global_labeler("R"))
    E4 = _as_trace(rawE4, "gammaE4", "R", global_labeler("R"))
    arcs = geom.arcs
    for E in (E1, E2, E3, E4):
        # orient so that (3/2 pi i)(psi_Q - psi_fam) ds > 0 along the arc
        k = len(E.z) // 2
        dens = 1.5 / (math.pi * 1j) * (E.roots[k, 0] - E.roots[k, 1]) * (E.z[k + 1] - E.z[k])
        arcs[E.label] = E if dens.real > 0 else E.reversed()
    geom.arcs.update(gammaPstar=gPs, gammaRstar=gRs)

    ys = compute_ystar(geom)
    geom.ystar = ys
    gPs2, ip = _split_at_axis(gPs, ys, None)
    gRs2, ir = _split_at_axis(gRs, ys, None)
    if len(ip) != 2 or len(ir) != 2:
        raise RuntimeError("star arcs must cross the imaginary axis twice")
    arcs["gammaPstar"], arcs["gammaRstar"] = gPs2, gRs2
    n = len(gPs2.z) - 1
    arcs["gammaQ_P_lo"] = gPs2.slice(0, ip[0], "gammaQ_P", "z2", "-iy*")
    arcs["gammaQ_P_up"] = gPs2.slice(ip[1], n, "gammaQ_P", "iy*", "z1")
    m = len(gRs2.z) - 1
    arcs["gammaQ_R_up"] = gRs2.slice(0, ir[0], "gammaQ_R", "z4", "iy*")
    arcs["gammaQ_R_lo"] = gRs2.slice(ir[1], m, "gammaQ_R", "-iy*", "z3")
    ymesh = ys * np.sin(np.linspace(-math.pi / 2, math.pi / 2, 401))
    segz = 1j * ymesh
    segroots = []
    for zz in segz:
        wp, wq, wr = label_roots(zz, geom) if zz != 0 else (-3 ** -0.5, np.inf, 3 ** -0.5)
        segroots.append((wq, wr, wp))
    arcs["gammaQ_seg"] = CurveTrace("gammaQ_seg", "seg", segz, np.array(segroots), 1,
                                    "-iy*", "iy*")
    # merged pieces for distance queries
    arcs["gammaQ_P"] = _merge(arcs["gammaQ_P_lo"], arcs["gammaQ_P_up"], "gammaQ_P")
    arcs["gammaQ_R"] = _merge(arcs["gammaQ_R_up"], arcs["gammaQ_R_lo"], "gammaQ_R")
    geom.polys = _build_polys(arcs, ys)
    return geom


def _merge(a: CurveTrace, b: CurveTrace, label) -> CurveTrace:
    """Two disjoint pieces as one polyline with a NaN gap (for distance queries only)."""
    gap = np.array([np.nan + 1j * np.nan])
    z = np.concatenate([a.z, gap, b.z])
    roots = np.concatenate([a.roots, np.full((1, 3), np.nan + 0j), b.roots])
    c = CurveTrace(label, a.family, z, roots, a.sigma, a.start, b.end,
                   t=np.zeros(len(z)), phi=np.zeros(len(z), complex))
    c.pieces = (a, b)
    return c


def _escape_from(k: int, tol, radius):
    for d in range(3):
        # try each sector; keep the one that reaches the truncation radius
        try:
            r = tracer.trace(k, d, tol=tol, radius=radius)
        except tracer.StepUnderflowError:
            continue
        if r.end == "radius":
            return r
    raise RuntimeError(f"no escaping trajectory from z{k}")
