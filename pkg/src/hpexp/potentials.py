"""Logarithmic potentials g_P, g_Q, g_R, g_E, the functions phi_P, phi_R,
the measure densities and their masses, and the identities tying them together.

g and phi come from closed forms in the labeled branches.  phi uses
2 phi_P = H(psi_Q) - H(psi_P) with H(w) = 3 z w - log(w (w^2 - 1)), which
has derivative 3(psi_Q - psi_P) and vanishes at z_1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveTrace, Geometry, _continue
from .surface import OnCutError, track_roots

ELL = complex(math.log(2), -math.pi)
LOG23 = math.log(2 / 3)
LOGM13 = complex(-math.log(3), math.pi)


@dataclass(frozen=True)
class PotentialValue:
    value: complex
    branch_note: str  # 'mod_2pi_i' or 'mod_pi_i'


@dataclass(frozen=True)
class MeasureSample:
    s: complex
    density: complex
    carrier: str
    tangent: complex = 1

    @property
    def weight(self) -> float:
        """density * unit tangent, which should be real and nonnegative."""
        return self.density * self.tangent


def mod_lattice(x: complex, period: float = 2 * math.pi) -> complex:
    """Reduce the imaginary part of ``x`` to (-period/2, period/2]."""
    return complex(x.real, x.imag - period * round(x.imag / period))


def _logh(w):
    return cmath.log(w * (w * w - 1))


def gP_from(z, wp):
    return 3 * z * (wp + 1) - _logh(wp) - 1 + LOG23


def gR_from(z, wr):
    return 3 * z * (wr - 1) - _logh(wr) - 1 + LOG23


def gQ_from(z, w):
    return 3 * z * w - _logh(w) - 1 + LOGM13


def H(z, w):
    return 3 * z * w - _logh(w)


def phi_from(z, wq, ws):
    """(H(wq) - H(ws))/2 with the log of the ratio taken principal."""
    return 0.5 * (3 * z * (wq - ws) - cmath.log((wq * (wq * wq - 1)) / (ws * (ws * ws - 1))))


def _region(geom: Geometry, z):
    tag = geom.classify(z)
    if tag.region == "on_curve":
        raise OnCutError(f"z={z} lies on {tag.arc}")
    return tag.region


def _q_branch(region, wp, wq, wr):
    if region == "D_P":
        return wp
    if region == "D_R":
        return wr
    return wq


def g(z, which: str, geom: Geometry, region: str | None = None) -> PotentialValue:
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("g is not evaluated at the origin")
    wp, wq, wr = geom.labels(z)
    if which == "P":
        return PotentialValue(gP_from(z, wp), "mod_2pi_i")
    if which == "R":
        return PotentialValue(gR_from(z, wr), "mod_2pi_i")
    if which == "Q":
        region = region or _region(geom, z)
        return PotentialValue(gQ_from(z, _q_branch(region, wp, wq, wr)), "mod_2pi_i")
    raise ValueError("which must be P, Q or R")


def phi(z, which: str, geom: Geometry) -> PotentialValue:
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("phi has a logarithmic singularity at the origin")
    wp, wq, wr = geom.labels(z)
    if which == "P":
        return PotentialValue(phi_from(z, wq, wp), "mod_pi_i")
    if which == "R":
        return PotentialValue(phi_from(z, wq, wr), "mod_pi_i")
    raise ValueError("which must be P or R")


def phi_via_g(z, which: str, geom: Geometry) -> PotentialValue:
    """phi from 2 phi_P = 3 log z + 3z + l - 2 g_P - g_R (and the R analogue)."""
    z = complex(z)
    gp = g(z, "P", geom).value
    gr = g(z, "R", geom).value
    lz = cmath.log(z)
    if which == "P":
        return PotentialValue((3 * lz + 3 * z + ELL - 2 * gp - gr) / 2, "mod_pi_i")
    return PotentialValue((3 * lz - 3 * z + ELL - gp - 2 * gr) / 2, "mod_pi_i")


def g_E(z, geom: Geometry, region: str | None = None) -> complex:
    z = complex(z)
    region = region or _region(geom, z)
    wp, wq, wr = geom.labels(z)
    gp, gr = gP_from(z, wp), gR_from(z, wr)
    lz = cmath.log(z)
    if region == "D_inf_R":
        return gr + 3 * z - 3 * lz - ELL
    if region == "D_inf_P":
        return gp - 3 * z - 3 * lz - ELL
    return -gp - gr


# --- measures ---------------------------------------------------------------

MEASURE_OF = {"gammaP": "P", "gammaR": "R", "gammaQ_P_lo": "Q", "gammaQ_P_up": "Q",
              "gammaQ_R_lo": "Q", "gammaQ_R_up": "Q", "gammaQ_seg": "Q",
              "gammaE1": "E", "gammaE2": "E", "gammaE3": "E", "gammaE4": "E",
              "gammaPstar": "Pstar", "gammaRstar": "Rstar"}

CARRIERS = {"P": ("gammaP",), "R": ("gammaR",),
            "Q": ("gammaQ_P_lo", "gammaQ_seg", "gammaQ_P_up", "gammaQ_R_lo", "gammaQ_R_up"),
            "Pstar": ("gammaPstar",), "Rstar": ("gammaRstar",),
            "E": ("gammaE1", "gammaE2", "gammaE3", "gammaE4")}


def _arc_density(arc: CurveTrace, roots) -> complex:
    wq, ws, wo = roots
    if arc.family == "seg":
        # columns are (psi_Q, psi_R, psi_P) on the segment
        return 1.5 / (math.pi * 1j) * (ws - wo)
    return 1.5 / (math.pi * 1j) * (wq - ws)


def mu_density(s, carrier: str, geom: Geometry, tol: float = 1e-6) -> MeasureSample:
    """Line density at ``s`` of the measure living on ``carrier`` (an arc name)."""
    arc = geom.arcs[carrier]
    s = complex(s)
    d = np.abs(arc.z - s)
    i = int(np.nanargmin(d))
    from .planar import nearest_on_polyline
    _, _, dist = nearest_on_polyline(s, arc.z)
    if dist > tol:
        raise ValueError(f"s={s} is not on {carrier}")
    if len(arc.z) > 2 and i in (0, len(arc.z) - 1):
        i = 1 if i == 0 else len(arc.z) - 2
    roots = _continue(arc.z[i], arc.roots[i], s)
    return MeasureSample(s, _arc_density(arc, roots), carrier, arc.tangent_at_node(i))


def node_weights(arc: CurveTrace) -> np.ndarray:
    """density * unit tangent at every interior node of ``arc``."""
    out = []
    for i in range(1, len(arc.z) - 1):
        out.append(_arc_density(arc, arc.roots[i]) * arc.tangent_at_node(i))
    return np.array(out)


# --- quadrature along arcs --------------------------------------------------

_GL = {}


def _gauss(m):
    if m not in _GL:
        _GL[m] = np.polynomial.legendre.leggauss(m)
    return _GL[m]


def _is_branch(arc, i):
    return abs(arc.roots[i, 0] - arc.roots[i, 1]) < 1e-12 if arc.family != "seg" else False


def _segment_integral(f, z0, z1, roots1, m, graded):
    """Integral of f(z, roots) dz over [z0, z1]; roots known at z1.

    With ``graded`` the substitution z = z0 + (z1 - z0) tau^2 absorbs a square
    root singularity at z0.  Roots are carried from z1 towards z0.
    """
    x, wts = _gauss(m)
    tau = (x + 1) / 2
    wts = wts / 2
    order = np.argsort(-tau)
    D = z1 - z0
    r = tuple(roots1)
    total = 0j
    for k in order:
        t = tau[k]
        zz = z0 + D * (t * t if graded else t)
        r = track_roots(zz, r)
        jac = D * (2 * t if graded else 1.0)
        total += wts[k] * f(zz, r) * jac
    return total


GRADE_RADIUS = 0.05


def integrate_arc(arc: CurveTrace, f, m: int = 24, cumulative: bool = False):
    """Integral of f(z, roots) dz along ``arc`` (roots labeled as in the arc).

    Chords between traced nodes are integrated by Gauss-Legendre with the
    roots continued from a node.  Around a branch-point endpoint a single
    straight segment with tau^2 grading replaces the first chords.
    """
    z = arc.z
    n = len(z)
    lo, hi = 0, n - 1
    pieces = []
    if _is_branch(arc, 0):
        j = next((k for k in range(1, n) if abs(z[k] - z[0]) >= GRADE_RADIUS), n - 1)
        if j == n - 1 and _is_branch(arc, n - 1):
            j = n // 2
        pieces.append((0, j, _segment_integral(f, z[0], z[j], arc.roots[j], 2 * m, True)))
        lo = j
    tail = None
    if _is_branch(arc, n - 1):
        j = next((k for k in range(n - 2, -1, -1) if abs(z[k] - z[-1]) >= GRADE_RADIUS), 0)
        j = max(j, lo)
        val = -_segment_integral(f, z[-1], z[j], arc.roots[j], 2 * m, True)
        tail = (j, n - 1, val)
        hi = j
    for i in range(lo, hi):
        val = _segment_integral(lambda zz, r: f(zz, r), z[i + 1], z[i], arc.roots[i], m, False)
        pieces.append((i, i + 1, -val))
    if tail:
        pieces.append(tail)
    if cumulative:
        return pieces
    return sum(p[2] for p in pieces)


def arc_mass(arc: CurveTrace, m: int = 24) -> complex:
    return integrate_arc(arc, lambda zz, r: _arc_density(arc, r), m)


def mu_total_mass(which: str, geom: Geometry, m: int = 24, check: bool = True) -> float:
    """Mass of mu_P, mu_Q, mu_R (or the Pstar/Rstar integrals) by quadrature.

    The result is compared with a run at half the order; a mismatch above
    1e-10 raises.
    """
    arcs = [geom.arcs[c] for c in CARRIERS[which]]
    tot = sum(arc_mass(a, m) for a in arcs)
    if check:
        tot2 = sum(arc_mass(a, m // 2) for a in arcs)
        if abs(tot - tot2) > 1e-10:
            raise ArithmeticError(f"quadrature not converged: {tot} vs {tot2}")
    if abs(tot.imag) > 1e-8:
        raise ArithmeticError(f"mass has imaginary part {tot.imag}")
    return tot.real


def piece_masses(which: str, geom: Geometry, m: int = 24) -> dict:
    return {c: arc_mass(geom.arcs[c], m).real for c in CARRIERS[which]}


def log_potential(z, which: str, geom: Geometry, m: int = 24) -> float:
    """Re of the integral of log(z - s) d mu(s) by quadrature (test oracle).

    The integrand must be analytic in s for the chord quadrature to equal
    the arc integral, so log(z - s) is used with its cut turned away from
    the carrier, and only the real part is kept.
    """
    z = complex(z)
    tot = 0j
    for c in CARRIERS[which]:
        arc = geom.arcs[c]
        zs = arc.z[np.isfinite(arc.z)]
        u = z - zs.mean()
        rot = cmath.exp(-1j * cmath.phase(u)) if u != 0 else 1
        # cut of log(rot*(z - s)) is the ray from z along u, away from the arc
        tot += integrate_arc(arc, lambda s, r: cmath.log(rot * (z - s)) * _arc_density(arc, r), m)
    return tot.real


# --- sampling ---------------------------------------------------------------

SAMPLE_BOXES = {"D_P": (-0.8, 0.0, -0.8, 0.8), "D_R": (0.0, 0.8, -0.8, 0.8),
                "D_inf_P": (-3.0, 0.0, -3.0, 3.0), "D_inf_R": (0.0, 3.0, -3.0, 3.0),
                "D_inf_U": (-3.0, 3.0, 0.0, 3.0), "D_inf_L": (-3.0, 3.0, -3.0, 0.0)}


def sample_region(geom: Geometry, region: str, count: int, seed: int = 0,
                  margin: float = 0.02) -> list:
    """Deterministic random points of ``region`` at least ``margin`` from every arc."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = SAMPLE_BOXES[region]
    out = []
    while len(out) < count:
        z = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if abs(z) < margin:
            continue
        if geom.nearest_boundary(z)[1] < margin:
            continue
        if geom.classify(z).region == region:
            out.append(z)
    return out


# --- identities -------------------------------------------------------------

def _cauchy_derivative(values, f0, r):
    """f'(z) from the trapezoid rule on samples f(z + r e^{2 pi i k/N}),
    unwrapping 2 pi i jumps against the centre value f0."""
    N = len(values)
    acc = 0j
    for k, v in enumerate(values):
        e = cmath.exp(2j * math.pi * k / N)
        v = v - 2j * math.pi * round((v - f0).imag / (2 * math.pi))
        acc += (v - f0) / e
    return acc / (N * r)


def identity_residuals(z, geom: Geometry, radius: float | None = None) -> dict:
    """Residuals of the g/phi identities at z (lattice-reduced where relevant)."""
    z = complex(z)
    region = _region(geom, z)
    nm, dist = geom.nearest_boundary(z)
    if radius is None:
        radius = min(0.01, 0.3 * dist, 0.3 * abs(z))
    wp, wq, wr = geom.labels(z)
    gp, gr = gP_from(z, wp), gR_from(z, wr)
    gq = gQ_from(z, _q_branch(region, wp, wq, wr))
    fp, fr = phi_from(z, wq, wp), phi_from(z, wq, wr)
    lz = cmath.log(z)
    out = {"region": region}
    out["gPR1"] = abs(mod_lattice(2 * gp + gr - (3 * lz + 3 * z - 2 * fp + ELL)))
    out["gPR2"] = abs(mod_lattice(2 * gr + gp - (3 * lz - 3 * z - 2 * fr + ELL)))
    if region.startswith("D_inf"):
        out["sumgs"] = abs(mod_lattice(gp + gq + gr - 3 * lz))
    if region == "D_P":
        out["relgPgQ"] = abs(mod_lattice(gp - gq - 3 * z - ELL))
    if region == "D_R":
        out["relgRgQ"] = abs(mod_lattice(gr - gq + 3 * z - ELL))
    out["sum_PQR"] = abs(wp + wq + wr - 1 / z) / max(1.0, abs(1 / z))

    # sample points on the circle carry the centre labels by continuation;
    # the circle stays well inside the region, so no cut is crossed
    N = 24
    ring = [z + radius * cmath.exp(2j * math.pi * k / N) for k in range(N)]
    roots = [_continue(z, (wp, wq, wr), ring[0], steps=8)]
    for k in range(1, N):
        roots.append(_continue(ring[k - 1], roots[-1], ring[k], steps=2))
    dP = _cauchy_derivative([gP_from(s, r[0]) for s, r in zip(ring, roots)], gp, radius)
    dR = _cauchy_derivative([gR_from(s, r[2]) for s, r in zip(ring, roots)], gr, radius)
    dQ = _cauchy_derivative([gQ_from(s, _q_branch(region, *r)) for s, r in zip(ring, roots)], gq, radius)
    wqr = _q_branch(region, wp, wq, wr)
    out["der_gP"] = abs(dP - (3 * wp + 3)) / max(1.0, abs(3 * wp + 3))
    out["der_gR"] = abs(dR - (3 * wr - 3)) / max(1.0, abs(3 * wr - 3))
    out["der_gQ"] = abs(dQ - 3 * wqr) / max(1.0, abs(3 * wqr))
    return out
