"""The three-sheeted surface z = (w^2 - 1/3) / (w (w^2 - 1)).

Branches are labeled P, Q, R by their values -1, 0, 1 at infinity.  The
labeled branch at z is found by checking which root of the cubic lies in
which image domain: the P-image is the domain bounded by the two boundary
images of the P cut (a loop around w = -1), likewise for R around w = 1,
and the Q-image is the rest.  The loops are read from a traced geometry.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations

import mpmath
import numpy as np

from .planar import distance_to_polyline, inside_polygon

SHEETS = ("P", "Q", "R")


class PoleAtOriginError(ZeroDivisionError):
    pass


class OnCutError(ValueError):
    pass


class LabelingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SheetPoint:
    z: complex
    sheet: str
    w: complex


@dataclass(frozen=True)
class BranchData:
    w: tuple
    z: tuple


# integer-only arithmetic below so mpmath arguments keep their precision
def z_of_w(w):
    return (3 * w * w - 1) / (3 * w * (w * w - 1))


def dz_dw(w):
    return -(1 / w**2 + 1 / (w - 1) ** 2 + 1 / (w + 1) ** 2) / 3


def d2z_dw2(w):
    return 2 * (1 / w**3 + 1 / (w - 1) ** 3 + 1 / (w + 1) ** 3) / 3


def cubic_residual(z, w):
    return (3 * (z * w**3 - w * w - z * w) + 1) / 3


def branch_points(precision_bits: int = 53) -> BranchData:
    """w_k = 3^{-1/4} e^{-(2k+1) pi i / 4} and z_k = z(w_k), k = 1..4."""
    if precision_bits <= 53:
        r = 3 ** -0.25
        ws = tuple(r * cmath.exp(-1j * math.pi * (2 * k + 1) / 4) for k in range(1, 5))
        return BranchData(ws, tuple(z_of_w(w) for w in ws))
    with mpmath.workprec(precision_bits):
        r = mpmath.mpf(3) ** mpmath.mpf(-0.25)
        ws = tuple(r * mpmath.expjpi(-mpmath.mpf(2 * k + 1) / 4) for k in range(1, 5))
        return BranchData(ws, tuple(z_of_w(w) for w in ws))


BP = branch_points()


def _newton_cubic(z, w, iters=4):
    for _ in range(iters):
        f = (3 * (((z * w - 1) * w - z) * w) + 1) / 3
        df = (3 * z * w - 2) * w - z
        if df == 0:
            break
        w = w - f / df
    return w


def solve_cubic(z, precision_bits: int = 53):
    """Roots of z w^3 - w^2 - z w + 1/3, sorted by (Re, Im)."""
    if z == 0:
        raise PoleAtOriginError("one root escapes to infinity at z = 0")
    if precision_bits <= 53:
        z = complex(z)
        ws = np.roots([z, -1.0, -z, 1 / 3])
        ws = [_newton_cubic(z, complex(w), 2) for w in ws]
    else:
        with mpmath.workprec(precision_bits):
            zz = mpmath.mpc(z)
            ws = mpmath.polyroots([zz, -1, -zz, mpmath.mpf(1) / 3], maxsteps=200,
                                  extraprec=precision_bits)
            ws = [w - cubic_residual(zz, w) / ((3 * zz * w - 2) * w - zz) for w in ws]
    return sorted(ws, key=lambda w: (float(mpmath.re(w)), float(mpmath.im(w))))


def solve_cubic_many(zs) -> np.ndarray:
    """Vectorized double-precision roots, shape (N, 3), unsorted."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    M = np.zeros((len(zs), 3, 3), dtype=complex)
    M[:, 0, 0] = 1 / zs
    M[:, 0, 1] = 1.0
    M[:, 0, 2] = -1 / (3 * zs)
    M[:, 1, 0] = 1.0
    M[:, 2, 1] = 1.0
    W = np.linalg.eigvals(M)
    zc = zs[:, None]
    for _ in range(3):
        f = ((zc * W - 1) * W - zc) * W + 1 / 3
        df = (3 * zc * W - 2) * W - zc
        W = W - np.where(df != 0, f / np.where(df != 0, df, 1), 0)
    return W


def track_roots(z, prev):
    """Roots at z matched to the previous root triple ``prev`` by continuity."""
    new = np.roots([z, -1.0, -z, 1 / 3])
    new = [_newton_cubic(z, complex(w), 2) for w in new]
    best, bestcost = None, math.inf
    for perm in permutations(range(3)):
        cost = sum(abs(new[perm[i]] - prev[i]) for i in range(3))
        if cost < bestcost:
            best, bestcost = perm, cost
    return tuple(new[best[i]] for i in range(3))


# --- labeling ---------------------------------------------------------------

def label_roots(z, geometry, roots=None):
    """Return (psi_P, psi_Q, psi_R) at z using the image loops of ``geometry``."""
    z = complex(z)
    if z == 0:
        s = 1 / math.sqrt(3)
        return (-s, complex(math.inf), s)
    ws = np.asarray(roots if roots is not None else solve_cubic(z), dtype=complex)
    inP = inside_polygon(ws, geometry.loop_P)
    inR = inside_polygon(ws, geometry.loop_R)
    if inP.sum() != 1 or inR.sum() != 1 or (inP & inR).any():
        raise OnCutError(f"cannot label roots at z={z}: too close to a cut")
    iP = int(np.argmax(inP))
    iR = int(np.argmax(inR))
    iQ = 3 - iP - iR
    return complex(ws[iP]), complex(ws[iQ]), complex(ws[iR])


def label_roots_many(zs, geometry):
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    W = solve_cubic_many(zs)
    inP = inside_polygon(W.ravel(), geometry.loop_P).reshape(W.shape)
    inR = inside_polygon(W.ravel(), geometry.loop_R).reshape(W.shape)
    ok = (inP.sum(1) == 1) & (inR.sum(1) == 1) & ~(inP & inR).any(1)
    if not ok.all():
        bad = zs[~ok][0]
        raise OnCutError(f"cannot label roots at z={bad}: too close to a cut")
    iP = inP.argmax(1)
    iR = inR.argmax(1)
    iQ = 3 - iP - iR
    idx = np.arange(len(zs))
    return W[idx, iP], W[idx, iQ], W[idx, iR]


def psi(z, sheet: str, geometry) -> SheetPoint:
    """Labeled branch value psi_sheet(z)."""
    if sheet not in SHEETS:
        raise ValueError(f"sheet must be one of {SHEETS}")
    z = complex(z)
    _check_off_cut(z, sheet, geometry)
    w = label_roots(z, geometry)[SHEETS.index(sheet)]
    if z == 0 and sheet == "Q":
        raise PoleAtOriginError("psi_Q has a pole at 0")
    return SheetPoint(z, sheet, w)


def psi_side(z, sheet: str, side: str, geometry, eps: float = 1e-9) -> SheetPoint:
    """Boundary value of psi_sheet at a point of Gamma_P or Gamma_R.

    ``side`` is '+' (left of the oriented arc) or '-'.
    """
    z = complex(z)
    arc = geometry.nearest_cut(z)
    tangent = arc.tangent_at(z)
    nrm = 1j * tangent if side == "+" else -1j * tangent
    zs = z + eps * nrm
    w = label_roots(zs, geometry)[SHEETS.index(sheet)]
    # polish back onto z by continuity
    w = _newton_cubic(z, w, 6)
    return SheetPoint(z, sheet, w)


def _check_off_cut(z, sheet, geometry, tol=1e-7):
    cuts = {"P": ("gammaP",), "Q": ("gammaP", "gammaR"), "R": ("gammaR",)}[sheet]
    for name in cuts:
        if distance_to_polyline(z, geometry.arcs[name].z)[0] < tol:
            raise OnCutError(f"z={z} lies on {name}; use psi_side")


# --- square root, G, F, N -----------------------------------------------------

def _pair_sqrt(w, a, b):
    """sqrt((w-a)(w-b)) with the straight cut [a, b], ~ w at infinity."""
    m = (a + b) / 2
    c = (b - a) / 2
    u = w - m
    return u * np.sqrt(1 - (c / u) ** 2 + 0j)


def sqrt_3w4p1(w, geometry, tol: float = 1e-9):
    """Branch of sqrt(3w^4 + 1) cut along psi_{P+}(Gamma_P) and psi_{R+}(Gamma_R).

    Positive for large positive w and equal to -1 at w = 0.  Curved cuts
    are handled by flipping the straight-cut value inside the lune between
    the arc and the chord joining its endpoints.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    wk = BP.w
    val = math.sqrt(3) * _pair_sqrt(w, wk[0], wk[1]) * _pair_sqrt(w, wk[2], wk[3])
    for arc in (geometry.cut_P_plus, geometry.cut_R_plus):
        if (distance_to_polyline(w, arc) < tol).any():
            raise OnCutError("w lies on a square-root cut")
        flip = inside_polygon(w, geometry.lune(arc))
        val = np.where(flip, -val, val)
    return val if val.size > 1 else complex(val[0])


def G_func(w, region: str):
    """The scalar G on the P-, Q- or R-image."""
    if region == "P_image":
        return w * np.exp(-(w + 1) * (2 * w - 1) / (w * (w - 1)))
    if region == "Q_image":
        return (w * w - 1 / 3) / (w * w - 1) * np.exp(-2 * w * w / (w * w - 1))
    if region == "R_image":
        return w * np.exp(-(w - 1) * (2 * w + 1) / (w * (w + 1)))
    raise ValueError("region must be P_image, Q_image or R_image")


def F_func(row: int, w, region: str, geometry):
    s = sqrt_3w4p1(w, geometry)
    g = G_func(w, region)
    if row == 1:
        return -w * (w - 1) * g / s
    if row == 2:
        return 3 * (w * w - 1) * g / s
    if row == 3:
        return w * (w + 1) * g / s
    raise ValueError("row must be 1, 2 or 3")


_IMAGE = {"P": "P_image", "Q": "Q_image", "R": "R_image"}


def N_entry(z, row: int, col: int, geometry):
    """Outer parametrix entry N_{row,col}(z) = F_row(psi_col(z))."""
    if not (1 <= col <= 3):
        raise ValueError("col must be 1, 2 or 3")
    sheet = SHEETS[col - 1]
    w = psi(z, sheet, geometry).w
    return complex(F_func(row, w, _IMAGE[sheet], geometry))


def N_matrix(z, geometry) -> np.ndarray:
    ws = label_roots(z, geometry)
    return np.array([[complex(F_func(r, ws[c], _IMAGE[SHEETS[c]], geometry))
                      for c in range(3)] for r in (1, 2, 3)])
