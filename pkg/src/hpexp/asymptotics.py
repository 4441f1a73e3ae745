"""Asymptotic predictions for P_n, Q_n, R_n, E_n and the algebraic approximant.

Every O(1/n) factor is replaced by 1.  Values are mpmath numbers because the
exponential factors leave double range quickly.
"""
from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field

import mpmath as mp

from . import exact
from .airy import airy_mp, airy_zero
from .curves import NEAR, ON_CURVE_TOL, Geometry, _lift, side_of
from .potentials import gP_from, gQ_from, gR_from, phi_from
from .surface import BP, OnCutError, d2z_dw2, label_roots, sqrt_3w4p1, track_roots

TARGETS = ("P", "Q", "R", "E")
DELTA = 0.1  # radius of the Airy disk around z_1
BRANCH_GAP = 0.1  # two-term formulas stay this far from the branch points
OMEGA = cmath.exp(2j * math.pi / 3)


class RegionMismatchError(ValueError):
    pass


class OutOfDiskError(ValueError):
    pass


@dataclass
class AsymptoticPrediction:
    target: str
    regime: str
    value: object  # mpmath mpc
    region: str
    n: int
    envelope: object = None  # sum of absolute values of the terms
    alternatives: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)


# --- branch data -----------------------------------------------------------

@dataclass
class Sheets:
    z: complex
    w: dict  # 'P', 'Q', 'R' -> psi
    s: dict  # sheet -> sqrt(3 psi^4 + 1)


def _sqrt_track(w, s_prev):
    v = cmath.sqrt(3 * w ** 4 + 1)
    return v if abs(v - s_prev) <= abs(v + s_prev) else -v


def sheets(z, geom: Geometry, arc: str | None = None, side: int = 0) -> Sheets:
    """psi and sqrt(3 psi^4 + 1) on all sheets at z.

    Close to Gamma_P or Gamma_R both are computed at a lifted point and
    continued back, so points on the cut itself get the one-sided limit
    from ``side`` (+1 left, -1 right).
    """
    z = complex(z)
    if arc is None:
        arc, d = geom.nearest_boundary(z, ("gammaP", "gammaR"))
        if d >= NEAR:
            arc = None
        elif d < ON_CURVE_TOL and side == 0:
            raise OnCutError(f"z={z} lies on {arc}; pass a side")
    if arc is None:
        wp, wq, wr = label_roots(z, geom)
        w = {"P": wp, "Q": wq, "R": wr}
        s = {k: sqrt_3w4p1(v, geom) for k, v in w.items()}
        return Sheets(z, w, s)
    a = geom.arcs[arc]
    if side == 0:
        side = side_of(a, z)
    zl = _lift(a, z, side)
    roots = label_roots(zl, geom)
    ss = [sqrt_3w4p1(v, geom) for v in roots]
    steps = 12
    for k in range(1, steps + 1):
        zz = zl + (z - zl) * k / steps
        roots = track_roots(zz, roots)
        ss = [_sqrt_track(wv, sv) for wv, sv in zip(roots, ss)]
    return Sheets(z, dict(zip("PQR", roots)), dict(zip("PQR", ss)))


def _region(geom, z):
    tag = geom.classify(z)
    return tag.region, tag


# --- exact values ----------------------------------------------------------

def exact_value(z, n: int, target: str, precision_bits: int = 256):
    t = exact.residue_polynomials(n)
    if target == "P":
        return exact.eval_poly(t.p, z, precision_bits)
    if target == "Q":
        return exact.eval_poly(t.q, z, precision_bits)
    if target == "R":
        return exact.eval_poly(t.r, z, precision_bits)
    if target == "E":
        return exact.eval_remainder(t, z, precision_bits)
    raise ValueError(f"unknown target {target}")


def relative_error(pred: AsymptoticPrediction, exact_val, envelope: bool = False) -> float:
    """|pred - exact| / |exact|; with ``envelope`` the denominator is the
    larger of |exact| and the sum of term magnitudes, which stays meaningful
    next to zeros."""
    den = abs(exact_val)
    if envelope and pred.envelope is not None:
        den = max(den, abs(pred.envelope))
    return float(abs(mp.mpc(pred.value) - exact_val) / den)


# --- strong asymptotics ----------------------------------------------------

def _e(x):
    return mp.exp(mp.mpc(x))


def _pr_factor(n):
    return mp.mpf(-2) ** (n + 1)


def strong_asymptotic(z, n: int, target: str, geom: Geometry, min_dist: float = 1e-3,
                      precision_bits: int = 128) -> AsymptoticPrediction:
    z = complex(z)
    excluded = {"P": ("gammaP",), "R": ("gammaR",),
                "Q": ("gammaQ_P", "gammaQ_R", "gammaQ_seg"),
                "E": ("gammaE1", "gammaE2", "gammaE3", "gammaE4")}[target]
    nm, d = geom.nearest_boundary(z, excluded)
    if d < min_dist:
        raise RegionMismatchError(f"z={z} is within {d:.2e} of {nm}")
    if z == 0:
        raise RegionMismatchError("origin")
    region, _ = _region(geom, z)
    if region == "on_curve":  # on an arc that does not matter for this target
        region = geom._polygon_region(z)
    sh = sheets(z, geom, side=1 if geom.nearest_boundary(z, ("gammaP", "gammaR"))[1] < ON_CURVE_TOL else 0)
    w, s = sh.w, sh.s
    gp, gr = gP_from(z, w["P"]), gR_from(z, w["R"])
    with mp.workprec(precision_bits):
        if target == "P":
            val = 2 * _e(n * gp) / s["P"] / _pr_factor(n)
        elif target == "R":
            val = 2 * _e(n * gr) / s["R"] / _pr_factor(n)
        elif target == "Q":
            if region == "D_P":
                val = _e(n * gQ_from(z, w["P"])) / s["P"]
            elif region == "D_R":
                val = _e(n * gQ_from(z, w["R"])) / s["R"]
            else:
                val = -_e(n * gQ_from(z, w["Q"])) / s["Q"]
        else:
            half = mp.mpf(-0.5) ** n
            if region == "D_inf_R":
                val = -half * _e(n * (gr + 3 * z)) / s["R"]
            elif region == "D_inf_P":
                val = -half * _e(n * (gp - 3 * z)) / s["P"]
            else:
                val = -mp.mpc(z) ** (3 * n) * _e(-n * (gp + gr)) / s["Q"]
    return AsymptoticPrediction(target, "strong", val, region, n, abs(val))


# --- two-term asymptotics --------------------------------------------------

def _away_from_branch(z, gap=BRANCH_GAP):
    d = min(abs(z - zk) for zk in BP.z)
    if d < gap * (1 - 1e-9):
        raise RegionMismatchError(f"z={z} is within {d:.3f} of a branch point")


def _three_terms(z, n, sh, sign_q):
    """z^{3n} e^{-n(gP+gR)} [e^{-2n phiP}/sP + sign_q/sQ + e^{-2n phiR}/sR]."""
    w, s = sh.w, sh.s
    gp, gr = gP_from(z, w["P"]), gR_from(z, w["R"])
    fp, fr = phi_from(z, w["Q"], w["P"]), phi_from(z, w["Q"], w["R"])
    pre = mp.mpc(z) ** (3 * n) * _e(-n * (gp + gr))
    terms = [pre * _e(-2 * n * fp) / s["P"], sign_q * pre / s["Q"], pre * _e(-2 * n * fr) / s["R"]]
    return terms


def _pr_two_term(z, n, sh, fam, sign):
    w, s = sh.w, sh.s
    g = gP_from(z, w["P"]) if fam == "P" else gR_from(z, w["R"])
    f = phi_from(z, w["Q"], w[fam])
    t1 = 2 * _e(n * g) / s[fam]
    t2 = sign * 2 * _e(n * (g + 2 * f)) / s["Q"]
    return t1, t2


def two_term_asymptotic(z, n: int, target: str, geom: Geometry,
                        precision_bits: int = 128) -> AsymptoticPrediction:
    z = complex(z)
    _away_from_branch(z)
    tag = geom.classify(z)
    region = tag.region
    with mp.workprec(precision_bits):
        if target in ("Q", "E"):
            if target == "Q":
                ok = region in ("D_P", "D_R", "D_inf_U", "D_inf_L") or (
                    region == "on_curve" and tag.arc.startswith("gammaQ"))
            else:
                ok = region.startswith("D_inf") or (region == "on_curve" and tag.arc.startswith("gammaE"))
            if not ok:
                raise RegionMismatchError(f"{target} two-term formula not valid at z={z} ({region})")
            sh = sheets(z, geom)
            terms = _three_terms(z, n, sh, -1 if target == "Q" else 1)
            val = sum(terms)
            if target == "E":
                val = -val
            env = sum(abs(t) for t in terms)
            return AsymptoticPrediction(target, "two_term", val, region, n, env,
                                        {"terms": [complex(t) for t in terms]})
        if target not in ("P", "R"):
            raise ValueError(f"unknown target {target}")
        cut = "gammaP" if target == "P" else "gammaR"
        fac = _pr_factor(n)
        if region == "on_curve" and tag.arc == cut:
            # boundary form: the sum of the two one-sided main terms
            alts = {}
            vals = []
            for side in (1, -1):
                sh = sheets(z, geom, arc=cut, side=side)
                t1, t2 = _pr_two_term(z, n, sh, target, 1)
                vals.append(t1)
                alts[f"side{side:+d}_plus"] = complex((t1 + t2) / fac)
                alts[f"side{side:+d}_minus"] = complex((t1 - t2) / fac)
            val = (vals[0] + vals[1]) / fac
            env = (abs(vals[0]) + abs(vals[1])) / abs(fac)
            return AsymptoticPrediction(target, "two_term", val, "on_curve", n, env, alts)
        if region == "on_curve":
            region = geom._polygon_region(z)
        if target == "P":
            ok = region == "D_inf_P" or tag.in_DPstar
        else:
            sh0 = sheets(z, geom)
            ok = phi_from(z, sh0.w["Q"], sh0.w["R"]).real < 0
        if not ok:
            raise RegionMismatchError(f"{target} two-term formula not valid at z={z} ({region})")
        sh = sheets(z, geom)
        sign = 1 if region in ("D_P", "D_R") else -1
        t1, t2 = _pr_two_term(z, n, sh, target, sign)
        val = (t1 + t2) / fac
        return AsymptoticPrediction(target, "two_term", val, region, n,
                                    (abs(t1) + abs(t2)) / abs(fac))


# --- Airy regime near z_1 --------------------------------------------------

def c1_closed_form() -> complex:
    """f_1'(z_1) from the local expansion z - z_1 ~ a (w - w_1)^2.

    Then phi_P ~ 2 (z - z_1)^{3/2} / sqrt(a) and f_1 ~ (9/a)^{1/3} (z - z_1);
    the cube root is the one making f_1 negative along Gamma_P, whose
    direction at z_1 is one of the three where a (z - z_1)^3 is negative.
    """
    a = d2z_dw2(BP.w[0]) / 2
    base = (9 / a) ** (1 / 3)
    best = None
    for j in range(3):
        c = base * OMEGA ** j
        # Gamma_P leaves z_1 into the lower-left quadrant
        for th in ((math.pi + cmath.phase(a)) / 3 + 2 * math.pi * k / 3 for k in range(3)):
            e = cmath.exp(1j * th)
            if e.real < 0 and e.imag < 0 and (c * e).real < 0 and abs((c * e).imag) < 1e-9:
                best = c
    if best is None:
        raise ArithmeticError("no admissible cube root for c_1")
    return best


C1 = None


def _c1():
    global C1
    if C1 is None:
        C1 = c1_closed_form()
    return C1


def f1(z, geom: Geometry, sh: Sheets | None = None) -> complex:
    """f_1 = [(3/2) phi_P]^{2/3}, the cube root of ((3/2)phi_P)^2 closest to c_1 (z - z_1)."""
    z = complex(z)
    zeta = z - BP.z[0]
    if zeta == 0:
        return 0j
    sh = sh or _airy_sheets(z, geom)
    ph = phi_from(z, sh.w["Q"], sh.w["P"])
    u = (1.5 * ph) ** 2
    r = abs(u) ** (1 / 3)
    guess = _c1() * zeta
    cands = [r * cmath.exp(1j * (cmath.phase(u) + 2 * math.pi * k) / 3) for k in range(3)]
    return min(cands, key=lambda c: abs(c - guess))


def f1_prime_at_z1(geom: Geometry, radius: float = 0.01, N: int = 32) -> complex:
    """f_1'(z_1) by the trapezoid rule for the Cauchy integral on a small circle."""
    acc = 0j
    for k in range(N):
        e = cmath.exp(2j * math.pi * (k + 0.5) / N)
        acc += f1(BP.z[0] + radius * e, geom) / e
    return acc / (N * radius)


def _airy_sheets(z, geom):
    nm, d = geom.nearest_boundary(z, ("gammaP",))
    side = 1 if d < ON_CURVE_TOL else 0
    return sheets(z, geom, arc="gammaP" if d < NEAR else None, side=side)


def airy_local(z, n: int, target: str, geom: Geometry, delta: float = DELTA,
               precision_bits: int = 128) -> AsymptoticPrediction:
    z = complex(z)
    if abs(z - BP.z[0]) > delta * (1 + 1e-9):  # closed disk, so it meets the two-term region
        raise OutOfDiskError(f"|z - z_1| = {abs(z - BP.z[0]):.3f} > {delta}")
    if target not in ("P", "Q", "E"):
        raise ValueError("Airy-local forms exist for P, Q and E")
    sh = _airy_sheets(z, geom)
    w, s = sh.w, sh.s
    gp, gr = gP_from(z, w["P"]), gR_from(z, w["R"])
    ph = phi_from(z, w["Q"], w["P"])
    f = f1(z, geom, sh)
    with mp.workprec(precision_bits):
        zz = mp.mpc(z)
        N21 = 2 * _e(-gp) / s["P"]
        N22 = -_e(gp + gr) / (zz ** 2 * s["Q"])
        k = 1j / zz * mp.exp(-3 * zz) * N22
        f4 = mp.mpc(f) ** mp.mpf(0.25) if f != 0 else mp.mpc(0)
        h1 = (N21 + k) * f4
        h2 = (-N21 + k) / f4
        arg = (n + 1) ** (mp.mpf(2) / 3) * mp.mpc(f)
        n16 = mp.mpf(n) ** (mp.mpf(1) / 6)
        om = mp.expjpi(mp.mpf(2) / 3)
        base = mp.sqrt(mp.pi) * _e((n + 1) * (gp + ph))
        if target == "P":
            ai, aip = airy_mp(arg, precision_bits)
            t1, t2 = n16 * h1 * ai, h2 * aip / n16
            val = base * (t1 + t2)
        else:
            rot = 1 / om if target == "Q" else om
            ai, aip = airy_mp(rot * arg, precision_bits)
            t1, t2 = n16 * h1 * rot * ai, h2 * aip / (rot * n16)
            pref = mp.exp(3 * zz) * _e(-(n + 1) * 3 * z)
            val = base * pref * (t1 + t2)
            if target == "E":
                val = -val
        val = val / _pr_factor(n)
        env = abs(base) * (abs(t1) + abs(t2)) / abs(_pr_factor(n))
        if target != "P":
            env *= abs(pref)
    return AsymptoticPrediction(target, "airy_local", val, "airy_disk", n, env,
                                {"h1": complex(h1), "h2": complex(h2), "f1": f})


def h_functions(z, geom: Geometry):
    p = airy_local(z, 1, "P", geom)
    return p.alternatives["h1"], p.alternatives["h2"]


# --- extreme zeros ----------------------------------------------------------

ZERO_ROTATION = {"P": 1, "Q": OMEGA, "E": 1 / OMEGA}


def predicted_extreme_zeros(n: int, nu: int, target: str) -> complex:
    """z_1 - rotation * iota_nu / f_1'(z_1) * n^{-2/3}."""
    if nu < 1 or n < 8:
        raise ValueError("need nu >= 1 and n >= 8")
    iota = -airy_zero(nu)
    return BP.z[0] - ZERO_ROTATION[target] * iota / _c1() * n ** (-2 / 3)


# --- algebraic approximant --------------------------------------------------

def algebraic_approximant(z, n: int, geom: Geometry, precision_bits: int = 256):
    """Root of P + Q X + R X^2 = 0 that tracks e^{3nz} in D_P and D_R."""
    z = complex(z)
    if abs(z.real) < 1e-12:
        raise RegionMismatchError("no convergence on the imaginary axis")
    region = geom.classify(z).region
    if region not in ("D_P", "D_R"):
        raise RegionMismatchError(f"z={z} is in {region}, not D_P or D_R")
    t = exact.residue_polynomials(n)
    with mp.workprec(precision_bits):
        P = exact.eval_poly(t.p, z, precision_bits)
        Q = exact.eval_poly(t.q, z, precision_bits)
        R = exact.eval_poly(t.r, z, precision_bits)
        s = mp.sqrt(Q * Q - 4 * P * R)
        if (s * mp.conj(Q)).real < 0:
            s = -s
        if region == "D_P":
            den = Q + s
            if den == 0:
                raise ZeroDivisionError("Q + sqrt vanishes")
            return -2 * P / den
        if R == 0:
            raise ZeroDivisionError("R_n vanishes at z")
        return (-Q - s) / (2 * R)


# --- error report -----------------------------------------------------------

def error_rows(points, ns, targets, regimes, geom: Geometry, precision_bits: int = 256):
    """One row per admissible (target, regime, n, z) with the relative error."""
    fn = {"strong": strong_asymptotic, "two_term": two_term_asymptotic, "airy_local": airy_local}
    rows = []
    for tgt in targets:
        for reg in regimes:
            for z in points:
                for n in ns:
                    try:
                        pred = fn[reg](z, n, tgt, geom)
                    except (RegionMismatchError, OutOfDiskError, OnCutError, ValueError):
                        continue
                    ex = exact_value(z, n, tgt, precision_bits)
                    err = relative_error(pred, ex, envelope=(reg != "strong"))
                    rows.append((tgt, reg, n, complex(z).real, complex(z).imag, err))
    return rows


def error_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "regime", "n", "re_z", "im_z", "rel_err"])
    for t, r, n, x, y, e in rows:
        w.writerow([t, r, n, f"{x:.12g}", f"{y:.12g}", f"{e:.6e}"])
    return buf.getvalue()


def loglog_slope(ns, errs) -> float:
    xs = [math.log(n) for n in ns]
    ys = [math.log(e) for e in errs]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
