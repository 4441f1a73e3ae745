"""Tolerance checks shared by the command line and the test-suite."""
from __future__ import annotations

import cmath
import math

import mpmath as mp

from . import asymptotics as asy
from . import potentials as pot
from .airy import airy, airy_mp, airy_zero, _asymptotic, _series
from .curves import REGIONS

C1_EXPECTED = 2 ** (1 / 3) * 3 ** (5 / 12) * cmath.exp(-7j * math.pi / 36)


def _result(name, value, tol, ok=None):
    ok = (value <= tol) if ok is None else ok
    return {"check": name, "value": float(value), "tolerance": float(tol), "ok": bool(ok)}


def check_masses(geom, tol=1e-8):
    out = []
    for which, want in (("P", 1.0), ("Q", 1.0), ("R", 1.0), ("Pstar", 2.0), ("Rstar", 2.0)):
        m = pot.mu_total_mass(which, geom)
        out.append(_result(f"mass_{which}", abs(m - want), tol))
    worst = min(min(pot.node_weights(geom.arcs[c]).real) for c in pot.CARRIERS["E"])
    out.append(_result("muE_density_min", -worst, 1e-10))
    return out


def check_identities(geom, per_region=100, tol=1e-9, seed=7):
    worst = {}
    for reg in REGIONS:
        for z in pot.sample_region(geom, reg, per_region, seed=seed):
            for k, v in pot.identity_residuals(z, geom).items():
                if k != "region":
                    worst[k] = max(worst.get(k, 0.0), v)
    return [_result(f"identity_{k}", v, tol) for k, v in sorted(worst.items())]


STRONG_POINTS = {"P": 2.0, "Q": 2.0, "R": -2.0, "E": -0.3}
RATE_NS = (16, 24, 32, 40)


def check_asymptotics(geom, bits=256):
    out = []
    for tgt, z in STRONG_POINTS.items():
        errs = []
        for n in RATE_NS:
            p = asy.strong_asymptotic(z, n, tgt, geom)
            errs.append(asy.relative_error(p, asy.exact_value(z, n, tgt, bits)))
        s = asy.loglog_slope(RATE_NS, errs)
        out.append(_result(f"rate_{tgt}", s, 0, ok=-1.5 <= s <= -0.6))
    return out


def check_airy(geom=None):
    out = []
    out.append(_result("Ai(0)", abs(airy(0).ai - 0.3550280538878172), 1e-12))
    out.append(_result("first_zero", abs(airy_zero(1) + 2.338107410459767), 1e-9))
    z = 40.0  # first correction term is 5/(72 zeta) ~ 4e-4 here
    norm = airy(z).ai * 2 * math.sqrt(math.pi) * z ** 0.25 * math.exp(2 / 3 * z ** 1.5)
    out.append(_result("large_z_normalization", abs(norm - 1), 1e-3))
    worst = 0.0
    for k in range(16):
        zz = 8 * cmath.exp(2j * math.pi * (k + 0.5) / 16)
        if abs(cmath.phase(zz)) > 2 * math.pi / 3:
            continue
        a, _ = _series(zz, 106)
        b, _ = _asymptotic(zz, 106)
        worst = max(worst, float(abs(a - b) / abs(a)))
    out.append(_result("crossover_overlap", worst, 1e-12))
    grid = [complex(x, y) for x in (-6, -2, 0, 2, 6) for y in (-3, 0, 3)]
    out.append(_result("second_difference", max(ai_second_difference(s) for s in grid), 1e-8))
    if geom is not None:
        out.append(_result("c1", abs(asy.f1_prime_at_z1(geom) - C1_EXPECTED), 1e-10))
    return out


def ai_second_difference(z, h=1e-5):
    """|Ai'' - z Ai| / max(1, |Ai|) with Ai'' from a central difference at 60 digits."""
    with mp.workdps(60):
        f = lambda s: airy_mp(s, 200)[0]  # noqa: E731
        zz = mp.mpc(z)
        d2 = (f(zz + h) - 2 * f(zz) + f(zz - h)) / h ** 2
        return float(abs(d2 - zz * f(zz)) / max(1, abs(f(zz))))


TOPICS = {"masses": check_masses, "identities": check_identities,
          "asymptotics": check_asymptotics, "airy": check_airy}
