"""Airy function Ai and Ai' for complex argument.

Maclaurin series for |z| <= 8 (evaluated with enough guard bits to absorb
the cancellation on the positive axis) and the Poincare expansion of
Ai ~ z^{-1/4} e^{-2/3 z^{3/2}} / (2 sqrt(pi)) beyond.  For |arg z| > 2pi/3
the expansion is used on the two rotated arguments through
Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0, w = e^{2 pi i/3}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

SERIES_RADIUS = 8.0


@dataclass(frozen=True)
class AiryValue:
    argument: complex
    ai: complex
    ai_prime: complex


def _series(z, prec):
    # guard bits cover the growth e^{2/3 |z|^{3/2}} of the largest term
    guard = int(2 * float(abs(z)) ** 1.5 / math.log(2)) + 32
    with mp.workprec(prec + guard):
        z = mp.mpc(z)
        c1 = 1 / (mp.cbrt(9) * mp.gamma(mp.mpf(2) / 3))
        c2 = 1 / (mp.cbrt(3) * mp.gamma(mp.mpf(1) / 3))
        z3 = z ** 3
        eps = mp.mpf(2) ** (-(prec + guard))
        f = fp = g = gp = mp.mpc(0)
        a = mp.mpf(1)  # coefficient of z^{3k} in f
        b = mp.mpf(1)  # coefficient of z^{3k+1} in g
        zk = mp.mpc(1)  # z^{3k}
        zkm = mp.mpc(0)  # z^{3k-1}
        z2 = z * z
        k = 0
        while True:
            ta = a * zk
            tb = b * zk
            f += ta
            g += tb * z
            gp += (3 * k + 1) * tb
            fp += 3 * k * a * zkm
            if k > 4 and abs(ta) + abs(tb * z) < eps * (abs(f) + abs(g) + 1):
                break
            a /= (3 * k + 2) * (3 * k + 3)
            b /= (3 * k + 3) * (3 * k + 4)
            zkm = z2 * zk
            zk *= z3
            k += 1
        ai = c1 * f - c2 * g
        aip = c1 * fp - c2 * gp
    return mp.mpc(ai), mp.mpc(aip)


def _asymptotic(z, prec):
    """Poincare expansion, valid for |arg z| <= 2pi/3 and |z| large."""
    with mp.workprec(prec + 20):
        z = mp.mpc(z)
        zeta = mp.mpf(2) / 3 * z ** mp.mpf(1.5)
        sz = mp.sqrt(z)
        q = mp.sqrt(sz)  # z^{1/4}
        pre = mp.exp(-zeta) / (2 * mp.sqrt(mp.pi))
        su = sv = mp.mpc(0)
        u = mp.mpf(1)
        term_prev = mp.inf
        zi = mp.mpc(1)
        k = 0
        while True:
            v = u if k == 0 else -u * (6 * k + 1) / (6 * k - 1)
            tu = u * zi * (-1) ** k
            tv = v * zi * (-1) ** k
            if abs(tu) > term_prev:  # optimal truncation
                break
            su += tu
            sv += tv
            term_prev = abs(tu)
            if term_prev < mp.mpf(2) ** (-prec - 8):
                break
            k += 1
            u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
            zi /= zeta
        ai = pre / q * su
        aip = -pre * q * sv
    return ai, aip


def _eval(z, prec):
    # keep mpmath arguments at full precision; only the branch choice uses floats
    with mp.workprec(prec + 10):
        z = mp.mpc(z)
        r, arg = float(abs(z)), float(mp.arg(z))
        if r <= SERIES_RADIUS:
            return _series(z, prec)
        if abs(arg) <= 2 * math.pi / 3:
            return _asymptotic(z, prec)
        w = mp.expjpi(mp.mpf(2) / 3)
        a1, d1 = _asymptotic(w * z, prec)
        a2, d2 = _asymptotic(w ** 2 * z, prec)
        ai = -w * a1 - w ** 2 * a2
        aip = -w ** 2 * d1 - w ** 4 * d2
    return ai, aip


def airy(z, precision_bits: int = 106) -> AiryValue:
    """Ai(z) and Ai'(z)."""
    ai, aip = _eval(z, precision_bits)
    return AiryValue(complex(z), complex(ai), complex(aip))


def airy_mp(z, precision_bits: int = 106):
    """(Ai, Ai') as mpc at the requested precision."""
    return _eval(z, precision_bits)


def airy_zero(k: int, precision_bits: int = 106) -> float:
    """The k-th zero -iota_k of Ai (negative), by Newton on the series/expansion."""
    if k < 1:
        raise ValueError("k >= 1")
    t = 3 * math.pi * (4 * k - 1) / 8
    x = -t ** (2 / 3) * (1 + 5 / 48 * t ** -2)
    for _ in range(50):
        ai, aip = _eval(x, precision_bits)
        dx = float((ai / aip).real)
        x -= dx
        if abs(dx) < 1e-15 * abs(x):
            break
    return x
