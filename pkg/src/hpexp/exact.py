"""Exact Hermite-Pade polynomials for the system (e^{-z}, 1, e^{z}).

Two independent routes are provided.  ``solve_hp_system`` solves the
vanishing-coefficient conditions over the rationals; ``residue_triple``
expands the contour-integral representation into residues at w = -1, 0, 1.
They are used as oracles for one another.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath

NORMALIZATIONS = ("q_monic_scaled", "p_monic_scaled", "r_monic_scaled")


class SingularSystemError(ValueError):
    pass


class OrderViolationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RationalPoly:
    """Dense polynomial with Fraction coefficients, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scaled(self, s) -> "RationalPoly":
        """Return x -> self(s*x)."""
        s = Fraction(s)
        return RationalPoly(tuple(c * s**k for k, c in enumerate(self.coeffs)))

    def __mul__(self, a) -> "RationalPoly":
        a = Fraction(a)
        return RationalPoly(tuple(c * a for c in self.coeffs))

    __rmul__ = __mul__

    def reflected(self) -> "RationalPoly":
        """Return x -> self(-x)."""
        return RationalPoly(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def to_strings(self) -> list:
        return [f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
                for c in self.coeffs]


@dataclass(frozen=True)
class HPTriple:
    n1: int
    n2: int
    n3: int
    p: RationalPoly
    q: RationalPoly
    r: RationalPoly
    normalization: str = "q_monic_scaled"
    scale: int = 1

    def to_json(self) -> dict:
        def enc(poly):
            return {"num": [str(c.numerator) for c in poly.coeffs],
                    "den": [str(c.denominator) for c in poly.coeffs],
                    "coeffs": poly.to_strings()}

        return {"n1": self.n1, "n2": self.n2, "n3": self.n3,
                "normalization": self.normalization, "scale": self.scale,
                "p": enc(self.p), "q": enc(self.q), "r": enc(self.r)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class RemainderSeries:
    n: int
    start: int
    coeffs: tuple  # coefficients of z^start, z^(start+1), ...

    def coefficient(self, k: int) -> Fraction:
        if k < self.start:
            return Fraction(0)
        return self.coeffs[k - self.start]


def _exp_coeffs(a, K):
    # Taylor coefficients of e^{a x} up to x^K
    a = Fraction(a)
    out = [Fraction(1)]
    for k in range(1, K + 1):
        out.append(out[-1] * a / k)
    return out


def _combination_coeffs(p, q, r, K, a=1):
    """Taylor coefficients 0..K of p(x)e^{-a x} + q(x) + r(x)e^{a x}."""
    em = _exp_coeffs(-a, K)
    ep = _exp_coeffs(a, K)
    out = []
    for k in range(K + 1):
        s = q[k] if k < len(q) else Fraction(0)
        for j in range(min(k, len(p) - 1) + 1):
            s += p[j] * em[k - j]
        for j in range(min(k, len(r) - 1) + 1):
            s += r[j] * ep[k - j]
        out.append(s)
    return out


def _designated(normalization):
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    return normalization[0]


def _normalize(n1, n2, n3, p, q, r, normalization, scale):
    tag = _designated(normalization)
    P, Q, R = (RationalPoly(tuple(x)).scaled(scale) for x in (p, q, r))
    target = {"p": (P, n1), "q": (Q, n2), "r": (R, n3)}[tag]
    poly, deg = target
    if poly.degree != deg:
        raise SingularSystemError(
            f"leading coefficient of {tag} vanishes for indices {(n1, n2, n3)}")
    lam = 1 / poly.leading
    return HPTriple(n1, n2, n3, P * lam, Q * lam, R * lam, normalization, scale)


def _rational_solve(A, b):
    """Gauss-Jordan elimination over Fractions; raises on singular A."""
    m = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for col in range(m):
        piv = next((i for i in range(col, m) if M[i][col] != 0), None)
        if piv is None:
            raise SingularSystemError("singular Hermite-Pade system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        rowc = [x * inv for x in M[col]]
        M[col] = rowc
        for i in range(m):
            if i != col and M[i][col] != 0:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], rowc)]
    return [M[i][m] for i in range(m)]


def solve_hp_system(n1: int, n2: int, n3: int, normalization: str = "q_monic_scaled",
                    scale: int = 1) -> HPTriple:
    """Solve the order conditions directly.

    Unknowns are the coefficients of p, q, r; the designated polynomial's
    top coefficient is fixed to 1 and the remaining N-1 unknowns are found
    from the N-1 vanishing conditions.  ``scale`` substitutes z -> scale*z
    before the monic normalization is applied.
    """
    if min(n1, n2, n3) < 0:
        raise ValueError("indices must be nonnegative")
    tag = _designated(normalization)
    degs = {"p": n1, "q": n2, "r": n3}
    K = n1 + n2 + n3 + 1
    em = _exp_coeffs(-1, K)
    ep = _exp_coeffs(1, K)
    # column layout: p_0..p_n1, q_0..q_n2, r_0..r_n3
    cols = []
    for j in range(n1 + 1):
        cols.append(("p", j, [em[k - j] if k >= j else Fraction(0) for k in range(K + 1)]))
    for j in range(n2 + 1):
        cols.append(("q", j, [Fraction(int(k == j)) for k in range(K + 1)]))
    for j in range(n3 + 1):
        cols.append(("r", j, [ep[k - j] if k >= j else Fraction(0) for k in range(K + 1)]))
    fixed = next(i for i, c in enumerate(cols) if c[0] == tag and c[1] == degs[tag])
    free = [i for i in range(len(cols)) if i != fixed]
    A = [[cols[i][2][k] for i in free] for k in range(K + 1)]
    b = [-cols[fixed][2][k] for k in range(K + 1)]
    try:
        x = _rational_solve(A, b)
    except SingularSystemError as exc:
        raise SingularSystemError(
            f"{tag} cannot be normalized for indices {(n1, n2, n3)}") from exc
    vals = dict(zip(free, x))
    vals[fixed] = Fraction(1)
    p = [vals[i] for i in range(n1 + 1)]
    q = [vals[n1 + 1 + i] for i in range(n2 + 1)]
    r = [vals[n1 + n2 + 2 + i] for i in range(n3 + 1)]
    return _normalize(n1, n2, n3, p, q, r, normalization, scale)


# --- residue route -----------------------------------------------------------

def _series_mul(a, b, N):
    out = [Fraction(0)] * (N + 1)
    for i, ai in enumerate(a[:N + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[:N + 1 - i]):
            out[i + j] += ai * bj
    return out


def _series_inv(a, N):
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, N + 1):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out.append(-s * inv0)
    return out


def _series_pow(a, m, N):
    out = [Fraction(1)] + [Fraction(0)] * N
    base = list(a) + [Fraction(0)] * max(0, N + 1 - len(a))
    while m:
        if m & 1:
            out = _series_mul(out, base, N)
        m >>= 1
        if m:
            base = _series_mul(base, base, N)
    return out


def _residue_poly(center, mults):
    """Residue at w=center of e^{x w} / prod (w-c)^{m_c} as e^{-x center}-stripped poly in x.

    ``mults`` maps the poles {-1, 0, 1} to their multiplicities.  The result
    is the polynomial c(x) with Res = e^{x*center} c(x).
    """
    m = mults[center]
    if m == 0:
        return [Fraction(0)]
    N = m - 1
    # other factors as series in u = w - center
    h = [Fraction(1)]
    for c, mc in mults.items():
        if c == center or mc == 0:
            continue
        h = _series_mul(h, _series_pow([Fraction(center - c), Fraction(1)], mc, N), N)
    hinv = _series_inv(h, N)
    # [u^N] e^{x u} hinv(u) = sum_k x^k/k! * hinv[N-k]
    return [hinv[N - k] / factorial(k) for k in range(N + 1)]


def residue_triple(n1: int, n2: int, n3: int, normalization: str = "q_monic_scaled",
                   scale: int = 1) -> HPTriple:
    """Triple from residues of e^{xw}/[(w+1)^{n1+1} w^{n2+1} (w-1)^{n3+1}]."""
    mults = {-1: n1 + 1, 0: n2 + 1, 1: n3 + 1}
    p = _residue_poly(-1, mults)
    q = _residue_poly(0, mults)
    r = _residue_poly(1, mults)
    return _normalize(n1, n2, n3, p, q, r, normalization, scale)


@lru_cache(maxsize=None)
def residue_polynomials(n: int) -> HPTriple:
    """Scaled diagonal polynomials P_n, Q_n, R_n (Q_n monic).

    Uses the explicit constant C = n!(-1)^{n+1}/(3n)^n in front of the
    residues at w = -1, 0, 1 of e^{3nzw}/[w(w^2-1)]^{n+1}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    mults = {-1: n + 1, 0: n + 1, 1: n + 1}
    C = Fraction(factorial(n) * (-1) ** (n + 1), (3 * n) ** n)
    s = 3 * n
    P, Q, R = (RationalPoly(tuple(_residue_poly(c, mults))).scaled(s) * C for c in (-1, 0, 1))
    if Q.leading != 1:
        raise ArithmeticError("Q_n is not monic; constant mismatch")
    return HPTriple(n, n, n, P, Q, R, "q_monic_scaled", s)


def fn0(n: int) -> Fraction:
    """Coefficient of z^{3n+2} in E_n."""
    return Fraction((-1) ** (n + 1) * factorial(n) * (3 * n) ** (2 * n + 2), factorial(3 * n + 2))


def remainder_series(triple: HPTriple, K: int) -> RemainderSeries:
    """Exact Taylor coefficients of p e^{-s z} + q + r e^{s z} (s = triple.scale).

    Coefficients below n1+n2+n3+2 are computed and checked to vanish.
    """
    start = triple.n1 + triple.n2 + triple.n3 + 2
    if K < start:
        raise ValueError(f"K must be at least {start}")
    c = _combination_coeffs(triple.p.coeffs, triple.q.coeffs, triple.r.coeffs, K, triple.scale)
    bad = [k for k in range(start) if c[k] != 0]
    if bad:
        raise OrderViolationError(f"nonzero Taylor coefficients at orders {bad}")
    n = triple.n2 if triple.n1 == triple.n2 == triple.n3 else None
    return RemainderSeries(n if n is not None else -1, start, tuple(c[start:]))


# --- floating evaluation -----------------------------------------------------

EVAL_MARGIN_BITS = 16  # documented slack for Horner rounding at degree <= 200


@lru_cache(maxsize=256)
def _mp_coeffs(poly: RationalPoly, prec: int):
    with mpmath.workprec(prec):
        return tuple(mpmath.mpf(c.numerator) / c.denominator for c in poly.coeffs)


def eval_poly(poly: RationalPoly, z, precision_bits: int = 192):
    """Horner evaluation at ``precision_bits``; returns an mpmath mpc.

    Each coefficient is rounded once and Horner adds about deg ulps, so
    the relative error is below 2^(-precision_bits + EVAL_MARGIN_BITS)
    away from cancellation.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    cs = _mp_coeffs(poly, precision_bits + 8)
    with mpmath.workprec(precision_bits + 8):
        z = mpmath.mpc(z)
        acc = mpmath.mpc(0)
        for c in reversed(cs):
            acc = acc * z + c
    with mpmath.workprec(precision_bits):
        return +acc


def eval_remainder(triple: HPTriple, z, precision_bits: int = 192, max_bits: int = 8192):
    """E(z) = P(z)e^{-s z} + Q(z) + R(z)e^{s z} with adaptive cancellation guard.

    Precision is raised until the digits lost to cancellation leave at least
    ``precision_bits`` significant bits.
    """
    s = triple.scale
    prec = precision_bits
    while True:
        with mpmath.workprec(prec + 16):
            zz = mpmath.mpc(z)
            a = eval_poly(triple.p, zz, prec + 16) * mpmath.exp(-s * zz)
            b = eval_poly(triple.q, zz, prec + 16)
            c = eval_poly(triple.r, zz, prec + 16) * mpmath.exp(s * zz)
            tot = a + b + c
            big = max(abs(a), abs(b), abs(c))
            if big == 0:
                return mpmath.mpc(0)
            lost = 0 if tot == 0 else int(mpmath.log(big / abs(tot), 2)) + 1
            if tot != 0 and lost + precision_bits <= prec:
                with mpmath.workprec(precision_bits):
                    return +tot
        if prec > max_bits:
            raise ArithmeticError("remainder evaluation exceeded precision budget")
        prec = max(2 * prec, precision_bits + lost + 32)


# --- Y matrix ---------------------------------------------------------------

@lru_cache(maxsize=None)
def y_rows(n: int):
    """The three index triples that build Y, each with its monic normalization."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = 3 * n
    top = solve_hp_system(n + 1, n - 1, n, "p_monic_scaled", s)
    mid = residue_polynomials(n)
    bot = solve_hp_system(n, n - 1, n + 1, "r_monic_scaled", s)
    return top, mid, bot


def build_Y(n: int, z, side: str = "outside", precision_bits: int = 192):
    """Y(z) as an mpmath matrix; ``side`` is 'outside' or 'inside' the contour."""
    if side not in ("inside", "outside"):
        raise ValueError("side must be 'inside' or 'outside'")
    rows = y_rows(n)
    with mpmath.workprec(precision_bits):
        z = mpmath.mpc(z)
        if z == 0:
            raise ZeroDivisionError("Y has a pole factor z^(-3n-2) at the origin")
        fac = z ** (-(3 * n + 2))
        Y = mpmath.matrix(3, 3)
        for i, t in enumerate(rows):
            Y[i, 0] = eval_poly(t.p, z, precision_bits)
            Y[i, 2] = eval_poly(t.r, z, precision_bits)
            if side == "outside":
                Y[i, 1] = fac * eval_poly(t.q, z, precision_bits)
            else:
                Y[i, 1] = fac * eval_remainder(t, z, precision_bits)
        return Y


def jump_matrix(n: int, z, precision_bits: int = 192):
    with mpmath.workprec(precision_bits):
        z = mpmath.mpc(z)
        fac = z ** (-(3 * n + 2))
        J = mpmath.eye(3)
        J[0, 1] = fac * mpmath.exp(-3 * n * z)
        J[2, 1] = fac * mpmath.exp(3 * n * z)
        return J
