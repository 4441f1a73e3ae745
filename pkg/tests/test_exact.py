from fractions import Fraction

import mpmath as mp
import pytest

from hpexp import exact
from hpexp.exact import RationalPoly


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_first_triple():
    t = exact.solve_hp_system(1, 1, 1, "q_monic_scaled", 3)
    assert t.p.coeffs == F("1/4", "1/4")
    assert t.q.coeffs == F(0, 1)
    assert t.r.coeffs == F("-1/4", "1/4")


def test_constant_triple_proportional_to_1_m2_1():
    t = exact.solve_hp_system(0, 0, 0, "q_monic_scaled")
    p, q, r = t.p.coeffs[0], t.q.coeffs[0], t.r.coeffs[0]
    assert (p / q, r / q) == (Fraction(-1, 2), Fraction(-1, 2))


def test_q2():
    assert exact.residue_polynomials(2).q.coeffs == F("1/6", 0, 1)
    assert exact.solve_hp_system(2, 2, 2, "q_monic_scaled", 6).q.coeffs == F("1/6", 0, 1)


def test_leading_p2():
    assert exact.residue_polynomials(2).p.leading == Fraction(-1, 8)


@pytest.mark.parametrize("n", range(1, 13))
def test_symmetries(n):
    t = exact.residue_polynomials(n)
    q, p, r = t.q.coeffs, t.p.coeffs, t.r.coeffs
    assert all(c == (-1) ** n * (-1) ** k * c for k, c in enumerate(q))
    assert all(r[k] == (-1) ** n * (-1) ** k * p[k] for k in range(n + 1))


def test_remainder_series_and_fn0():
    s = exact.remainder_series(exact.residue_polynomials(1), 8)
    assert s.start == 5
    assert s.coefficient(4) == 0
    assert s.coefficient(5) == Fraction(27, 40) == exact.fn0(1)
    s2 = exact.remainder_series(exact.residue_polynomials(2), 10)
    assert s2.coefficient(8) == exact.fn0(2) == Fraction(-2 * 6 ** 6, 40320)


def test_order_violation_detected():
    t = exact.residue_polynomials(2)
    broken = exact.HPTriple(2, 2, 2, t.p, RationalPoly(F("1/5", 0, 1)), t.r,
                            t.normalization, t.scale)
    with pytest.raises(exact.OrderViolationError):
        exact.remainder_series(broken, 10)


def test_bad_normalization():
    with pytest.raises(ValueError):
        exact.solve_hp_system(1, 1, 1, "nonsense")


def test_residue_polynomials_rejects_zero():
    with pytest.raises(ValueError):
        exact.residue_polynomials(0)


def test_evaluation():
    t1, t2 = exact.residue_polynomials(1), exact.residue_polynomials(2)
    assert exact.eval_poly(t1.q, 2, 128) == 2
    assert exact.eval_poly(t1.p, -1) == 0
    with mp.workprec(192):
        assert abs(exact.eval_poly(t2.q, 1j) - mp.mpf(-5) / 6) < mp.mpf(10) ** -50


def test_remainder_matches_series_near_origin():
    t = exact.residue_polynomials(3)
    ser = exact.remainder_series(t, 40)
    with mp.workprec(256):
        z = mp.mpf(1) / 100
        approx = sum(mp.mpf(ser.coefficient(k).numerator) / ser.coefficient(k).denominator * z ** k
                     for k in range(11, 41))
        assert abs(exact.eval_remainder(t, z, 256) / approx - 1) < 1e-30


def test_det_y_outside_and_entry():
    with mp.workprec(128):
        assert abs(mp.det(exact.build_Y(2, 3, "outside", 128)) - 1) < 1e-20
    assert exact.build_Y(1, 1)[1, 0] == mp.mpf(1) / 2


def test_json_round_trip():
    d = exact.residue_polynomials(2).to_json()
    assert d["q"]["coeffs"] == ["1/6", "0", "1"]
    assert [Fraction(a, b) for a, b in zip(map(int, d["p"]["num"]), map(int, d["p"]["den"]))] == \
        list(exact.residue_polynomials(2).p.coeffs)
