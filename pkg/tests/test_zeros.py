import math

import mpmath as mp
import numpy as np
import pytest

from hpexp import exact
from hpexp import zeros as zm
from hpexp.exact import RationalPoly


def test_small_cases():
    assert [complex(z) for z in zm.polynomial_zeros(1, "Q").zeros] == [0j]
    assert [complex(z) for z in zm.polynomial_zeros(1, "P").zeros] == [-1 + 0j]
    assert [complex(z) for z in zm.polynomial_zeros(1, "R").zeros] == [1 + 0j]
    q2 = sorted((complex(z) for z in zm.polynomial_zeros(2, "Q").zeros), key=lambda z: z.imag)
    assert abs(q2[0] + 1j / math.sqrt(6)) < 1e-15 and abs(q2[1] - 1j / math.sqrt(6)) < 1e-15


def test_roots_against_mpmath():
    t = exact.residue_polynomials(12)
    got = np.sort_complex(zm.polynomial_zeros(12, "P", 192).as_array())
    with mp.workprec(192):
        cs = [mp.mpf(c.numerator) / c.denominator for c in reversed(t.p.coeffs)]
        ref = np.sort_complex(np.array([complex(r) for r in mp.polyroots(cs, maxsteps=400, extraprec=400)]))
    assert np.abs(got - ref).max() < 1e-14


def test_precision_agreement():
    a = zm.polynomial_zeros(30, "Q", 192).as_array()
    b = zm.polynomial_zeros(30, "Q", 384).as_array()
    assert np.abs(a - b).max() < 1e-15


def test_certified_residuals_and_csv():
    zs = zm.polynomial_zeros(20, "R", 192)
    assert len(zs) == 20
    assert max(zs.residuals) <= 2.0 ** -96
    lines = zs.to_csv().splitlines()
    assert lines[0] == "target,n,re,im,residual" and len(lines) == 21
    assert lines[1].startswith("R,20,")


def test_deterministic_order():
    a = zm.polynomial_zeros(25, "P").to_csv()
    b = zm.polynomial_zeros(25, "P").to_csv()
    assert a == b


def test_degree_zero_rejected():
    with pytest.raises(ValueError):
        zm.poly_roots(RationalPoly((1,)))


def test_winding_at_origin():
    assert zm.winding_number(1, 0.1) == 5
    assert zm.winding_number(2, 0.05) == 8


def test_remainder_zeros_in_box():
    zs = zm.entire_zeros_in_box(3, (-3, 3, -3, 3))
    z = zs.as_array()
    assert len(z) == 8
    # conjugation and z -> -z symmetry of the zero set
    assert np.abs(np.sort_complex(z) - np.sort_complex(z.conj())).max() < 1e-12
    assert np.abs(np.sort_complex(z) - np.sort_complex(-z)).max() < 1e-12
    assert max(zs.residuals) < 1e-40


def test_remainder_zeros_follow_gamma_e(geom):
    from hpexp.planar import distance_to_polyline
    zs = zm.entire_zeros_in_box(10, (-2, 2, -2, 2))
    arcs = [geom.arcs[f"gammaE{k}"].z for k in range(1, 5)]
    for z in zs.as_array():
        assert min(distance_to_polyline(z, a)[0] for a in arcs) < 0.15


def test_limit_comparison(geom):
    zs = zm.polynomial_zeros(60, "P", 192)
    ev = zm.empirical_vs_limit(zs, "P", geom)
    assert ev["max_distance"] <= 0.1 and ev["discrepancy"] <= 0.15
    small = zm.empirical_vs_limit(zm.polynomial_zeros(20, "P", 192), "P", geom)
    mid = zm.empirical_vs_limit(zm.polynomial_zeros(40, "P", 192), "P", geom)
    assert mid["discrepancy"] < small["discrepancy"]


def test_q_split(geom):
    split = zm.q_piece_split(zm.polynomial_zeros(60, "Q", 192), geom)
    assert abs(sum(split.values()) - 1) < 1e-12
    assert abs(split["gammaQ_seg"] - 0.7055) < 0.1


def test_closest_zero():
    zs = zm.polynomial_zeros(2, "Q")
    assert abs(zm.closest_zero(zs, 1j) - 1j / math.sqrt(6)) < 1e-15
