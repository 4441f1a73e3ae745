import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from hpexp import exact
from hpexp import potentials as pot
from hpexp.surface import BP, psi, solve_cubic

ELL = complex(math.log(2), -math.pi)


def lattice(x, period=2 * math.pi):
    return abs(pot.mod_lattice(x, period))


def test_normalization_at_infinity(geom):
    z = 1e6
    assert abs((pot.g(z, "P", geom).value - cmath.log(z)).real) < 1e-5


@pytest.mark.parametrize("which,sheet,shift", [("P", "P", 3), ("R", "R", -3)])
def test_g_derivative(geom, which, sheet, shift):
    z, h = 2 + 1j, 1e-5
    d = (pot.g(z + h, which, geom).value - pot.g(z - h, which, geom).value) / (2 * h)
    want = 3 * psi(z, sheet, geom).w + shift
    assert abs(d / want - 1) < 1e-8


def test_gq_derivative_in_dr(geom):
    z, h = 0.3 + 0.1j, 1e-5
    assert geom.classify(z).region == "D_R"
    d = (pot.g(z + h, "Q", geom).value - pot.g(z - h, "Q", geom).value) / (2 * h)
    assert abs(d / (3 * psi(z, "R", geom).w) - 1) < 1e-8


def test_sum_of_g_in_outer_regions(geom):
    for reg in ("D_inf_P", "D_inf_R", "D_inf_U", "D_inf_L"):
        for z in pot.sample_region(geom, reg, 10, seed=2):
            s = sum(pot.g(z, w, geom).value for w in "PQR") - 3 * cmath.log(z)
            assert lattice(s) < 1e-10


def test_phi_zero_near_branch_point_on_gamma_p(geom):
    a = geom.arcs["gammaP"]
    k = 5
    z = a.z[k] + 1e-6j * a.tangent_at_node(k)
    assert abs(a.z[k] - BP.z[0]) < 1e-2
    assert abs(pot.phi(z, "P", geom).value.real) < 1e-5


def test_phi_linear_growth(geom):
    x = 1e4
    assert abs((2 * pot.phi(x, "P", geom).value - (3 * x + ELL)).real) < 1e-3


def test_phi_comparison_on_axis(geom):
    assert abs(pot.phi(0.4j, "P", geom).value.real - pot.phi(0.4j, "R", geom).value.real) < 1e-10
    assert pot.phi(-1, "P", geom).value.real < pot.phi(-1, "R", geom).value.real


def test_phi_two_routes(geom):
    for z in pot.sample_region(geom, "D_inf_U", 10, seed=4):
        for w in "PR":
            d = pot.phi(z, w, geom).value - pot.phi_via_g(z, w, geom).value
            assert lattice(d, math.pi) < 1e-10


def test_ell_constant():
    z1, w1 = BP.z[0], BP.w[0]
    wr = max(solve_cubic(z1), key=lambda w: abs(w - w1))
    v = 2 * pot.gP_from(z1, w1) + pot.gR_from(z1, wr) - 3 * cmath.log(z1) - 3 * z1
    assert lattice(v - ELL) < 1e-10


def test_segment_density_is_real(geom):
    a = geom.arcs["gammaQ_seg"]
    d = a.roots[1:-1, 1] - a.roots[1:-1, 2]
    assert np.abs(d.imag).max() < 1e-10 * np.abs(d).max()


def test_gamma_p_weights_positive(geom):
    w = pot.node_weights(geom.arcs["gammaP"])
    assert np.abs(w.imag).max() < 1e-9 and w.real.min() > 0


def test_gamma_e_density_limit(geom):
    w = pot.node_weights(geom.arcs["gammaE1"])
    far = w[np.argmax(np.abs(geom.arcs["gammaE1"].z[1:-1]))]
    assert abs(far.real - 3 / (2 * math.pi)) < 1e-3


def test_density_lookup(geom):
    a = geom.arcs["gammaP"]
    s = a.z[len(a) // 2]
    m = pot.mu_density(s, "gammaP", geom)
    assert (m.weight.real > 0) and abs(m.weight.imag) < 1e-8
    with pytest.raises(ValueError):
        pot.mu_density(5.0, "gammaP", geom)


def test_masses(geom):
    assert abs(pot.mu_total_mass("P", geom) - 1) < 1e-8
    assert abs(pot.mu_total_mass("Q", geom) - 1) < 1e-8
    assert abs(pot.mu_total_mass("Pstar", geom) - 2) < 1e-8
    pm = pot.piece_masses("Q", geom)
    assert abs(sum(pm.values()) - 1) < 1e-8
    assert abs(pm["gammaQ_P_lo"] - pm["gammaQ_R_up"]) < 1e-10


def test_g_e_continuous_across_gamma_p(geom):
    a = geom.arcs["gammaP"]

    def jump(z, t, h):
        return pot.mod_lattice(pot.g_E(z + 1j * h * t, geom) - pot.g_E(z - 1j * h * t, geom))

    for k in (len(a) // 4, len(a) // 2):
        z, t = a.z[k], a.tangent_at_node(k)
        # the difference is odd in h, so Richardson removes the linear term
        assert abs(2 * jump(z, t, 1e-5) - jump(z, t, 2e-5)) < 1e-10


def test_g_e_in_dp(geom):
    z = -0.3 + 0.1j
    assert geom.classify(z).region == "D_P"
    want = -pot.g(z, "P", geom).value - pot.g(z, "R", geom).value
    assert pot.g_E(z, geom) == want


def test_remainder_growth_matches_g_e(geom):
    n, z = 40, 0.5
    t = exact.residue_polynomials(n)
    with mp.workprec(400):
        val = float(mp.log(abs(exact.eval_remainder(t, z, 400))) / n - (3 * n + 2) / n * math.log(z))
    assert abs(val - pot.g_E(z, geom).real) < 0.05


def test_identity_residuals(geom):
    for reg in ("D_P", "D_R", "D_inf_U"):
        for z in pot.sample_region(geom, reg, 5, seed=9):
            res = pot.identity_residuals(z, geom)
            assert max(v for k, v in res.items() if k != "region") < 1e-10


def test_log_potential_oracle(geom):
    for z in (2.0, -1.5 + 1j, 0.4j + 1):
        for which in ("P", "R"):
            assert abs(pot.log_potential(z, which, geom) - pot.g(z, which, geom).value.real) < 1e-10


def test_origin_errors(geom):
    with pytest.raises(ZeroDivisionError):
        pot.g(0, "P", geom)
    with pytest.raises(ValueError):
        pot.g(1, "X", geom)
