import math

import numpy as np
import pytest

import oracles
from hpexp.curves import REGIONS, compute_ystar
from hpexp.planar import distance_to_polyline
from hpexp.potentials import phi
from hpexp.surface import BP

YSTAR = 0.6210282504290846  # oracles.ystar()


def test_gamma_p_joins_z1_z2_through_negative_axis(geom):
    a = geom.arcs["gammaP"]
    ends = sorted([a.z[0], a.z[-1]], key=lambda z: z.imag)
    assert abs(ends[0] - BP.z[1]) < 1e-6 and abs(ends[1] - BP.z[0]) < 1e-6
    k = np.where(np.diff(np.sign(a.z.imag)) != 0)[0]
    assert len(k) == 1 and a.z[k[0]].real < 0


def test_gamma_r_mirrors_gamma_p(geom):
    p, r = geom.arcs["gammaP"].z, geom.arcs["gammaR"].z
    h = max(distance_to_polyline(-p, r).max(), distance_to_polyline(r, -p).max())
    assert h < 1e-6


def test_gamma_e_vertical_asymptote(geom):
    a = geom.arcs["gammaE1"]
    k = int(np.argmin(np.abs(np.abs(a.z.imag) - 50)))
    assert abs(a.z[k].real + math.log(2) / 3) < 1e-3
    assert np.abs(a.z).max() >= geom.radius


def test_ystar(geom):
    assert abs(compute_ystar(geom) - YSTAR) < 1e-12
    assert abs(geom.ystar - YSTAR) < 1e-12
    assert abs(phi(1j * geom.ystar, "P", geom).value.real) < 1e-10
    assert phi(0.3j, "P", geom).value.real * phi(1.0j, "P", geom).value.real < 0


def test_ystar_oracle_reproduces_frozen_value():
    assert abs(oracles.ystar() - YSTAR) < 1e-10


def test_star_curves(geom):
    ps, rs = geom.arcs["gammaPstar"].z, geom.arcs["gammaRstar"].z
    cross_p = ps[np.where(np.diff(np.sign(ps.imag)) != 0)[0]]
    cross_r = rs[np.where(np.diff(np.sign(rs.imag)) != 0)[0]]
    assert (cross_p.real > 0).any() and (cross_r.real < 0).any()
    assert distance_to_polyline(ps, geom.arcs["gammaR"].z).min() > 1e-2


def test_four_curves_per_family(geom):
    fam_p = [n for n in ("gammaP", "gammaPstar", "gammaE1", "gammaE2") if geom.arcs[n].family == "P"]
    fam_r = [n for n in ("gammaR", "gammaRstar", "gammaE3", "gammaE4") if geom.arcs[n].family == "R"]
    assert len(fam_p) == 4 and len(fam_r) == 4


def test_classification(geom):
    assert geom.classify(5).region == "D_inf_R"
    assert phi(5, "R", geom).value.real < 0
    assert geom.classify(-5).region == "D_inf_P"
    t = geom.classify(0.3j)
    assert t.region in ("D_P", "D_R", "on_curve")
    assert abs(phi(0.3j, "P", geom).value.real - phi(0.3j, "R", geom).value.real) < 1e-10
    assert geom.classify(3j).region == "D_inf_U"
    assert geom.classify(-3j).region == "D_inf_L"
    assert geom.classify(-0.3).region == "D_P" and geom.classify(0.3).region == "D_R"
    assert geom.classify(BP.z[0]).region == "on_curve"
    assert set(REGIONS) == {"D_P", "D_R", "D_inf_P", "D_inf_R", "D_inf_U", "D_inf_L"}


def test_phi_vanishes_on_traced_nodes(geom):
    a = geom.arcs["gammaP"]
    assert np.abs(a.phi.real).max() < 1e-8


def test_csv_layout(geom):
    lines = geom.arcs["gammaP"].to_csv().splitlines()
    assert lines[0] == "label,t,re_z,im_z,re_phi,im_phi"
    assert len(lines) == len(geom.arcs["gammaP"]) + 1
    assert lines[1].startswith("gammaP,0.000000000000000e+00")


def test_reversed(geom):
    a = geom.arcs["gammaP"]
    b = a.reversed()
    assert b.z[0] == a.z[-1] and len(b) == len(a)


@pytest.mark.parametrize("tol", [1e-9, 1e-11])
def test_geometry_stable_in_tolerance(tol):
    from hpexp.curves import build_geometry
    g = build_geometry(tol)
    assert abs(g.ystar - YSTAR) < 1e-12
