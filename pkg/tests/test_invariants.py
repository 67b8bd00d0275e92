import numpy as np
import pytest

from conformal.errors import (BoundaryTooClose, DegenerateDenominator,
                              UmbilicPoint)
from conformal.invariants import (bracket_residual, classify_point,
                                  fourth_order_coeffs, invariant_sample,
                                  psi_from_thetas, psi_invariant,
                                  theta_state, willmore_energy)
from conformal.surfaces import MobiusMap, mobius_transform


def _helcat_psi(alpha, s):
    return np.sin(alpha)*(3.0*np.cosh(s)**2 - 2.0)


def test_psi_closed_form(helcat_quarter):
    s = helcat_quarter.surface
    for (u, v) in [(-1.5, 0.3), (-0.5, 2.0), (0.7, -1.0), (1.8, 4.0)]:
        got = psi_invariant(s, u, v)
        assert abs(got - _helcat_psi(np.pi/4, u)) < 1e-7


def test_psi_torus_constant(torus):
    for (u, v) in [(0.3, 0.5), (1.2, -0.9), (-2.0, 2.2)]:
        assert abs(psi_invariant(torus.surface, u, v) + 1.0) < 1e-8


def test_theta_magnitudes_helcat(helcat_quarter):
    sa = np.sin(np.pi/4)
    for (u, v) in [(0.5, 0.3), (-1.0, 2.0), (1.5, -2.5)]:
        t1, t2, *_ = theta_state(helcat_quarter.surface, u, v)
        o1 = np.sqrt(2.0*(1.0 - sa))*np.sinh(u)
        o2 = np.sqrt(2.0*(1.0 + sa))*np.sinh(u)
        assert abs(abs(t1) - abs(o1)) < 1e-9
        assert abs(abs(t2) - abs(o2)) < 1e-9


def test_classify_point_thresholds():
    assert classify_point(1.0, 2.0) == "Generic"
    assert classify_point(0.0, 2.0) == "CanalTheta1"
    assert classify_point(1.0, 1e-9) == "CanalTheta2"
    assert classify_point(1e-9, 1e-9) == "Dupin"
    # relative thresholding: a dilated field classifies identically
    assert classify_point(1e-3, 2e3, scale=1e4) == "CanalTheta1"


def test_invariant_sample_fields(helcat_quarter):
    s = invariant_sample(helcat_quarter.surface, 0.8, 0.5)
    assert s.classification == "Generic"
    assert s.psi is not None and s.a is not None
    # invariant-gauge coefficient symmetries: a + d = -(theta terms)
    assert np.isfinite([s.a, s.b, s.c, s.d]).all()


def test_mobius_invariance_of_invariants(helcat_quarter):
    s = helcat_quarter.surface
    u, v = 0.8, 0.5
    t1, t2, *_ = theta_state(s, u, v)
    psi = psi_invariant(s, u, v)
    a, b, c, d = fourth_order_coeffs(s, u, v)
    refl = np.diag([1.0, 1.0, -1.0])
    m = (MobiusMap.dilation(2.0)
         .then(MobiusMap.translation([2.5, -1.0, 4.0]))
         .then(MobiusMap.inversion())
         .then(MobiusMap.rotation(refl)))
    assert m.orientation_preserving
    moved = mobius_transform(s, m)
    t1m, t2m, *_ = theta_state(moved, u, v)
    assert abs(abs(t1m) - abs(t1)) < 1e-7
    assert abs(abs(t2m) - abs(t2)) < 1e-7
    assert abs(psi_invariant(moved, u, v) - psi) < 1e-6
    am, bm, cm, dm = fourth_order_coeffs(moved, u, v)
    assert np.allclose([am, bm, cm, dm], [a, b, c, d], atol=1e-5)


def test_psi_is_orientation_odd(helcat_quarter):
    # an orientation-reversing map relabels the principal directions and
    # flips the sign of the fourth-order invariant (all three of its terms
    # are odd under a normal flip)
    s = helcat_quarter.surface
    u, v = 0.8, 0.5
    psi = psi_invariant(s, u, v)
    m = MobiusMap.translation([2.5, -1.0, 4.0]).then(MobiusMap.inversion())
    assert not m.orientation_preserving
    moved = mobius_transform(s, m)
    assert abs(psi_invariant(moved, u, v) + psi) < 1e-6


def test_bracket_identity(helcat_quarter, torus, helical_tube):
    for entry, pts in [
        (helcat_quarter, [(0.6, 0.4), (-1.1, 2.0)]),
        (torus, [(0.5, 0.8), (-1.0, 2.0)]),
        (helical_tube, [(0.5, 1.2), (1.5, 2.5)]),
    ]:
        for (u, v) in pts:
            assert abs(bracket_residual(entry.surface, u, v)) < 1e-3


def test_psi_from_thetas_degenerate_on_torus(torus):
    with pytest.raises(DegenerateDenominator):
        psi_from_thetas(torus.surface, 0.5, 0.8)


def test_psi_from_thetas_degenerate_on_helcat(helcat_quarter):
    with pytest.raises(DegenerateDenominator):
        psi_from_thetas(helcat_quarter.surface, 0.8, 0.5)


def test_psi_from_thetas_canal_identity(helical_tube):
    # on a canal surface the recovery reduces to an exact first-order
    # expression; cross-check against the field-based invariant
    s = helical_tube.surface
    for (u, v) in [(0.5, 1.2), (1.2, 2.0)]:
        p1 = psi_invariant(s, u, v)
        p2 = psi_from_thetas(s, u, v)
        assert abs(p1 - p2) < 1e-2


def test_boundary_margin_enforced(helcat_quarter):
    s = helcat_quarter.surface
    with pytest.raises(BoundaryTooClose):
        psi_from_thetas(s, 2.999, 0.0)


def test_willmore_energy_positive(torus):
    w = willmore_energy(torus.surface, n=32)
    assert w > 0.0
