import numpy as np
import pytest

from conformal.errors import ResolutionTooLow, WindowTooLarge
from conformal.intersect import (component_count_oracle, difference_coeffs,
                                 difference_eval, measure_section_angle,
                                 origin_branch_directions,
                                 sphere_section_angle,
                                 trace_cyclide_intersection)

COEFFS = (1.0, 2.0, 0.0, 3.5, 0.25, -0.5, -3.25)
PSI_OSC = 0.2409225992051419


def test_difference_coeffs_structure():
    mono = difference_coeffs(COEFFS, PSI_OSC)
    assert mono[(3, 0)] == pytest.approx(COEFFS[0]/6.0)
    assert mono[(0, 3)] == pytest.approx(COEFFS[1]/6.0)
    assert mono[(2, 2)] == pytest.approx(COEFFS[2]/4.0 - PSI_OSC/6.0)


@pytest.mark.parametrize("dpsi,expected", [(0.0, 2), (4.0, 3), (-4.0, 3)])
def test_component_counts_match_oracle(dpsi, expected):
    pc = PSI_OSC + dpsi
    assert component_count_oracle(COEFFS, pc) == expected
    for n in (128, 256):
        cs = trace_cyclide_intersection(COEFFS, pc, resolution=n)
        assert cs.component_count == expected
        assert cs.origin_component_index is not None


def test_vertices_lie_on_zero_set():
    F = difference_eval(COEFFS, PSI_OSC)
    cs = trace_cyclide_intersection(COEFFS, PSI_OSC, resolution=128)
    for pl in cs.polylines:
        assert np.max(np.abs(F(pl[:, 0], pl[:, 1]))) < 1e-9


def test_degenerate_difference_detected():
    coeffs = (0.0, 0.0, 2*PSI_OSC/3, 3.0, 0.0, 0.0, -3.0)
    cs = trace_cyclide_intersection(coeffs, PSI_OSC)
    assert cs.degenerate
    assert cs.polylines == []


def test_window_validity_check():
    with pytest.raises(WindowTooLarge):
        trace_cyclide_intersection(COEFFS, PSI_OSC + 4.0, window=1.2)


def test_resolution_floor():
    with pytest.raises(ResolutionTooLow):
        trace_cyclide_intersection(COEFFS, PSI_OSC, resolution=8)


def test_origin_branch_direction():
    dirs = origin_branch_directions(COEFFS, PSI_OSC)
    want = np.pi - np.arctan(np.cbrt(COEFFS[0]/COEFFS[1]))
    assert len(dirs) == 1
    assert abs(dirs[0] - want) < 1e-9


def test_sphere_section_angles():
    for al in (np.pi/6, np.pi/4, np.pi/3):
        assert sphere_section_angle(1.0, -1.0, al) == pytest.approx(2*al)
        meas = measure_section_angle(al)
        assert abs(meas - 2*al) < 1e-2
    # orthogonal crossing at the bisecting angle
    assert abs(measure_section_angle(np.pi/4) - np.pi/2) < 1e-2
    # tangential (cusp) case
    assert measure_section_angle(0.0) < 5e-2
