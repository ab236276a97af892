import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixerfirst import (
    GAMMA,
    FrequencyResponse,
    MixerConfig,
    OutOfValidityWindow,
    derive_lti,
    impedance_sweep,
    input_impedance,
)

# frozen from a 30-digit mpmath evaluation of R_a' * 4g/(1-4g), g = 2/pi^2
RSH_RA50 = 213.949004274344
RSH_RA55 = 235.343904701779
RATIO = 4.27898008548688


def const(z):
    return lambda f: np.full(np.shape(f), z, dtype=complex)


def rc(r, c):
    return lambda f: r / (1 + 2j * np.pi * np.asarray(f) * r * c)


@pytest.mark.parametrize("kwargs", [
    dict(ra_ohm=0, rsw_ohm=5, f_lo_hz=1e9),
    dict(ra_ohm=50, rsw_ohm=-1, f_lo_hz=1e9),
    dict(ra_ohm=50, rsw_ohm=5, f_lo_hz=0),
    dict(ra_ohm=50, rsw_ohm=5, f_lo_hz=1e9, n_phases=8),
    dict(ra_ohm=50, rsw_ohm=5, f_lo_hz=1e9, duty=0.125),
])
def test_config_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        MixerConfig(**kwargs)


def test_derive_lti_values():
    lti = derive_lti(MixerConfig(50, 0, 1e9))
    assert lti.ra_prime_ohm == 50
    assert lti.gamma == pytest.approx(0.2026423672846755, rel=1e-15)
    assert lti.rsh_ohm == pytest.approx(RSH_RA50, rel=1e-12)
    lti = derive_lti(MixerConfig(50, 5, 1e9))
    assert lti.ra_prime_ohm == 55
    assert lti.rsh_ohm == pytest.approx(RSH_RA55, rel=1e-12)


def test_rsh_ratio_matches_published_approximation():
    lti = derive_lti(MixerConfig(50, 0, 1e9))
    assert round(lti.rsh_ohm / lti.ra_prime_ohm, 1) == 4.3


@given(ra=st.floats(1e-3, 1e4), rsw=st.floats(0, 1e3))
def test_lti_invariants(ra, rsw):
    lti = derive_lti(MixerConfig(ra, rsw, 1e9))
    assert lti.ra_prime_ohm == ra + rsw
    assert lti.gamma == 2 / math.pi**2
    assert 4.2789 <= lti.rsh_ohm / lti.ra_prime_ohm <= 4.2790
    assert lti.rsh_ohm / lti.ra_prime_ohm == pytest.approx(RATIO, rel=1e-12)


def test_zero_baseband_gives_switch_resistance(cfg):
    assert input_impedance(cfg, const(0), 1.01e9) == pytest.approx(5.0, abs=1e-12)


def test_infinite_baseband_saturates_at_rsh(cfg):
    rsh = derive_lti(cfg).rsh_ohm
    assert input_impedance(cfg, const(np.inf), 1e9) == pytest.approx(5 + rsh, rel=1e-12)
    assert input_impedance(cfg, const(1e15), 1e9) == pytest.approx(5 + rsh, rel=1e-9)


def test_matching_baseband_resistance(cfg):
    # 274.565676 ohm solves 5 + Rsh || gamma*R = 50 (mpmath findroot)
    assert abs(input_impedance(cfg, const(274.6), 1e9) - 50.0) < 0.1
    assert input_impedance(cfg, const(274.565675891758), 1e9) == pytest.approx(50.0, abs=1e-9)


def test_baseband_sees_offset_frequency(cfg):
    seen = []
    input_impedance(cfg, lambda f: seen.append(float(f)) or 0j, 1.013e9)
    assert seen == [pytest.approx(13e6)]


def test_out_of_window(cfg):
    with pytest.raises(OutOfValidityWindow):
        input_impedance(cfg, const(100), 1.5e9)
    with pytest.raises(OutOfValidityWindow):
        input_impedance(cfg, const(100), 0.4e9)
    z = input_impedance(cfg, const(100), 1.6e9, allow_outside=True)
    assert np.isfinite(z)


def test_sweep_grid_contract(cfg):
    resp = impedance_sweep(cfg, rc(274.6, 55e-12), 0.5e9, 1.5e9, 1001)
    assert len(resp) == 1001
    assert np.all(np.diff(resp.f_hz) > 0)
    assert resp.f_hz[0] == 0.5e9 and resp.f_hz[-1] == 1.5e9
    # |f - f_LO| = f_LO/2 at both ends is outside the open window
    assert resp.flags[0] == resp.flags[-1] == "OutOfValidityWindow"
    assert not any(resp.flags[1:-1])


def test_sweep_deterministic(cfg):
    a = impedance_sweep(cfg, rc(274.6, 55e-12), 0.9e9, 1.1e9, 201)
    b = impedance_sweep(cfg, rc(274.6, 55e-12), 0.9e9, 1.1e9, 201)
    assert np.array_equal(a.values, b.values)


def test_rc_peak_at_lo(cfg):
    resp = impedance_sweep(cfg, rc(274.6, 55e-12), 1e9 - 1e6, 1e9 + 1e6, 201)
    assert resp.peak_frequency() == pytest.approx(1e9)


def test_far_from_lo_equals_switch_resistance(cfg):
    r, c = 274.6, 5.5e-9
    bw = 1 / (2 * np.pi * r * c)
    for f in (1e9 + 100 * bw, 1e9 - 100 * bw):
        assert abs(input_impedance(cfg, rc(r, c), f)) == pytest.approx(5.0, rel=0.01)


def test_sweep_flags_failing_points(cfg):
    def zb(f):
        f = np.asarray(f)
        if f.ndim and f.size > 1:
            raise ZeroDivisionError("vector path unsupported")
        if abs(float(f)) < 1:
            raise ZeroDivisionError("singular at DC")
        return 100.0 + 0j

    resp = impedance_sweep(cfg, zb, 0.99e9, 1.01e9, 3)
    assert resp.flags == ("", "ZeroDivisionError", "")
    assert np.isnan(resp.values[1]) and np.isfinite(resp.values[0])


def test_frequency_response_invariants():
    with pytest.raises(ValueError):
        FrequencyResponse(np.array([1.0, 1.0]), np.array([1, 2]))
    with pytest.raises(ValueError):
        FrequencyResponse(np.array([1.0, 2.0]), np.array([1, np.nan]))
    ok = FrequencyResponse(np.array([1.0, 2.0]), np.array([1, np.nan]), flags=("", "bad"))
    assert ok.points[0] == (1.0, 1 + 0j)


@settings(max_examples=50)
@given(r=st.floats(1, 1e4), c=st.floats(1e-13, 1e-9), d=st.floats(-4e8, 4e8))
def test_re_zin_at_least_rsw(r, c, d):
    cfg = MixerConfig(50, 5, 1e9)
    assert input_impedance(cfg, rc(r, c), 1e9 + d).real >= 5.0 - 1e-9


@given(d=st.floats(0, 4e8), r=st.floats(1, 1e4), c=st.floats(1e-13, 1e-9))
def test_symmetry_for_hermitian_baseband(d, r, c):
    cfg = MixerConfig(50, 5, 1e9)
    up, dn = input_impedance(cfg, rc(r, c), 1e9 + d), input_impedance(cfg, rc(r, c), 1e9 - d)
    assert abs(up) == pytest.approx(abs(dn), rel=1e-9)


def test_monotone_saturation(cfg):
    rb = np.logspace(-2, 8, 400)
    mag = np.array([abs(input_impedance(cfg, const(r), 1e9)) for r in rb])
    assert np.all(np.diff(mag) > 0)
    assert mag[0] == pytest.approx(5.0, rel=1e-3)
    assert mag[-1] == pytest.approx(5 + derive_lti(cfg).rsh_ohm, rel=1e-4)


def test_continuity(cfg):
    f = np.linspace(0.95e9, 1.05e9, 100001)
    z = input_impedance(cfg, rc(274.6, 55e-12), f)
    assert np.max(np.abs(np.diff(z))) < 0.01
