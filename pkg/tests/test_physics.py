import warnings

import mpmath
import numpy as np
import pytest

from atomlight.errors import ConfigError, InvalidInput, ResonancePole, TimeStepTooLarge
from atomlight.physics import (
    BeamParams,
    DetuningWarning,
    TWO_PI,
    characteristic_time,
    coupling_g,
    load_species,
    mixing_probability,
    rotation_angle,
    scattering_cross_section,
    scattering_probs,
)

AREA = 4 * np.pi * 1e-10
DETUNING = TWO_PI * 1e9
FLUX = 1e14
ATOMS = 1e6

mpmath.mp.dps = 40

# reference data typed in independently of the bundled file (Rb-87 D2 line)
REF = dict(gamma_hz="6.065e6", lam="780.241e-9", d1_hz="72.2180e6", d2_hz="229.1650e6")


def mp_deltas(det_hz):
    two_pi = 2 * mpmath.pi
    det = two_pi * mpmath.mpf(det_hz)
    return [1 / (det + two_pi * mpmath.mpf(s)) for s in ("0", REF["d1_hz"], REF["d2_hz"])]


def mp_coupling(area, det_hz="1e9"):
    d0, d1, d2 = mp_deltas(det_hz)
    gamma = 2 * mpmath.pi * mpmath.mpf(REF["gamma_hz"])
    lam = mpmath.mpf(REF["lam"])
    return (1 / mpmath.mpf(area)) * gamma * lam**2 / (16 * mpmath.pi) * (-4 * d0 - 5 * d1 + 5 * d2)


def mp_sigma(det_hz="1e9"):
    d0, d1, d2 = mp_deltas(det_hz)
    gamma = 2 * mpmath.pi * mpmath.mpf(REF["gamma_hz"])
    lam = mpmath.mpf(REF["lam"])
    return lam**2 / (2 * mpmath.pi) * gamma**2 / 32 * (4 * d0**2 + 5 * d1**2 + 7 * d2**2)


@pytest.fixture(scope="module")
def rb():
    return load_species()


@pytest.fixture(scope="module")
def beam():
    return BeamParams(FLUX, DETUNING, AREA)


def test_bundled_species(rb):
    assert rb.linewidth == pytest.approx(TWO_PI * 6.065e6)
    assert rb.splittings[0] == 0.0
    assert rb.splittings[2] > rb.splittings[1] > 0


def test_coupling_high_precision(rb, beam):
    g = coupling_g(rb, beam, AREA)
    oracle = mp_coupling(mpmath.mpf(4) * mpmath.pi * mpmath.mpf("1e-10"))
    assert abs(g - float(oracle)) <= 1e-12 * abs(float(oracle))


def test_cross_section_high_precision(rb):
    s = scattering_cross_section(rb, DETUNING)
    assert abs(s - float(mp_sigma())) <= 1e-12 * float(mp_sigma())


def test_characteristic_time(rb, beam):
    t0 = characteristic_time(coupling_g(rb, beam, AREA), ATOMS, FLUX)
    assert t0 == pytest.approx(0.55e-6, rel=0.02)
    g = coupling_g(rb, beam, AREA)
    assert characteristic_time(g, ATOMS, 4 * FLUX) == pytest.approx(t0 / 4, rel=1e-14)
    assert characteristic_time(2 * g, ATOMS, FLUX) == pytest.approx(t0 / 4, rel=1e-14)


def test_coupling_scalings(rb, beam):
    assert coupling_g(rb, beam, AREA / 2) == pytest.approx(2 * coupling_g(rb, beam, AREA), rel=1e-14)
    big = TWO_PI * 1e13
    pref = rb.linewidth * rb.wavelength**2 / (16 * np.pi) / AREA
    assert coupling_g(rb, beam, AREA, detuning=big) * big == pytest.approx(-4 * pref, rel=1e-3)


def test_far_detuned_asymptotes(rb, beam):
    det = 100 * max(rb.splittings) * 1.01
    pref_g = rb.linewidth * rb.wavelength**2 / (16 * np.pi) / AREA
    assert coupling_g(rb, beam, AREA, detuning=det) == pytest.approx(-4 * pref_g / det, rel=0.01)
    pref_s = rb.wavelength**2 / TWO_PI * rb.linewidth**2 / 32
    assert scattering_cross_section(rb, det) == pytest.approx(16 * pref_s / det**2, rel=0.01)
    ratio = scattering_cross_section(rb, 2e4 * rb.splittings[2]) / scattering_cross_section(rb, 1e4 * rb.splittings[2])
    assert ratio == pytest.approx(0.25, rel=1e-3)


def test_cross_section_decreasing(rb):
    dets = np.linspace(TWO_PI * 0.2e9, TWO_PI * 20e9, 200)
    sig = [scattering_cross_section(rb, d) for d in dets]
    assert np.all(np.diff(sig) < 0)


def test_resonance_pole_and_warning(rb, beam):
    with pytest.raises(ResonancePole):
        coupling_g(rb, beam, AREA, detuning=-rb.splittings[1])
    with pytest.warns(DetuningWarning):
        scattering_cross_section(rb, 2 * rb.linewidth)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scattering_cross_section(rb, DETUNING)


def test_scattering_probs(rb, beam):
    assert scattering_probs(0.0, ATOMS, AREA, 1e-15)[0] == 0.0
    e1 = scattering_probs(1e7, 1e6, AREA, 1e-18)
    e2 = scattering_probs(1e7, 1e6, 2 * AREA, 1e-18)
    assert e2 == pytest.approx((e1[0] / 2, e1[1] / 2), rel=1e-15)
    with pytest.raises(TimeStepTooLarge):
        scattering_probs(1e30, 1.0, AREA, 1e-15)
    with pytest.raises(InvalidInput):
        scattering_probs(-1.0, 1.0, AREA, 1e-15)


def test_scattering_probs_appendix_step(rb, beam):
    g = coupling_g(rb, beam, AREA)
    t0 = characteristic_time(g, ATOMS, FLUX)
    sigma = scattering_cross_section(rb, DETUNING)
    eta, eps = scattering_probs(FLUX * t0 / 100, ATOMS, AREA, sigma)
    mg = mp_coupling(4 * mpmath.pi * mpmath.mpf("1e-10"))
    mt0 = 4 / (mg**2 * mpmath.mpf(ATOMS) * mpmath.mpf(FLUX))
    marea = 4 * mpmath.pi * mpmath.mpf("1e-10")
    assert eta == pytest.approx(float(mpmath.mpf(FLUX) * mt0 / 100 * mp_sigma() / marea), rel=1e-12)
    assert eps == pytest.approx(float(mpmath.mpf(ATOMS) * mp_sigma() / marea), rel=1e-12)


def test_mixing_probability(rb, beam):
    assert mixing_probability(0.0, rb.mass, AREA / 2, 1e-8) == 0.0
    m1 = mixing_probability(30e-6, rb.mass, AREA / 2, 1e-8)
    assert mixing_probability(120e-6, rb.mass, AREA / 2, 1e-8) == pytest.approx(2 * m1, rel=1e-14)
    t0 = characteristic_time(coupling_g(rb, beam, AREA), ATOMS, FLUX)
    m = mixing_probability(30e-6, rb.mass, 2 * np.pi * 1e-10, t0 / 100)
    kb = mpmath.mpf("1.380649e-23")
    v = mpmath.sqrt(3 * kb * mpmath.mpf("30e-6") / mpmath.mpf("1.443160648e-25"))
    oracle = v / mpmath.sqrt(6 * mpmath.pi * 2 * mpmath.pi * mpmath.mpf("1e-10")) * mpmath.mpf(t0) / 100
    assert m == pytest.approx(float(oracle), rel=1e-12)
    with pytest.raises(TimeStepTooLarge):
        mixing_probability(300.0, rb.mass, 1e-12, 1.0)


def test_rotation_angle_linear():
    assert rotation_angle(0.0, -0.5, 1e-6) == 0.0
    a = rotation_angle(1e-7, -0.5, 1e-6)
    assert rotation_angle(2e-7, -0.5, 1e-6) == pytest.approx(2 * a)
    # mu_B / hbar = 8.794e10 rad/(s T)
    assert a == pytest.approx(-0.5 * 8.7941e10 * 1e-13, rel=1e-4)


def test_species_file_errors(tmp_path):
    bad = tmp_path / "x.ini"
    bad.write_text("[species]\nlinewidth_hz = 1\n")
    with pytest.raises(ConfigError, match="missing"):
        load_species(bad)
    with pytest.raises(ConfigError):
        load_species(tmp_path / "nope.ini")
