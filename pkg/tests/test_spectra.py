import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from zenorate import (
    AtomBathModel,
    DomainError,
    Hydrogen2p1s,
    Hydrogen3p1s,
    OhmicFamily,
    TabulatedSpectrum,
    eval_modified_spectrum,
    eval_spectrum,
    f_factor,
    load_tabulated,
    spectrum_total_weight,
    zero_spectrum,
)
from zenorate.spectra import tabulate

ALL_KINDS = [Hydrogen2p1s(), Hydrogen3p1s(), OhmicFamily(1e-8, 0.5, 500.0),
             TabulatedSpectrum([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])]


def test_2p_value_at_cutoff():
    spec = Hydrogen2p1s()
    assert eval_spectrum(spec, spec.omega_c) == pytest.approx(spec.eta * spec.omega_c / 16, rel=1e-15)


def test_3p_value_at_cutoff():
    spec = Hydrogen3p1s()
    assert spec(spec.omega_c) == pytest.approx(spec.eta * spec.omega_c * 9 / 64, rel=1e-15)


@pytest.mark.parametrize("spec", ALL_KINDS, ids=lambda s: s.kind)
def test_negative_frequencies_are_empty(spec):
    assert spec(-1.0) == 0.0
    assert np.all(spec(np.array([-5.0, -1e-9])) == 0.0)


@pytest.mark.parametrize("spec", ALL_KINDS, ids=lambda s: s.kind)
def test_non_finite_frequency_rejected(spec):
    with pytest.raises(DomainError):
        spec(math.nan)
    with pytest.raises(DomainError):
        spec(np.array([1.0, math.inf]))


def test_scalar_in_scalar_out():
    assert isinstance(Hydrogen2p1s()(3.0), float)
    assert Hydrogen2p1s()(np.ones(4)).shape == (4,)


def _argmax(spec, hi):
    res = optimize.minimize_scalar(lambda w: -spec(w), bounds=(1e-6, hi), method="bounded",
                                   options={"xatol": 1e-9})
    return res.x


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_ohmic_peak_at_s_omega_c(s):
    spec = OhmicFamily(1e-8, s, 500.0)
    assert _argmax(spec, 5000.0) == pytest.approx(s * 500.0, rel=1e-6)
    assert spec.peak == s * 500.0


def test_2p_peak_at_cutoff_over_root_seven():
    spec = Hydrogen2p1s()
    golden = optimize.minimize_scalar(lambda w: -spec(w), bracket=(1.0, 200.0, 2000.0),
                                      method="golden", tol=1e-10).x
    assert golden == pytest.approx(550 / math.sqrt(7), rel=1e-6)
    assert spec.peak == pytest.approx(550 / math.sqrt(7), rel=1e-15)


@pytest.mark.parametrize("kwargs", [dict(A=-1.0, s=1.0, omega_c=1.0), dict(A=1.0, s=0.0, omega_c=1.0),
                                    dict(A=1.0, s=1.0, omega_c=0.0)])
def test_ohmic_parameter_validation(kwargs):
    with pytest.raises(DomainError):
        OhmicFamily(**kwargs)


def test_hydrogen_parameter_validation():
    with pytest.raises(DomainError):
        Hydrogen2p1s(eta=0.0)
    with pytest.raises(DomainError):
        Hydrogen3p1s(omega_c=-1.0)


def test_from_si_normalises_to_omega_units():
    spec = Hydrogen2p1s.from_si(6.435e-9, 550 * 1.55e16, 1.55e16)
    assert spec.omega_c == pytest.approx(550.0)
    assert spec.omega_scale == 1.55e16


def test_f_factor_expanded_form():
    rng = np.random.default_rng(7)
    w = rng.uniform(0, 2000, 100)
    om = rng.uniform(0.5, 2, 100)
    op = om * (1 - rng.uniform(0, 0.3, 100))
    expanded = 1 + (3 * om - op + 2 * w) * (om - op) / (w + om) ** 2
    np.testing.assert_allclose(f_factor(w, om, op), expanded, rtol=1e-12)


def test_f_factor_unity_without_shift():
    w = np.linspace(0, 100, 11)
    np.testing.assert_array_equal(f_factor(w, 1.0, 1.0), np.ones_like(w))


def test_f_factor_pole():
    with pytest.raises(DomainError):
        f_factor(-1.0, 1.0, 0.9)


def test_modified_spectrum_identity(model_2p):
    w = np.geomspace(1e-3, 1e4, 50)
    ratio = eval_modified_spectrum(model_2p.spectrum, w, model_2p) / eval_spectrum(model_2p.spectrum, w)
    om, op = model_2p.omega0, model_2p.omega_prime
    np.testing.assert_allclose(ratio, ((2 * om + w - op) / (w + om)) ** 2, rtol=1e-14)


def test_modified_spectrum_2p_is_tiny_correction(model_2p):
    w = np.linspace(0, model_2p.spectrum.support_upper, 10001)
    dev = np.abs(f_factor(w, 1.0, model_2p.omega_prime) - 1.0)
    assert dev.max() <= 2e-7


@pytest.mark.parametrize("s", [0.002, 0.5, 1.0, 2.0, 3.7])
def test_ohmic_total_weight(s):
    spec = OhmicFamily(1e-8, s, 500.0)
    assert spectrum_total_weight(spec) == pytest.approx(1e-8 * 500.0**2 * math.gamma(1 + s), rel=1e-10)


def test_zero_spectrum_weight():
    assert spectrum_total_weight(zero_spectrum()) == 0.0


def test_2p_total_weight_against_midpoint_rule():
    spec = Hydrogen2p1s()
    upper = 30 * spec.omega_c  # neglected tail is ~1e-9 relative
    n = 1_000_000
    h = upper / n
    riemann = float(np.sum(spec((np.arange(n) + 0.5) * h))) * h
    assert spectrum_total_weight(spec) == pytest.approx(riemann, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(
    A=st.floats(0, 1e-2), s=st.floats(0.01, 4), wc=st.floats(1, 1e3),
    w=st.lists(st.floats(-1e3, 1e5), min_size=1, max_size=20),
)
def test_ohmic_non_negative(A, s, wc, w):
    assert np.all(OhmicFamily(A, s, wc)(np.array(w)) >= 0)


@settings(max_examples=60, deadline=None)
@given(eta=st.floats(1e-12, 1e-3), wc=st.floats(1, 1e3), w=st.lists(st.floats(-1e3, 1e6), min_size=1, max_size=20))
def test_hydrogen_non_negative(eta, wc, w):
    w = np.array(w)
    assert np.all(Hydrogen2p1s(eta, wc)(w) >= 0)
    assert np.all(Hydrogen3p1s(eta, wc)(w) >= 0)


@settings(max_examples=60, deadline=None)
@given(values=st.lists(st.floats(0, 10), min_size=3, max_size=30))
def test_tabulated_interpolation_never_negative(values):
    spec = TabulatedSpectrum(np.arange(len(values), dtype=float), values)
    probe = np.linspace(-1, len(values) + 5, 997)
    assert np.all(spec(probe) >= 0)


def test_tabulated_round_trip():
    spec = Hydrogen2p1s()
    table = tabulate(spec, np.linspace(0, 20 * spec.omega_c, 10_000))
    rng = np.random.default_rng(3)
    probe = rng.uniform(1.0, 10 * spec.omega_c, 2000)
    np.testing.assert_allclose(table(probe), spec(probe), rtol=1e-6)


def test_tabulated_validation():
    with pytest.raises(DomainError):
        TabulatedSpectrum([0.0, 2.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        TabulatedSpectrum([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(DomainError):
        TabulatedSpectrum([0.0], [1.0])


def test_tabulated_edges():
    spec = TabulatedSpectrum([1.0, 2.0, 3.0], [1.0, 2.0, 1.0])
    assert spec(0.5) == 0.0
    assert spec(3.0) == pytest.approx(1.0)
    # exponential tail continues the last log-slope
    assert spec(4.0) == pytest.approx(0.5)


def test_load_tabulated_reduced(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# a comment\n0 0\n1 2e-9  # inline\n\n2 1e-9\n")
    spec = load_tabulated(p)
    assert spec(1.0) == pytest.approx(2e-9)
    assert spec.omega_scale is None


def test_load_tabulated_rad_per_second(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# units: rad/s\n# omega_scale: 2e15\n0 0\n2e15 4e6\n4e15 2e6\n")
    spec = load_tabulated(p)
    assert spec.omega_scale == 2e15
    np.testing.assert_allclose(spec.omega, [0, 1, 2])
    assert spec(1.0) == pytest.approx(2e-9)


def test_load_tabulated_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1 2\n1 2 3\n")
    with pytest.raises(DomainError):
        load_tabulated(p)
    p.write_text("# units: rad/s\n0 0\n1 1\n")
    with pytest.raises(DomainError):
        load_tabulated(p)


def test_model_shares_spectrum_kind(model_2p):
    assert isinstance(model_2p, AtomBathModel)
    assert model_2p.spectrum.kind == "Hydrogen2p1s"
