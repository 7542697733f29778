import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenorate import (
    Approach,
    AtomBathModel,
    DomainError,
    Hydrogen2p1s,
    MeasurementProtocol,
    OhmicFamily,
    bare_rate,
    decay_rate,
    delta_R,
    kernel_F,
    rate_decomposition,
    survival_probability,
    zero_spectrum,
)

TWO_PI = 2 * math.pi


def test_kernel_peak_and_first_zero():
    assert kernel_F(1.3, 1.3, 4.0) == pytest.approx(4.0 / TWO_PI)
    assert kernel_F(1.3 + TWO_PI / 4.0, 1.3, 4.0) == pytest.approx(0.0, abs=1e-30)


def test_kernel_rejects_nonpositive_tau():
    with pytest.raises(DomainError):
        kernel_F(1.0, 1.0, 0.0)


def _kernel_integral(center, tau, lobes=20_000):
    """Gauss-Legendre per lobe out to +-lobes zeros, plus the averaged 1/u^2 tail."""
    x, wts = np.polynomial.legendre.leggauss(16)
    edges = np.arange(-lobes, lobes + 1) * math.pi  # in u = (w - c) tau / 2
    a, b = edges[:-1], edges[1:]
    u = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * x[None, :]
    w = center + 2.0 * u / tau
    inner = float(np.sum(kernel_F(w, center, tau) * wts[None, :] * 0.5 * (b - a)[:, None])) * 2.0 / tau
    u_max = lobes * math.pi
    tail = 2.0 * (tau / TWO_PI) * (2.0 / tau) * 0.5 / u_max
    return inner + tail


@settings(max_examples=20, deadline=None)
@given(center=st.floats(-50, 50), log_tau=st.floats(-3, 3))
def test_kernel_normalised(center, log_tau):
    assert _kernel_integral(center, 10.0**log_tau) == pytest.approx(1.0, abs=1e-6)


def test_approach_parsing():
    assert Approach.parse("rwa") is Approach.RWA
    assert Approach.parse("ApproachI") is Approach.I
    assert Approach.parse("approach-ii") is Approach.II
    assert Approach.parse(2) is Approach.II
    with pytest.raises(DomainError):
        Approach.parse("III")


def test_protocol_validation():
    assert MeasurementProtocol(0.5, 4).total_time == 2.0
    with pytest.raises(DomainError):
        MeasurementProtocol(0.0, 1)
    with pytest.raises(DomainError):
        MeasurementProtocol(1.0, -1)
    with pytest.raises(DomainError):
        MeasurementProtocol(1.0, 1.5)


def test_survival_probability():
    assert survival_probability(0.3, MeasurementProtocol(1.0, 0)) == 1.0
    assert survival_probability(0.0, MeasurementProtocol(2.0, 7)) == 1.0
    p1 = survival_probability(0.3, MeasurementProtocol(1.0, 1))
    p2 = survival_probability(0.3, MeasurementProtocol(1.0, 2))
    assert p2 == pytest.approx(p1**2, rel=1e-15)
    assert p1 == pytest.approx(math.exp(-0.3))
    with pytest.raises(DomainError):
        survival_probability(-1.0, MeasurementProtocol(1.0, 1))


@pytest.mark.parametrize("approach", list(Approach))
def test_reference_rate_conventions(model_2p, approach):
    spec = model_2p.spectrum
    centre = {Approach.RWA: 1.0, Approach.I: model_2p.omega1, Approach.II: model_2p.omega_prime}[approach]
    f = (2.0 / (centre + 1.0)) ** 2 if approach is Approach.II else 1.0
    assert bare_rate(model_2p, approach) == pytest.approx(TWO_PI * f * spec(centre), rel=1e-14)


@pytest.mark.parametrize("name", ["model_2p", "model_3p", "model_subohmic"])
@pytest.mark.parametrize("approach", list(Approach))
def test_small_tau_linear_law(request, name, approach):
    m = request.getfixturevalue(name)
    tau = 1e-3 / m.spectrum.omega_c
    p = decay_rate(m, tau, approach)
    assert p.R / (tau * m.spectrum.total_weight) == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("name", ["model_2p", "model_3p", "model_subohmic"])
def test_large_tau_approaches_reference_like_inverse_tau(request, name):
    m = request.getfixturevalue(name)
    wc = m.spectrum.omega_c
    dev = [abs(decay_rate(m, x / wc, "I").ratio - 1.0) for x in (1e4, 3e4, 1e5)]
    assert dev[0] > dev[1] > dev[2]
    assert dev[0] / dev[2] == pytest.approx(10.0, rel=0.3)


def test_rate_exceeds_reference_then_drops_below(model_2p):
    wc = model_2p.spectrum.omega_c
    ratios = [decay_rate(model_2p, x / wc, "I").ratio for x in (1e-3, 1e-2, 1.0, 10.0)]
    assert ratios[0] < 1 and ratios[1] < 1
    assert max(ratios) > 1


def test_subohmic_resonant_peak_has_no_enhancement(model_subohmic):
    for x in np.geomspace(1e-2, 1e5, 22):
        assert decay_rate(model_subohmic, x / 500.0, "I").ratio <= 1 + 1e-3


@settings(max_examples=10, deadline=None)
@given(A=st.floats(1e-10, 1e-4), s=st.floats(0.1, 3.0), wc=st.floats(2.0, 600.0), x=st.floats(-3, 3))
def test_rate_non_negative(A, s, wc, x):
    m = AtomBathModel(OhmicFamily(A, s, wc))
    for approach in Approach:
        assert decay_rate(m, 10.0**x / wc, approach).R >= 0


def test_zero_spectrum():
    m = AtomBathModel(zero_spectrum())
    p = decay_rate(m, 1.0, "II")
    assert p.R == 0.0 and p.R0 == 0.0 and math.isnan(p.ratio)
    assert delta_R(m, 1.0, "I") == 0.0
    assert rate_decomposition(m, 1.0) == (0.0, 0.0, 0.0)


def test_delta_rwa_is_zero(model_2p):
    assert delta_R(model_2p, 0.1, Approach.RWA) == 0.0


def test_delta_matches_direct_subtraction_for_strong_coupling():
    m = AtomBathModel(OhmicFamily(1e-3, 1.0, 20.0))
    for approach in ("I", "II"):
        for tau in (0.05, 1.0, 20.0):
            direct = abs(decay_rate(m, tau, approach, rtol=1e-13).R - decay_rate(m, tau, "RWA", rtol=1e-13).R)
            assert delta_R(m, tau, approach) == pytest.approx(direct, rel=1e-5)


def test_2p_rwa_differences_magnitudes(model_2p):
    taus = np.geomspace(1e-4, 1.0, 13)
    r0_1 = bare_rate(model_2p, "I")
    r0_2 = bare_rate(model_2p, "II")
    d1 = max(delta_R(model_2p, t, "I") for t in taus) / r0_1
    d2 = max(delta_R(model_2p, t, "II") for t in taus) / r0_2
    assert 1e-7 <= d1 <= 1e-5
    assert 1e-9 <= d2 <= 1e-7


def test_approaches_converge_linearly_with_amplitude():
    tau = 0.2
    rel = []
    for A in (1e-4, 1e-5, 1e-6):
        m = AtomBathModel(OhmicFamily(A, 1.0, 20.0))
        rwa = decay_rate(m, tau, "RWA").R
        rel.append((delta_R(m, tau, "I") / rwa, delta_R(m, tau, "II") / rwa))
    rel = np.array(rel)
    np.testing.assert_allclose(rel[:-1] / rel[1:], 10.0, rtol=0.01)


def _random_points(n, seed):
    rng = np.random.default_rng(seed)
    models = [AtomBathModel(Hydrogen2p1s())]
    for _ in range(3):
        models.append(AtomBathModel(OhmicFamily(10 ** rng.uniform(-9, -4), rng.uniform(0.05, 3), rng.uniform(5, 500))))
    return [(models[i % 4], 10 ** rng.uniform(-3, 3) / models[i % 4].spectrum.omega_c) for i in range(n)]


@pytest.mark.parametrize("model,tau", _random_points(8, 11))
def test_decomposition_identity(model, tau):
    r = sum(rate_decomposition(model, tau))
    assert r == pytest.approx(decay_rate(model, tau, "II").R, rel=1e-8)


def test_decomposition_components_vanish_in_delta_limit():
    m = AtomBathModel(OhmicFamily(1e-6, 1.0, 5.0))
    fractions = []
    for tau in (1e2, 1e3, 1e4):
        r1, r2, r3 = rate_decomposition(m, tau, omega_prime=m.omega0)
        fractions.append((abs(r2) / r1, r3 / r1))
    fractions = np.array(fractions)
    assert np.all(np.diff(fractions, axis=0) < 0)
    assert fractions[-1, 0] < 1e-3 and fractions[-1, 1] < 1e-3


def test_decomposition_parts_have_expected_signs(model_2p):
    r1, r2, r3 = rate_decomposition(model_2p, 1e-3)
    assert r1 > 0 and r3 > 0


def test_invalid_tau(model_2p):
    with pytest.raises(DomainError):
        decay_rate(model_2p, -1.0)
    with pytest.raises(DomainError):
        decay_rate(model_2p, math.inf)
