import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relay_rates.params import FIG3, UnstableGain
from relay_rates.quadrature import integrate_periodic_1d
from relay_rates.spectra import FreqPair, eval_transfers, noise_psd, output_psd, signal_psd

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def test_theta_zero_values(fig3):
    t = eval_transfers(fig3, 0.5, FreqPair(0.0, 0.7))
    assert t.h1 == pytest.approx(fig3.beta + 2 * fig3.alpha)
    assert t.h2 == pytest.approx(fig3.gamma + 2 * fig3.eta)
    assert t.h3 == pytest.approx(2 * fig3.mu)


def test_quarter_period_kills_feedback(fig3):
    t = eval_transfers(fig3, 0.5, FreqPair(np.pi / 2, 1.1))
    assert abs(t.h3) < 1e-16
    assert t.hs == pytest.approx(t.h1 * t.hr * t.h2, rel=1e-15)


@given(angles, angles)
def test_zero_gain_silences_relays(theta, phi):
    t = eval_transfers(FIG3, 0.0, (theta, phi))
    assert t.hs == 0 and t.hn == 0
    assert noise_psd(FIG3, 0.0, (theta, phi)) == FIG3.var_w


@given(angles, angles, st.floats(0, 4.99))
def test_transfer_structure(theta, phi, g):
    t = eval_transfers(FIG3, g, (theta, phi))
    assert np.imag(t.h1) == 0 and np.imag(t.h2) == 0
    assert abs(t.hr) == pytest.approx(g, rel=1e-15, abs=1e-300)
    assert t.hs == pytest.approx(t.h1 * t.hr * t.h2 / t.denominator, rel=1e-13, abs=1e-300)
    assert t.hn == pytest.approx(t.hr * t.h2 / t.denominator, rel=1e-13, abs=1e-300)
    assert abs(t.denominator) > 0


def test_isolated_cell_reduction():
    p = FIG3.replace(alpha=0.0, eta=0.0, mu=0.0)
    g = 1.3
    theta, phi = np.meshgrid(np.linspace(0, 6, 7), np.linspace(0, 6, 5))
    s = signal_psd(p, g, FreqPair(theta, phi))
    n = noise_psd(p, g, FreqPair(theta, phi))
    np.testing.assert_allclose(s, p.power_mt * g**2 * p.beta**2 * p.gamma**2, rtol=1e-14)
    np.testing.assert_allclose(n, p.var_z * g**2 * p.gamma**2 + p.var_w, rtol=1e-14)


def test_signal_and_noise_psd_against_high_precision_real_form():
    # frozen from a 40-digit mpmath evaluation of the real-valued form
    # P h1^2 g^2 h2^2 / (1 - 2 g h3 cos(phi) + g^2 h3^2) at theta=1, phi=0.3, g=0.5
    f = FreqPair(1.0, 0.3)
    assert signal_psd(FIG3, 0.5, f) == pytest.approx(2.9623135470880082628, rel=1e-14)
    assert noise_psd(FIG3, 0.5, f) == pytest.approx(1.2869064006739765686, rel=1e-14)


def test_unstable_gain_rejected_inclusive():
    with pytest.raises(UnstableGain):
        signal_psd(FIG3, 5.0, (0.0, 0.0))
    with pytest.raises(UnstableGain):
        noise_psd(FIG3, 7.0, (0.0, 0.0))


@settings(max_examples=50)
@given(angles, angles, st.floats(0, 4.9))
def test_noise_floor_and_conjugate_symmetry(theta, phi, g):
    n = noise_psd(FIG3, g, (theta, phi))
    assert n >= FIG3.var_w
    for f in [(2 * np.pi - theta, phi), (theta, 2 * np.pi - phi), (-theta, -phi)]:
        assert signal_psd(FIG3, g, f) == pytest.approx(signal_psd(FIG3, g, (theta, phi)), rel=1e-10)
        assert noise_psd(FIG3, g, f) == pytest.approx(n, rel=1e-10)


@pytest.mark.parametrize("lam", [2, 3])
def test_delay_only_rescales_temporal_frequency(lam):
    g = 3.0
    theta, phi = np.meshgrid(np.linspace(0, 6.2, 13), np.linspace(0, 6.2, 17))
    with_delay = FIG3.replace(lam=lam)
    a = np.abs(eval_transfers(with_delay, g, FreqPair(theta, phi)).hs)
    b = np.abs(eval_transfers(FIG3, g, FreqPair(theta, lam * phi)).hs)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("lam", [1, 2, 3])
def test_phi_integral_independent_of_delay(lam):
    g, theta = 3.0, 0.4
    p = FIG3.replace(lam=lam)
    v, _ = integrate_periodic_1d(lambda phi: np.log1p(signal_psd(p, g, FreqPair(theta, phi)) / noise_psd(p, g, FreqPair(theta, phi))))
    ref, _ = integrate_periodic_1d(lambda phi: np.log1p(signal_psd(FIG3, g, FreqPair(theta, phi)) / noise_psd(FIG3, g, FreqPair(theta, phi))))
    assert v == pytest.approx(ref, rel=1e-10)


def test_dense_grid_bounded_near_edge():
    eps = 1e-3
    g = (1 - eps) / (2 * FIG3.mu)
    theta, phi = np.meshgrid(np.linspace(0, 2 * np.pi, 801), np.linspace(0, 2 * np.pi, 801))
    s = output_psd(FIG3, g, FreqPair(theta, phi))
    assert np.all(np.isfinite(s))
    p = FIG3
    bound = p.power_mt * (p.beta + 2 * p.alpha) ** 2 * g**2 * (p.gamma + 2 * p.eta) ** 2 / eps**2
    # attained at theta = phi = 0, so allow rounding
    assert signal_psd(p, g, FreqPair(theta, phi)).max() <= bound * (1 + 1e-12)
