import math

import numpy as np
import pytest

from nfmd.errors import ConfigError
from nfmd.oscillator import (
    DriveSpec,
    ForcingSpec,
    OscillatorSpec,
    PerturbationSpec,
    driven_steady_amplitude,
    eval_forcing,
    simulate,
)


# ---------------------------------------------------------------------------
# eval_forcing
# ---------------------------------------------------------------------------

def test_perturbation_zero_at_onset():
    f = ForcingSpec(perturbation=PerturbationSpec(gamma=2.0, t_prime=1.0, tau=0.5))
    assert eval_forcing(f, 1.0) == 0.0
    assert eval_forcing(f, 0.5) == 0.0


def test_perturbation_one_time_constant():
    f = ForcingSpec(perturbation=PerturbationSpec(gamma=2.0, t_prime=1.0, tau=0.5))
    assert eval_forcing(f, 1.5) == pytest.approx(2.0 * (1.0 - math.exp(-1.0)), rel=1e-12)


def test_perturbation_saturates_at_gamma():
    f = ForcingSpec(perturbation=PerturbationSpec(gamma=2.0, t_prime=0.0, tau=1e-3))
    assert eval_forcing(f, 10.0) == pytest.approx(2.0, rel=1e-12)


def test_drive_at_zero_phase():
    f = ForcingSpec(drive=DriveSpec(alpha=3.5, omega_d=7.0))
    assert eval_forcing(f, 0.0) == pytest.approx(3.5)


def test_forcing_is_continuous_at_onset():
    f = ForcingSpec(perturbation=PerturbationSpec(gamma=1.0, t_prime=0.3, tau=1e-2))
    eps = 1e-9
    assert abs(eval_forcing(f, 0.3 + eps) - eval_forcing(f, 0.3 - eps)) < 1e-6


def test_forcing_requires_a_term():
    with pytest.raises(ValueError):
        ForcingSpec()
    with pytest.raises(ValueError):
        PerturbationSpec(gamma=1.0, t_prime=0.0, tau=0.0)


def test_oscillator_spec_validation():
    with pytest.raises(ValueError):
        OscillatorSpec(beta=-0.1, omega0=1.0, mass=1.0)
    with pytest.raises(ValueError):
        OscillatorSpec(beta=0.1, omega0=0.0, mass=1.0)
    with pytest.raises(ValueError):
        OscillatorSpec(beta=0.1, omega0=1.0, mass=-1.0)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _free_oscillator(beta=0.0):
    # drive with zero amplitude = free oscillator (a forcing term is required)
    return (
        OscillatorSpec(beta=beta, omega0=2.0 * np.pi, mass=1.0, x0=1.0, v0=0.0),
        ForcingSpec(drive=DriveSpec(alpha=0.0, omega_d=1.0)),
    )


def test_undamped_free_oscillator_is_cosine():
    osc, forcing = _free_oscillator()
    # 100 cycles at 1 Hz
    ts = simulate(osc, forcing, duration=100.0, dt_out=0.01, max_phase_step=0.005)
    expected = np.cos(2.0 * np.pi * ts.times())
    rms = np.sqrt(np.mean((ts.samples - expected) ** 2))
    assert rms < 1e-6


def test_damped_free_oscillator_peak_envelope_decays():
    osc, forcing = _free_oscillator(beta=0.05)
    ts = simulate(osc, forcing, duration=20.0, dt_out=0.01)
    x = ts.samples
    peaks = [x[i] for i in range(1, x.size - 1) if x[i] > x[i - 1] and x[i] > x[i + 1] and x[i] > 0]
    assert len(peaks) > 10
    assert np.all(np.diff(peaks) < 0)


def test_step_halving_converged():
    osc = OscillatorSpec(beta=0.02, omega0=2.0 * np.pi * 10.0, mass=1.0, x0=0.5)
    forcing = ForcingSpec(drive=DriveSpec(alpha=1.0, omega_d=2.0 * np.pi * 3.0))
    a = simulate(osc, forcing, duration=0.05, dt_out=1e-3, max_phase_step=0.003)
    b = simulate(osc, forcing, duration=0.05, dt_out=1e-3, max_phase_step=0.0015)
    scale = np.sqrt(np.mean(b.samples**2))
    assert np.sqrt(np.mean((a.samples - b.samples) ** 2)) < 1e-8 * max(scale, 1.0)


def test_fourth_order_error_scaling():
    osc, forcing = _free_oscillator()
    duration, dt_out = 5.0, 0.05

    def rms_error(phase_step):
        ts = simulate(osc, forcing, duration, dt_out, max_phase_step=phase_step)
        return np.sqrt(np.mean((ts.samples - np.cos(2.0 * np.pi * ts.times())) ** 2))

    # halving series: each halving should shrink the error ~16x (within 2x)
    errs = [rms_error(h) for h in (0.04, 0.02, 0.01)]
    for big, small in zip(errs, errs[1:]):
        assert 8.0 < big / small < 32.0


def test_off_resonance_steady_amplitude():
    osc = OscillatorSpec(beta=0.05, omega0=2.0 * np.pi * 100.0, mass=2.0)
    drive = DriveSpec(alpha=5.0, omega_d=2.0 * np.pi * 10.0)
    forcing = ForcingSpec(drive=drive)
    # transient decays with time constant 1/(beta*omega0) ~ 0.032 s
    ts = simulate(osc, forcing, duration=0.7, dt_out=1e-4)
    tail = ts.samples[ts.times() > 0.5]  # two full drive cycles
    amp_est = 0.5 * (tail.max() - tail.min())
    expected = driven_steady_amplitude(osc, drive.alpha, drive.omega_d)
    assert amp_est == pytest.approx(expected, rel=0.01)


def test_resonant_steady_amplitude_closed_form():
    osc = OscillatorSpec(beta=0.1, omega0=2.0 * np.pi * 50.0, mass=1.5)
    expected = 2.0 / (1.5 * osc.omega0**2) / (2.0 * 0.1)
    assert driven_steady_amplitude(osc, 2.0, osc.omega0) == pytest.approx(expected)


def test_perturbation_only_static_deflection():
    osc = OscillatorSpec(beta=0.1, omega0=2.0 * np.pi * 100.0, mass=1.0)
    gamma = 3.0
    forcing = ForcingSpec(
        perturbation=PerturbationSpec(gamma=gamma, t_prime=0.0, tau=0.01)
    )
    ts = simulate(osc, forcing, duration=0.5, dt_out=1e-4)
    static = gamma / (osc.mass * osc.omega0**2)
    assert ts.samples[-1] == pytest.approx(static, rel=1e-3)
    # response rises monotonically toward the plateau on coarse scales
    coarse = ts.samples[:: ts.n // 20]
    assert coarse[1] < coarse[5] < coarse[-1] * 1.01


def test_phase_step_guard():
    osc, forcing = _free_oscillator()
    with pytest.raises(ConfigError):
        simulate(osc, forcing, 1.0, 0.01, max_phase_step=0.2)
    with pytest.raises(ConfigError):
        simulate(osc, forcing, 1.0, 0.01, max_phase_step=0.0)


def test_bad_duration_rejected():
    osc, forcing = _free_oscillator()
    with pytest.raises(ValueError):
        simulate(osc, forcing, 0.0, 0.01)
    with pytest.raises(ValueError):
        simulate(osc, forcing, 1.0, -0.01)


def test_output_grid():
    osc, forcing = _free_oscillator()
    ts = simulate(osc, forcing, duration=1.0, dt_out=0.25, t0=2.0)
    np.testing.assert_allclose(ts.times(), [2.0, 2.25, 2.5, 2.75, 3.0])
    assert ts.samples[0] == 1.0  # initial condition
