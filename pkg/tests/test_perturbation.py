import math

import numpy as np
import pytest

from nfmd import bench, perturbation
from nfmd.errors import OnsetNotFoundError
from nfmd.perturbation import (
    fit_perturbation_model,
    perturbation_model,
    tau_sweep,
)


# ---------------------------------------------------------------------------
# perturbation_model
# ---------------------------------------------------------------------------

def test_model_zero_before_and_at_onset():
    t = np.array([0.0, 0.5, 1.0])
    out = perturbation_model(t, alpha=2.0, lam=0.0, tau=0.1, t_prime=1.0)
    np.testing.assert_array_equal(out, 0.0)


def test_model_one_time_constant_lambda_zero():
    val = perturbation_model(1.1, alpha=2.0, lam=0.0, tau=0.1, t_prime=1.0)
    assert float(val) == pytest.approx(2.0 * (1.0 - math.exp(-1.0)), rel=1e-12)


def test_model_plateau_and_decay():
    # lambda = 0: saturates at alpha; lambda > 0: decays back toward zero
    assert float(perturbation_model(50.0, 3.0, 0.0, 0.1, 0.0)) == pytest.approx(3.0)
    assert abs(float(perturbation_model(50.0, 3.0, 2.0, 0.1, 0.0))) < 1e-12


# ---------------------------------------------------------------------------
# fit_perturbation_model
# ---------------------------------------------------------------------------

def _synthetic_mean(alpha=1.0, lam=0.0, tau=1e-5, t_prime=1e-3, n=2001,
                    t_lo=0.8e-3, t_hi=1.2e-3):
    centers = np.linspace(t_lo, t_hi, n)
    return centers, perturbation_model(centers, alpha, lam, tau, t_prime)


def test_tau_self_consistency():
    centers, mu = _synthetic_mean()
    fit = fit_perturbation_model(
        centers, mu, variant="lambda_zero", fixed={"t_prime": 1e-3}
    )
    assert fit.tau == pytest.approx(1e-5, rel=1e-3)
    assert fit.alpha == pytest.approx(1.0, rel=1e-3)
    assert fit.lam == 0.0
    assert not fit.degenerate
    assert fit.rss < 1e-12


def test_zero_mean_is_degenerate():
    centers = np.linspace(0.0, 1.0, 200)
    fit = fit_perturbation_model(centers, np.zeros(200), variant="lambda_zero")
    assert fit.degenerate
    assert abs(fit.alpha) < 1e-9
    assert fit.rss == pytest.approx(0.0, abs=1e-15)


def test_all_free_without_onset_raises():
    rng = np.random.default_rng(0)
    centers = np.linspace(0.0, 1.0, 300)
    mu = 1e-3 * rng.standard_normal(300)
    with pytest.raises(OnsetNotFoundError):
        fit_perturbation_model(centers, mu, variant="all_free")


def test_all_free_recovers_parameters():
    centers, mu = _synthetic_mean(alpha=2.0, tau=2e-5)
    rng = np.random.default_rng(1)
    noisy = mu + 1e-4 * rng.standard_normal(mu.size)
    fit = fit_perturbation_model(centers, noisy, variant="all_free")
    assert fit.tau == pytest.approx(2e-5, rel=0.05)
    assert fit.alpha == pytest.approx(2.0, rel=0.01)
    assert fit.t_prime == pytest.approx(1e-3, abs=2e-6)


def test_both_fixed_echoes_inputs_exactly():
    t_prime, lam = 0.168e-6, 1080.0
    centers = np.linspace(0.0, 5e-3, 4000)
    mu = perturbation_model(centers, 2.0, lam, 1e-5, t_prime)
    fit = fit_perturbation_model(
        centers, mu, variant="both_fixed",
        fixed={"t_prime": t_prime, "lambda": lam},
    )
    assert fit.t_prime == t_prime  # bit-exact echo
    assert fit.lam == lam
    assert "t_prime" in fit.fixed_mask and "lambda" in fit.fixed_mask
    assert fit.tau == pytest.approx(1e-5, rel=1e-2)


def test_fixed_lambda_variant_requires_value():
    centers, mu = _synthetic_mean()
    with pytest.raises(ValueError, match="lambda"):
        fit_perturbation_model(centers, mu, variant="fixed_lambda")
    with pytest.raises(ValueError, match="t_prime"):
        fit_perturbation_model(centers, mu, variant="fixed_tprime")


def test_unknown_variant_rejected():
    centers, mu = _synthetic_mean()
    with pytest.raises(ValueError, match="variant"):
        fit_perturbation_model(centers, mu, variant="bogus")


def test_too_few_post_onset_points():
    centers = np.linspace(0.0, 1.0, 30)
    mu = np.ones(30)
    with pytest.raises(ValueError, match="post-onset"):
        fit_perturbation_model(
            centers, mu, variant="lambda_zero", fixed={"t_prime": 0.9}
        )


def test_nonincreasing_centers_rejected():
    centers = np.array([0.0, 1.0, 1.0, 2.0])
    with pytest.raises(ValueError, match="increasing"):
        fit_perturbation_model(centers, np.zeros(4), variant="lambda_zero")


def test_degeneracy_with_oscillating_preonset_trace():
    # before onset the mean-mode trace may oscillate (nothing real to
    # track); a genuine rise of comparable size must still count as
    # identifiable when t' is known
    centers = np.linspace(0.0, 2e-3, 2000)
    t_prime = 1e-3
    mu = perturbation_model(centers, 1.0, 0.0, 5e-5, t_prime)
    mu = mu + 0.5 * np.cos(2 * np.pi * centers / 2e-4)
    fit = fit_perturbation_model(
        centers, mu, variant="lambda_zero", fixed={"t_prime": t_prime}
    )
    assert not fit.degenerate


# ---------------------------------------------------------------------------
# tau_sweep
# ---------------------------------------------------------------------------

def _mini_sweep(gamma, taus, seed=0):
    return tau_sweep(
        osc=bench.bench_oscillator(),
        drive=bench.bench_drive(),
        gamma=gamma,
        t_prime=bench.BENCH_T_PRIME,
        taus=taus,
        snr_db=bench.BENCH_SNR_DB,
        nfmd_config=bench.bench_nfmd_config(),
        seed=seed,
        dt_out=bench.BENCH_DT_OUT,
    )


def test_sweep_recovers_tau_above_window():
    item = _mini_sweep(bench.bench_gamma(), [1e-5])[0]
    assert item.status == "ok"
    assert 0.9 <= item.tau_est / item.tau_true <= 1.1


def test_sweep_linearity_in_gamma():
    gamma = bench.bench_gamma()
    a = _mini_sweep(gamma, [1e-5])[0]
    b = _mini_sweep(2.0 * gamma, [1e-5])[0]
    assert b.alpha == pytest.approx(2.0 * a.alpha, rel=0.01)
    assert b.tau_est == pytest.approx(a.tau_est, rel=0.01)


def test_sweep_zero_gamma_degenerate():
    item = _mini_sweep(0.0, [1e-5])[0]
    assert item.status == "degenerate"


def test_sweep_rejects_nonpositive_tau():
    with pytest.raises(ValueError):
        _mini_sweep(bench.bench_gamma(), [-1e-5])


def test_sweep_error_context_names_item():
    from nfmd.errors import UndefinedSnrError
    from nfmd.oscillator import DriveSpec

    # zero drive + zero perturbation -> all-zero trace -> SNR undefined
    with pytest.raises(UndefinedSnrError, match="tau sweep item 0"):
        tau_sweep(
            osc=bench.bench_oscillator(),
            drive=DriveSpec(alpha=0.0, omega_d=bench.BENCH_OMEGA0),
            gamma=0.0,
            t_prime=bench.BENCH_T_PRIME,
            taus=[1e-5],
            snr_db=bench.BENCH_SNR_DB,
            nfmd_config=bench.bench_nfmd_config(),
            seed=0,
            dt_out=bench.BENCH_DT_OUT,
        )
