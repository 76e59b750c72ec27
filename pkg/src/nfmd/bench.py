"""Benchmark suites: plot-ready tables with per-row pass/fail columns.

The oscillator benchmark parameters live here (not hard-coded into the
library): a lightly damped resonator driven at resonance with a unit
steady-state amplitude, perturbed by a forcing whose static deflection
is also unity, analyzed with a window spanning one microsecond.
"""

from __future__ import annotations

import math

import numpy as np

from . import decomposition, fmd, perturbation, synth
from .decomposition import NfmdConfig
from .oscillator import DriveSpec, OscillatorSpec

SUITES = ("tau-sweep", "resolution", "sharp-omega", "sharp-mean")

# --- benchmark oscillator configuration -----------------------------------
BENCH_OMEGA0 = 2.0 * math.pi * 1.0e6  # rad/s
BENCH_BETA = 0.02
BENCH_MASS = 1.0
BENCH_DT_OUT = 5.0e-8  # 20 MHz sampling
BENCH_WINDOW = 20  # 1 us window
BENCH_T_PRIME = 6.0e-5  # onset after the drive transient has decayed
BENCH_SNR_DB = 100.0
BENCH_TAUS = tuple(np.logspace(-7, -3, 8))


def bench_oscillator() -> OscillatorSpec:
    return OscillatorSpec(beta=BENCH_BETA, omega0=BENCH_OMEGA0, mass=BENCH_MASS)


def bench_drive() -> DriveSpec:
    # unit steady-state amplitude at resonance
    alpha = 2.0 * BENCH_BETA * BENCH_MASS * BENCH_OMEGA0**2
    return DriveSpec(alpha=alpha, omega_d=BENCH_OMEGA0)


def bench_gamma() -> float:
    # unit static deflection gamma / (m * omega0^2)
    return BENCH_MASS * BENCH_OMEGA0**2


def bench_nfmd_config() -> NfmdConfig:
    return NfmdConfig(window=BENCH_WINDOW, num_modes=2)


SLOPE_BAND = (2e-6, 1e-3)  # taus where recovery tracks truth (log-log slope ~ 1)
FLOOR_TAU = 2e-7  # below the ~1 us analysis window, estimates flatten near this


def run_tau_sweep(seed: int, taus=BENCH_TAUS) -> list:
    """Rows: (tau_true, tau_est, alpha, rss, status, role, passed).

    Recovery is judged the way the sweep is used: taus inside SLOPE_BAND
    must collectively track truth with a log-log slope of 1 +/- 0.1
    (reported as a trailing summary row), while taus below the analysis
    window must flatten out at or above FLOOR_TAU instead of following
    truth downward. Per-row passes for slope-band rows are a factor-of-2
    sanity check only.
    """
    items = perturbation.tau_sweep(
        osc=bench_oscillator(), drive=bench_drive(), gamma=bench_gamma(),
        t_prime=BENCH_T_PRIME, taus=taus, snr_db=BENCH_SNR_DB,
        nfmd_config=bench_nfmd_config(), seed=seed, dt_out=BENCH_DT_OUT,
    )
    rows = []
    band = []
    for item in items:
        in_band = SLOPE_BAND[0] <= item.tau_true <= SLOPE_BAND[1]
        if in_band:
            band.append((item.tau_true, item.tau_est))
            role = "slope_band"
            passed = bool(0.5 <= item.tau_est / item.tau_true <= 2.0)
        else:
            role = "floor"
            passed = bool(item.tau_est >= FLOOR_TAU)
        rows.append((item.tau_true, item.tau_est, item.alpha, item.rss,
                     item.status, role, passed))
    if len(band) >= 2:
        x = np.log([b[0] for b in band])
        y = np.log([b[1] for b in band])
        slope = float(np.polyfit(x, y, 1)[0])
        rows.append((math.nan, slope, math.nan, math.nan, "slope_1pm0.1",
                     "summary", abs(slope - 1.0) <= 0.1))
    return rows


def run_resolution(window: int = 250, fs: float = 5000.0) -> list:
    """Half-bin tone recovery: rows (offset_bins, freq_true_hz,
    freq_est_hz, error_hz, passed).

    A noiseless tone placed off the FFT grid must be recovered to within
    1e-3 bin widths, far beyond the bin resolution of the seed spectrum.
    """
    bin_hz = fs / window
    dt = 1.0 / fs
    times = (np.arange(window) - (window - 1) / 2.0) * dt
    rows = []
    for offset in (0.25, 0.5, 0.75):
        f_true = (50.0 + offset) * bin_hz
        z = 3.0 * np.cos(2.0 * np.pi * f_true * (np.arange(window) * dt))
        seed_freq = fmd.fft_initial_guess(z, dt, 1)
        fit = fmd.fit_segment(z, times, seed_freq, fmd.FmdConfig())
        f_est = fit.freq[0] / (2.0 * np.pi)
        err = abs(f_est - f_true)
        rows.append((offset, f_true, f_est, err, bool(err <= 1e-3 * bin_hz)))
    return rows


def _decompose_builtin(name: str, snr_db: float, seed: int, stride: int = 5):
    spec = synth.builtin_specs()[name]
    ts = synth.add_noise(synth.generate(spec), snr_db, seed)
    k = len(spec.components) + 1
    cfg = NfmdConfig(window=250, num_modes=k, stride=stride)
    return spec, decomposition.decompose(ts, cfg), cfg


def sharp_omega_metrics(spec, d, cfg) -> tuple:
    """Step-localization metrics (t_leave, t_reach, span, limit) for a
    sharp-omega decomposition.

    The fast-mode track reads 400 Hz before the step; afterwards it must
    join the post-step reference branch within 1.5 window widths. Two
    reference conventions exist for a modulated tone cos(2*pi*f(t)*t) --
    the labeled curve f(t) and its phase derivative f(t) + f'(t)*t --
    and the track is compared against whichever it follows more closely
    over the settled post-step region (the labeled curve reads 410 Hz
    there). t_leave is the last pre-step center within 2 Hz of 400 Hz;
    t_reach is the first later center within 2 Hz of the selected
    post-step reference.
    """
    comp = spec.components[0]  # the stepped fast mode
    track = decomposition.mode_tracks(d)[-1]
    f = track.freq / (2.0 * np.pi)
    centers = track.centers
    refs = (comp.frequency_hz(centers), comp.phase_derivative_hz(centers))
    settled = centers > 0.55
    ref = min(refs, key=lambda r: float(np.sqrt(np.mean((f - r)[settled] ** 2))))
    pre = np.nonzero((np.abs(f - 400.0) <= 2.0) & (centers < 0.55))[0]
    t_a = centers[pre[-1]] if pre.size else np.nan
    post = (
        np.nonzero((np.abs(f - ref) <= 2.0) & (centers > max(t_a, 0.5)))[0]
        if pre.size else np.array([])
    )
    t_b = centers[post[0]] if post.size else np.nan
    limit = 1.5 * cfg.window * d.dt
    return float(t_a), float(t_b), float(t_b - t_a), float(limit)


def run_sharp_omega(seed: int) -> list:
    """Frequency-step localization at SNR=25.

    Single summary row: (t_leave, t_reach, span, limit, passed); the
    fast-mode track must pass from within 2 Hz of 400 Hz onto the
    post-step reference branch across a center-time span of at most 1.5
    window widths around t = 0.5 (see sharp_omega_metrics).
    """
    spec, d, cfg = _decompose_builtin("sharp-omega", snr_db=25.0, seed=seed)
    t_a, t_b, span, limit = sharp_omega_metrics(spec, d, cfg)
    passed = bool(
        np.isfinite(span) and span <= limit
        and t_a <= 0.5 + limit and t_b >= 0.5 - limit
    )
    return [(t_a, t_b, span, limit, passed)]


def run_sharp_mean(seed: int) -> list:
    """Mean-discontinuity tracking at SNR=20.

    Rows: (metric, value, limit, passed) for the range-relative RMS
    error of the instantaneous mean away from the jump and the RMS
    frequency error of the periodic mode against the closer of the two
    instantaneous-frequency conventions.
    """
    spec, d, cfg = _decompose_builtin("sharp-mean", snr_db=20.0, seed=seed)
    centers, mu = decomposition.instantaneous_mean(d)
    ref_mean = spec.mean(centers)
    exclude = np.abs(centers - 0.25) <= cfg.window * d.dt / 2.0
    err = mu[~exclude] - ref_mean[~exclude]
    mean_rms = float(np.sqrt(np.mean(err**2)))
    mean_range = float(ref_mean.max() - ref_mean.min())
    mean_rel = mean_rms / mean_range

    comp = spec.components[0]
    track = decomposition.mode_tracks(d)[-1]
    f = track.freq / (2.0 * np.pi)
    rms_label = min(
        float(np.sqrt(np.mean((f - comp.frequency_hz(centers)) ** 2))),
        float(np.sqrt(np.mean((f - comp.phase_derivative_hz(centers)) ** 2))),
    )
    return [
        ("mean_rms_relative", mean_rel, 0.05, bool(mean_rel <= 0.05)),
        ("freq_rms_hz", rms_label, 2.0, bool(rms_label <= 2.0)),
    ]


def write_table(path, header: list, rows: list) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fields = []
            for x in row:
                if isinstance(x, bool):
                    fields.append("pass" if x else "fail")
                elif isinstance(x, float):
                    fields.append(f"{x:.17g}")
                else:
                    fields.append(str(x))
            fh.write(",".join(fields) + "\n")
