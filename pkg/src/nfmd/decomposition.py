"""Sliding-window decomposition and instantaneous quantities.

Every window of ``window`` consecutive samples is fit by the per-segment
alternation in :mod:`nfmd.fmd`; the learned frequency vector of each
window seeds the next (warm start), with an FFT-seeded refit whenever
the warm chain does worse than the window's own FFT-bin least-squares
fit. Stacking the per-window fits gives
the frequency matrix, coefficient matrix, and residual vector from which
instantaneous frequency, amplitude, and mean are read off.

Windows are fit in a local time coordinate centered on the window
midpoint, so the mean-designated mode evaluated at the window center is
simply its cosine coefficient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import fmd
from .errors import NfmdError, SignalTooShortError, WindowFitError
from .timeseries import TimeSeries

_FAILED = "failed"


@dataclass(frozen=True)
class NfmdConfig:
    """Window geometry and per-segment fit configuration.

    mean_mode_index designates which (frequency-sorted) mode carries the
    nonstationary mean; the default 0 is the lowest-frequency mode.
    """

    window: int
    num_modes: int
    stride: int = 1
    fmd: fmd.FmdConfig = field(default_factory=fmd.FmdConfig)
    mean_mode_index: int = 0
    on_window_error: str = "raise"  # or "skip": record a failed row, reseed from FFT

    def __post_init__(self):
        if self.num_modes < 1:
            raise ValueError("num_modes must be >= 1")
        if self.window < 2 * self.num_modes + 2:
            raise ValueError(
                f"window ({self.window}) must be >= 2*num_modes + 2 "
                f"({2 * self.num_modes + 2})"
            )
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not 0 <= self.mean_mode_index < self.num_modes:
            raise ValueError("mean_mode_index out of range")
        if self.on_window_error not in ("raise", "skip"):
            raise ValueError("on_window_error must be 'raise' or 'skip'")


@dataclass(frozen=True)
class Decomposition:
    """Stacked per-window fits.

    freq : (n_seg, K) frequencies in rad/s, each row sorted ascending.
    coef : (n_seg, 2K) coefficients, cosine block then sine block.
    residuals : (n_seg,) squared-error residual per window.
    centers : (n_seg,) window-midpoint times in seconds.
    statuses : per-window stop status strings.
    """

    freq: np.ndarray
    coef: np.ndarray
    residuals: np.ndarray
    centers: np.ndarray
    window: int
    stride: int
    dt: float
    statuses: tuple

    @property
    def n_seg(self) -> int:
        return self.freq.shape[0]

    @property
    def num_modes(self) -> int:
        return self.freq.shape[1]


@dataclass(frozen=True)
class ModeTrack:
    """Instantaneous frequency and amplitude of one mode across windows."""

    mode_index: int
    freq: np.ndarray
    amp: np.ndarray
    centers: np.ndarray


def segment_indices(n: int, window: int, stride: int = 1) -> list:
    """(start, end) index pairs of the sliding windows.

    There are floor((n - window)/stride) + 1 windows; with stride 1 that
    is n - window + 1.
    """
    if window > n:
        raise SignalTooShortError(f"window ({window}) exceeds signal length ({n})")
    count = (n - window) // stride + 1
    return [(i * stride, i * stride + window) for i in range(count)]


def _local_times(window: int, dt: float) -> np.ndarray:
    return (np.arange(window) - (window - 1) / 2.0) * dt


def _candidate_seeds(seg, dt, k, omega_min, fitted_freq):
    """Cold seeds used to safeguard the warm chain on one window.

    The second candidate keeps the refined periodic frequencies but
    re-anchors the lowest slot near zero: the nonstationary mean rarely
    shows a distinct spectral peak, so once the lowest mode locks onto a
    noise feature neither the descent nor an FFT reseed can bring it
    back to the mean-tracking basin.
    """
    fft_seed = fmd.fft_initial_guess(seg, dt, k, omega_min)
    anchored = np.sort(np.concatenate(([omega_min], fitted_freq[1:])))
    return fft_seed, anchored


def _decompose_range(z, dt, t0, indices, config, seed_freq):
    """Sequential warm-started fits over one run of windows.

    The warm chain is safeguarded: each window is also scored at two
    cold candidate seeds -- its own FFT-peak frequencies, and a
    mean-anchored variant with the lowest slot pinned near zero (the
    nonstationary mean rarely shows a distinct spectral peak, so the
    FFT alone cannot re-seed it). Whenever a candidate's plain
    least-squares fit already beats the warm-started descent, the window
    is refit from that candidate and the lower-residual fit is kept.
    This bounds every stored residual by the FFT-bin fit of its window
    and lets the chain recover after locking onto a noise feature,
    without touching windows where the warm start is the better basin.
    """
    k = config.num_modes
    times = _local_times(config.window, dt)
    freq = np.empty((len(indices), k))
    coef = np.empty((len(indices), 2 * k))
    residuals = np.empty(len(indices))
    centers = np.empty(len(indices))
    statuses = []
    guess = seed_freq
    for row, (start, end) in enumerate(indices):
        seg = z[start:end]
        centers[row] = t0 + (start + (config.window - 1) / 2.0) * dt
        if guess is None:  # previous window failed: reseed from this window's FFT
            guess = fmd.fft_initial_guess(seg, dt, k, config.fmd.omega_min)
        try:
            fit = fmd.fit_segment(seg, times, guess, config.fmd)
            for cand in _candidate_seeds(
                seg, dt, k, config.fmd.omega_min, fit.freq
            ):
                if np.array_equal(cand, guess):
                    continue
                point = fmd._eval_point(
                    seg, cand, times, config.fmd.ridge * seg.size
                )
                if point is not None and point[-1] < fit.residual:
                    refit = fmd.fit_segment(seg, times, cand, config.fmd)
                    if refit.residual < fit.residual:
                        fit = refit
        except NfmdError as exc:
            if config.on_window_error == "raise":
                raise WindowFitError(
                    f"window {start}:{end} failed to fit: {exc}", window_index=row
                ) from exc
            freq[row] = np.nan
            coef[row] = np.nan
            residuals[row] = np.nan
            statuses.append(_FAILED)
            guess = None
            continue
        freq[row] = fit.freq
        coef[row] = fit.coef
        residuals[row] = fit.residual
        statuses.append(fit.status)
        guess = fit.freq
    return freq, coef, residuals, centers, statuses


def decompose(
    z: TimeSeries,
    config: NfmdConfig,
    warm_start: bool = True,
    chunks: int | None = None,
) -> Decomposition:
    """Fit every sliding window of the signal.

    The first window is seeded from its FFT magnitude spectrum; each
    subsequent window is seeded from the previous window's learned
    frequencies. With ``warm_start=False`` every window is FFT-seeded
    independently. ``chunks`` splits the signal into that many
    consecutive runs, FFT-seeding each run head and warm-starting within
    runs; on stationary signals the result matches the fully sequential
    decomposition.
    """
    indices = segment_indices(z.n, config.window, config.stride)
    k = config.num_modes

    if not warm_start:
        runs = [[pair] for pair in indices]
    elif chunks and chunks > 1:
        bounds = np.linspace(0, len(indices), min(chunks, len(indices)) + 1).astype(int)
        runs = [indices[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    else:
        runs = [indices]

    parts = []
    for run in runs:
        head = z.samples[run[0][0]:run[0][1]]
        seed = fmd.fft_initial_guess(head, z.dt, k, config.fmd.omega_min)
        parts.append(_decompose_range(z.samples, z.dt, z.t0, run, config, seed))

    freq = np.vstack([p[0] for p in parts])
    coef = np.vstack([p[1] for p in parts])
    residuals = np.concatenate([p[2] for p in parts])
    centers = np.concatenate([p[3] for p in parts])
    statuses = tuple(s for p in parts for s in p[4])
    return Decomposition(
        freq=freq, coef=coef, residuals=residuals, centers=centers,
        window=config.window, stride=config.stride, dt=z.dt, statuses=statuses,
    )


def mode_tracks(d: Decomposition) -> list:
    """Per-mode instantaneous frequency and amplitude vectors.

    Amplitude of mode k in window i is sqrt(a_{k,i}^2 + b_{k,i}^2).
    Tracks follow the per-row sorted frequency order; crossovers are not
    re-matched.
    """
    k = d.num_modes
    a, b = d.coef[:, :k], d.coef[:, k:]
    amp = np.hypot(a, b)
    return [
        ModeTrack(mode_index=i, freq=d.freq[:, i], amp=amp[:, i], centers=d.centers)
        for i in range(k)
    ]


def instantaneous_mean(d: Decomposition, mean_mode_index: int = 0):
    """Mean-designated mode evaluated at each window's center time.

    In the centered local coordinate the center is t = 0, so the value
    is the mode's cosine coefficient. Returns (centers, mu).
    """
    return d.centers.copy(), d.coef[:, mean_mode_index].copy()


def reconstruct_centers(d: Decomposition):
    """Sum of all modes at each window center: sum_k a_{k,i}.

    Returns (centers, values); used for residual diagnostics.
    """
    return d.centers.copy(), d.coef[:, : d.num_modes].sum(axis=1)


def suggest_num_modes(z: TimeSeries, rel_threshold: float = 0.05) -> int:
    """Suggest K by counting prominent maxima of the magnitude spectrum.

    Counts interior local maxima of |rfft(z)| (DC excluded) whose height
    is at least rel_threshold times the tallest one. A heuristic only:
    the mean mode often lacks a distinct peak and crowded spectra merge
    peaks, so the suggestion should be inspected, not trusted.
    """
    mag = np.abs(np.fft.rfft(z.samples))
    peaks = [
        mag[i]
        for i in range(1, mag.size - 1)
        if mag[i] > mag[i - 1] and mag[i] >= mag[i + 1]
    ]
    if not peaks:
        return 1
    tallest = max(peaks)
    return max(1, sum(1 for p in peaks if p >= rel_threshold * tallest))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def to_json_dict(d: Decomposition, num_modes: int | None = None, config_hash: str = "") -> dict:
    """JSON document with frequencies converted to Hz at 12 significant
    digits; the internal representation stays in rad/s."""
    k = num_modes or d.num_modes
    two_pi = 2.0 * np.pi
    return {
        "meta": {
            "dt": d.dt,
            "window": d.window,
            "stride": d.stride,
            "K": k,
            "config_hash": config_hash,
        },
        "centers": [float(c) for c in d.centers],
        "freq_hz": [[_sig12(w / two_pi) for w in row] for row in d.freq],
        "coef": [[float(c) for c in row] for row in d.coef],
        "residuals": [float(r) for r in d.residuals],
        "statuses": list(d.statuses),
    }


def write_json(d: Decomposition, path, config_hash: str = "") -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(d, config_hash=config_hash), fh, indent=1)
        fh.write("\n")


def write_flat_csv(d: Decomposition, path) -> None:
    """One row per window: center, K frequencies (Hz), K amplitudes,
    mean, residual."""
    k = d.num_modes
    tracks = mode_tracks(d)
    _, mu = instantaneous_mean(d)
    header = (
        ["center"]
        + [f"freq{i}_hz" for i in range(k)]
        + [f"amp{i}" for i in range(k)]
        + ["mean", "residual"]
    )
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in range(d.n_seg):
            fields = [d.centers[row]]
            fields += [tracks[i].freq[row] / (2.0 * np.pi) for i in range(k)]
            fields += [tracks[i].amp[row] for i in range(k)]
            fields += [mu[row], d.residuals[row]]
            fh.write(",".join(f"{x:.17g}" for x in fields) + "\n")
