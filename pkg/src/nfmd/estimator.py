"""Scikit-learn style front end for the sliding-window decomposition."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import decomposition
from .fmd import FmdConfig
from .timeseries import TimeSeries

TWO_PI = 2.0 * np.pi


def _as_signal(X) -> np.ndarray:
    x = np.asarray(X, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty 1-D signal (or an (n, 1) column)")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    return x


class NFMD(TransformerMixin, BaseEstimator):
    """Nonstationary Fourier mode decomposition of a single signal.

    fit(X) decomposes the signal X (1-D array of samples at spacing
    ``sample_spacing`` seconds) and exposes the per-window results as
    fitted attributes. transform(X) decomposes a signal and returns a
    per-window feature matrix [freqs (Hz), amplitudes, mean].

    Parameters
    ----------
    window : int
        Samples per analyzed segment.
    num_modes : int
        Fourier modes fit to each segment.
    stride : int
        Sample offset between successive segments.
    sample_spacing : float
        Seconds between samples.
    tol, rel_tol, max_iters, ridge, omega_min :
        Per-segment fit controls; see :class:`nfmd.fmd.FmdConfig`.
    on_window_error : str
        "raise" aborts on a failed window; "skip" records it and reseeds.

    Attributes
    ----------
    decomposition_ : Decomposition
        Full stacked result for the fitted signal.
    frequencies_ : ndarray of shape (n_windows, num_modes)
        Instantaneous frequencies in Hz, rows sorted ascending.
    amplitudes_ : ndarray of shape (n_windows, num_modes)
    mean_ : ndarray of shape (n_windows,)
    centers_ : ndarray of shape (n_windows,)
        Window-center times in seconds.
    """

    def __init__(
        self,
        window: int = 250,
        num_modes: int = 3,
        stride: int = 1,
        sample_spacing: float = 1.0,
        tol: float = 0.0,
        rel_tol: float = 1e-8,
        max_iters: int = 500,
        ridge: float = 1e-10,
        omega_min: float = 1e-6,
        on_window_error: str = "raise",
    ):
        self.window = window
        self.num_modes = num_modes
        self.stride = stride
        self.sample_spacing = sample_spacing
        self.tol = tol
        self.rel_tol = rel_tol
        self.max_iters = max_iters
        self.ridge = ridge
        self.omega_min = omega_min
        self.on_window_error = on_window_error

    def _config(self) -> decomposition.NfmdConfig:
        return decomposition.NfmdConfig(
            window=self.window,
            num_modes=self.num_modes,
            stride=self.stride,
            fmd=FmdConfig(
                tol=self.tol, rel_tol=self.rel_tol, max_iters=self.max_iters,
                omega_min=self.omega_min, ridge=self.ridge,
            ),
            on_window_error=self.on_window_error,
        )

    def _decompose(self, X) -> decomposition.Decomposition:
        ts = TimeSeries(samples=_as_signal(X), dt=self.sample_spacing)
        return decomposition.decompose(ts, self._config())

    def fit(self, X, y=None):
        d = self._decompose(X)
        tracks = decomposition.mode_tracks(d)
        self.decomposition_ = d
        self.frequencies_ = d.freq / TWO_PI
        self.amplitudes_ = np.column_stack([t.amp for t in tracks])
        self.centers_, self.mean_ = decomposition.instantaneous_mean(d)
        self.residuals_ = d.residuals.copy()
        self.n_windows_ = d.n_seg
        return self

    def transform(self, X):
        d = self._decompose(X)
        tracks = decomposition.mode_tracks(d)
        _, mu = decomposition.instantaneous_mean(d)
        return np.column_stack(
            [d.freq / TWO_PI] + [np.column_stack([t.amp for t in tracks])] + [mu]
        )

    def mode_tracks(self):
        if not hasattr(self, "decomposition_"):
            raise NotFittedError("NFMD instance is not fitted yet")
        return decomposition.mode_tracks(self.decomposition_)
