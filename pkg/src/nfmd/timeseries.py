"""Uniformly sampled real-valued time series with CSV round-tripping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUniformTimeError

# Accepted relative jitter in the ingested time column.
_JITTER_TOL = 1e-6


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled signal.

    Parameters
    ----------
    samples : ndarray
        Signal values.
    dt : float
        Sampling interval in seconds, strictly positive.
    t0 : float
        Time of the first sample in seconds.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise ValueError(f"dt must be finite and positive, got {self.dt}")
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def fs(self) -> float:
        """Sampling frequency in Hz."""
        return 1.0 / self.dt

    @property
    def duration(self) -> float:
        """Total span (n - 1) * dt in seconds."""
        return (self.n - 1) * self.dt

    def times(self) -> np.ndarray:
        """Time of sample i is exactly t0 + i * dt."""
        return self.t0 + np.arange(self.n) * self.dt

    def with_samples(self, samples: np.ndarray) -> "TimeSeries":
        return TimeSeries(samples=np.asarray(samples, dtype=float), dt=self.dt, t0=self.t0)


def write_csv(ts: TimeSeries, path) -> None:
    """Write a two-column ``time,value`` CSV with round-trip precision."""
    times = ts.times()
    with open(path, "w") as fh:
        fh.write("time,value\n")
        for t, v in zip(times, ts.samples):
            fh.write(f"{t:.17g},{v:.17g}\n")


def read_csv(path) -> TimeSeries:
    """Read a ``time,value`` CSV, rejecting non-uniform time grids.

    The time column must be strictly increasing and uniform to within
    1e-6 relative jitter.
    """
    data = np.genfromtxt(path, delimiter=",", skip_header=1, dtype=float)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    if data.shape[0] < 2 or data.shape[1] < 2 or not np.all(np.isfinite(data)):
        raise NonUniformTimeError(f"{path}: expected >= 2 rows of finite time,value pairs")
    times, values = data[:, 0], data[:, 1]
    diffs = np.diff(times)
    if np.any(diffs <= 0):
        raise NonUniformTimeError(f"{path}: time column is not strictly increasing")
    dt = (times[-1] - times[0]) / (times.size - 1)
    if np.max(np.abs(diffs - dt)) > _JITTER_TOL * dt:
        raise NonUniformTimeError(
            f"{path}: time column jitter exceeds {_JITTER_TOL:g} relative"
        )
    return TimeSeries(samples=values, dt=dt, t0=times[0])
