"""Synthetic nonstationary test signals and calibrated noise injection.

Signals have the form ``z(t) = mu(t) + sum_l A_l(t) * cos(2*pi*f_l(t)*t)``
with closed-form amplitude, frequency (Hz), and mean functions of time.
The frequency function multiplies t inside the cosine, so the phase
derivative of a component is ``f(t) + t*f'(t)``, not ``f(t)``; both
reference curves are exposed for benchmarking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, UndefinedSnrError
from .timeseries import TimeSeries


# ---------------------------------------------------------------------------
# Closed-form time functions
# ---------------------------------------------------------------------------

class TimeFunction:
    """A declared closed-form function of time, vectorized over t."""

    def __call__(self, t):
        raise NotImplementedError

    def derivative(self, t):
        """df/dt, used to build phase-derivative reference curves."""
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(TimeFunction):
    value: float

    def __call__(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Polynomial(TimeFunction):
    """coeffs[0] + coeffs[1]*t + coeffs[2]*t**2 + ..."""

    coeffs: tuple

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.coeffs)

    def derivative(self, t):
        d = tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0.0,)
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), d)


def Linear(intercept: float, slope: float) -> Polynomial:
    return Polynomial((float(intercept), float(slope)))


@dataclass(frozen=True)
class Exponential(TimeFunction):
    """offset + scale * exp(-t / tau)."""

    offset: float
    scale: float
    tau: float

    def __call__(self, t):
        return self.offset + self.scale * np.exp(-np.asarray(t, dtype=float) / self.tau)

    def derivative(self, t):
        return -(self.scale / self.tau) * np.exp(-np.asarray(t, dtype=float) / self.tau)


@dataclass(frozen=True)
class Sinusoid(TimeFunction):
    """amplitude * sin(omega*t + phase); omega in rad/s."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float) + self.phase)

    def derivative(self, t):
        return self.amplitude * self.omega * np.cos(
            self.omega * np.asarray(t, dtype=float) + self.phase
        )


@dataclass(frozen=True)
class SmoothStep(TimeFunction):
    """base + jump * H(t - t_step) * (1 - exp(-(t - t_step)/tau)).

    Heaviside is closed-left: the step branch is active for t >= t_step
    (where it evaluates to 0 at t = t_step, so the function is continuous).
    """

    base: float
    jump: float
    t_step: float
    tau: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        dt = t - self.t_step
        rise = np.where(dt >= 0, -np.expm1(-np.maximum(dt, 0.0) / self.tau), 0.0)
        return self.base + self.jump * rise

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        dt = t - self.t_step
        return np.where(
            dt >= 0, (self.jump / self.tau) * np.exp(-np.maximum(dt, 0.0) / self.tau), 0.0
        )


@dataclass(frozen=True)
class Piecewise(TimeFunction):
    """left(t) for t <= breakpoint, right(t) for t > breakpoint (closed-left)."""

    breakpoint: float
    left: TimeFunction
    right: TimeFunction

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= self.breakpoint, self.left(t), self.right(t))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= self.breakpoint, self.left.derivative(t), self.right.derivative(t))


# ---------------------------------------------------------------------------
# Synthetic specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    """One periodic component A(t) * cos(2*pi*f(t)*t)."""

    amplitude: TimeFunction
    frequency_hz: TimeFunction

    def phase_derivative_hz(self, t):
        """Instantaneous frequency by the phase-derivative convention:
        (1/2pi) d/dt [2pi f(t) t] = f(t) + t f'(t)."""
        t = np.asarray(t, dtype=float)
        return self.frequency_hz(t) + t * self.frequency_hz.derivative(t)


@dataclass(frozen=True)
class SyntheticSpec:
    """Declarative description of a synthetic nonstationary signal."""

    components: tuple
    mean: TimeFunction
    duration: float
    dt: float
    name: str = ""

    def __post_init__(self):
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")
        object.__setattr__(self, "components", tuple(self.components))


def generate(spec: SyntheticSpec, t0: float = 0.0) -> TimeSeries:
    """Sample a spec's closed form on the uniform grid.

    Returns floor(duration/dt) + 1 samples; sample i is the closed form
    evaluated at t0 + i*dt.
    """
    n = int(math.floor(spec.duration / spec.dt + 1e-9)) + 1
    t = t0 + np.arange(n) * spec.dt
    z = np.asarray(spec.mean(t), dtype=float)
    if not np.all(np.isfinite(z)):
        bad = t[~np.isfinite(z)][0]
        raise GenerationError(f"mean function is non-finite at t={bad:g}")
    for idx, comp in enumerate(spec.components):
        amp = np.asarray(comp.amplitude(t), dtype=float)
        freq = np.asarray(comp.frequency_hz(t), dtype=float)
        term = amp * np.cos(2.0 * np.pi * freq * t)
        if not np.all(np.isfinite(term)):
            bad = t[~np.isfinite(term)][0]
            raise GenerationError(f"component {idx} is non-finite at t={bad:g}")
        if np.any(freq < 0):
            bad = t[freq < 0][0]
            raise GenerationError(
                f"component {idx} frequency is negative at t={bad:g}"
            )
        z = z + term
    return TimeSeries(samples=z, dt=spec.dt, t0=t0)


def add_noise(z: TimeSeries, snr_db: float, seed: int) -> TimeSeries:
    """Add white Gaussian noise rescaled to an exact energy ratio.

    The realized ratio ||noise||^2 / ||z||^2 equals 10**(-snr_db/10)
    exactly (up to rounding), so 10*log10(||z||^2/||noise||^2) = snr_db.
    snr_db = +inf is the no-noise sentinel and returns the input unchanged.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return z
    signal_energy = float(np.dot(z.samples, z.samples))
    if signal_energy == 0.0:
        raise UndefinedSnrError("SNR is undefined for a zero-energy signal")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(z.n)
    target_energy = signal_energy * 10.0 ** (-snr_db / 10.0)
    noise *= math.sqrt(target_energy / float(np.dot(noise, noise)))
    return z.with_samples(z.samples + noise)


# ---------------------------------------------------------------------------
# Built-in benchmark specs
# ---------------------------------------------------------------------------

_BENCH_DURATION = 1.0
_BENCH_DT = 2e-4


def builtin_specs() -> dict:
    """The three benchmark signals, each 1 s at dt = 2e-4 s.

    "example": two chirping tones (near 360 Hz and 80 Hz) on a decaying
    exponential mean. "sharp-omega": abrupt frequency step of the fast
    tone at t = 0.5 s. "sharp-mean": jump discontinuity of the mean at
    t = 0.25 s under a single quadratic chirp.
    """
    mean_exp = Exponential(offset=1.5, scale=2.5, tau=1.5)
    example = SyntheticSpec(
        name="example",
        components=(
            Component(Exponential(1.0, 0.5, 3.0), Exponential(360.0, -10.0, 0.5)),
            Component(Exponential(8.0, -0.5, 1.0), Linear(80.0, -2.0)),
        ),
        mean=mean_exp,
        duration=_BENCH_DURATION,
        dt=_BENCH_DT,
    )
    sharp_omega = SyntheticSpec(
        name="sharp-omega",
        components=(
            Component(
                Exponential(2.0, 1.0, 4.0),
                SmoothStep(base=400.0, jump=10.0, t_step=0.5, tau=0.1),
            ),
            Component(Linear(2.0, 2.0), Linear(60.0, -1.0)),
        ),
        mean=mean_exp,
        duration=_BENCH_DURATION,
        dt=_BENCH_DT,
    )
    sharp_mean = SyntheticSpec(
        name="sharp-mean",
        components=(
            Component(Exponential(5.0, -0.5, 3.0), Polynomial((245.0, 0.0, 10.0))),
        ),
        mean=Piecewise(
            breakpoint=0.25,
            left=Sinusoid(amplitude=1.0, omega=2.0),
            right=Sinusoid(amplitude=-2.5, omega=1.0, phase=np.pi / 2.0),
        ),
        duration=_BENCH_DURATION,
        dt=_BENCH_DT,
    )
    return {"example": example, "sharp-omega": sharp_omega, "sharp-mean": sharp_mean}
