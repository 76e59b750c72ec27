"""Fourier mode fitting of a single signal segment.

A segment is modeled as ``y(t) = sum_k a_k cos(w_k t) + b_k sin(w_k t)``.
For a fixed frequency vector the coefficients are a (ridge-stabilized)
linear least-squares solve; the frequencies are then refined by scaled
gradient descent with an Armijo backtracking line search that re-solves
the coefficients at every trial point. The alternation is seeded from
the FFT magnitude spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, SingularBasisError, UnderdeterminedSegmentError

DEFAULT_OMEGA_MIN = 1e-6  # rad/s floor; a zero-frequency sine column is singular
_ARMIJO = 1e-4
_MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class FmdConfig:
    """Stopping and conditioning knobs for the per-segment fit.

    tol is the absolute residual target of the alternating loop (squared
    signal units). Since that alone cannot terminate on noisy data, a
    relative-improvement stop and an iteration cap are always active.
    ridge is scaled by the segment length before entering the coefficient
    solve.
    """

    tol: float = 0.0
    rel_tol: float = 1e-8
    max_iters: int = 500
    omega_min: float = DEFAULT_OMEGA_MIN
    ridge: float = 1e-10

    def __post_init__(self):
        if self.tol < 0 or self.rel_tol <= 0 or self.ridge < 0:
            raise ValueError("tol and ridge must be >= 0, rel_tol > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.omega_min <= 0:
            raise ValueError("omega_min must be > 0")


@dataclass(frozen=True)
class SegmentFit:
    """Result of fitting one segment.

    freq : (K,) frequencies in rad/s, sorted ascending.
    coef : (2K,) coefficients, cosine block then sine block, permuted
        consistently with freq.
    residual : value of the squared-error objective at (coef, freq).
    status : which stop fired ("converged_tol", "converged_rel",
        "max_iters").
    """

    freq: np.ndarray
    coef: np.ndarray
    residual: float
    iterations: int
    status: str


def design_matrix(freq: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Basis matrix with columns cos(w_j t) for j < K then sin(w_j t).

    Raises UnderdeterminedSegmentError when len(times) < 2K.
    """
    freq = np.atleast_1d(np.asarray(freq, dtype=float))
    times = np.asarray(times, dtype=float)
    k = freq.size
    if times.size < 2 * k:
        raise UnderdeterminedSegmentError(
            f"segment of {times.size} samples cannot fit {k} modes (need >= {2 * k})"
        )
    phase = np.outer(times, freq)
    return np.hstack([np.cos(phase), np.sin(phase)])


def solve_amplitudes(
    z_seg: np.ndarray, freq: np.ndarray, times: np.ndarray, ridge: float = 0.0
) -> np.ndarray:
    """Least-squares coefficients minimizing ||z - M a||^2 + ridge*||a||^2.

    Solved through the augmented matrix [M; sqrt(ridge) I] for stability;
    the result equals the normal-equation solution
    (M'M + ridge I) a = M'z. Raises SingularBasisError naming nearly
    duplicate frequencies if the solve degenerates.
    """
    z_seg = np.asarray(z_seg, dtype=float)
    freq = np.atleast_1d(np.asarray(freq, dtype=float))
    pairs = [
        (float(freq[i]), float(freq[j]))
        for i in range(freq.size)
        for j in range(i + 1, freq.size)
        if abs(freq[i] - freq[j]) <= 1e-9 * max(1.0, abs(freq[i]))
    ]
    if pairs:
        raise SingularBasisError(
            f"singular trigonometric basis; nearly duplicate frequencies: {pairs}",
            duplicate_pairs=pairs,
        )
    m = design_matrix(freq, times)
    if ridge > 0:
        aug = np.vstack([m, np.sqrt(ridge) * np.eye(m.shape[1])])
        rhs = np.concatenate([z_seg, np.zeros(m.shape[1])])
    else:
        aug, rhs = m, z_seg
    coef, _, rank, _ = np.linalg.lstsq(aug, rhs, rcond=None)
    if not np.all(np.isfinite(coef)) or (ridge == 0 and rank < m.shape[1]):
        raise SingularBasisError(
            f"singular trigonometric basis (rank {rank} < {m.shape[1]})",
            duplicate_pairs=pairs,
        )
    return coef


def objective(
    z_seg: np.ndarray, coef: np.ndarray, freq: np.ndarray, times: np.ndarray
) -> float:
    """Squared-error objective sum_t (z_t - y_t)^2."""
    r = np.asarray(z_seg, dtype=float) - design_matrix(freq, times) @ np.asarray(coef, dtype=float)
    return float(np.dot(r, r))


def objective_gradient(
    z_seg: np.ndarray, coef: np.ndarray, freq: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Analytic gradient of the objective with respect to each frequency.

    dE/dw_k = sum_t 2 (y_t - z_t) * t * (-a_k sin(w_k t) + b_k cos(w_k t)).
    """
    freq = np.atleast_1d(np.asarray(freq, dtype=float))
    times = np.asarray(times, dtype=float)
    coef = np.asarray(coef, dtype=float)
    k = freq.size
    a, b = coef[:k], coef[k:]
    phase = np.outer(times, freq)
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    y = cos_p @ a + sin_p @ b
    r = y - np.asarray(z_seg, dtype=float)
    dy_dw = times[:, None] * (-a[None, :] * sin_p + b[None, :] * cos_p)
    return 2.0 * (r @ dy_dw)


def fft_initial_guess(z_seg: np.ndarray, dt: float, num_modes: int,
                      omega_min: float = DEFAULT_OMEGA_MIN) -> np.ndarray:
    """Seed frequencies from the K largest local maxima of the magnitude
    spectrum, in rad/s, sorted ascending.

    A dominant DC bin counts as a peak (it becomes the low-frequency
    mean proxy, clamped up to omega_min). Equal-magnitude peaks break
    ties toward the lower frequency. If fewer than K local maxima exist,
    remaining slots are filled from the low-frequency ladder
    omega_min * 2**j, which seeds the mean-tracking mode for signals
    without a distinct low-frequency peak.
    """
    z_seg = np.asarray(z_seg, dtype=float)
    n = z_seg.size
    mag = np.abs(np.fft.rfft(z_seg))
    # local maxima of the magnitude spectrum; the edge bins qualify when
    # they dominate their single neighbor
    peaks = []
    if mag.size > 1 and mag[0] >= mag[1]:
        peaks.append(0)
    for i in range(1, mag.size - 1):
        if mag[i] > mag[i - 1] and mag[i] >= mag[i + 1]:
            peaks.append(i)
    if mag.size > 1 and mag[-1] > mag[-2]:
        peaks.append(mag.size - 1)
    peaks.sort(key=lambda i: (-mag[i], i))
    bin_width = 2.0 * np.pi / (n * dt)
    chosen = [i * bin_width for i in peaks[:num_modes]]
    j = 0
    while len(chosen) < num_modes:
        candidate = omega_min * 2.0**j
        if all(abs(candidate - w) > 1e-12 for w in chosen):
            chosen.append(candidate)
        j += 1
    nyquist = np.pi / dt
    return np.sort(np.clip(np.asarray(chosen, dtype=float), omega_min, nyquist))


def _eval_point(z_seg, freq, times, ridge):
    """Solve the ridge normal equations at one frequency vector.

    Returns (cos_p, sin_p, coef, resid, energy), or None when the gram
    matrix is numerically singular (the caller treats that as a rejected
    trial). The normal-equation solve matches solve_amplitudes on any
    system healthy enough to pass through it.
    """
    phase = np.multiply.outer(times, freq)
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    m = np.concatenate((cos_p, sin_p), axis=1)
    gram = m.T @ m
    gram.flat[:: m.shape[1] + 1] += ridge
    try:
        coef = np.linalg.solve(gram, z_seg @ m)
    except np.linalg.LinAlgError:
        return None
    r = m @ coef - z_seg
    return cos_p, sin_p, coef, r, float(r @ r)


def _grad_and_curvature(r, coef, cos_p, sin_p, times):
    """Gradient and Gauss-Newton diagonal curvature of E w.r.t. omega."""
    k = cos_p.shape[1]
    a, b = coef[:k], coef[k:]
    jac = times[:, None] * (cos_p * b - sin_p * a)
    grad = 2.0 * (r @ jac)
    curv = 2.0 * np.einsum("ij,ij->j", jac, jac)
    return grad, curv


def _sorted_fit(freq, coef, residual, iterations, status):
    order = np.argsort(freq, kind="stable")
    k = freq.size
    coef = np.concatenate([coef[:k][order], coef[k:][order]])
    return SegmentFit(
        freq=freq[order], coef=coef, residual=residual,
        iterations=iterations, status=status,
    )


def fit_segment(
    z_seg: np.ndarray,
    times: np.ndarray,
    freq_init: np.ndarray,
    config: FmdConfig = FmdConfig(),
) -> SegmentFit:
    """Alternating coefficient solve / frequency descent on one segment.

    Each iteration takes a gradient step on the frequency vector, scaled
    per coordinate by the Gauss-Newton diagonal so a unit step is
    Newton-like on well-separated modes, with Armijo backtracking
    (factor 1e-4, halving). Trial points are scored after re-solving the
    coefficients at the trial frequencies, so the line search descends
    the same profile the alternation actually follows. Single-iteration
    frequency moves are capped at half a resolution bin (pi over the
    segment time span) to keep steps inside the current correlation
    lobe. The residual is non-increasing across accepted iterations and
    never exceeds the residual of the initial guess. Frequencies are
    clamped to [omega_min, pi/dt] and the returned fit is canonicalized
    to ascending frequency order.
    """
    z_seg = np.asarray(z_seg, dtype=float)
    times = np.asarray(times, dtype=float)
    k = np.atleast_1d(np.asarray(freq_init, dtype=float)).size
    if times.size < 2 * k:
        raise UnderdeterminedSegmentError(
            f"segment of {times.size} samples cannot fit {k} modes (need >= {2 * k})"
        )
    dt = float(times[1] - times[0]) if times.size > 1 else 1.0
    nyquist = np.pi / dt
    lo, hi = config.omega_min, nyquist
    span = float(times[-1] - times[0]) if times.size > 1 else 1.0
    # largest per-iteration frequency move: half a resolution bin. The
    # correlation objective ripples on the bin scale, so longer jumps can
    # leap from the main lobe of one mode onto a side lobe of another.
    max_move = np.pi / span

    freq = np.sort(np.clip(np.atleast_1d(np.asarray(freq_init, dtype=float)), lo, hi))
    ridge = config.ridge * z_seg.size

    start = _eval_point(z_seg, freq, times, ridge)
    if start is None:
        # singular gram matrix at the seed: let the lstsq-based solver
        # produce the diagnostic (or a least-norm solution)
        coef = solve_amplitudes(z_seg, freq, times, ridge)
        phase = np.multiply.outer(times, freq)
        cos_p, sin_p = np.cos(phase), np.sin(phase)
        resid = cos_p @ coef[:k] + sin_p @ coef[k:] - z_seg
        energy = float(resid @ resid)
    else:
        cos_p, sin_p, coef, resid, energy = start
    if not np.isfinite(energy):
        raise DivergenceError(
            "objective non-finite at the initial guess",
            last_fit=_sorted_fit(freq, coef, energy, 0, "diverged"),
        )

    step = 1.0
    status = "max_iters"
    iterations = 0

    for iterations in range(1, config.max_iters + 1):
        if energy <= config.tol:
            status = "converged_tol"
            iterations -= 1
            break
        grad, curv = _grad_and_curvature(resid, coef, cos_p, sin_p, times)
        if not np.any(grad):
            status = "converged_rel"
            iterations -= 1
            break
        direction = grad / np.maximum(curv, 1e-12 * max(float(curv.max()), 1.0))
        step = min(
            step * 2.0, 4.0,
            max_move / max(float(np.abs(direction).max()), np.finfo(float).tiny),
        )

        # backtracking on the re-solved objective, honoring the clamp
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            trial = np.clip(freq - step * direction, lo, hi)
            move = freq - trial
            slope = float(np.dot(grad, move))
            if slope <= 0.0:
                break
            cand = _eval_point(z_seg, trial, times, ridge)
            if cand is None:
                step *= 0.5
                continue
            e_trial = cand[4]
            if not np.isfinite(e_trial):
                raise DivergenceError(
                    "objective became non-finite during frequency descent",
                    last_fit=_sorted_fit(freq, coef, energy, iterations, "diverged"),
                )
            if e_trial <= energy - _ARMIJO * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "converged_rel"
            iterations -= 1
            break

        improvement = energy - e_trial
        freq = trial
        cos_p, sin_p, coef, resid, energy = cand
        if energy <= config.tol:
            status = "converged_tol"
            break
        if improvement < config.rel_tol * max(energy, np.finfo(float).tiny):
            status = "converged_rel"
            break

    return _sorted_fit(freq, coef, energy, iterations, status)
