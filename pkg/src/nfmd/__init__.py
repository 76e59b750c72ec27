"""Nonstationary Fourier mode decomposition.

Sliding-window fitting of a small set of Fourier modes by alternating
least-squares coefficient solves and gradient descent on the mode
frequencies, yielding instantaneous frequency, amplitude, and mean of
nonstationary multi-component signals, plus a forced harmonic-oscillator
simulator and a perturbation-model fitter that recovers relaxation time
constants from the instantaneous mean.
"""

__version__ = "0.1.0"

from .decomposition import (
    Decomposition,
    ModeTrack,
    NfmdConfig,
    decompose,
    instantaneous_mean,
    mode_tracks,
    reconstruct_centers,
    segment_indices,
    suggest_num_modes,
)
from .errors import NfmdError
from .estimator import NFMD
from .fmd import (
    FmdConfig,
    SegmentFit,
    design_matrix,
    fft_initial_guess,
    fit_segment,
    objective,
    objective_gradient,
    solve_amplitudes,
)
from .oscillator import (
    DriveSpec,
    ForcingSpec,
    OscillatorSpec,
    PerturbationSpec,
    eval_forcing,
    simulate,
)
from .perturbation import PerturbationFit, fit_perturbation_model, tau_sweep
from .synth import Component, SyntheticSpec, add_noise, builtin_specs, generate
from .timeseries import TimeSeries, read_csv, write_csv

__all__ = [
    "NFMD",
    "TimeSeries",
    "SyntheticSpec",
    "Component",
    "generate",
    "add_noise",
    "builtin_specs",
    "FmdConfig",
    "SegmentFit",
    "design_matrix",
    "solve_amplitudes",
    "objective",
    "objective_gradient",
    "fft_initial_guess",
    "fit_segment",
    "NfmdConfig",
    "Decomposition",
    "ModeTrack",
    "segment_indices",
    "decompose",
    "mode_tracks",
    "instantaneous_mean",
    "reconstruct_centers",
    "suggest_num_modes",
    "OscillatorSpec",
    "DriveSpec",
    "PerturbationSpec",
    "ForcingSpec",
    "eval_forcing",
    "simulate",
    "PerturbationFit",
    "fit_perturbation_model",
    "tau_sweep",
    "read_csv",
    "write_csv",
    "NfmdError",
]
