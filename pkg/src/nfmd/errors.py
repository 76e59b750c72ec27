"""Exception hierarchy for the nfmd package."""


class NfmdError(Exception):
    """Base class for all nfmd errors."""


class GenerationError(NfmdError):
    """A synthetic spec evaluated to a non-finite value on the sample grid."""


class UndefinedSnrError(NfmdError):
    """SNR calibration requested for a zero-energy signal."""


class NonUniformTimeError(NfmdError):
    """Ingested time column is not strictly increasing and uniform."""


class UnderdeterminedSegmentError(NfmdError):
    """Segment has fewer samples than fitted parameters (n < 2K)."""


class SingularBasisError(NfmdError):
    """Trigonometric basis is numerically singular even with ridge."""

    def __init__(self, message, duplicate_pairs=None):
        super().__init__(message)
        self.duplicate_pairs = duplicate_pairs or []


class DivergenceError(NfmdError):
    """Objective became non-finite during frequency descent."""

    def __init__(self, message, last_fit=None):
        super().__init__(message)
        self.last_fit = last_fit


class SignalTooShortError(NfmdError):
    """Window is longer than the signal."""


class WindowFitError(NfmdError):
    """A window failed to fit during sliding-window decomposition."""

    def __init__(self, message, window_index):
        super().__init__(message)
        self.window_index = window_index


class OnsetNotFoundError(NfmdError):
    """Free-onset perturbation fit found no point above the noise floor."""


class ConfigError(NfmdError):
    """Invalid configuration value or unparseable config file."""
