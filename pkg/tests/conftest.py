"""Shared fixtures.

The sliding-window decompositions of the benchmark signals dominate the
suite's runtime, so they are computed once per session and shared
between the unit tests and the acceptance criteria.
"""

import numpy as np
import pytest

import nfmd

BENCH_STRIDE = 5  # acceptance criterion 4 explicitly permits stride 5


@pytest.fixture(scope="session")
def example_spec():
    return nfmd.builtin_specs()["example"]


@pytest.fixture(scope="session")
def example_ts(example_spec):
    return nfmd.generate(example_spec)


def _decompose_builtin(name, snr_db, seed=0):
    spec = nfmd.builtin_specs()[name]
    ts = nfmd.add_noise(nfmd.generate(spec), snr_db, seed)
    k = len(spec.components) + 1
    cfg = nfmd.NfmdConfig(window=250, num_modes=k, stride=BENCH_STRIDE)
    return spec, cfg, nfmd.decompose(ts, cfg)


@pytest.fixture(scope="session")
def example_decomp(example_ts):
    cfg = nfmd.NfmdConfig(window=250, num_modes=3, stride=BENCH_STRIDE)
    return cfg, nfmd.decompose(example_ts, cfg)


@pytest.fixture(scope="session")
def example_snr35_decomp(example_ts):
    noisy = nfmd.add_noise(example_ts, 35.0, seed=0)
    noise = noisy.samples - example_ts.samples
    cfg = nfmd.NfmdConfig(window=250, num_modes=3, stride=BENCH_STRIDE)
    return cfg, nfmd.decompose(noisy, cfg), noise


@pytest.fixture(scope="session")
def sharp_omega_decomp():
    return _decompose_builtin("sharp-omega", snr_db=25.0)


@pytest.fixture(scope="session")
def sharp_mean_decomp():
    return _decompose_builtin("sharp-mean", snr_db=20.0)


@pytest.fixture(scope="session")
def stationary_tone():
    """3*cos(2*pi*50*t), 1 s at 5 kHz."""
    fs = 5000.0
    t = np.arange(int(fs) + 1) / fs
    return nfmd.TimeSeries(samples=3.0 * np.cos(2.0 * np.pi * 50.0 * t), dt=1.0 / fs)
