import numpy as np
import pytest

from nfmd import configio, synth
from nfmd.errors import ConfigError


def test_bare_number_is_constant():
    f = configio.parse_time_function(2.5)
    assert float(f(0.0)) == 2.5 and float(f(10.0)) == 2.5


def test_parse_each_kind():
    lin = configio.parse_time_function({"kind": "linear", "intercept": 1.0, "slope": 2.0})
    assert float(lin(3.0)) == 7.0
    exp = configio.parse_time_function(
        {"kind": "exponential", "offset": 1.0, "scale": 2.0, "tau": 4.0}
    )
    assert float(exp(0.0)) == 3.0
    sin = configio.parse_time_function({"kind": "sinusoid", "amplitude": 2.0, "omega": 1.0})
    assert float(sin(0.0)) == 0.0  # default phase 0


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError, match="unknown function kind"):
        configio.parse_time_function({"kind": "polynomialish"})
    with pytest.raises(ConfigError, match="missing required key"):
        configio.parse_time_function({"kind": "linear", "slope": 1.0})


def test_load_builtin_reference(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text("builtin: example\n")
    spec = configio.load_synthetic_spec(path)
    assert spec == synth.builtin_specs()["example"]


def test_unknown_builtin_lists_names(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text("builtin: nope\n")
    with pytest.raises(ConfigError, match="example"):
        configio.load_synthetic_spec(path)


def test_load_full_spec(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text(
        """
name: demo
duration: 1.0
dt: 0.01
mean: {kind: constant, value: 4.0}
components:
  - amplitude: 2.0
    frequency_hz: {kind: linear, intercept: 10.0, slope: 0.0}
"""
    )
    spec = configio.load_synthetic_spec(path)
    ts = synth.generate(spec)
    t = ts.times()
    np.testing.assert_allclose(
        ts.samples, 4.0 + 2.0 * np.cos(2 * np.pi * 10.0 * t), atol=1e-12
    )


def test_missing_duration_rejected(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text("dt: 0.01\n")
    with pytest.raises(ConfigError, match="duration"):
        configio.load_synthetic_spec(path)


def test_invalid_yaml_rejected(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text("components: [unclosed\n")
    with pytest.raises(ConfigError):
        configio.load_synthetic_spec(path)


def test_non_mapping_document_rejected(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text("- just\n- a\n- list\n")
    with pytest.raises(ConfigError, match="mapping"):
        configio.load_synthetic_spec(path)


def test_load_oscillator_config(tmp_path):
    path = tmp_path / "osc.yaml"
    path.write_text(
        """
oscillator: {beta: 0.02, omega0: 100.0, mass: 1.5, x0: 0.1}
forcing:
  drive: {alpha: 2.0, omega_d: 90.0}
  perturbation: {gamma: 1.0, t_prime: 0.5, tau: 0.01}
"""
    )
    osc, forcing = configio.load_oscillator_config(path)
    assert osc.beta == 0.02 and osc.omega0 == 100.0 and osc.x0 == 0.1
    assert forcing.drive.alpha == 2.0
    assert forcing.perturbation.tau == 0.01


def test_oscillator_config_validation_wrapped(tmp_path):
    path = tmp_path / "osc.yaml"
    path.write_text(
        """
oscillator: {beta: -1.0, omega0: 100.0, mass: 1.0}
forcing:
  drive: {alpha: 1.0, omega_d: 90.0}
"""
    )
    with pytest.raises(ConfigError):
        configio.load_oscillator_config(path)


def test_oscillator_config_requires_sections(tmp_path):
    path = tmp_path / "osc.yaml"
    path.write_text("oscillator: {beta: 0.1, omega0: 1.0, mass: 1.0}\n")
    with pytest.raises(ConfigError, match="forcing"):
        configio.load_oscillator_config(path)
