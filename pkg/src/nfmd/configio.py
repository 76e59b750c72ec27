"""Declarative YAML configs for synthetic specs and oscillator setups."""

from __future__ import annotations

import numpy as np
import yaml

from . import synth
from .errors import ConfigError
from .oscillator import DriveSpec, ForcingSpec, OscillatorSpec, PerturbationSpec

_FUNCTION_KINDS = ("constant", "linear", "exponential", "sinusoid")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def parse_time_function(node) -> synth.TimeFunction:
    """Build one of the registered function primitives from a mapping.

    A bare number is shorthand for a constant.
    """
    if isinstance(node, (int, float)):
        return synth.Constant(float(node))
    if not isinstance(node, dict):
        raise ConfigError(f"expected a function mapping or number, got {node!r}")
    kind = _require(node, "kind", "time function")
    if kind == "constant":
        return synth.Constant(float(_require(node, "value", "constant")))
    if kind == "linear":
        return synth.Linear(
            float(_require(node, "intercept", "linear")),
            float(_require(node, "slope", "linear")),
        )
    if kind == "exponential":
        return synth.Exponential(
            offset=float(_require(node, "offset", "exponential")),
            scale=float(_require(node, "scale", "exponential")),
            tau=float(_require(node, "tau", "exponential")),
        )
    if kind == "sinusoid":
        return synth.Sinusoid(
            amplitude=float(_require(node, "amplitude", "sinusoid")),
            omega=float(_require(node, "omega", "sinusoid")),
            phase=float(node.get("phase", 0.0)),
        )
    raise ConfigError(f"unknown function kind {kind!r}; expected one of {_FUNCTION_KINDS}")


def _load_yaml(path) -> dict:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a top-level mapping")
    return doc


def load_synthetic_spec(path) -> synth.SyntheticSpec:
    """Read a synthetic-signal spec from a YAML file.

    Either ``builtin: <name>`` referencing a registered benchmark spec,
    or duration/dt/mean/components built from the function primitives.
    """
    doc = _load_yaml(path)
    if "builtin" in doc:
        name = doc["builtin"]
        specs = synth.builtin_specs()
        if name not in specs:
            raise ConfigError(f"unknown builtin spec {name!r}; known: {sorted(specs)}")
        return specs[name]
    components = []
    for i, node in enumerate(doc.get("components", [])):
        if not isinstance(node, dict):
            raise ConfigError(f"component {i}: expected a mapping")
        components.append(
            synth.Component(
                amplitude=parse_time_function(_require(node, "amplitude", f"component {i}")),
                frequency_hz=parse_time_function(
                    _require(node, "frequency_hz", f"component {i}")
                ),
            )
        )
    mean = parse_time_function(doc.get("mean", 0.0))
    try:
        return synth.SyntheticSpec(
            components=tuple(components),
            mean=mean,
            duration=float(_require(doc, "duration", str(path))),
            dt=float(_require(doc, "dt", str(path))),
            name=str(doc.get("name", "")),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_oscillator_config(path) -> tuple:
    """Read (OscillatorSpec, ForcingSpec) from a YAML file with
    ``oscillator`` and ``forcing`` sections."""
    doc = _load_yaml(path)
    osc_node = _require(doc, "oscillator", str(path))
    try:
        osc = OscillatorSpec(
            beta=float(_require(osc_node, "beta", "oscillator")),
            omega0=float(_require(osc_node, "omega0", "oscillator")),
            mass=float(_require(osc_node, "mass", "oscillator")),
            x0=float(osc_node.get("x0", 0.0)),
            v0=float(osc_node.get("v0", 0.0)),
        )
        forcing_node = _require(doc, "forcing", str(path))
        drive = None
        if "drive" in forcing_node:
            d = forcing_node["drive"]
            drive = DriveSpec(
                alpha=float(_require(d, "alpha", "drive")),
                omega_d=float(_require(d, "omega_d", "drive")),
            )
        pert = None
        if "perturbation" in forcing_node:
            p = forcing_node["perturbation"]
            pert = PerturbationSpec(
                gamma=float(_require(p, "gamma", "perturbation")),
                t_prime=float(_require(p, "t_prime", "perturbation")),
                tau=float(_require(p, "tau", "perturbation")),
            )
        forcing = ForcingSpec(drive=drive, perturbation=pert)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return osc, forcing
