"""Covariant Hamiltonian mechanics: brackets, conserved quantities and orbits."""

import json

from ._core import (
    ConfigError,
    CovmechError,
    DetunedParameters,
    DimensionMismatch,
    ExtremalParams,
    MaxStepsExceeded,
    NonFiniteState,
    OutOfDomain,
    SingularMetric,
    System,
    UnknownName,
    build_system,
    default_params,
    integrate,
    run_command,
    system_names,
)

__all__ = [
    "ConfigError",
    "CovmechError",
    "DetunedParameters",
    "DimensionMismatch",
    "ExtremalParams",
    "MaxStepsExceeded",
    "NonFiniteState",
    "OutOfDomain",
    "SingularMetric",
    "System",
    "UnknownName",
    "build_system",
    "bracket_table",
    "default_params",
    "integrate",
    "run_command",
    "simulate",
    "system_names",
    "verify",
]


def _run(command, config):
    text = config if isinstance(config, str) else json.dumps(config)
    code, report, messages, csv = run_command(command, text)
    return code, json.loads(report)


def simulate(config):
    """Run the simulate command on a config dict; returns (exit_code, report)."""
    return _run("simulate", config)


def verify(config):
    """Run the verify command on a config dict; returns (exit_code, report)."""
    return _run("verify", config)


def bracket_table(config):
    """Run the bracket-table command on a config dict; returns (exit_code, report)."""
    return _run("bracket-table", config)
