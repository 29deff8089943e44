import json

from ._microlaser import (
    Branch,
    ConvergenceError,
    Error,
    InvalidArgument,
    Peak,
    Spectrum,
    SteadyState,
    SystemParams,
    build_spectrum,
    correlation_g1,
    emission_probability,
    mu_exact,
    solve,
    solve_branches,
    xi,
)
from . import _microlaser


def run_config(path):
    """Run an INI config (point or sweep) and return the parsed result."""
    return json.loads(_microlaser.run_config(str(path)))


def validate(state):
    """Oracle comparison for a solved state, as a dict."""
    return json.loads(_microlaser.validate(state))
