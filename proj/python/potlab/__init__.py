"""Nonlinear potential estimates for measure data problems."""

import json as _json

from . import _potlab
from ._potlab import (
    ConvergenceError,
    ValidationError,
    YoungFunction,
    double_conjugate,
    monotonicity_bands,
    radial_reference,
    young_residual,
)

__all__ = [
    "ConvergenceError",
    "ValidationError",
    "YoungFunction",
    "ball_mass",
    "builtin_scenarios",
    "double_conjugate",
    "monotonicity_bands",
    "radial_reference",
    "run_scenario",
    "solve",
    "wolff_potential",
    "young_function",
    "young_residual",
]


def _dump(descriptor):
    return descriptor if isinstance(descriptor, str) else _json.dumps(descriptor)


def young_function(descriptor):
    """Build a YoungFunction from a descriptor dict such as {"family": "power", "p": 3}."""
    return YoungFunction.from_json(_dump(descriptor))


def ball_mass(measure, x0, r):
    return _potlab.ball_mass(_dump(measure), tuple(x0), r)


def wolff_potential(G, measure, x0, R):
    return _potlab.wolff_potential(G, _dump(measure), tuple(x0), R)


def solve(scenario):
    """Solve a scenario's Dirichlet problem; returns vertices, triangles, values and stages."""
    return _potlab.solve(_dump(scenario))


def run_scenario(scenario, out):
    return _json.loads(_potlab.run_scenario(_dump(scenario), str(out)))


def builtin_scenarios():
    return [_json.loads(s) for s in _potlab.builtin_scenarios()]
