"""Resilience of linear systems to partial loss of actuator authority.

Matrices are numpy arrays; actuator indices in `lost` are 0-based here
(the command line uses 1-based indices or labels).
"""

import json

import numpy as np

from ._core import (
    ArgumentError,
    CapacityError,
    DimensionError,
    UnknownNameError,
    NumericalError,
    PreconditionError,
    RankError,
    ResilienceError,
    Zonotope,
    contains_zonotope,
    controllability_rank,
    eigenvalues,
    expm,
    inner_minkowski_difference,
    is_hurwitz,
    linear_map,
    list_scenarios,
    minkowski_sum,
    run_cli,
    solve_lyapunov,
    z_set,
)
from . import _core


def _mat(a):
    return np.atleast_2d(np.asarray(a, dtype=float))


def _vec(x):
    return np.asarray(x, dtype=float).reshape(-1)


def check(A, B_bar, lost):
    """Resilience verdict as a dict (same layout as `resilience-kit check`)."""
    return json.loads(_core._check_json(_mat(A), _mat(B_bar), list(lost)))


def reach(A, B_bar, lost, x0, horizon=0.2, steps=5, dims=(0, 1)):
    """Inner reach tube of the malfunctioning system; dims are 0-based."""
    return json.loads(_core._reach_json(_mat(A), _mat(B_bar), list(lost), _vec(x0), horizon, steps, list(dims)))


def bounds(A, B_bar, lost, x0, samples=1000, seed=0, threads=1):
    """Reach-time and quantitative-resilience bounds; A must be Hurwitz."""
    return json.loads(_core._bounds_json(_mat(A), _mat(B_bar), list(lost), _vec(x0), samples, seed, threads))


def scenario(name):
    """Built-in scenario as a dict; `A` and `B_bar` come back as numpy arrays."""
    s = json.loads(_core._scenario_json(name))
    s["A"] = np.array(s["A"], dtype=float)
    s["B_bar"] = np.array(s["B_bar"], dtype=float)
    return s


__all__ = [
    "ArgumentError",
    "CapacityError",
    "DimensionError",
    "UnknownNameError",
    "NumericalError",
    "PreconditionError",
    "RankError",
    "ResilienceError",
    "Zonotope",
    "bounds",
    "check",
    "contains_zonotope",
    "controllability_rank",
    "eigenvalues",
    "expm",
    "inner_minkowski_difference",
    "is_hurwitz",
    "linear_map",
    "list_scenarios",
    "minkowski_sum",
    "reach",
    "run_cli",
    "scenario",
    "solve_lyapunov",
    "z_set",
]
