"""Solvers for smooth strongly-convex-strongly-concave minimax problems."""

import csv
import io
import json

from ._minimax import (  # noqa: F401
    ConfigError,
    InternalError,
    PreconditionError,
    QuadraticSaddle,
    SmoothnessParams,
    SolveResult,
    abr_inner_steps,
    cg_iteration_bound,
    contraction_factor,
    direct_saddle,
    duality_gap,
    linetal_bound,
    lower_bound,
    make_quadratic,
    measure_params,
    optimal_k,
    pbr_bound,
    pbr_bound_with_logs,
    rhss_bound,
    solve,
    validation_suites,
)
from . import _minimax


def validate(suite, seed=0):
    """Run a named property suite; returns the report as a dict."""
    return json.loads(_minimax._validate_json(suite, seed))


def run_config(config, write=False):
    """Run every solver of a config (dict or JSON text) on its first seed.

    Returns one dict per solver with the CSV columns as keys.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    return list(csv.DictReader(io.StringIO(_minimax._run_solve_json(text, write))))
