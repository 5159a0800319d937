"""Lattice discretization of Fourier multiplier operators.

Thin wrapper over the compiled core: symbol evaluation, biorthogonal-pair
construction, resolvent error norms, spectral distances, and the experiment
runner (JSON config in, JSON report out).
"""

import json as _json

from ._core import (
    ConfigError,
    SolverError,
    __version__,
    default_h_list,
    eval_discretized,
    eval_symbol,
    fit_rate,
    free_error_norm,
    hausdorff_distance,
    local_hausdorff_distance,
    predicted_rate,
    run_experiment,
    theta_prime,
)

__all__ = [
    "ConfigError",
    "SolverError",
    "__version__",
    "default_h_list",
    "eval_discretized",
    "eval_symbol",
    "fit_rate",
    "free_error_norm",
    "hausdorff_distance",
    "local_hausdorff_distance",
    "predicted_rate",
    "run",
    "run_experiment",
    "theta_prime",
]


def run(config):
    """Run one experiment from a dict (or JSON string); returns the report dict."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(run_experiment(config))
