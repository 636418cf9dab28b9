"""Python bindings for the hpmd toolkit."""

import json as _json

from ._core import (
    ConfigError,
    Mdp,
    evaluate_policy,
    make_gap_counterexample,
    make_gridworld,
    make_random_mdp,
    make_tied,
    mirror_step,
    mirror_step_entropy,
    q_from_v,
    run_hpmd,
    run_shpmd,
    schedule_params,
    solve_optimal,
)
from ._core import run_config_json as _core_run


def run_config(config, out_dir, threads=0):
    """Run a config (dict or path to JSON) and return the manifest as a dict."""
    if not isinstance(config, dict):
        with open(config) as f:
            config = _json.load(f)
    return _json.loads(_core_run(_json.dumps(config), str(out_dir), threads))

__all__ = [
    "ConfigError",
    "Mdp",
    "evaluate_policy",
    "make_gap_counterexample",
    "make_gridworld",
    "make_random_mdp",
    "make_tied",
    "mirror_step",
    "mirror_step_entropy",
    "q_from_v",
    "run_config",
    "run_hpmd",
    "run_shpmd",
    "schedule_params",
    "solve_optimal",
]
