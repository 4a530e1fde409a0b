"""Minimum density power divergence estimation and robust Wald-type tests.

Every function returns plain Python data (dicts, lists, floats) mirroring the
JSON emitted by the ``dpdwald`` command-line tool.
"""

import json as _json

from . import _core
from ._core import DomainError, InputError, NumericError

__all__ = [
    "DomainError",
    "InputError",
    "NumericError",
    "approx_power",
    "contiguous_power",
    "dataset",
    "fit",
    "run_example",
    "sample_size",
    "select_beta",
    "simulate",
    "wald_test",
]


def dataset(name):
    """Values of a built-in data set or a data file."""
    return list(_core.dataset(name))


def fit(family, data, beta, multistart=True):
    return _json.loads(_core.fit(family, list(map(float, data)), beta, multistart))


def wald_test(kind, family, data, beta, theta0=(), index=0, value=0.0, alternative="two-sided"):
    """kind is "simple" (needs theta0), "composite" or "signed" (theta[index] = value)."""
    return _json.loads(
        _core.wald_test(kind, family, list(map(float, data)), beta, list(theta0), index, value, alternative)
    )


def approx_power(family, theta0, theta_star, beta, n, alpha=0.05, sigma_form="delta"):
    return _json.loads(_core.approx_power(family, list(theta0), list(theta_star), beta, n, alpha, sigma_form))


def contiguous_power(family, theta0, d, beta, alpha=0.05):
    return _json.loads(_core.contiguous_power(family, list(theta0), list(d), beta, alpha))


def sample_size(family, theta0, theta_star, beta, alpha=0.05, power=0.8, sigma_form="delta", size_form="exact"):
    return _json.loads(
        _core.sample_size(family, list(theta0), list(theta_star), beta, alpha, power, sigma_form, size_form)
    )


def select_beta(family, data, grid=None):
    return _json.loads(_core.select_beta(family, list(map(float, data)), None if grid is None else list(grid)))


def run_example(name, beta_grid="0:0.05:1", filter=None, data_file=""):
    return _json.loads(_core.run_example(name, beta_grid, filter, data_file))


def simulate(scenario, seed=None):
    """scenario is a dict in the format of scenarios/SCHEMA.md."""
    return _json.loads(_core.simulate(_json.dumps(scenario), seed))
