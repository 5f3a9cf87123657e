# SPDX-License-Identifier: Apache-2.0
"""Downlink multiuser MIMO power allocation toolkit.

Thin Python face over the C++ core: channel synthesis, MF/ZF/MMSE precoding,
MSE-driven adaptive power allocation (plain and robust), grid-search
baselines, rate metrics, and the Monte Carlo experiment harness.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
from ._core import __version__  # noqa: F401


def run_config(path):
    """Parses an experiment config file, runs it, and returns the result.

    Convenience wrapper equivalent to ``run_experiment(parse_config(path))``;
    the caller is responsible for emitting the result if a file is wanted.
    """
    from ._core import parse_config, run_experiment

    return run_experiment(parse_config(path))


def tables(result):
    """Returns a result's data as {column_name: list_of_values}."""
    return dict(zip(result.column_names, result.columns))
