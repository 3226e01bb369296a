"""Continuous hardcore model toolkit (C++ core)."""

from ._core import (
    Graph,
    NumericalError,
    RewireInvariantError,
    find_cstar,
    gamma,
    rewire_chain,
    rewire_ratio,
    run_recursion,
    transfer_cycle_logz,
    volume_sis,
)

__all__ = [
    "Graph",
    "NumericalError",
    "RewireInvariantError",
    "find_cstar",
    "gamma",
    "rewire_chain",
    "rewire_ratio",
    "run_recursion",
    "transfer_cycle_logz",
    "volume_sis",
]
