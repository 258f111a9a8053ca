"""Generalized incremental knapsack: exact oracle, (1/2 - eps)-approximation and QPTAS variants."""

from .errors import BudgetExceeded, GikError
from .instance import (
    Chain,
    Instance,
    IntervalClassifier,
    Permutation,
    chain_feasible,
    chain_profit,
    chain_to_perm,
    perm_profit,
    perm_to_chain,
    residual_instance,
    validate_instance,
)

__all__ = [
    "BudgetExceeded",
    "Chain",
    "GikError",
    "Instance",
    "IntervalClassifier",
    "Permutation",
    "chain_feasible",
    "chain_profit",
    "chain_to_perm",
    "perm_profit",
    "perm_to_chain",
    "residual_instance",
    "validate_instance",
]
