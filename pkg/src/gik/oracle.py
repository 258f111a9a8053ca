"""Exhaustive reference solver for tiny instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InstanceTooLarge
from .instance import (
    Chain,
    Instance,
    IntervalClassifier,
    Permutation,
    chain_profit,
    chain_to_perm,
    decompose_profit,
    perm_profit,
    scale_to_wmin3,
)

MAX_ITEMS = 10
MAX_PERIODS = 5


@dataclass(frozen=True)
class OracleResult:
    opt_profit: Fraction
    opt_chain: Chain
    opt_perm: Permutation


def _common_denominator(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def brute_force(inst: Instance, *, max_items: int = MAX_ITEMS, max_periods: int = MAX_PERIODS) -> OracleResult:
    """Best chain over all (T+1)^n insertion vectors.

    Items are visited in ascending id and periods in ascending order (never
    inserted last), and only strict improvements replace the incumbent, so
    ties resolve to the lexicographically smallest insertion vector.
    """
    if inst.n > max_items or inst.T > max_periods:
        raise InstanceTooLarge(f"n={inst.n}, T={inst.T} exceeds limits n<={max_items}, T<={max_periods}")
    items = inst.items
    T = inst.T
    # integer copies for speed; the result is rebuilt from insertion times
    wd = _common_denominator([inst.weights[i] for i in items] + list(inst.capacities))
    pd = _common_denominator([inst.profits[i][t] for i in items for t in range(T)])
    w = [int(inst.weights[i] * wd) for i in items]
    slack = [math.floor(c * wd) for c in inst.capacities]
    p = [[int(inst.profits[i][t] * pd) for t in range(T)] for i in items]
    n = len(items)

    best_value = -1
    best_vector: list[int] = []
    vector = [T] * n

    def visit(j: int, value: int) -> None:
        nonlocal best_value, best_vector
        if j == n:
            if value > best_value:
                best_value = value
                best_vector = vector[:]
            return
        wj = w[j]
        for t in range(T):
            if min(slack[t:]) >= wj:
                for tau in range(t, T):
                    slack[tau] -= wj
                vector[j] = t
                visit(j + 1, value + p[j][t])
                for tau in range(t, T):
                    slack[tau] += wj
        vector[j] = T
        visit(j + 1, value)

    visit(0, 0)
    times = {items[j]: t + 1 for j, t in enumerate(best_vector) if t < T}
    chain = Chain.from_times(times, T)
    profit = chain_profit(inst, chain)
    perm = chain_to_perm(inst, chain)
    assert profit == Fraction(best_value, pd)
    assert perm_profit(inst, perm).total == profit
    return OracleResult(profit, chain, perm)


def opt_decomposition(inst: Instance, epsilon, oracle: OracleResult | None = None) -> tuple[Fraction, Fraction]:
    """(Psi_heavy, Psi_light) of the canonical optimal permutation, after w_min-scaling."""
    res = brute_force(inst) if oracle is None else oracle
    scaled = scale_to_wmin3(inst)
    clf = IntervalClassifier.for_instance(scaled, epsilon)
    return decompose_profit(scaled, res.opt_perm, clf)
