"""Uniform entry point over the four solvers, with timing and budget handling."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .budget import Deadline
from .errors import BudgetExceeded, InvalidEpsilon
from .instance import Chain, Instance, as_fraction, chain_feasible, chain_profit, check_epsilon
from .oracle import brute_force
from .pipeline import qptas_bounded, solve_half
from .qptas import qptas_general_solve

ALGORITHMS = ("exact", "half", "qptas-bounded", "qptas")


@dataclass(frozen=True)
class RunOutcome:
    chain: Chain
    profit: Fraction
    certified: bool
    wall_ms: int


def parse_epsilon(algorithm: str, epsilon) -> Fraction | None:
    """Check epsilon against the algorithm's domain; exact ignores it."""
    if algorithm not in ALGORITHMS:
        raise InvalidEpsilon(f"unknown algorithm {algorithm!r}")
    if algorithm == "exact":
        return None if epsilon is None else as_fraction(epsilon)
    if epsilon is None:
        raise InvalidEpsilon(f"--epsilon is required for {algorithm}")
    if algorithm == "half":
        return check_epsilon(epsilon, upper=Fraction(1, 2))
    if algorithm == "qptas-bounded":
        return check_epsilon(epsilon, integral=False)
    return check_epsilon(epsilon)


def run_algorithm(inst: Instance, algorithm: str, epsilon, budget_ms: int | None = None) -> RunOutcome:
    eps = parse_epsilon(algorithm, epsilon)
    deadline = Deadline(budget_ms)
    start = time.perf_counter()
    certified = True
    try:
        if algorithm == "exact":
            chain = brute_force(inst).opt_chain
        elif algorithm == "half":
            chain = solve_half(inst, eps)
        elif algorithm == "qptas-bounded":
            chain = qptas_bounded(inst, eps, deadline=deadline)
        else:
            chain = qptas_general_solve(inst, eps, deadline=deadline)
    except BudgetExceeded as exc:
        chain = exc.partial if exc.partial is not None else Chain.empty(inst.T)
        certified = False
    wall_ms = round((time.perf_counter() - start) * 1000)
    assert chain_feasible(inst, chain)
    return RunOutcome(chain, chain_profit(inst, chain), certified, wall_ms)
