"""The (1/2 - eps)-approximation, residual boosting and the bounded-ratio scheme."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath

from .budget import NEVER, Deadline
from .errors import BudgetExceeded
from .heavy import solve_heavy
from .instance import (
    Chain,
    Instance,
    as_fraction,
    chain_feasible,
    chain_profit,
    check_epsilon,
    perm_profit,
    perm_to_chain,
    residual_instance,
    union_chains,
)
from .light import solve_light


@dataclass
class AlgorithmHandle:
    """A black-box solver with a declared approximation ratio (metadata only).

    Results are memoised per instance; every solver in this package is
    deterministic, so the cache never changes an answer.
    """

    fn: Callable[[Instance], Chain]
    alpha: Fraction = Fraction(0)
    name: str = "algorithm"
    cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, inst: Instance) -> Chain:
        hit = self.cache.get(inst)
        if hit is None:
            hit = self.fn(inst)
            self.cache[inst] = hit
        return hit


@dataclass(frozen=True)
class BoostConfig:
    epsilon: Fraction
    delta: Fraction
    rounds: int

    @classmethod
    def for_qptas(cls, epsilon) -> BoostConfig:
        eps = check_epsilon(epsilon, integral=False)
        return cls(eps, eps * eps / 2, math.ceil(2 / eps))


def empty_algorithm() -> AlgorithmHandle:
    return AlgorithmHandle(lambda inst: Chain.empty(inst.T), Fraction(0), "empty")


def oracle_algorithm() -> AlgorithmHandle:
    from .oracle import brute_force
    return AlgorithmHandle(lambda inst: brute_force(inst).opt_chain, Fraction(1), "exact")


def solve_half(inst: Instance, epsilon) -> Chain:
    """Better of the heavy-DP and light-GAP permutations, as a chain."""
    eps = check_epsilon(epsilon, upper=Fraction(1, 2))
    heavy = solve_heavy(inst, eps)
    light = solve_light(inst, eps)
    best = heavy if perm_profit(inst, heavy).total >= perm_profit(inst, light).total else light
    return perm_to_chain(inst, best)


def _upper_ln(x: Fraction) -> Fraction:
    """A rational upper bound on ln(x), via outward-rounded interval arithmetic."""
    iv = mpmath.iv
    val = iv.log(iv.mpf(x.numerator) / iv.mpf(x.denominator))
    man, exp = mpmath.mpf(val.b).man_exp
    return Fraction(man) * Fraction(2) ** exp


def _ceil_log(base: Fraction, x: Fraction) -> int:
    k, p = 0, Fraction(1)
    while p < x:
        k += 1
        p *= base
    return k


def crossing_budget(inst: Instance, epsilon, formula: str = "published") -> int:
    """Largest number of inserted items a boosting chain needs to enumerate.

    ``formula="published"`` uses 3 ln(n rho)/eps^2; ``"tight"`` uses
    2 ceil(log_(1+eps)(n rho))/eps.  Never below min(n, ceil(1/eps)), never above n.
    """
    eps = check_epsilon(epsilon, integral=False)
    n = inst.n
    if n == 0:
        return 0
    ws = [inst.weights[i] for i in inst.items]
    x = n * max(ws) / min(ws)
    if formula == "published":
        raw = math.ceil(3 * _upper_ln(x) / (eps * eps))
    elif formula == "tight":
        raw = math.ceil(2 * _ceil_log(1 + eps, x) / eps)
    else:
        raise ValueError(f"unknown crossing-budget formula {formula!r}")
    return min(n, max(raw, math.ceil(1 / eps)))


def small_chains(inst: Instance, limit: int) -> Iterator[Chain]:
    """Feasible chains with at most ``limit`` inserted items.

    Ordered by item count, then lexicographically by the sorted
    (item, period) sequence.
    """
    items = inst.items
    T = inst.T
    caps = inst.capacities
    w = inst.weights
    for count in range(0, limit + 1):
        loads = [Fraction(0)] * T
        picked: list[tuple[int, int]] = []

        def grow(start: int) -> Iterator[Chain]:
            if len(picked) == count:
                yield Chain.from_times(dict(picked), T)
                return
            for pos in range(start, len(items) - (count - len(picked)) + 1):
                i = items[pos]
                for t in range(T):
                    if all(loads[tau] + w[i] <= caps[tau] for tau in range(t, T)):
                        for tau in range(t, T):
                            loads[tau] += w[i]
                        picked.append((i, t + 1))
                        yield from grow(pos + 1)
                        picked.pop()
                        for tau in range(t, T):
                            loads[tau] -= w[i]

        yield from grow(0)


def boost(inst: Instance, A: AlgorithmHandle, epsilon, *, max_items: int | None = None,
          formula: str = "published", deadline: Deadline = NEVER) -> Chain:
    """Best union of a small chain G with A's answer on the residual of G."""
    limit = crossing_budget(inst, epsilon, formula) if max_items is None else min(max_items, inst.n)
    best: Chain | None = None
    best_value = Fraction(-1)
    try:
        for G in small_chains(inst, limit):
            deadline.check()
            residual = residual_instance(inst, G)
            R = A(residual)
            assert chain_feasible(residual, R), f"{A.name} returned an infeasible chain"
            value = chain_profit(inst, G) + chain_profit(residual, R)
            if value > best_value:
                best_value = value
                best = union_chains(G, R)
    except BudgetExceeded as exc:
        raise BudgetExceeded(best if best is not None else Chain.empty(inst.T)) from exc
    assert best is not None and chain_feasible(inst, best)
    assert chain_profit(inst, best) == best_value
    return best


def light_tolerance(delta: Fraction) -> Fraction:
    """Largest unit fraction below both delta and 1/2."""
    return Fraction(1, math.ceil(1 / min(delta, Fraction(49, 100))))


def light_algorithm(delta) -> AlgorithmHandle:
    """The light-GAP permutation as a chain, at tolerance light_tolerance(delta)."""
    eps = light_tolerance(Fraction(delta))
    return AlgorithmHandle(lambda inst: perm_to_chain(inst, solve_light(inst, eps)), Fraction(0), "light")


def one_step(inst: Instance, A: AlgorithmHandle, delta, *, formula: str = "published",
             deadline: Deadline = NEVER, light: AlgorithmHandle | None = None) -> Chain:
    """The better of boost(A) and the light-GAP chain."""
    delta = as_fraction(delta) if not isinstance(delta, Fraction) else delta
    light = light or light_algorithm(delta)
    try:
        boosted = boost(inst, A, delta, formula=formula, deadline=deadline)
    except BudgetExceeded as exc:
        partial = exc.partial
        fallback = light(inst)
        if partial is None or chain_profit(inst, fallback) > chain_profit(inst, partial):
            partial = fallback
        raise BudgetExceeded(partial) from exc
    light_chain = light(inst)
    if chain_profit(inst, light_chain) > chain_profit(inst, boosted):
        return light_chain
    return boosted


def alpha_sequence(delta, rounds: int) -> list[Fraction]:
    """alpha_0 = 0, alpha_r = (1 - delta) / (2 - alpha_(r-1))."""
    delta = Fraction(delta)
    out = [Fraction(0)]
    for _ in range(rounds):
        out.append((1 - delta) / (2 - out[-1]))
    return out


class BoundedQptas:
    """A_0 = empty, A_r = one_step(A_(r-1), eps^2/2), for r up to ceil(2/eps).

    One object keeps the per-level memo tables, so reusing it across many
    related instances (the residuals of one outer search) avoids repeated work.
    """

    def __init__(self, epsilon, *, formula: str = "published", deadline: Deadline = NEVER):
        self.config = BoostConfig.for_qptas(epsilon)
        self.formula = formula
        self.deadline = deadline
        self.light = light_algorithm(self.config.delta)
        alphas = alpha_sequence(self.config.delta, self.config.rounds)
        levels = [empty_algorithm()]
        for r in range(1, self.config.rounds + 1):
            levels.append(AlgorithmHandle(self._stepper(levels[r - 1]), alphas[r], f"A_{r}"))
        self.levels = levels

    def _stepper(self, previous: AlgorithmHandle) -> Callable[[Instance], Chain]:
        def run(inst: Instance) -> Chain:
            return one_step(inst, previous, self.config.delta, formula=self.formula,
                            deadline=self.deadline, light=self.light)
        return run

    def __call__(self, inst: Instance) -> Chain:
        return self.levels[-1](inst)


def qptas_bounded(inst: Instance, epsilon, *, formula: str = "published",
                  deadline: Deadline = NEVER) -> Chain:
    return BoundedQptas(epsilon, formula=formula, deadline=deadline)(inst)
