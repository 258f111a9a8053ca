"""Shared fixtures data and instance corpora for the test suite."""

from __future__ import annotations

import random

from gik.generate import generate
from gik.instance import Chain, Instance, chain_feasible

INST_A = Instance.build([3, 4, 5], [7, 12], [[8, 6], [4, 9], [5, 5]])

INTEGER_FAMILIES = ("uniform", "time-invariant", "heavy-tail-weights", "well-spaced-adversarial")
ALL_FAMILIES = INTEGER_FAMILIES + ("discounted",)


def corpus(count: int, n_max: int, T_max: int, *, seed0: int = 0, families=ALL_FAMILIES,
           params: dict | None = None, n_min: int = 1):
    """Yield (seed, family, instance) with sizes drawn per seed."""
    for s in range(seed0, seed0 + count):
        rng = random.Random(s)
        fam = families[s % len(families)]
        n = rng.randint(n_min, n_max)
        T = rng.randint(1, T_max)
        yield s, fam, generate(s, fam, n, T, (params or {}).get(fam))


def random_chain(inst: Instance, rng: random.Random) -> Chain:
    """A random feasible chain: draw insertion times, skip items that no longer fit."""
    times: dict[int, int] = {}
    for i in rng.sample(list(inst.items), inst.n):
        t = rng.randint(1, inst.T + 1)
        if t > inst.T:
            continue
        trial = {**times, i: t}
        if chain_feasible(inst, Chain.from_times(trial, inst.T)):
            times = trial
    return Chain.from_times(times, inst.T)
