"""Seeded instance families.

Randomness comes from numpy's Philox counter-based bit generator, so a
(seed, family, n, T, params) tuple always yields the same instance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import BadParams
from .instance import Instance, as_fraction

FAMILIES = ("uniform", "time-invariant", "discounted", "heavy-tail-weights", "well-spaced-adversarial")

_DEFAULTS = {
    "uniform": {"max_weight": 20, "max_profit": 20},
    "time-invariant": {"max_weight": 20, "max_profit": 10},
    "discounted": {"max_weight": 20, "max_profit": 10, "discount": "1/2"},
    "heavy-tail-weights": {"spread": 10_000, "max_profit": 20},
    "well-spaced-adversarial": {"gap": 3, "max_profit": 20},
}


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _ints(rng: np.random.Generator, lo: int, hi: int, size: int) -> list[int]:
    """Uniform integers in [lo, hi]."""
    return [int(x) for x in rng.integers(lo, hi + 1, size=size)]


def _capacities(rng: np.random.Generator, weights: list[int], T: int) -> list[int]:
    total = sum(weights)
    lo = min(weights) if weights else 0
    return sorted(_ints(rng, lo, max(lo, total), T))


def generate(seed: int, family: str, n: int, T: int, params: dict | None = None) -> Instance:
    if family not in _DEFAULTS:
        raise BadParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if n < 0 or T < 1:
        raise BadParams(f"need n >= 0 and T >= 1, got n={n}, T={T}")
    opts = dict(_DEFAULTS[family])
    unknown = set(params or {}) - set(opts)
    if unknown:
        raise BadParams(f"unknown parameters for {family}: {sorted(unknown)}")
    opts.update(params or {})
    rng = _rng(seed)
    pmax = int(opts["max_profit"])

    if family == "uniform":
        weights = _ints(rng, 1, int(opts["max_weight"]), n)
        profits = [_ints(rng, 0, pmax, T) for _ in range(n)]
    elif family == "time-invariant":
        weights = _ints(rng, 1, int(opts["max_weight"]), n)
        phi = _ints(rng, 1, pmax, n)
        profits = [[(T + 1 - t) * phi[i] for t in range(1, T + 1)] for i in range(n)]
    elif family == "discounted":
        weights = _ints(rng, 1, int(opts["max_weight"]), n)
        c = as_fraction(opts["discount"])
        per_period = [_ints(rng, 0, pmax, T) for _ in range(n)]
        profits = [[sum((c ** (tau - t) * per_period[i][tau] for tau in range(t, T)), Fraction(0))
                    for t in range(T)] for i in range(n)]
    elif family == "heavy-tail-weights":
        spread = int(opts["spread"])
        if spread < 1:
            raise BadParams("spread must be >= 1")
        weights = [max(1, int(spread ** u)) for u in rng.random(n)]
        profits = [_ints(rng, 0, pmax, T) for _ in range(n)]
    else:
        # a light group and a heavy group separated by n^gap
        gap = int(opts["gap"])
        big = max(n, 2) ** gap
        heavy = _ints(rng, 0, 1, n)
        weights = [w * (big if h else 1) for w, h in zip(_ints(rng, 1, 3, n), heavy)]
        profits = [_ints(rng, 0, pmax, T) for _ in range(n)]
    capacities = _capacities(rng, weights, T)
    return Instance.build(weights, capacities, profits)
