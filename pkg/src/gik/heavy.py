"""Dynamic program over bulky pairs for the heavy profit contribution.

The table is expanded forward, interval by interval.  For every interval
index k and core set we keep a Pareto frontier of (grid profit, makespan)
entries: F(k, psi, core) is the makespan of the cheapest entry whose grid
profit is at least psi.  This is the same function as the dense table but
only stores reachable, non-dominated states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .instance import (
    Instance,
    IntervalClassifier,
    Permutation,
    check_epsilon,
    max_single_profit,
    perm_profit,
    scale_to_wmin3,
)


@dataclass(frozen=True)
class BulkyState:
    k: int
    psi: Fraction
    core: frozenset[int]


@dataclass(frozen=True, eq=False)
class DpEntry:
    d: int  # profit grid index: psi = d * unit
    makespan: Fraction
    parent: DpEntry | None
    appended: tuple[int, ...]  # pi_Q, in order


def core_of(inst: Instance, S: Iterable[int], epsilon) -> frozenset[int]:
    """The min(1/eps^2, |S|) heaviest items of S, ties to the smaller id."""
    eps = Fraction(epsilon)
    size = int(1 / (eps * eps))
    ranked = sorted(S, key=lambda i: (-inst.weights[i], i))
    return frozenset(ranked[:size])


def is_bulky(inst: Instance, S: Iterable[int], p: Permutation, clf: IntervalClassifier) -> bool:
    if set(S) != set(p.order):
        raise ValueError("permutation must order exactly the items of S")
    ev = perm_profit(inst, p)
    for i in p.order:
        k = clf.interval_of(ev.completion[i])
        if not clf.is_heavy(inst.weights[i], k):
            return False
    return True


def _pareto(entries: list[DpEntry]) -> list[DpEntry]:
    # highest profit first; keep an entry only if it is strictly cheaper than all above it
    ordered = sorted(entries, key=lambda e: (-e.d, e.makespan))
    kept = []
    for e in ordered:
        if not kept or e.makespan < kept[-1].makespan:
            kept.append(e)
    return kept


@dataclass
class HeavyTable:
    """Final frontiers of the forward DP, plus the grid it was built on."""

    unit: Fraction
    d_max: int
    K: int
    layers: list[dict[frozenset[int], list[DpEntry]]]

    def value(self, k: int, psi: Fraction, core: frozenset[int]) -> Fraction | None:
        """F~(k, psi, core); None stands for +infinity."""
        best = None
        for e in self.layers[k].get(core, []):
            if e.d * self.unit >= psi and (best is None or e.makespan < best):
                best = e.makespan
        return best


def heavy_table(inst: Instance, epsilon) -> HeavyTable:
    """Run the forward DP on an instance already scaled to w_min = 3."""
    eps = check_epsilon(epsilon, upper=Fraction(1, 2))
    inv = int(1 / eps)
    n = inst.n
    clf = IntervalClassifier.for_instance(inst, eps)
    p_max = max_single_profit(inst)
    unit = eps * p_max / n if n else Fraction(0)
    d_max = n * n * inv
    root = DpEntry(0, Fraction(0), None, ())
    layers: list[dict[frozenset[int], list[DpEntry]]] = [{frozenset(): [root]}]
    if n == 0 or p_max == 0:
        return HeavyTable(unit, d_max, clf.K, layers)

    w = inst.weights
    gain_cache: dict[tuple[Fraction, frozenset[int]], tuple[Fraction, tuple[int, ...]]] = {}

    def best_order(start: Fraction, Q: tuple[int, ...]) -> tuple[Fraction, tuple[int, ...]]:
        key = (start, frozenset(Q))
        hit = gain_cache.get(key)
        if hit is not None:
            return hit
        best = None
        for order in itertools.permutations(Q):
            c = start
            g = Fraction(0)
            for i in order:
                c += w[i]
                g += inst.phi(i, c)
            if best is None or g > best[0]:
                best = (g, order)
        gain_cache[key] = best
        return best

    for k in range(1, clf.K + 1):
        top = clf.power(k)
        heavy = [i for i in inst.items if clf.is_heavy(w[i], k)]
        prev = layers[-1]
        grown: dict[frozenset[int], list[DpEntry]] = {core: list(es) for core, es in prev.items()}
        for core, entries in prev.items():
            free = [i for i in heavy if i not in core]
            for size in range(1, min(inv, len(free)) + 1):
                for Q in itertools.combinations(free, size):
                    wQ = sum((w[i] for i in Q), Fraction(0))
                    new_core = None
                    for e in entries:
                        if e.makespan + wQ > top:
                            continue
                        gain, order = best_order(e.makespan, Q)
                        d = min(d_max, int((e.d * unit + gain) / unit))
                        if new_core is None:
                            new_core = core_of(inst, core | set(Q), eps)
                        assert len(Q) <= inv and all(clf.is_heavy(w[i], k) for i in Q)
                        grown.setdefault(new_core, []).append(DpEntry(d, e.makespan + wQ, e, order))
        layers.append({core: _pareto(es) for core, es in grown.items()})
    return HeavyTable(unit, d_max, clf.K, layers)


def _reconstruct(entry: DpEntry) -> Permutation:
    blocks = []
    while entry is not None:
        blocks.append(entry.appended)
        entry = entry.parent
    order = [i for block in reversed(blocks) for i in block]
    return Permutation(tuple(order))


def solve_heavy(inst: Instance, epsilon) -> Permutation:
    """Permutation of a bulky pair whose profit is within 1-eps of the heavy optimum.

    The instance is scaled to w_min = 3 internally; the returned permutation
    uses the caller's item ids and is valid for the unscaled instance too.
    """
    scaled = scale_to_wmin3(inst)
    table = heavy_table(scaled, epsilon)
    best = None
    for core, entries in table.layers[-1].items():
        for e in entries:
            if best is None or (e.d, -e.makespan) > (best.d, -best.makespan):
                best = e
    perm = _reconstruct(best)
    if perm.order:
        ev = perm_profit(scaled, perm)
        assert ev.total >= best.d * table.unit
        assert sum((scaled.weights[i] for i in perm.order), Fraction(0)) == best.makespan
    return perm
