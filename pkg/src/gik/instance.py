"""Instances, chains and permutations, and the algebra connecting them.

All quantities are :class:`fractions.Fraction`.  An :class:`Instance` keeps
the full weight and profit tables of the instance it was derived from and an
``items`` tuple naming the items that are actually present, so that residual
and restricted instances share item ids with their parent and chains can be
moved between them without relabelling.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    InfeasibleChain,
    InvalidChain,
    InvalidEpsilon,
    InvalidInstance,
    NegativeProfit,
    NonMonotoneCapacities,
    NonPositiveWeight,
    OutOfRange,
    OverlappingChains,
    UnknownItem,
)


def as_fraction(value) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a "p/q" string."""
    if isinstance(value, bool):
        raise InvalidInstance(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"not a rational: {value!r}") from exc
    raise InvalidInstance(f"not a rational: {value!r} (use an integer or a 'p/q' string)")


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Instance:
    """A GIK instance.

    ``weights`` and ``profits`` are indexed by item id; ``items`` lists the
    ids that belong to this instance (all of them unless the instance was
    derived by restriction or as a residual).
    """

    weights: tuple[Fraction, ...]
    capacities: tuple[Fraction, ...]
    profits: tuple[tuple[Fraction, ...], ...]
    items: tuple[int, ...] = None  # type: ignore[assignment]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.items is None:
            object.__setattr__(self, "items", tuple(range(len(self.weights))))

    @classmethod
    def build(cls, weights: Sequence, capacities: Sequence, profits: Sequence[Sequence],
              labels: Sequence[str] | None = None) -> Instance:
        """Validate raw data and return a canonical instance."""
        w = tuple(as_fraction(x) for x in weights)
        W = tuple(as_fraction(x) for x in capacities)
        if len(W) == 0:
            raise DimensionMismatch("at least one period is required")
        if len(profits) != len(w):
            raise DimensionMismatch(f"{len(w)} weights but {len(profits)} profit rows")
        p = []
        for i, row in enumerate(profits):
            if len(row) != len(W):
                raise DimensionMismatch(f"profit row {i} has {len(row)} entries, expected {len(W)}")
            p.append(tuple(as_fraction(x) for x in row))
        for i, x in enumerate(w):
            if x <= 0:
                raise NonPositiveWeight(f"weight of item {i} is {x}")
        for t in range(1, len(W)):
            if W[t] < W[t - 1]:
                raise NonMonotoneCapacities(f"W_{t} = {W[t - 1]} > W_{t + 1} = {W[t]}")
        for i, row in enumerate(p):
            for t, x in enumerate(row):
                if x < 0:
                    raise NegativeProfit(f"p[{i}][{t}] = {x}")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != len(w) or len(set(labels)) != len(labels):
                raise DimensionMismatch("item labels must be distinct, one per item")
        return cls(w, W, tuple(p), None, labels)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def T(self) -> int:
        return len(self.capacities)

    @property
    def item_ids(self) -> tuple[int, ...]:
        return self.items

    @cached_property
    def item_set(self) -> frozenset[int]:
        return frozenset(self.items)

    @cached_property
    def total_weight(self) -> Fraction:
        return sum((self.weights[i] for i in self.items), Fraction(0))

    @cached_property
    def key(self) -> tuple:
        """Hashable identity used by memo tables."""
        return (self.weights, self.profits, self.items, self.capacities)

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __hash__(self) -> int:
        return self._hash

    def weight_of(self, items: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in items), Fraction(0))

    def check_items(self, items: Iterable[int]) -> None:
        known = self.item_set
        for i in items:
            if i not in known:
                raise UnknownItem(i)

    @cached_property
    def _suffix_best(self) -> dict[int, list[tuple[Fraction, int]]]:
        # _suffix_best[i][t] = (max_{tau >= t} p_i,tau, earliest maximiser), 0-based periods
        table = {}
        for i in self.items:
            row = self.profits[i]
            best = []
            cur = (Fraction(0), self.T)
            for t in range(self.T - 1, -1, -1):
                if row[t] >= cur[0]:
                    cur = (row[t], t)
                best.append(cur)
            best.reverse()
            table[i] = best
        return table

    def first_period(self, completion: Fraction) -> int:
        """0-based index of the first period whose capacity covers ``completion`` (T if none)."""
        return bisect.bisect_left(self.capacities, completion)

    def phi(self, item: int, completion: Fraction) -> Fraction:
        """Best profit of ``item`` among periods with W_t >= completion (0 beyond W_T)."""
        t0 = self.first_period(completion)
        if t0 >= self.T:
            return Fraction(0)
        return self._suffix_best[item][t0][0]

    def best_period(self, item: int, completion: Fraction) -> int | None:
        """Earliest 0-based period attaining :meth:`phi`, or None past W_T."""
        t0 = self.first_period(completion)
        if t0 >= self.T:
            return None
        return self._suffix_best[item][t0][1]

    def with_items(self, items: Iterable[int], capacities: Sequence[Fraction] | None = None) -> Instance:
        """Same weight/profit tables restricted to ``items``, optionally with new capacities."""
        items = tuple(sorted(items))
        caps = self.capacities if capacities is None else tuple(Fraction(c) for c in capacities)
        return Instance(self.weights, caps, self.profits, items, self.labels)

    def scaled(self, factor: Fraction) -> Instance:
        factor = Fraction(factor)
        return Instance(tuple(w * factor for w in self.weights),
                        tuple(c * factor for c in self.capacities),
                        self.profits, self.items, self.labels)


@dataclass(frozen=True)
class Chain:
    """Nested item sets S_1 <= ... <= S_T."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        for t in range(1, len(sets)):
            if not sets[t - 1] <= sets[t]:
                raise InvalidChain(f"S_{t} is not contained in S_{t + 1}")

    @classmethod
    def empty(cls, T: int) -> Chain:
        return cls(tuple(frozenset() for _ in range(T)))

    @classmethod
    def from_times(cls, times: Mapping[int, int], T: int) -> Chain:
        """Chain from 1-based insertion periods; items absent from ``times`` are never inserted."""
        sets = []
        for t in range(1, T + 1):
            sets.append(frozenset(i for i, ti in times.items() if ti <= t))
        return cls(tuple(sets))

    @property
    def T(self) -> int:
        return len(self.sets)

    @property
    def inserted(self) -> frozenset[int]:
        return self.sets[-1] if self.sets else frozenset()

    def insertion_times(self) -> dict[int, int]:
        """Map each inserted item to its 1-based insertion period."""
        times = {}
        for t, s in enumerate(self.sets, start=1):
            for i in s:
                times.setdefault(i, t)
        return times

    def blocks(self) -> list[frozenset[int]]:
        """The sets S_t minus S_(t-1), in period order."""
        out = []
        prev: frozenset[int] = frozenset()
        for s in self.sets:
            out.append(s - prev)
            prev = s
        return out

    def to_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.sets]


@dataclass(frozen=True)
class Permutation:
    """An ordered subset of items for the sequencing view."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        if len(set(order)) != len(order):
            raise InvalidChain("permutation contains a duplicate item")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __add__(self, other: Permutation) -> Permutation:
        return Permutation(self.order + tuple(other.order))


@dataclass(frozen=True)
class PermEvaluation:
    total: Fraction
    completion: dict[int, Fraction]
    phi: dict[int, Fraction]


def validate_instance(raw) -> Instance:
    """Build an :class:`Instance` from a mapping with weights/capacities/profits."""
    if isinstance(raw, Instance):
        return Instance.build(raw.weights, raw.capacities, raw.profits, raw.labels)
    if not isinstance(raw, Mapping):
        raise InvalidInstance("instance description must be a mapping")
    try:
        weights = raw["weights"]
        capacities = raw["capacities"]
        profits = raw["profits"]
    except KeyError as exc:
        raise InvalidInstance(f"missing field {exc.args[0]!r}") from exc
    for name, value in (("weights", weights), ("capacities", capacities), ("profits", profits)):
        if not isinstance(value, (list, tuple)):
            raise InvalidInstance(f"{name} must be a list")
    if any(not isinstance(row, (list, tuple)) for row in profits):
        raise InvalidInstance("profits must be a list of rows")
    return Instance.build(weights, capacities, profits, raw.get("item_ids"))


def scale_to_wmin3(inst: Instance) -> Instance:
    """Scale weights and capacities so the lightest present item weighs exactly 3."""
    if inst.n == 0:
        return inst
    w_min = min(inst.weights[i] for i in inst.items)
    if w_min == 3:
        return inst
    return inst.scaled(Fraction(3) / w_min)


def _check_chain(inst: Instance, c: Chain) -> None:
    if c.T != inst.T:
        raise InvalidChain(f"chain has {c.T} periods, instance has {inst.T}")
    inst.check_items(c.inserted)


def chain_loads(inst: Instance, c: Chain) -> list[Fraction]:
    _check_chain(inst, c)
    return [inst.weight_of(s) for s in c.sets]


def chain_feasible(inst: Instance, c: Chain) -> bool:
    return all(load <= cap for load, cap in zip(chain_loads(inst, c), inst.capacities))


def chain_profit(inst: Instance, c: Chain) -> Fraction:
    _check_chain(inst, c)
    total = Fraction(0)
    for t, block in enumerate(c.blocks()):
        for i in block:
            total += inst.profits[i][t]
    return total


def perm_profit(inst: Instance, p: Permutation) -> PermEvaluation:
    inst.check_items(p.order)
    completion: dict[int, Fraction] = {}
    phi: dict[int, Fraction] = {}
    c = Fraction(0)
    total = Fraction(0)
    for i in p.order:
        c += inst.weights[i]
        completion[i] = c
        v = inst.phi(i, c)
        phi[i] = v
        total += v
    return PermEvaluation(total, completion, phi)


def chain_to_perm(inst: Instance, c: Chain) -> Permutation:
    """Blocks S_t minus S_(t-1) in period order, then the never-inserted items."""
    if not chain_feasible(inst, c):
        raise InfeasibleChain("chain_to_perm needs a feasible chain")
    order: list[int] = []
    for block in c.blocks():
        order.extend(sorted(block))
    order.extend(sorted(inst.item_set - c.inserted))
    return Permutation(tuple(order))


def perm_to_chain(inst: Instance, p: Permutation) -> Chain:
    inst.check_items(p.order)
    times = {}
    c = Fraction(0)
    for i in p.order:
        c += inst.weights[i]
        t = inst.best_period(i, c)
        if t is not None:
            times[i] = t + 1
    return Chain.from_times(times, inst.T)


def max_single_profit(inst: Instance) -> Fraction:
    """p_max: the largest p_it over pairs with w_i <= W_t."""
    best = Fraction(0)
    for i in inst.items:
        v = inst.phi(i, inst.weights[i])
        if v > best:
            best = v
    return best


def check_epsilon(epsilon, *, upper: Fraction = Fraction(1), integral: bool = True) -> Fraction:
    """Validate a tolerance: 0 < eps < upper, optionally with 1/eps integral."""
    eps = as_fraction(epsilon) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 < eps < upper:
        raise InvalidEpsilon(f"epsilon must lie in (0, {upper}), got {eps}")
    if integral and eps.numerator != 1:
        raise InvalidEpsilon(f"1/epsilon must be an integer, got epsilon = {eps}")
    return eps


_POWER_TABLES: dict[Fraction, list[Fraction]] = {}


class IntervalClassifier:
    """Geometric intervals I_0 = [0, 1], I_k = ((1+eps)^(k-1), (1+eps)^k].

    K is the least integer with (1+eps)^K >= total weight, so the intervals
    I_0..I_K cover every completion time of the instance it was built for.
    """

    def __init__(self, epsilon: Fraction, total_weight: Fraction):
        self.epsilon = check_epsilon(epsilon, integral=False)
        self.base = 1 + self.epsilon
        # power tables are shared between classifiers with the same epsilon
        self._powers = _POWER_TABLES.setdefault(self.base, [Fraction(1)])
        total_weight = Fraction(total_weight)
        while self._powers[-1] < total_weight:
            self._powers.append(self._powers[-1] * self.base)
        self.K = bisect.bisect_left(self._powers, total_weight) if total_weight > 1 else 0
        self.total_weight = total_weight

    @classmethod
    def for_instance(cls, inst: Instance, epsilon) -> IntervalClassifier:
        return cls(epsilon, inst.total_weight)

    def power(self, k: int) -> Fraction:
        """(1+eps)^k, cached."""
        while len(self._powers) <= k:
            self._powers.append(self._powers[-1] * self.base)
        return self._powers[k]

    def heavy_threshold(self, k: int) -> Fraction:
        return self.epsilon * self.epsilon * self.power(k)

    def first_light(self, item_weight: Fraction) -> int:
        """Smallest k for which an item of this weight is k-light (may exceed K)."""
        target = Fraction(item_weight) / (self.epsilon * self.epsilon)
        while self._powers[-1] <= target:
            self._powers.append(self._powers[-1] * self.base)
        return bisect.bisect_right(self._powers, target)

    def interval_of(self, completion: Fraction) -> int:
        if completion < 0 or completion > self.power(self.K):
            raise OutOfRange(f"completion {completion} outside [0, (1+eps)^K]")
        if completion <= 1:
            return 0
        return bisect.bisect_left(self._powers, completion, 0, self.K + 1)

    def is_heavy(self, item_weight: Fraction, k: int) -> bool:
        return item_weight >= self.heavy_threshold(k)


def classify(clf: IntervalClassifier, completion: Fraction, item_weight: Fraction) -> tuple[int, bool]:
    k = clf.interval_of(Fraction(completion))
    return k, clf.is_heavy(Fraction(item_weight), k)


def decompose_profit(inst: Instance, p: Permutation, clf: IntervalClassifier) -> tuple[Fraction, Fraction]:
    """Split Psi(p) into the heavy and light contributions."""
    ev = perm_profit(inst, p)
    heavy = Fraction(0)
    light = Fraction(0)
    for i in p.order:
        _, is_heavy = classify(clf, ev.completion[i], inst.weights[i])
        if is_heavy:
            heavy += ev.phi[i]
        else:
            light += ev.phi[i]
    return heavy, light


def restrict_chain(c: Chain, G: Iterable[int]) -> Chain:
    G = frozenset(G)
    return Chain(tuple(s & G for s in c.sets))


def union_chains(c1: Chain, c2: Chain) -> Chain:
    if c1.T != c2.T:
        raise InvalidChain("chains have different horizons")
    if c1.inserted & c2.inserted:
        raise OverlappingChains(f"items inserted by both chains: {sorted(c1.inserted & c2.inserted)}")
    return Chain(tuple(a | b for a, b in zip(c1.sets, c2.sets)))


def residual_capacities(inst: Instance, g: Chain) -> tuple[Fraction, ...]:
    loads = chain_loads(inst, g)
    caps = [W - load for W, load in zip(inst.capacities, loads)]
    for t in range(len(caps) - 2, -1, -1):
        if caps[t + 1] < caps[t]:
            caps[t] = caps[t + 1]
    return tuple(caps)


def residual_instance(inst: Instance, g: Chain) -> Instance:
    if not chain_feasible(inst, g):
        raise InfeasibleChain("residual of an infeasible chain")
    return inst.with_items(inst.item_set - g.inserted, residual_capacities(inst, g))
