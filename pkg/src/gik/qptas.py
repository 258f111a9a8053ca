"""The general scheme: well-spaced candidates and the external dynamic program."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

from .budget import NEVER, Deadline
from .errors import BudgetExceeded, NonIntegerWeights, PostconditionViolated
from .instance import (
    Chain,
    Instance,
    Permutation,
    chain_profit,
    chain_to_perm,
    check_epsilon,
    max_single_profit,
    perm_profit,
    perm_to_chain,
    residual_instance,
    union_chains,
)
from .pipeline import BoundedQptas


@dataclass(frozen=True)
class WellSpacedInstance:
    """Items of ``base`` split into clusters C_1..C_M of increasing weight.

    ``n_ref`` is the item count of the instance the candidate was cut from;
    the spacing guarantees are stated in terms of it.
    """

    base: Instance
    clusters: tuple[frozenset[int], ...]
    shift: int
    epsilon: Fraction
    n_ref: int

    @property
    def M(self) -> int:
        return len(self.clusters)

    @cached_property
    def cluster_of(self) -> dict[int, int]:
        return {i: m for m, C in enumerate(self.clusters, start=1) for i in C}

    def cluster(self, m: int) -> frozenset[int]:
        """C_m, 1-based; indices past M (padding) are empty."""
        if 1 <= m <= self.M:
            return self.clusters[m - 1]
        return frozenset()

    def above(self, m: int) -> frozenset[int]:
        """Items of clusters with index > m."""
        return frozenset(i for i, c in self.cluster_of.items() if c > m)


@dataclass(frozen=True)
class ExternalState:
    m: int
    psi: Fraction
    crossing: frozenset[int]


@dataclass(frozen=True)
class ExtensionCertificate:
    extra: frozenset[int]
    order: tuple[int, ...]
    shift: Fraction
    marginal: Fraction
    omega: int


def bucket_index(weight: Fraction, w_min: Fraction, n: int) -> int:
    """The l >= 1 with n^(l-1) <= weight/w_min < n^l (always 1 when n = 1)."""
    if n <= 1:
        return 1
    ratio = weight / w_min
    level, bound = 1, n
    while ratio >= bound:
        level += 1
        bound *= n
    return level


def check_wellspaced(wsi: WellSpacedInstance) -> None:
    inv = int(1 / wsi.epsilon)
    n = wsi.n_ref
    w = wsi.base.weights
    for C in wsi.clusters:
        if max(w[i] for i in C) > min(w[i] for i in C) * Fraction(n) ** inv:
            raise PostconditionViolated("within-cluster weight ratio exceeds n^(1/eps)")
    for m1 in range(wsi.M):
        for m2 in range(m1 + 1, wsi.M):
            heavy_low = max(w[i] for i in wsi.clusters[m1])
            light_high = min(w[i] for i in wsi.clusters[m2])
            gap = Fraction(n) ** (1 + (m2 - m1 - 1) * inv)
            if light_high < heavy_low * gap:
                raise PostconditionViolated(f"clusters {m1 + 1} and {m2 + 1} closer than n^{1 + (m2 - m1 - 1) * inv}")


def build_wellspaced(inst: Instance, epsilon) -> list[WellSpacedInstance]:
    """One candidate per shift r: drop the buckets l = r (mod 1/eps), cluster the runs."""
    eps = check_epsilon(epsilon)
    inv = int(1 / eps)
    n = inst.n
    if n == 0:
        return [WellSpacedInstance(inst, (), r, eps, 0) for r in range(inv)]
    w_min = min(inst.weights[i] for i in inst.items)
    level = {i: bucket_index(inst.weights[i], w_min, n) for i in inst.items}
    L = max(level.values())
    out = []
    for r in range(inv):
        runs: list[list[int]] = [[]]
        for ell in range(1, L + 1):
            if ell % inv == r:
                runs.append([])
            else:
                runs[-1].append(ell)
        clusters = []
        for run in runs:
            members = frozenset(i for i in inst.items if level[i] in run)
            if members:
                clusters.append(members)
        kept = frozenset().union(*clusters) if clusters else frozenset()
        wsi = WellSpacedInstance(inst.with_items(kept), tuple(clusters), r, eps, n)
        check_wellspaced(wsi)
        out.append(wsi)
    return out


def cross_count(wsi: WellSpacedInstance, p: Permutation, m: int) -> int:
    """Items of clusters above m placed before the last item of C_m."""
    where = wsi.cluster_of
    last = -1
    for pos, i in enumerate(p.order):
        if where.get(i) == m:
            last = pos
    return sum(1 for i in p.order[:last] if where.get(i, 0) > m) if last >= 0 else 0


def crossing_limit(M: int, epsilon: Fraction) -> int:
    """ceil(log2 M) / eps, in integers."""
    if M <= 1:
        return 0
    return (M - 1).bit_length() * int(1 / epsilon)


def _require_integer_weights(inst: Instance) -> None:
    if any(inst.weights[i].denominator != 1 for i in inst.items):
        raise NonIntegerWeights("scale weights to integers before running the external program")


class _ExtensionSearch:
    """The omega-parameterised subproblem and its binary search, memoised."""

    def __init__(self, wsi: WellSpacedInstance, epsilon: Fraction, bounded: BoundedQptas,
                 deadline: Deadline):
        self.wsi = wsi
        self.eps = epsilon
        self.bounded = bounded
        self.deadline = deadline
        self.inst = wsi.base
        self.total = int(self.inst.total_weight)
        self._memo: dict = {}

    def evaluate(self, m: int, q_prev: frozenset[int], q_next: frozenset[int], delta: Fraction,
                 omega: int) -> ExtensionCertificate | None:
        inst = self.inst
        room = max(inst.capacities[-1] - delta, Fraction(0))
        effective = min(Fraction(omega), room)
        key = (m, q_prev, q_next, delta, effective)
        if key in self._memo:
            hit = self._memo[key]
            return hit if hit is None or hit.omega == omega else replace(hit, omega=omega)
        self.deadline.check()
        items = (self.wsi.cluster(m) | q_next) - q_prev
        forced = sorted(q_next - q_prev)
        caps = tuple(min(max(W - delta, Fraction(0)), Fraction(omega)) for W in inst.capacities)
        local = inst.with_items(items, caps)
        T = inst.T
        best = None
        best_value = Fraction(-1)
        for periods in itertools.product(range(1, T + 1), repeat=len(forced)):
            G = Chain.from_times(dict(zip(forced, periods)), T)
            loads = [local.weight_of(s) for s in G.sets]
            if any(load > cap for load, cap in zip(loads, caps)):
                continue
            residual = residual_instance(local, G)
            R = self.bounded(residual)
            value = chain_profit(local, G) + chain_profit(residual, R)
            if value > best_value:
                best_value, best = value, union_chains(G, R)
        cert = None
        if best is not None:
            perm = chain_to_perm(local, best)
            extra = best.inserted
            order = tuple(i for i in perm.order if i in extra)
            marginal = Fraction(0)
            c = delta
            for i in order:
                c += inst.weights[i]
                marginal += inst.phi(i, c)
            cert = ExtensionCertificate(frozenset(extra), order, delta, marginal, omega)
            assert extra >= q_next - q_prev and extra - (q_next - q_prev) <= self.wsi.cluster(m) - q_prev
        self._memo[key] = cert
        return cert

    def extend(self, m: int, q_prev: frozenset[int], q_next: frozenset[int], delta: Fraction,
               requirement: Fraction) -> ExtensionCertificate | None:
        """Smallest-omega certificate found by binary search, or None when omega = w(N) fails."""

        def accept(omega: int) -> ExtensionCertificate | None:
            cert = self.evaluate(m, q_prev, q_next, delta, omega)
            if cert is not None and cert.marginal >= requirement:
                return cert
            return None

        top = accept(self.total)
        if top is None:
            return None
        lo, hi, found = 0, self.total, top
        while lo < hi:
            mid = (lo + hi) // 2
            cert = accept(mid)
            if cert is not None:
                hi, found = mid, cert
            else:
                lo = mid + 1
        return found


def auxiliary_extend(wsi: WellSpacedInstance, from_state: ExternalState, to_state: ExternalState,
                     Delta, epsilon, *, bounded: BoundedQptas | None = None,
                     deadline: Deadline = NEVER) -> ExtensionCertificate | None:
    """Certificate for moving from ``from_state`` (cluster m-1) to ``to_state`` (cluster m)."""
    eps = check_epsilon(epsilon)
    _require_integer_weights(wsi.base)
    m = to_state.m
    if from_state.m != m - 1:
        raise ValueError("states must be in consecutive layers")
    if not (from_state.crossing - wsi.cluster(m)) <= to_state.crossing:
        return None
    bounded = bounded or BoundedQptas(eps, deadline=deadline)
    search = _ExtensionSearch(wsi, eps, bounded, deadline)
    requirement = (1 - eps) * (to_state.psi - from_state.psi)
    return search.extend(m, from_state.crossing, to_state.crossing, Fraction(Delta), requirement)


@dataclass(frozen=True, eq=False)
class _Entry:
    d: int
    makespan: Fraction
    parent: _Entry | None
    block: tuple[int, ...]


def _pareto(entries: list[_Entry]) -> list[_Entry]:
    kept: list[_Entry] = []
    for e in sorted(entries, key=lambda e: (-e.d, e.makespan)):
        if not kept or e.makespan < kept[-1].makespan:
            kept.append(e)
    return kept


def _subsets(pool: list[int], limit: int):
    for size in range(0, min(limit, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            yield frozenset(combo)


@dataclass(frozen=True)
class ExternalResult:
    permutation: Permutation
    psi: Fraction
    limit: int


def run_external_dp(wsi: WellSpacedInstance, epsilon, *, bounded: BoundedQptas | None = None,
                    deadline: Deadline = NEVER) -> ExternalResult:
    eps = check_epsilon(epsilon)
    inst = wsi.base
    _require_integer_weights(inst)
    inv = int(1 / eps)
    n = inst.n
    M = wsi.M
    limit = crossing_limit(M, eps)
    p_max = max_single_profit(inst)
    if n == 0 or p_max == 0:
        return ExternalResult(Permutation(()), Fraction(0), limit)
    unit = eps * p_max / (2 * n)
    d_max = 2 * n * n * inv
    W_T = inst.capacities[-1]
    bounded = bounded or BoundedQptas(eps, deadline=deadline)
    search = _ExtensionSearch(wsi, eps, bounded, deadline)

    layer: dict[frozenset[int], list[_Entry]] = {}
    for Q in _subsets(sorted(wsi.above(0)), limit):
        deadline.check()
        wQ = inst.weight_of(Q)
        if wQ > W_T:
            continue
        best_order, best_val = (), Fraction(-1)
        for order in itertools.permutations(sorted(Q)):
            val = perm_profit(inst, Permutation(order)).total
            if val > best_val:
                best_order, best_val = order, val
        d = min(d_max, int(best_val / unit))
        layer[Q] = [_Entry(d, wQ, None, best_order)]

    for m in range(1, M + 1):
        C_m = wsi.cluster(m)
        pool_above = sorted(wsi.above(m))
        grown: dict[frozenset[int], list[_Entry]] = {}
        for q_prev, entries in layer.items():
            forced = q_prev - C_m
            optional = [i for i in pool_above if i not in forced]
            for extra in _subsets(optional, limit - len(forced)):
                q_next = forced | extra
                for e in entries:
                    for step in range(0, d_max - e.d + 1):
                        deadline.check()
                        requirement = (1 - eps) * step * unit
                        cert = search.extend(m, q_prev, q_next, e.makespan, requirement)
                        if cert is None:
                            # the requirement only grows with step, and omega = w(N) already fails
                            break
                        makespan = e.makespan + inst.weight_of(cert.extra)
                        if makespan > W_T:
                            continue
                        grown.setdefault(q_next, []).append(_Entry(e.d + step, makespan, e, cert.order))
        layer = {Q: _pareto(es) for Q, es in grown.items()}

    finals = layer.get(frozenset(), [])
    if not finals:
        return ExternalResult(Permutation(()), Fraction(0), limit)
    best = max(finals, key=lambda e: (e.d, -e.makespan))
    blocks = []
    e = best
    while e is not None:
        blocks.append(e.block)
        e = e.parent
    perm = Permutation(tuple(i for block in reversed(blocks) for i in block))
    psi = best.d * unit
    got = perm_profit(inst, perm).total
    if got < (1 - eps) * psi:
        raise PostconditionViolated(f"reconstructed profit {got} below (1-eps) * {psi}")
    for mm in range(1, M + 1):
        if cross_count(wsi, perm, mm) > limit:
            raise PostconditionViolated(f"reconstruction crosses cluster {mm} more than {limit} times")
    return ExternalResult(perm, psi, limit)


def external_dp(wsi: WellSpacedInstance, epsilon, *, bounded: BoundedQptas | None = None,
                deadline: Deadline = NEVER) -> Permutation:
    return run_external_dp(wsi, epsilon, bounded=bounded, deadline=deadline).permutation


def integer_scale(inst: Instance) -> Instance:
    """Multiply weights and capacities by the least factor making every weight integral."""
    d = 1
    for i in inst.items:
        q = inst.weights[i].denominator
        d = d * q // math.gcd(d, q)
    return inst if d == 1 else inst.scaled(Fraction(d))


def qptas_general_solve(inst: Instance, epsilon, *, deadline: Deadline = NEVER) -> Chain:
    """Best chain over all shifted well-spaced candidates."""
    eps = check_epsilon(epsilon)
    if inst.n == 0:
        return Chain.empty(inst.T)
    scaled = integer_scale(inst)
    bounded = BoundedQptas(eps, deadline=deadline)
    best = Chain.empty(inst.T)
    best_value = Fraction(0)
    for wsi in build_wellspaced(scaled, eps):
        try:
            perm = external_dp(wsi, eps, bounded=bounded, deadline=deadline)
        except BudgetExceeded as exc:
            raise BudgetExceeded(best) from exc
        chain = Chain(perm_to_chain(wsi.base, perm).sets)
        value = chain_profit(inst, chain)
        if value > best_value:
            best, best_value = chain, value
    return best
