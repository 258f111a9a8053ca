"""Light profit contribution through a bucketed generalized assignment problem."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InfeasibleAssignment, PostconditionViolated
from .instance import (
    Instance,
    IntervalClassifier,
    Permutation,
    check_epsilon,
    scale_to_wmin3,
)
from .simplex import maximize, tableau_text


@dataclass(frozen=True)
class GapInstance:
    """Buckets k = 1..K-1 with interval-length capacities.

    ``profits`` is keyed by the allowed (item, bucket) pairs.
    """

    capacities: Mapping[int, Fraction]
    weights: dict[int, Fraction]
    profits: dict[tuple[int, int], Fraction]

    @property
    def allowed(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.profits)


@dataclass(frozen=True)
class FractionalSolution:
    x: dict[tuple[int, int], Fraction]
    objective: Fraction


@dataclass(frozen=True)
class IntegralAssignment:
    assign: dict[int, int]
    infeasibility: dict[int, int] = field(default_factory=dict)  # bucket -> designated item

    def objective(self, g: GapInstance) -> Fraction:
        return sum((g.profits[(i, k)] for i, k in self.assign.items()), Fraction(0))

    def loads(self, g: GapInstance) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, k in self.assign.items():
            out[k] = out.get(k, Fraction(0)) + g.weights[i]
        return out


class BucketCapacities(Mapping):
    """Read-only map k -> (1+eps)^k - (1+eps)^(k-1) for k = 1..K-1, computed on demand."""

    def __init__(self, clf: IntervalClassifier):
        self._clf = clf

    def __getitem__(self, k: int) -> Fraction:
        if not 1 <= k < self._clf.K:
            raise KeyError(k)
        return self._clf.power(k) - self._clf.power(k - 1)

    def __iter__(self):
        return iter(range(1, self._clf.K))

    def __len__(self) -> int:
        return max(self._clf.K - 1, 0)


def build_gap(inst: Instance, clf: IntervalClassifier) -> GapInstance:
    """GAP over buckets 1..K-1 admitting (k+1)-light items (instance already scaled)."""
    caps = BucketCapacities(clf)
    profits = {}
    for i in inst.items:
        wi = inst.weights[i]
        # (i, k) is allowed iff i is (k+1)-light
        for k in range(max(1, clf.first_light(wi) - 1), clf.K):
            assert wi < clf.heavy_threshold(k + 1)
            profits[(i, k)] = inst.phi(i, clf.power(k))
    weights = {i: inst.weights[i] for i in inst.items}
    return GapInstance(caps, weights, profits)


def _lp_data(g: GapInstance):
    # pairs with zero profit never help the objective, so they are left out
    pairs = sorted(p for p, q in g.profits.items() if q > 0)
    items = sorted({i for i, _ in pairs})
    buckets = sorted({k for _, k in pairs})
    c = [g.profits[p] for p in pairs]
    A = []
    b = []
    for i in items:
        A.append([Fraction(1) if p[0] == i else Fraction(0) for p in pairs])
        b.append(Fraction(1))
    for k in buckets:
        A.append([g.weights[p[0]] if p[1] == k else Fraction(0) for p in pairs])
        b.append(g.capacities[k])
    return pairs, c, A, b


def solve_lp(g: GapInstance) -> FractionalSolution:
    pairs, c, A, b = _lp_data(g)
    if not pairs:
        return FractionalSolution({}, Fraction(0))
    value, x = maximize(c, A, b)
    sol = {p: v for p, v in zip(pairs, x) if v != 0}
    return FractionalSolution(sol, value)


def lp_text(g: GapInstance) -> str:
    """Debug dump of the LP relaxation."""
    pairs, c, A, b = _lp_data(g)
    return "vars " + " ".join(f"x{i},{k}" for i, k in pairs) + "\n" + tableau_text(c, A, b)


def _max_weight_matching(edges: dict[tuple[int, tuple[int, int]], Fraction]) -> dict[int, tuple[int, int]]:
    """Maximum-weight bipartite matching by successive longest augmenting paths."""
    left = sorted({u for u, _ in edges})
    right = sorted({v for _, v in edges})
    adj: dict[int, list[tuple[tuple[int, int], Fraction]]] = {u: [] for u in left}
    for (u, v), wt in sorted(edges.items()):
        adj[u].append((v, wt))
    mate_l: dict[int, tuple[int, int]] = {}
    mate_r: dict[tuple[int, int], int] = {}
    while True:
        dist_l = {u: Fraction(0) for u in left if u not in mate_l}
        dist_r: dict[tuple[int, int], Fraction] = {}
        pred_r: dict[tuple[int, int], int] = {}
        pred_l: dict[int, tuple[int, int]] = {}
        for _ in range(len(left) + len(right) + 1):
            changed = False
            for u in left:
                if u not in dist_l:
                    continue
                for v, wt in adj[u]:
                    if mate_l.get(u) == v:
                        continue
                    cand = dist_l[u] + wt
                    if v not in dist_r or cand > dist_r[v]:
                        dist_r[v] = cand
                        pred_r[v] = u
                        changed = True
            for v, u in mate_r.items():
                if v in dist_r:
                    cand = dist_r[v] - edges[(u, v)]
                    if u not in dist_l or cand > dist_l[u]:
                        dist_l[u] = cand
                        pred_l[u] = v
                        changed = True
            if not changed:
                break
        end = None
        for v in right:
            if v not in mate_r and v in dist_r and dist_r[v] > 0:
                if end is None or dist_r[v] > dist_r[end]:
                    end = v
        if end is None:
            return mate_l
        v = end
        while True:
            u = pred_r[v]
            prev = mate_l.get(u)
            mate_l[u] = v
            mate_r[v] = u
            if prev is None:
                break
            # u was matched to prev; prev is reached from pred_l[u]
            del mate_r[prev]
            v = pred_l[u]
            assert v == prev


def st_round(g: GapInstance, x: FractionalSolution) -> IntegralAssignment:
    """Slot-based rounding with the three guarantees asserted."""
    edges: dict[tuple[int, tuple[int, int]], Fraction] = {}
    by_bucket: dict[int, list[int]] = {}
    for (i, k), v in x.x.items():
        if v > 0:
            by_bucket.setdefault(k, []).append(i)
    for k, items in sorted(by_bucket.items()):
        items.sort(key=lambda i: (-g.weights[i], i))
        slot, room = 0, Fraction(1)
        for i in items:
            amount = x.x[(i, k)]
            while amount > 0:
                put = min(amount, room)
                edges[(i, (k, slot))] = g.profits[(i, k)]
                amount -= put
                room -= put
                if room == 0:
                    slot, room = slot + 1, Fraction(1)
        assert slot + (room < 1) == math.ceil(sum(x.x[(i, k)] for i in items))
    matching = _max_weight_matching(edges)
    assign = {i: slot[0] for i, slot in matching.items()}
    result = IntegralAssignment(dict(sorted(assign.items())))

    if result.objective(g) < x.objective:
        raise PostconditionViolated("rounded objective below the LP optimum")
    infeasibility = {}
    loads = result.loads(g)
    for k, load in sorted(loads.items()):
        members = [i for i, kk in result.assign.items() if kk == k]
        worst = min(members, key=lambda i: (-g.weights[i], i))
        infeasibility[k] = worst
        if load - g.weights[worst] > g.capacities[k]:
            raise PostconditionViolated(f"bucket {k} not fixable by removing a single item")
    for (i, k) in result.assign.items():
        if (i, k) not in g.profits:
            raise PostconditionViolated(f"pair ({i}, {k}) is not allowed")
    return IntegralAssignment(result.assign, infeasibility)


def greedy_restore(g: GapInstance, a: IntegralAssignment) -> IntegralAssignment:
    """In every overfull bucket keep the longest density-ordered prefix that fits."""
    assign = dict(a.assign)
    for k, load in sorted(a.loads(g).items()):
        cap = g.capacities[k]
        if load <= cap:
            continue
        members = sorted((i for i, kk in a.assign.items() if kk == k),
                         key=lambda i: (-g.profits[(i, k)] / g.weights[i], i))
        used = Fraction(0)
        mu = 0
        while mu < len(members) and used + g.weights[members[mu]] <= cap:
            used += g.weights[members[mu]]
            mu += 1
        assert mu == len(members) or used + g.weights[members[mu]] > cap
        for i in members[mu:]:
            del assign[i]
    return IntegralAssignment(assign)


def assignment_to_perm(inst: Instance, g: GapInstance, a: IntegralAssignment) -> Permutation:
    for k, load in a.loads(g).items():
        if load > g.capacities[k]:
            raise InfeasibleAssignment(f"bucket {k} holds {load} > {g.capacities[k]}")
    order = []
    for k in sorted(set(a.assign.values())):
        order.extend(sorted(i for i, kk in a.assign.items() if kk == k))
    order.extend(i for i in inst.items if i not in a.assign)
    return Permutation(tuple(order))


@dataclass(frozen=True)
class LightTrace:
    """Every intermediate object of one light-pipeline run."""

    instance: Instance
    classifier: IntervalClassifier
    gap: GapInstance
    fractional: FractionalSolution
    rounded: IntegralAssignment
    restored: IntegralAssignment
    permutation: Permutation


def light_pipeline(inst: Instance, epsilon) -> LightTrace:
    eps = check_epsilon(epsilon, upper=Fraction(1, 2))
    scaled = scale_to_wmin3(inst)
    clf = IntervalClassifier.for_instance(scaled, eps)
    g = build_gap(scaled, clf)
    x = solve_lp(g)
    rounded = st_round(g, x)
    restored = greedy_restore(g, rounded)
    perm = assignment_to_perm(scaled, g, restored)
    return LightTrace(scaled, clf, g, x, rounded, restored, perm)


def solve_light(inst: Instance, epsilon) -> Permutation:
    """Permutation from the rounded GAP solution (instance scaled internally)."""
    return light_pipeline(inst, epsilon).permutation
