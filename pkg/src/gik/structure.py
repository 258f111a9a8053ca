"""Verification harness for the sparse-crossing structure of near-optimal permutations.

Nothing here is used by a solver.  Given a permutation (typically an optimum
from the oracle) it applies the crossing-repair transform and the recursive
bisection, asserting every property the existence argument relies on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidIndexSets, PostconditionViolated
from .instance import Permutation, perm_profit
from .qptas import WellSpacedInstance, cross_count


@dataclass(frozen=True)
class FixResult:
    permutation: Permutation
    removed: int | None
    crossing: tuple[int, ...]  # the set X, in permutation order


@dataclass(frozen=True)
class FixStep:
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    crossing: tuple[int, ...]
    removed: int | None


@dataclass(frozen=True)
class SparseResult:
    permutation: Permutation
    trace: tuple[FixStep, ...]
    padded_M: int


def _members(wsi: WellSpacedInstance, indices) -> frozenset[int]:
    return frozenset().union(*(wsi.cluster(m) for m in indices)) if indices else frozenset()


def cross_between(wsi: WellSpacedInstance, p: Permutation, lower, upper) -> int:
    """Items of the upper clusters placed before the last item of the lower clusters."""
    low = _members(wsi, lower)
    high = _members(wsi, upper)
    last = max((pos for pos, i in enumerate(p.order) if i in low), default=-1)
    return sum(1 for i in p.order[:last] if i in high)


def fix_crossing(wsi: WellSpacedInstance, p: Permutation, M_minus, M_plus,
                 reference: Permutation) -> FixResult:
    """Remove the cheapest of the first 1/eps crossing items and pull lower-cluster items into its slot."""
    M_minus, M_plus = sorted(set(M_minus)), sorted(set(M_plus))
    if not M_minus or not M_plus or M_minus[-1] >= M_plus[0]:
        raise InvalidIndexSets("need max(M-) < min(M+), both non-empty")
    inv = int(1 / wsi.epsilon)
    inst = wsi.base
    if cross_between(wsi, p, M_minus, M_plus) < inv:
        return FixResult(p, None, ())
    low = _members(wsi, M_minus)
    high = _members(wsi, M_plus)
    X = tuple(i for i in p.order if i in high)[:inv]
    phi = perm_profit(inst, reference).phi
    victim = min(X, key=lambda i: (phi.get(i, Fraction(0)), i))
    cut = p.order.index(victim)
    after = p.order[cut + 1:]
    pulled = [i for i in after if i in low]
    rest = [i for i in after if i not in low]
    fixed = Permutation(p.order[:cut] + tuple(pulled) + tuple(rest))

    # property 1: sparse crossing
    if cross_between(wsi, fixed, M_minus, M_plus) > inv:
        raise PostconditionViolated("crossing count still above 1/eps")
    # property 2: completion times never grow
    before = perm_profit(inst, p).completion
    now = perm_profit(inst, fixed).completion
    for i, c in now.items():
        if c > before[i]:
            raise PostconditionViolated(f"completion time of item {i} grew from {before[i]} to {c}")
    # property 3: exactly the victim is gone, and it belongs to X
    if set(p.order) - set(fixed.order) != {victim} or victim not in X:
        raise PostconditionViolated("fix removed something other than one crossing item")
    if low and inst.weights[victim] < wsi.n_ref * max(inst.weights[i] for i in low):
        raise PostconditionViolated("removed item is not n times heavier than the lower clusters")
    return FixResult(fixed, victim, X)


def sparse_transform(wsi: WellSpacedInstance, opt: Permutation, epsilon=None) -> SparseResult:
    """Recursive bisection of the cluster indices, fixing crossings at every node."""
    eps = wsi.epsilon if epsilon is None else Fraction(epsilon)
    padded = 1
    while padded < max(wsi.M, 1):
        padded *= 2
    trace: list[FixStep] = []

    def solve(p: Permutation, lo: int, hi: int) -> Permutation:
        if lo == hi:
            return p
        mid = (lo + hi) // 2
        lower, upper = range(lo, mid + 1), range(mid + 1, hi + 1)
        res = fix_crossing(wsi, p, lower, upper, opt)
        trace.append(FixStep(tuple(lower), tuple(upper), res.crossing, res.removed))
        keep = _members(wsi, lower) | set(res.crossing)
        last = max((pos for pos, i in enumerate(res.permutation.order) if i in keep), default=-1)
        left = Permutation(res.permutation.order[:last + 1])
        right = Permutation(res.permutation.order[last + 1:])
        return solve(left, lo, mid) + solve(right, mid + 1, hi)

    sparse = solve(opt, 1, padded)
    inst = wsi.base
    limit = (padded.bit_length() - 1) * int(1 / eps)
    for m in range(1, wsi.M + 1):
        if cross_count(wsi, sparse, m) > limit:
            raise PostconditionViolated(f"cross_{m} exceeds {limit}")
    opt_eval = perm_profit(inst, opt)
    total = perm_profit(inst, sparse).total
    lost = sum((opt_eval.phi.get(i, Fraction(0)) for step in trace for i in step.crossing), Fraction(0))
    if total < opt_eval.total - eps * lost or total < (1 - eps) * opt_eval.total:
        raise PostconditionViolated("sparse permutation lost more than an eps fraction")
    removals = sum(1 for step in trace if step.removed is not None)
    if removals > padded - 1:
        raise PostconditionViolated("more removals than bisection nodes")
    return SparseResult(sparse, tuple(trace), padded)


def verify_disjoint_X(trace) -> bool:
    seen: set[int] = set()
    for step in trace:
        crossing = set(step.crossing)
        if crossing & seen:
            return False
        seen |= crossing
    return True


def trace_json(result: SparseResult) -> str:
    """Debug dump of the bisection tree."""
    return json.dumps({
        "padded_M": result.padded_M,
        "permutation": list(result.permutation.order),
        "steps": [{"lower": list(s.lower), "upper": list(s.upper),
                   "crossing": list(s.crossing), "removed": s.removed} for s in result.trace],
    }, indent=2)
