from fractions import Fraction as F

import pytest

from gik.errors import InfeasibleAssignment
from gik.instance import Instance, IntervalClassifier, perm_profit
from gik.light import (
    FractionalSolution,
    GapInstance,
    IntegralAssignment,
    assignment_to_perm,
    build_gap,
    greedy_restore,
    light_pipeline,
    lp_text,
    solve_lp,
    st_round,
)
from gik.oracle import brute_force, opt_decomposition
from gik.simplex import Unbounded, maximize

from support import INST_A, corpus


def test_simplex_small():
    value, x = maximize([F(3), F(2)], [[F(1), F(1)], [F(1), F(3)]], [F(4), F(6)])
    assert value == 12 and x == [4, 0]
    with pytest.raises(Unbounded):
        maximize([F(1)], [[F(-1)]], [F(1)])


def test_bucket_capacity():
    clf = IntervalClassifier(F(1, 4), 100)
    g = build_gap(INST_A, clf)
    assert g.capacities[5] == F(625, 1024)
    assert len(g.capacities) == clf.K - 1


def test_inst_a_profits_and_gate():
    clf = IntervalClassifier(F(1, 4), 10**4)
    inst = Instance.build([3, 4, 5], [7, 12, 10**4], [[8, 6, 0], [4, 9, 0], [5, 5, 0]])
    g = build_gap(inst, clf)
    for (i, k), q in g.profits.items():
        assert 3 < clf.heavy_threshold(k + 1) or i != 0
        if i == 0:
            c = clf.power(k)
            assert q == (8 if c <= 7 else 6 if c <= 12 else 0)
    for i in inst.items:
        for k in range(1, clf.K):
            if inst.weights[i] >= clf.heavy_threshold(k + 1):
                assert (i, k) not in g.allowed


def gap(caps, weights, profits):
    return GapInstance(caps, weights, profits)


def test_lp_examples():
    assert solve_lp(gap({1: F(5)}, {0: F(2)}, {(0, 1): F(5)})).objective == 5
    sol = solve_lp(gap({1: F(5), 2: F(5)}, {0: F(2)}, {(0, 1): F(5), (0, 2): F(7)}))
    assert sol.x == {(0, 2): 1}
    g = gap({1: F(3)}, {0: F(2), 1: F(2)}, {(0, 1): F(1), (1, 1): F(1)})
    assert solve_lp(g).objective == F(3, 2)
    assert "x0,1" in lp_text(g)


def test_rounding_examples():
    g = gap({1: F(5)}, {0: F(2)}, {(0, 1): F(5)})
    assert st_round(g, solve_lp(g)).assign == {0: 1}
    g = gap({1: F(3)}, {0: F(2), 1: F(2)}, {(0, 1): F(1), (1, 1): F(1)})
    r = st_round(g, solve_lp(g))
    # both items land in the bucket; dropping either one restores feasibility
    assert r.objective(g) == 2 >= F(3, 2)
    assert r.loads(g)[1] - g.weights[r.infeasibility[1]] <= g.capacities[1]
    assert st_round(g, FractionalSolution({}, F(0))).assign == {}


def test_greedy_restore():
    g = gap({1: F(5)}, {0: F(2), 1: F(2), 2: F(2)}, {(0, 1): F(6), (1, 1): F(4), (2, 1): F(2)})
    a = IntegralAssignment({0: 1, 1: 1, 2: 1})
    kept = greedy_restore(g, a)
    assert kept.assign == {0: 1, 1: 1} and kept.objective(g) == 10
    fine = IntegralAssignment({0: 1})
    assert greedy_restore(g, fine).assign == fine.assign
    g = gap({1: F(4)}, {0: F(2), 1: F(2), 2: F(2)}, {(0, 1): F(2), (1, 1): F(2), (2, 1): F(2)})
    assert greedy_restore(g, IntegralAssignment({0: 1, 1: 1, 2: 1})).assign == {0: 1, 1: 1}


def test_assignment_to_perm():
    g = gap({1: F(5)}, {0: F(3)}, {(0, 1): F(5)})
    inst = Instance.build([3], [5], [[5]])
    assert perm_profit(inst, assignment_to_perm(inst, g, IntegralAssignment({}))).total >= 0
    p = assignment_to_perm(inst, g, IntegralAssignment({0: 1}))
    assert perm_profit(inst, p).total >= 5
    over = gap({1: F(2)}, {0: F(3)}, {(0, 1): F(5)})
    with pytest.raises(InfeasibleAssignment):
        assignment_to_perm(inst, over, IntegralAssignment({0: 1}))


def test_all_heavy_gives_empty_assignment():
    tr = light_pipeline(INST_A, F(1, 4))
    assert tr.restored.assign == {}


def test_light_pipeline_guarantee():
    eps = F(1, 32)
    for _, _, inst in corpus(30, 6, 3, seed0=700, families=("heavy-tail-weights",),
                             params={"heavy-tail-weights": {"spread": 10**6}}):
        res = brute_force(inst)
        _, light = opt_decomposition(inst, eps, res)
        tr = light_pipeline(inst, eps)
        assert perm_profit(tr.instance, tr.permutation).total >= (1 - 13 * eps) * light
