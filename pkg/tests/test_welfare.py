import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crralloc import Allocation, build_instance, rank_vector, welfare
from crralloc.baseline import branch_and_bound, exact_baseline, objective_key
from crralloc.errors import BudgetExceeded, InfeasibleCapacities, UnsatisfiableGoal
from crralloc.welfare import (
    FlowOracle,
    StatelessOracle,
    check_feasible,
    completion,
    make_goal,
    max_rank,
    max_utilitarian,
)

from oracles import (
    brute_best,
    brute_completion,
    brute_max_rank,
    brute_max_utilitarian,
    random_instance,
)


def test_worked_example_optimum(worked_example):
    alloc, value = max_utilitarian(worked_example)
    assert value == 45 == brute_max_utilitarian(worked_example)
    assert welfare(worked_example, alloc) == 45
    alloc.validate(worked_example)


def test_incompatibility_optimum(incompatibility_unbounded, incompatibility_balanced):
    for inst in (incompatibility_unbounded, incompatibility_balanced):
        alloc, value = max_utilitarian(inst)
        assert value == 48
        assert alloc.bundles[2] >= {1, 2, 3}
        # the two agents with identical tastes are left with at most 24
        assert welfare(inst, alloc) - inst.utility(2, alloc.bundles[2]) <= 24


def test_incompatibility_rank_max(incompatibility_balanced):
    alloc, rv = max_rank(incompatibility_balanced)
    assert tuple(rv) == brute_max_rank(incompatibility_balanced)
    assert alloc.bundles[2] == {1, 2, 3}


@pytest.mark.parametrize("seed", range(60))
def test_flow_optima_match_enumeration(seed):
    inst = random_instance(np.random.default_rng(seed))
    alloc, value = max_utilitarian(inst)
    assert value == brute_max_utilitarian(inst)
    alloc.validate(inst)
    alloc, rv = max_rank(inst)
    assert tuple(rv) == brute_max_rank(inst)
    assert rank_vector(inst, alloc) == rv


@pytest.mark.parametrize("seed", range(40))
def test_fixed_pairs_respected(seed):
    rng = np.random.default_rng(1000 + seed)
    inst = random_instance(rng)
    base, _ = max_utilitarian(inst)
    pairs = base.pairs()
    fixed = Allocation.from_pairs(inst.n, [pairs[k] for k in rng.permutation(len(pairs))[: len(pairs) // 2]])
    alloc, value = max_utilitarian(inst, fixed)
    assert alloc.extends(fixed)
    assert value == brute_max_utilitarian(inst, fixed)


def test_check_feasible_raises():
    inst = build_instance(None, [[1, 2, 3]], (0, 3), (1, 1))
    check_feasible(inst).validate(inst)
    with pytest.raises(InfeasibleCapacities):
        build_instance(None, [[1, 2, 3]], (0, 2), (1, 1))


def test_threshold_above_optimum_is_unsatisfiable(worked_example):
    with pytest.raises(UnsatisfiableGoal):
        make_goal(worked_example, "utilitarian_threshold", threshold=46)
    goal = make_goal(worked_example, "utilitarian_threshold", threshold=40)
    assert goal.satisfied_by(max_utilitarian(worked_example)[0])


def test_worked_example_queries_after_two_rounds(worked_example):
    goal = make_goal(worked_example, "utilitarian_max")
    partial = Allocation([{0, 2}, {0, 2}, {1, 3}, {1, 3}])
    ans = completion(goal, worked_example, partial.with_pair(0, 4))
    assert ans and ans.witness.extends(partial.with_pair(0, 4))
    assert welfare(worked_example, ans.witness) == 45
    # once the first agent holds item 4, its second copy must go to the last agent
    partial = partial.with_pair(0, 4)
    for i in (1, 2):
        assert not completion(goal, worked_example, partial.with_pair(i, 4))
        assert not brute_completion(worked_example, "utilitarian_max", partial.with_pair(i, 4))
    assert completion(goal, worked_example, partial.with_pair(3, 4))


GOALS = ("null", "utilitarian_max", "rank_max", "utilitarian_threshold")


@pytest.mark.parametrize("seed", range(50))
def test_completion_matches_enumeration(seed):
    rng = np.random.default_rng(5000 + seed)
    inst = random_instance(rng)
    kind = GOALS[seed % len(GOALS)]
    threshold = None
    if kind == "utilitarian_threshold":
        threshold = brute_max_utilitarian(inst) - int(rng.integers(0, 4))
    goal = make_goal(inst, kind, threshold=threshold)
    for _ in range(6):
        pairs = [(i, o) for i in range(inst.n) for o in range(inst.m) if rng.random() < 0.3]
        partial = Allocation.from_pairs(inst.n, pairs)
        ans = completion(goal, inst, partial)
        assert bool(ans) == brute_completion(inst, kind, partial, threshold)
        if ans:
            assert ans.witness.extends(partial)
            assert goal.satisfied_by(ans.witness)


@pytest.mark.parametrize("seed", range(40))
def test_incremental_oracle_agrees_with_stateless(seed):
    rng = np.random.default_rng(7000 + seed)
    inst = random_instance(rng)
    goal = make_goal(inst, ("utilitarian_max", "rank_max", "null")[seed % 3])
    fast, slow = FlowOracle(goal), StatelessOracle(goal)
    for _ in range(inst.n * inst.m):
        i, o = int(rng.integers(inst.n)), int(rng.integers(inst.m))
        a, b = fast.ask(i, o), slow.ask(i, o)
        assert a == b
        if a:
            fast.accept(i, o)
            slow.accept(i, o)
            assert fast.partial == slow.partial
            assert goal.satisfied_by(fast.witness())
            assert fast.witness().extends(fast.partial)


def test_nash_balanced(two_agent_balanced):
    alloc = exact_baseline(two_agent_balanced, "nash")
    assert alloc == Allocation([{2, 3}, {0, 1}])
    assert welfare(two_agent_balanced, alloc, "nash") == 56


def test_nash_unconstrained(two_agent_free):
    alloc = exact_baseline(two_agent_free, "nash")
    assert welfare(two_agent_free, alloc, "nash") == 63


@pytest.mark.parametrize("objective", ["nash", "egalitarian", "lsowa"])
@pytest.mark.parametrize("seed", range(25))
def test_baselines_match_enumeration(objective, seed):
    inst = random_instance(np.random.default_rng(9000 + seed))
    _, key = branch_and_bound(inst, objective)
    best = brute_best(inst, lambda a: objective_key(inst, a, objective))
    if isinstance(key, tuple):
        assert key[0] == best[0] and key[1] == pytest.approx(best[1])
    else:
        assert key == pytest.approx(best)


def test_budget_exceeded_carries_incumbent():
    rng = np.random.default_rng(3)
    utils = rng.integers(1, 20, size=(6, 14)).tolist()
    inst = build_instance(None, utils, (2, 3), (1, 1))
    with pytest.raises(BudgetExceeded) as info:
        exact_baseline(inst, "nash", budget=5)
    info.value.incumbent.validate(inst)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_optimum_dominates_every_witness(seed):
    inst = random_instance(np.random.default_rng(seed))
    _, best = max_utilitarian(inst)
    witness = check_feasible(inst)
    assert welfare(inst, witness) <= best + 1e-9
