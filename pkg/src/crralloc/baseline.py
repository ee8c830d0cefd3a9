"""Exact branch-and-bound for Nash, egalitarian and LSOWA welfare.

Only practical at desk scale (a handful of agents and items).  The search
decides agents one at a time; within an agent, items are decided in order of
decreasing utility.  Bounds use each agent's best stand-alone bundle, so they
ignore item contention and stay valid.
"""
from __future__ import annotations

from itertools import accumulate

from .errors import BudgetExceeded
from .model import Allocation, Instance, lsowa_weights, nash_key, owa_value

BASELINE_OBJECTIVES = ("nash", "egalitarian", "lsowa")
_ALIASES = {"egal": "egalitarian", "nash": "nash", "egalitarian": "egalitarian", "lsowa": "lsowa"}


def _canonical(objective: str) -> str:
    try:
        return _ALIASES[objective]
    except KeyError:
        raise ValueError(f"unsupported baseline objective {objective!r}") from None


def objective_key(instance: Instance, allocation: Allocation, objective: str):
    """Comparable objective value: larger is better.

    Nash compares ``(agents with positive utility, product over them)``.
    """
    objective = _canonical(objective)
    if objective == "lsowa":
        w = lsowa_weights(instance)
        return sum(owa_value([instance.utilities[i, o] for o in b], w) for i, b in enumerate(allocation.bundles))
    vals = [instance.utility(i, b) for i, b in enumerate(allocation.bundles)]
    if objective == "nash":
        return nash_key(vals)
    return min(vals)


class _Search:
    def __init__(self, instance: Instance, objective: str, budget: int, fixed: Allocation):
        self.inst = instance
        self.objective = objective
        self.budget = budget
        self.nodes = 0
        self.n, self.m = instance.n, instance.m
        self.util = instance.utilities
        self.weights = lsowa_weights(instance) if objective == "lsowa" else None
        self.fixed = [set(b) for b in fixed.bundles]
        # items each agent may still decide on, best first
        self.order = [
            [o for o in sorted(range(self.m), key=lambda o: (-self.util[i, o], o)) if o not in self.fixed[i]]
            for i in range(self.n)
        ]
        self.counts = fixed.item_counts(self.m).astype(int).tolist()
        self.bundles = [sorted(b) for b in self.fixed]
        self.scores: list = [None] * self.n
        self.static_ub = [self._agent_ub(i, self.bundles[i], self.order[i]) for i in range(self.n)]
        # spare[a]: how many more items agents a..n-1 can still take
        self.spare = [0] * (self.n + 1)
        for i in range(self.n - 1, -1, -1):
            self.spare[i] = self.spare[i + 1] + instance.agent_caps[i][1] - len(self.fixed[i])
        self.best = None
        self.best_key = None

    # scoring --------------------------------------------------------------

    def _score(self, i: int, items) -> float:
        if self.objective == "lsowa":
            return owa_value([self.util[i, o] for o in items], self.weights)
        return float(sum(self.util[i, o] for o in items))

    def _agent_ub(self, i: int, bundle, candidates) -> float | None:
        lo, hi = self.inst.agent_caps[i]
        size = len(bundle)
        e_min = max(0, lo - size)
        e_max = min(hi - size, len(candidates))
        if e_min > e_max:
            return None
        best = None
        if self.objective == "lsowa":
            for e in range(e_min, e_max + 1):
                s = self._score(i, list(bundle) + list(candidates[:e]))
                best = s if best is None or s > best else best
            return best
        base = float(sum(self.util[i, o] for o in bundle))
        pref = [0.0] + list(accumulate(float(self.util[i, o]) for o in candidates))
        return max(base + pref[e] for e in range(e_min, e_max + 1))

    def _aggregate(self, values):
        if self.objective == "nash":
            return nash_key(values)
        if self.objective == "egalitarian":
            return min(values)
        return sum(values)

    def _better(self, key) -> bool:
        return self.best_key is None or key > self.best_key

    # search ---------------------------------------------------------------

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(
                f"branch-and-bound exceeded {self.budget} nodes",
                incumbent=self.best,
                value=self.best_key,
            )

    def _bound(self, a: int, current_ub: float):
        vals = self.scores[:a] + [current_ub] + self.static_ub[a + 1 :]
        return self._aggregate(vals)

    def run(self):
        self._agent(0)

    def _agent(self, a: int):
        self._tick()
        if a == self.n:
            for o, (lo, _) in enumerate(self.inst.item_caps):
                if self.counts[o] < lo:
                    return
            key = self._aggregate(self.scores)
            if self._better(key):
                self.best_key = key
                self.best = Allocation(self.bundles)
            return
        # item lower bounds must be reachable by agents a..n-1
        remaining_agents = self.n - a
        deficit = 0
        for o, (lo, _) in enumerate(self.inst.item_caps):
            d = lo - self.counts[o]
            if d > remaining_agents:
                return
            deficit += max(0, d)
        if deficit > self.spare[a]:
            return
        self._item(a, 0)

    def _item(self, a: int, k: int):
        self._tick()
        order = self.order[a]
        bundle = self.bundles[a]
        lo, hi = self.inst.agent_caps[a]
        cands = [o for o in order[k:] if self.counts[o] < self.inst.item_caps[o][1]]
        if len(bundle) + len(cands) < lo:
            return
        ub = self._agent_ub(a, bundle, cands)
        if ub is None:
            return
        if self.best_key is not None and not self._bound(a, ub) > self.best_key:
            return
        if k == len(order):
            self.scores[a] = self._score(a, bundle)
            self._agent(a + 1)
            self.scores[a] = None
            return
        o = order[k]
        if len(bundle) < hi and self.counts[o] < self.inst.item_caps[o][1]:
            bundle.append(o)
            self.counts[o] += 1
            self._item(a, k + 1)
            self.counts[o] -= 1
            bundle.pop()
        # skipping o leaves agents a+1.. to cover its lower bound
        if self.inst.item_caps[o][0] - self.counts[o] <= self.n - a - 1:
            self._item(a, k + 1)


def branch_and_bound(
    instance: Instance,
    objective: str,
    budget: int = 2_000_000,
    fixed: Allocation | None = None,
):
    """Optimal complete allocation extending ``fixed`` and its objective key.

    The utilitarian-maximal extension seeds the incumbent, which also proves
    feasibility (max_utilitarian raises Infeasible when there is
    none).  Raises BudgetExceeded when the node budget runs out.
    """
    from .welfare import max_utilitarian

    objective = _canonical(objective)
    fixed = fixed if fixed is not None else Allocation.empty(instance.n)
    seed, _ = max_utilitarian(instance, fixed)
    search = _Search(instance, objective, budget, fixed)
    search.best = seed
    search.best_key = objective_key(instance, seed, objective)
    search.run()
    return search.best, search.best_key


def exact_baseline(
    instance: Instance,
    objective: str,
    budget: int = 2_000_000,
    fixed: Allocation | None = None,
) -> Allocation:
    """Allocation maximizing Nash, egalitarian or LSOWA welfare.

    >>> from crralloc.model import build_instance
    >>> inst = build_instance(None, [[5, 5, 2, 2], [7, 7, 0, 0]], (2, 2), (1, 1))
    >>> exact_baseline(inst, "nash")
    Allocation([[2, 3], [0, 1]])
    """
    alloc, _ = branch_and_bound(instance, objective, budget, fixed)
    return alloc


__all__ = ["BASELINE_OBJECTIVES", "branch_and_bound", "exact_baseline", "objective_key"]
