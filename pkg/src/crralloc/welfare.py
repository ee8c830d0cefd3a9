"""Welfare optimizers and completion oracles.

Utilitarian- and rank-maximal allocations are min-cost circulations on the
network ``source -> agents -> items -> sink -> source``; agent->item arcs
have capacity [0, 1] (or [1, 1] when the pair is already fixed).  Rank
maximality uses lexicographic vector costs.  Nash, egalitarian and LSOWA
goals go through the branch-and-bound in :mod:`crralloc.baseline`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import Infeasible, InfeasibleCapacities, NoFeasibleCompletion, UnsatisfiableGoal
from .flow import FlowNetwork, ResidualGraph, residual_of, solve_flow
from .model import Allocation, Instance, LexVector, RankVector, nash_key

FLOW_KINDS = ("null", "utilitarian", "rank")

GOAL_KINDS = (
    "null",
    "utilitarian_max",
    "utilitarian_threshold",
    "rank_max",
    "nash_max",
    "egal_max",
    "lsowa_max",
)

_BASELINE_OBJECTIVE = {"nash_max": "nash", "egal_max": "egalitarian", "lsowa_max": "lsowa"}

DEFAULT_BUDGET = 2_000_000


def exact_number(x: float):
    """Exact version of a float utility: ``int`` when integral, else ``Fraction``."""
    x = float(x)
    if x.is_integer():
        return int(x)
    return Fraction(x)


class AllocationFlow:
    """The allocation network of an instance, with an optional fixed partial.

    ``kind`` selects the arc costs: ``null`` (all zero), ``utilitarian``
    (negated utilities) or ``rank`` (negated unit rank vectors).
    After :meth:`solve`, :meth:`probe` and :meth:`commit` grow the fixed part
    one pair at a time while keeping the flow optimal.
    """

    def __init__(self, instance: Instance, kind: str, fixed: Allocation | None = None):
        if kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow kind {kind!r}")
        self.instance = instance
        self.kind = kind
        n, m = instance.n, instance.m
        if kind == "rank":
            self.zero = LexVector.zeros(instance.num_classes)
        else:
            self.zero = 0
        self.source, self.sink = 0, n + m + 1
        net = FlowNetwork(n + m + 2, self.zero)
        fixed = fixed if fixed is not None else Allocation.empty(n)
        if not fixed.respects_upper(instance):
            raise NoFeasibleCompletion("partial allocation exceeds an upper capacity")
        for i, (lo, hi) in enumerate(instance.agent_caps):
            net.add_arc(self.source, 1 + i, lo, hi)
        self.pair_arc = {}
        for i in range(n):
            for o in range(m):
                lo = 1 if o in fixed.bundles[i] else 0
                self.pair_arc[i, o] = net.add_arc(1 + i, 1 + n + o, lo, 1, self._pair_cost(i, o))
        for o, (lo, hi) in enumerate(instance.item_caps):
            net.add_arc(1 + n + o, self.sink, lo, hi)
        net.add_arc(self.sink, self.source, 0, None)
        self.net = net
        self.flows: list[int] | None = None
        self._res: ResidualGraph | None = None
        self._edge_of: list[int] | None = None

    def _pair_cost(self, i: int, o: int):
        if self.kind == "utilitarian":
            return -exact_number(self.instance.utilities[i, o])
        if self.kind == "rank":
            return LexVector.unit(self.instance.num_classes, int(self.instance.ranks[i, o]), -1)
        return 0

    def solve(self) -> "AllocationFlow":
        try:
            self.flows = solve_flow(self.net)
        except Infeasible as exc:
            raise NoFeasibleCompletion(str(exc)) from None
        self.cost = self.net.flow_cost(self.flows)
        self._res = None
        return self

    def allocation(self) -> Allocation:
        alloc = Allocation.empty(self.instance.n)
        for (i, o), a in self.pair_arc.items():
            if self.flows[a]:
                alloc.bundles[i].add(o)
        return alloc

    def value(self):
        """Welfare of the current flow: utilitarian sum or rank vector."""
        if self.kind == "rank":
            return RankVector(-self.cost)
        return -self.cost

    # incremental interface -------------------------------------------------

    def _residual(self) -> ResidualGraph:
        if self._res is None:
            self._res, self._edge_of = residual_of(self.net, self.flows)
        return self._res

    def holds(self, i: int, o: int) -> bool:
        return bool(self.flows[self.pair_arc[i, o]])

    def probe(self, i: int, o: int):
        """Cost of the best circulation that also routes pair ``(i, o)``.

        Returns ``(cost, path)``; ``path`` is None when the current flow
        already uses the pair.  Returns None if no such circulation exists.
        """
        a = self.pair_arc[i, o]
        if self.flows[a]:
            return self.cost, None
        res = self._residual()
        e = self._edge_of[a]
        if res.cap[e] <= 0:
            return None
        dist, prev = res.bellman_ford(1 + self.instance.n + o, banned=frozenset((e, e ^ 1)))
        if dist[1 + i] is None:
            return None
        path = [e] + res.path_to(prev, 1 + self.instance.n + o, 1 + i)
        return self.cost + self.net.cost[a] + dist[1 + i], path

    def commit(self, i: int, o: int, probed) -> None:
        """Fix pair ``(i, o)`` using the result of :meth:`probe`."""
        cost, path = probed
        a = self.pair_arc[i, o]
        res = self._residual()
        if path is not None:
            res.push(path, 1)
            for arc, e in enumerate(self._edge_of):
                self.flows[arc] = self.net.lo[arc] + res.cap[e + 1]
            self.cost = cost
        self.net.lo[a] = 1
        res.cap[self._edge_of[a] + 1] = 0


def check_feasible(instance: Instance) -> Allocation:
    """Return some complete allocation or raise InfeasibleCapacities."""
    for o, (lo, hi) in enumerate(instance.item_caps):
        if lo > instance.n:
            raise InfeasibleCapacities(f"item {o} needs {lo} copies but there are only {instance.n} agents")
    try:
        return AllocationFlow(instance, "null").solve().allocation()
    except NoFeasibleCompletion as exc:
        raise InfeasibleCapacities(str(exc)) from None


def max_utilitarian(instance: Instance, fixed: Allocation | None = None) -> tuple[Allocation, float]:
    """Utilitarian-maximal complete allocation extending ``fixed``."""
    flow = AllocationFlow(instance, "utilitarian", fixed).solve()
    return flow.allocation(), float(flow.value())


def max_rank(instance: Instance, fixed: Allocation | None = None) -> tuple[Allocation, RankVector]:
    """Rank-maximal complete allocation extending ``fixed``."""
    flow = AllocationFlow(instance, "rank", fixed).solve()
    return flow.allocation(), flow.value()


@dataclass
class WelfareGoal:
    """A welfare target bound to one instance, with its optimum cached."""

    kind: str
    instance: Instance
    threshold: object = None
    cached_optimum: object = None
    witness: Allocation | None = None
    budget: int = DEFAULT_BUDGET

    @property
    def flow_kind(self) -> str | None:
        if self.kind == "null":
            return "null"
        if self.kind.startswith("utilitarian"):
            return "utilitarian"
        if self.kind == "rank_max":
            return "rank"
        return None

    def cost_bound(self):
        """Largest flow cost that still meets the goal (None: any feasible)."""
        if self.kind == "utilitarian_max":
            return -self.cached_optimum
        if self.kind == "utilitarian_threshold":
            return -self.threshold
        if self.kind == "rank_max":
            return -self.cached_optimum
        return None

    def satisfied_by(self, allocation: Allocation) -> bool:
        inst = self.instance
        if not allocation.is_complete(inst):
            return False
        if self.kind == "null":
            return True
        if self.flow_kind == "utilitarian":
            value = sum(exact_number(inst.utilities[i, o]) for i, o in allocation.pairs())
            target = self.threshold if self.kind == "utilitarian_threshold" else self.cached_optimum
            return value >= target
        if self.kind == "rank_max":
            from .model import rank_vector

            return rank_vector(inst, allocation) >= self.cached_optimum
        from .baseline import objective_key

        return _key_at_least(objective_key(inst, allocation, _BASELINE_OBJECTIVE[self.kind]), self.cached_optimum)


def _key_at_least(value, target, rel: float = 1e-9) -> bool:
    if isinstance(value, tuple):
        if value[0] != target[0]:
            return value[0] > target[0]
        value, target = value[1], target[1]
    return value >= target - rel * max(1.0, abs(target))


def make_goal(instance: Instance, kind: str, threshold=None, budget: int = DEFAULT_BUDGET) -> WelfareGoal:
    """Bind a goal to an instance, computing and caching its optimum.

    Raises UnsatisfiableGoal when a utilitarian threshold exceeds the optimum.
    """
    if kind not in GOAL_KINDS:
        raise ValueError(f"unknown goal kind {kind!r}")
    goal = WelfareGoal(kind, instance, budget=budget)
    if kind == "null":
        goal.witness = check_feasible(instance)
    elif goal.flow_kind == "utilitarian":
        flow = AllocationFlow(instance, "utilitarian").solve()
        goal.cached_optimum = flow.value()
        goal.witness = flow.allocation()
        if kind == "utilitarian_threshold":
            if threshold is None:
                raise ValueError("utilitarian_threshold needs a threshold")
            t = exact_number(threshold)
            if t > goal.cached_optimum:
                raise UnsatisfiableGoal(f"threshold {threshold} exceeds maximum welfare {float(goal.cached_optimum)}")
            goal.threshold = t
    elif kind == "rank_max":
        flow = AllocationFlow(instance, "rank").solve()
        goal.cached_optimum = flow.value()
        goal.witness = flow.allocation()
    else:
        from .baseline import branch_and_bound

        alloc, key = branch_and_bound(instance, _BASELINE_OBJECTIVE[kind], budget)
        goal.cached_optimum = key
        goal.witness = alloc
    return goal


@dataclass
class CompletionAnswer:
    satisfiable: bool
    witness: Allocation | None = None

    def __bool__(self):
        return self.satisfiable


def completion(goal: WelfareGoal, instance: Instance, partial: Allocation) -> CompletionAnswer:
    """Decide whether ``partial`` extends to a complete allocation meeting ``goal``.

    Stateless: solves from scratch.  Raises BudgetExceeded for the
    branch-and-bound goals when the search is cut off.
    """
    if not partial.respects_upper(instance):
        return CompletionAnswer(False)
    kind = goal.flow_kind
    if kind is not None:
        try:
            flow = AllocationFlow(instance, kind, partial).solve()
        except NoFeasibleCompletion:
            return CompletionAnswer(False)
        bound = goal.cost_bound()
        if bound is not None and flow.cost > bound:
            return CompletionAnswer(False)
        return CompletionAnswer(True, flow.allocation())
    from .baseline import branch_and_bound

    try:
        alloc, key = branch_and_bound(instance, _BASELINE_OBJECTIVE[goal.kind], goal.budget, fixed=partial)
    except NoFeasibleCompletion:
        return CompletionAnswer(False)
    if _key_at_least(key, goal.cached_optimum):
        return CompletionAnswer(True, alloc)
    return CompletionAnswer(False)


class StatelessOracle:
    """Answers CRR queries by calling :func:`completion` on ``p + (i, o)``."""

    def __init__(self, goal: WelfareGoal):
        self.goal = goal
        self.partial = Allocation.empty(goal.instance.n)
        self._witness = goal.witness
        self._pending: dict = {}

    def ask(self, i: int, o: int) -> bool:
        if o in self.partial.bundles[i]:
            return False
        ans = completion(self.goal, self.goal.instance, self.partial.with_pair(i, o))
        if ans:
            self._pending[i, o] = ans.witness
        return ans.satisfiable

    def accept(self, i: int, o: int) -> None:
        self.partial.add(i, o)
        self._witness = self._pending.pop((i, o))
        self._pending.clear()

    def witness(self) -> Allocation:
        return self._witness


class FlowOracle:
    """Incremental oracle for flow goals.

    Keeps a min-cost circulation extending the current partial allocation;
    each query is one shortest-path computation in its residual network.
    """

    def __init__(self, goal: WelfareGoal):
        if goal.flow_kind is None:
            raise ValueError(f"goal {goal.kind!r} has no flow oracle")
        self.goal = goal
        self.flow = AllocationFlow(goal.instance, goal.flow_kind).solve()
        self.bound = goal.cost_bound()
        self.partial = Allocation.empty(goal.instance.n)
        self._pending: dict = {}

    def ask(self, i: int, o: int) -> bool:
        inst = self.goal.instance
        if o in self.partial.bundles[i]:
            return False
        if len(self.partial.bundles[i]) >= inst.agent_caps[i][1]:
            return False
        probed = self.flow.probe(i, o)
        if probed is None:
            return False
        if self.bound is not None and probed[0] > self.bound:
            return False
        self._pending[i, o] = probed
        return True

    def accept(self, i: int, o: int) -> None:
        self.flow.commit(i, o, self._pending.pop((i, o)))
        self._pending.clear()
        self.partial.add(i, o)

    def witness(self) -> Allocation:
        return self.flow.allocation()


def make_oracle(goal: WelfareGoal, incremental: bool = True):
    if incremental and goal.flow_kind is not None:
        return FlowOracle(goal)
    return StatelessOracle(goal)


__all__ = [
    "AllocationFlow",
    "CompletionAnswer",
    "FlowOracle",
    "GOAL_KINDS",
    "StatelessOracle",
    "WelfareGoal",
    "check_feasible",
    "completion",
    "exact_number",
    "make_goal",
    "make_oracle",
    "max_rank",
    "max_utilitarian",
    "nash_key",
]
