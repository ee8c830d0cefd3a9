"""Min-cost circulation with arc lower bounds.

Costs may be any totally ordered additive group: ``int``, ``Fraction`` or
:class:`~crralloc.model.LexVector` (lexicographic vector costs).  The solver
never multiplies costs, so vector costs stay exact.

Method: every arc starts at its lower bound (or at its upper bound when its
cost is negative), leaving a residual network with non-negative costs and a
set of node imbalances.  Successive shortest paths with Dijkstra and node
potentials then route the imbalances from a super source to a super sink.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .errors import Infeasible

INF_CAP = 1 << 60


@dataclass
class FlowNetwork:
    """Directed network; each arc has an integer interval ``[lo, hi]`` and a cost.

    ``hi=None`` means unbounded (only allowed for arcs with cost >= 0).
    """

    num_nodes: int
    zero: object = 0
    tail: list = field(default_factory=list)
    head: list = field(default_factory=list)
    lo: list = field(default_factory=list)
    hi: list = field(default_factory=list)
    cost: list = field(default_factory=list)

    def add_arc(self, u: int, v: int, lo: int, hi: int | None, cost=None) -> int:
        if hi is not None and hi < lo:
            raise Infeasible(f"arc {u}->{v} has empty interval [{lo}, {hi}]")
        self.tail.append(u)
        self.head.append(v)
        self.lo.append(lo)
        self.hi.append(hi)
        self.cost.append(self.zero if cost is None else cost)
        return len(self.tail) - 1

    @property
    def num_arcs(self) -> int:
        return len(self.tail)

    def flow_cost(self, flows):
        total = self.zero
        for f, c in zip(flows, self.cost):
            if f:
                total = total + _scale(c, f)
        return total


def _scale(c, k: int):
    out = c
    for _ in range(k - 1):
        out = out + c
    return out


class ResidualGraph:
    """Paired-edge residual graph: edge ``e`` and ``e ^ 1`` are mates."""

    def __init__(self, num_nodes: int, zero):
        self.n = num_nodes
        self.zero = zero
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list = []
        self.adj: list[list[int]] = [[] for _ in range(num_nodes)]

    def add_edge(self, u: int, v: int, cap: int, cost) -> int:
        e = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.cost += [cost, -cost]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def tail(self, e: int) -> int:
        return self.to[e ^ 1]

    def dijkstra(self, src: int, potential: list):
        """Shortest paths on reduced costs (all must be non-negative)."""
        dist = [None] * self.n
        prev = [-1] * self.n
        dist[src] = self.zero
        heap = [(self.zero, src)]
        done = [False] * self.n
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            pu = potential[u]
            for e in self.adj[u]:
                if self.cap[e] <= 0:
                    continue
                v = self.to[e]
                if done[v]:
                    continue
                nd = d + self.cost[e] + pu - potential[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    prev[v] = e
                    heapq.heappush(heap, (nd, v))
        return dist, prev

    def bellman_ford(self, src: int, banned: frozenset = frozenset()):
        """Queue-based Bellman-Ford; assumes no negative cycle is reachable."""
        dist = [None] * self.n
        prev = [-1] * self.n
        dist[src] = self.zero
        queue = deque([src])
        queued = [False] * self.n
        queued[src] = True
        while queue:
            u = queue.popleft()
            queued[u] = False
            du = dist[u]
            for e in self.adj[u]:
                if self.cap[e] <= 0 or e in banned:
                    continue
                v = self.to[e]
                nd = du + self.cost[e]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    prev[v] = e
                    if not queued[v]:
                        queued[v] = True
                        queue.append(v)
        return dist, prev

    def path_to(self, prev: list, src: int, dst: int) -> list[int]:
        path = []
        v = dst
        while v != src:
            e = prev[v]
            path.append(e)
            v = self.tail(e)
        path.reverse()
        return path

    def push(self, path: list[int], amount: int) -> None:
        for e in path:
            self.cap[e] -= amount
            self.cap[e ^ 1] += amount


def solve_flow(network: FlowNetwork) -> list[int]:
    """Return an integral min-cost circulation as one flow value per arc.

    Raises :class:`Infeasible` if the lower bounds cannot be met.
    """
    zero = network.zero
    n = network.num_nodes
    src, dst = n, n + 1
    res = ResidualGraph(n + 2, zero)
    base = []
    excess = [0] * n
    edge_of = []
    for a in range(network.num_arcs):
        u, v = network.tail[a], network.head[a]
        lo, hi, c = network.lo[a], network.hi[a], network.cost[a]
        if c < zero:
            if hi is None:
                raise ValueError(f"arc {a} has negative cost and no upper bound")
            f0 = hi
        else:
            f0 = lo
        cap_hi = INF_CAP if hi is None else hi
        e = res.add_edge(u, v, cap_hi - lo, c)
        # mate edge carries f - lo
        res.cap[e] = cap_hi - f0
        res.cap[e + 1] = f0 - lo
        base.append(lo)
        edge_of.append(e)
        excess[v] += f0
        excess[u] -= f0
    need = 0
    for v in range(n):
        if excess[v] > 0:
            res.add_edge(src, v, excess[v], zero)
            need += excess[v]
        elif excess[v] < 0:
            res.add_edge(v, dst, -excess[v], zero)
    potential = [zero] * (n + 2)
    pushed = 0
    while pushed < need:
        dist, prev = res.dijkstra(src, potential)
        if dist[dst] is None:
            break
        for v in range(n + 2):
            if dist[v] is not None:
                potential[v] = potential[v] + dist[v]
        path = res.path_to(prev, src, dst)
        amount = min(res.cap[e] for e in path)
        amount = min(amount, need - pushed)
        res.push(path, amount)
        pushed += amount
    if pushed < need:
        raise Infeasible(f"lower bounds unsatisfiable: routed {pushed} of {need} units")
    return [base[a] + res.cap[edge_of[a] + 1] for a in range(network.num_arcs)]


def residual_of(network: FlowNetwork, flows: list[int]) -> tuple[ResidualGraph, list[int]]:
    """Residual graph of a feasible flow; returns the graph and each arc's edge id."""
    res = ResidualGraph(network.num_nodes, network.zero)
    edge_of = []
    for a in range(network.num_arcs):
        hi = network.hi[a]
        e = res.add_edge(network.tail[a], network.head[a], 0, network.cost[a])
        res.cap[e] = (INF_CAP if hi is None else hi) - flows[a]
        res.cap[e + 1] = flows[a] - network.lo[a]
        edge_of.append(e)
    return res, edge_of
