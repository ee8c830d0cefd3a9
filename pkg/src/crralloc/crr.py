"""Constrained Round Robin and picking-sequence allocation.

``w_crr`` grows a partial allocation pick by pick.  Among the active agents
holding the fewest items, the lowest-indexed one that can take an item from
its current top equivalence class (without losing completability to the
welfare goal) takes it; if none can, those agents discard their top class.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Allocation, Instance
from .welfare import WelfareGoal, make_oracle


@dataclass
class CrrState:
    """Everything a W-CRR run produced, including its event log.

    ``trace`` holds ``("PICK", agent, item, round)`` and
    ``("DROPCLASS", agent, class_rank)`` events; ``queries`` holds
    ``(picks_so_far, agent, item, answer)`` for every completion query.
    """

    p: Allocation
    lists: list
    active: list
    trace: list = field(default_factory=list)
    queries: list = field(default_factory=list)
    result: Allocation | None = None
    used_witness: bool = False

    @property
    def num_queries(self) -> int:
        return len(self.queries)

    def picks(self) -> list[tuple[int, int]]:
        return [(e[1], e[2]) for e in self.trace if e[0] == "PICK"]

    def trace_lines(self) -> list[str]:
        return [" ".join(str(x) for x in event) for event in self.trace]


def _raw_extension_exists(instance: Instance, p: Allocation, counts) -> bool:
    open_items = [o for o in range(instance.m) if counts[o] < instance.item_caps[o][1]]
    for i, bundle in enumerate(p.bundles):
        if len(bundle) >= instance.agent_caps[i][1]:
            continue
        if any(o not in bundle for o in open_items):
            return True
    return False


def _min_agents(instance, p, active, share_weights):
    if share_weights is None:
        least = min(len(p.bundles[i]) for i in active)
        return [i for i in active if len(p.bundles[i]) == least]
    total_weight = float(sum(share_weights))
    assigned = p.total()
    below = [i for i in active if len(p.bundles[i]) < share_weights[i] / total_weight * assigned]
    if below:
        return below
    # nobody is strictly below its share (e.g. before the first pick)
    ratios = {i: len(p.bundles[i]) / share_weights[i] for i in active}
    least = min(ratios.values())
    return [i for i in active if ratios[i] == least]


def crr_run(
    instance: Instance,
    goal: WelfareGoal,
    share_weights: Sequence[float] | None = None,
    incremental: bool = True,
) -> CrrState:
    """Run W-CRR and return the full state, trace and query log."""
    if share_weights is not None:
        if len(share_weights) != instance.n or any(s <= 0 for s in share_weights):
            raise ValueError("share_weights needs one positive weight per agent")
    oracle = make_oracle(goal, incremental)
    p = oracle.partial
    item_hi = [hi for _, hi in instance.item_caps]
    agent_hi = [hi for _, hi in instance.agent_caps]
    counts = [0] * instance.m
    lists = [[(j + 1, list(cls)) for j, cls in enumerate(classes)] for classes in instance.profile]
    state = CrrState(p=p, lists=lists, active=[])
    rejected: set[tuple[int, int]] = set()

    def prune(i: int) -> None:
        # held items and exhausted items can never be picked by i again
        lst = lists[i]
        while lst:
            rank, items = lst[0]
            items[:] = [o for o in items if o not in p.bundles[i] and counts[o] < item_hi[o]]
            if items:
                return
            lst.pop(0)

    for i in range(instance.n):
        prune(i)
    state.active = [i for i in range(instance.n) if lists[i]]

    while state.active and _raw_extension_exists(instance, p, counts):
        n_min = _min_agents(instance, p, state.active, share_weights)
        chosen = None
        for i in sorted(n_min):
            if len(p.bundles[i]) >= agent_hi[i]:
                continue
            for o in lists[i][0][1]:
                if (i, o) in rejected:
                    continue
                answer = oracle.ask(i, o)
                state.queries.append((p.total(), i, o, answer))
                if answer:
                    chosen = (i, o)
                    break
                rejected.add((i, o))
            if chosen:
                break
        if chosen:
            i, o = chosen
            oracle.accept(i, o)
            counts[o] += 1
            state.trace.append(("PICK", i, o, len(p.bundles[i])))
            for k in range(instance.n):
                prune(k)
        else:
            for i in n_min:
                rank, _ = lists[i].pop(0)
                state.trace.append(("DROPCLASS", i, rank))
                prune(i)
        state.active = [i for i in state.active if lists[i]]

    if goal.satisfied_by(p):
        state.result = p.copy()
    else:
        state.result = oracle.witness()
        state.used_witness = True
    return state


def w_crr(
    instance: Instance,
    goal: WelfareGoal,
    share_weights: Sequence[float] | None = None,
) -> Allocation:
    """Allocation returned by W-CRR; it always satisfies ``goal``."""
    return crr_run(instance, goal, share_weights).result


# picking sequences ----------------------------------------------------------


def is_recursively_balanced(turns: Sequence[int], n: int) -> bool:
    """Every prefix keeps turn counts within one of each other."""
    taken = [0] * n
    for a in turns:
        taken[a] += 1
        if max(taken) - min(taken) > 1:
            return False
    return True


def is_round_robin(turns: Sequence[int], n: int) -> bool:
    perm = list(turns[:n])
    if len(turns) >= n and sorted(perm) != list(range(n)):
        return False
    if len(turns) < n and len(set(perm)) != len(perm):
        return False
    return all(a == perm[k % n] for k, a in enumerate(turns))


def make_sequence(kind: str, n: int, length: int, seed=None, perm: Sequence[int] | None = None) -> list[int]:
    """Picking sequence of ``length`` turns.

    ``rr`` repeats one permutation (``perm`` or a seeded random one);
    ``rb_random`` concatenates independent random permutations, which is
    exactly the set of recursively balanced sequences.
    """
    rng = np.random.default_rng(seed)
    if kind == "rr":
        if perm is None:
            perm = rng.permutation(n).tolist()
        perm = list(perm)
        return [perm[k % n] for k in range(length)]
    if kind == "rb_random":
        turns: list[int] = []
        while len(turns) < length:
            turns.extend(rng.permutation(n).tolist())
        return turns[:length]
    raise ValueError(f"unknown sequence kind {kind!r}")


def sequential_allocation(instance: Instance, sequence: Sequence[int]) -> Allocation:
    """Each turn the agent takes its best still-available item it lacks.

    Ties within a class go to the lowest item index; an agent with nothing
    to take loses the turn.
    """
    p = Allocation.empty(instance.n)
    counts = [0] * instance.m
    for i in sequence:
        if len(p.bundles[i]) >= instance.agent_caps[i][1]:
            continue
        for cls in instance.profile[i]:
            pick = next(
                (o for o in cls if o not in p.bundles[i] and counts[o] < instance.item_caps[o][1]),
                None,
            )
            if pick is not None:
                p.add(i, pick)
                counts[pick] += 1
                break
    return p
