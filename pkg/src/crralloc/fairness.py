"""Envy-based fairness predicates and pairwise reporting.

EF, EF1 and PROP1 use the instance's cardinal utilities.  NEF and NEF1 are
ordinal: they must hold for every utility function consistent with the
agent's weak order.  The set of such functions is restricted to one sign
(``positive`` or ``negative``); mixed-sign instances are refused.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import UnsupportedSignMode
from .model import Allocation, Instance

NOTIONS = ("EF", "EF1", "NEF", "NEF1", "PROP1")
PAIR_NOTIONS = ("EF", "EF1", "NEF", "NEF1")

EPS = 1e-9


def rs_dominates(ranks, A: Iterable[int], B: Iterable[int]) -> bool:
    """Responsive-set dominance of A over B for all positive utilities.

    True iff some injection maps every item of B to an item of A that the
    agent ranks weakly better.  ``ranks[o]`` is the 0-based class index of o.

    >>> rs_dominates([0, 1, 2], {0, 2}, {1, 2})
    True
    >>> rs_dominates([0, 1, 2], {1, 2}, {0, 2})
    False
    """
    a = sorted(ranks[o] for o in A)
    b = sorted(ranks[o] for o in B)
    if len(a) < len(b):
        return False
    return all(x <= y for x, y in zip(a, b))


def rs_dominates_negative(ranks, A: Iterable[int], B: Iterable[int]) -> bool:
    """A is weakly better than B for every consistent all-negative utility.

    Every item of A must map injectively to an item of B ranked weakly worse.
    """
    a = sorted((ranks[o] for o in A), reverse=True)
    b = sorted((ranks[o] for o in B), reverse=True)
    if len(a) > len(b):
        return False
    return all(y >= x for x, y in zip(a, b))


def resolve_sign(instance: Instance, sign: str = "auto") -> str:
    """Sign restriction for necessary checks; refuses mixed instances."""
    if sign in ("positive", "negative"):
        return sign
    if sign != "auto":
        raise ValueError(f"unknown sign mode {sign!r}")
    detected = instance.sign()
    if detected == "mixed":
        raise UnsupportedSignMode("instance mixes positive and negative utilities")
    return "negative" if detected == "negative" else "positive"


def _u(instance: Instance, i: int, items) -> float:
    return float(sum(instance.utilities[i, o] for o in items))


def check_ef(instance: Instance, allocation: Allocation, i: int, j: int) -> bool:
    p = allocation.bundles
    return _u(instance, i, p[i]) >= _u(instance, i, p[j]) - EPS


def check_ef1(instance: Instance, allocation: Allocation, i: int, j: int) -> bool:
    """EF up to one item, removing from either bundle (any utility signs)."""
    p = allocation.bundles
    own = _u(instance, i, p[i])
    other = _u(instance, i, p[j])
    if own >= other - EPS:
        return True
    row = instance.utilities[i]
    if p[j] and own >= other - max(row[o] for o in p[j]) - EPS:
        return True
    if p[i] and own - min(row[o] for o in p[i]) >= other - EPS:
        return True
    return False


def _dominance(sign: str):
    return rs_dominates if sign == "positive" else rs_dominates_negative


def check_nef(instance: Instance, allocation: Allocation, i: int, j: int, sign: str = "auto") -> bool:
    dom = _dominance(resolve_sign(instance, sign))
    p = allocation.bundles
    return dom(instance.ranks[i], p[i], p[j])


def check_nef1(instance: Instance, allocation: Allocation, i: int, j: int, sign: str = "auto") -> bool:
    """Necessary EF1: one fixed removal works for every consistent utility."""
    dom = _dominance(resolve_sign(instance, sign))
    ranks = instance.ranks[i]
    own, other = allocation.bundles[i], allocation.bundles[j]
    if dom(ranks, own, other):
        return True
    for o in other:
        if dom(ranks, own, other - {o}):
            return True
    for o in own:
        if dom(ranks, own - {o}, other):
            return True
    return False


def check_prop1(instance: Instance, allocation: Allocation, i: int) -> bool:
    row = instance.utilities[i]
    share = float(row.sum()) / instance.n
    mine = allocation.bundles[i]
    val = _u(instance, i, mine)
    if val >= share - EPS:
        return True
    outside = [row[o] for o in range(instance.m) if o not in mine]
    if outside and val + max(outside) >= share - EPS:
        return True
    if mine and val - min(row[o] for o in mine) >= share - EPS:
        return True
    return False


@dataclass
class FairnessReport:
    """Per-pair and per-agent flags plus satisfied fractions per notion.

    A flag of None means the notion was not evaluated (sign mode refused or
    switched off); its fraction is then None as well.
    """

    n: int
    per_pair: dict = field(default_factory=dict)
    per_agent: dict = field(default_factory=dict)
    fractions: dict = field(default_factory=dict)

    def csv_rows(self, instance_id: str, objective: str) -> list[list]:
        return [[instance_id, objective, notion, self.fractions[notion]] for notion in NOTIONS]


def pairwise_report(instance: Instance, allocation: Allocation, sign: str = "auto") -> FairnessReport:
    """Evaluate every ordered pair and every agent.

    ``sign`` is 'auto', 'positive', 'negative' or 'off' (skip NEF/NEF1).
    """
    allocation.validate(instance)
    n = instance.n
    nef_sign = None
    if sign != "off":
        try:
            nef_sign = resolve_sign(instance, sign)
        except UnsupportedSignMode:
            nef_sign = None
    report = FairnessReport(n)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            flags = {
                "EF": check_ef(instance, allocation, i, j),
                "EF1": check_ef1(instance, allocation, i, j),
                "NEF": None,
                "NEF1": None,
            }
            if nef_sign is not None:
                flags["NEF"] = check_nef(instance, allocation, i, j, nef_sign)
                flags["NEF1"] = check_nef1(instance, allocation, i, j, nef_sign)
            report.per_pair[i, j] = flags
        report.per_agent[i] = {"PROP1": check_prop1(instance, allocation, i)}
    pairs = n * (n - 1)
    for notion in PAIR_NOTIONS:
        if nef_sign is None and notion in ("NEF", "NEF1"):
            report.fractions[notion] = None
        elif pairs == 0:
            report.fractions[notion] = 1.0
        else:
            report.fractions[notion] = sum(f[notion] for f in report.per_pair.values()) / pairs
    report.fractions["PROP1"] = float(np.mean([a["PROP1"] for a in report.per_agent.values()]))
    return report
