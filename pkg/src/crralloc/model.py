"""Core domain types: instances, allocations, rank vectors and scoring rules.

Agents and items are plain indices (``0..n-1`` and ``0..m-1``).  An agent's
ordinal preference is a list of equivalence classes, best first; cardinal
utilities live in an ``(n, m)`` float array that must agree with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IncompleteAllocation,
    InconsistentUtilities,
    InvalidAllocation,
    MalformedProfile,
)

Profile = tuple  # tuple[tuple[tuple[int, ...], ...], ...]


class LexVector(tuple):
    """A tuple with element-wise arithmetic and lexicographic ordering.

    Used as a flow cost when the objective is vector valued (rank
    maximality).  Comparison is inherited from ``tuple``.
    """

    __slots__ = ()

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return type(self)(a + b for a, b in zip(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return type(self)(a - b for a, b in zip(self, other))

    def __neg__(self):
        return type(self)(-a for a in self)

    @classmethod
    def zeros(cls, length: int):
        return cls((0,) * length)

    @classmethod
    def unit(cls, length: int, index: int, value: int = 1):
        vals = [0] * length
        vals[index] = value
        return cls(vals)

    def __repr__(self):
        return f"{type(self).__name__}({list(self)})"


class RankVector(LexVector):
    """Per-rank assignment counts; ``self[j]`` counts items in class ``j``.

    Larger is better: ``RankVector([2, 0]) > RankVector([1, 5])``.
    """

    __slots__ = ()

    @property
    def total(self) -> int:
        return sum(self)


@dataclass(frozen=True, eq=False)
class Instance:
    """A validated allocation problem.

    Build instances with :func:`build_instance`; the constructor itself
    performs no validation.
    """

    n: int
    m: int
    profile: Profile
    utilities: np.ndarray
    agent_caps: tuple
    item_caps: tuple
    scoring: str | None = None
    ranks: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        util = np.array(self.utilities, dtype=float)
        util.setflags(write=False)
        object.__setattr__(self, "utilities", util)
        ranks = np.zeros((self.n, self.m), dtype=np.int64)
        for i, classes in enumerate(self.profile):
            for j, cls in enumerate(classes):
                for o in cls:
                    ranks[i, o] = j
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)

    @property
    def num_classes(self) -> int:
        """Length of rank vectors for this instance (max number of classes)."""
        return max(len(c) for c in self.profile)

    def utility(self, i: int, bundle: Iterable[int]) -> float:
        return float(sum(self.utilities[i, o] for o in bundle))

    def sign(self) -> str:
        """'positive', 'negative', 'zero' or 'mixed' over all utilities."""
        u = self.utilities
        has_pos = bool((u > 0).any())
        has_neg = bool((u < 0).any())
        if has_pos and has_neg:
            return "mixed"
        if has_pos:
            return "positive"
        if has_neg:
            return "negative"
        return "zero"

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and self.profile == other.profile
            and np.array_equal(self.utilities, other.utilities)
            and self.agent_caps == other.agent_caps
            and self.item_caps == other.item_caps
        )

    def __hash__(self):
        return hash((self.n, self.m, self.profile, self.agent_caps, self.item_caps))


class Allocation:
    """Agent -> item-set map.  Possibly partial; mutated only by ``add``."""

    __slots__ = ("bundles",)

    def __init__(self, bundles: Iterable[Iterable[int]]):
        self.bundles = [set(b) for b in bundles]

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls([()] * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Allocation":
        alloc = cls.empty(n)
        for i, o in pairs:
            alloc.add(i, o)
        return alloc

    @property
    def n(self) -> int:
        return len(self.bundles)

    def add(self, i: int, o: int) -> None:
        if o in self.bundles[i]:
            raise InvalidAllocation(f"agent {i} already holds item {o}")
        self.bundles[i].add(o)

    def copy(self) -> "Allocation":
        return Allocation(self.bundles)

    def with_pair(self, i: int, o: int) -> "Allocation":
        new = self.copy()
        new.add(i, o)
        return new

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, o) for i, b in enumerate(self.bundles) for o in sorted(b)]

    def sizes(self) -> list[int]:
        return [len(b) for b in self.bundles]

    def item_counts(self, m: int) -> np.ndarray:
        counts = np.zeros(m, dtype=np.int64)
        for b in self.bundles:
            for o in b:
                counts[o] += 1
        return counts

    def total(self) -> int:
        return sum(len(b) for b in self.bundles)

    def extends(self, other: "Allocation") -> bool:
        """True if every pair of ``other`` is also in ``self``."""
        return all(b >= ob for b, ob in zip(self.bundles, other.bundles))

    def respects_upper(self, instance: Instance) -> bool:
        if self.n != instance.n:
            return False
        for i, b in enumerate(self.bundles):
            if len(b) > instance.agent_caps[i][1]:
                return False
            if any(o < 0 or o >= instance.m for o in b):
                return False
        counts = self.item_counts(instance.m)
        return all(counts[o] <= instance.item_caps[o][1] for o in range(instance.m))

    def is_complete(self, instance: Instance) -> bool:
        if not self.respects_upper(instance):
            return False
        if any(len(b) < instance.agent_caps[i][0] for i, b in enumerate(self.bundles)):
            return False
        counts = self.item_counts(instance.m)
        return all(counts[o] >= instance.item_caps[o][0] for o in range(instance.m))

    def status(self, instance: Instance) -> str:
        if not self.respects_upper(instance):
            raise InvalidAllocation("allocation exceeds an upper capacity or names an unknown item")
        return "complete" if self.is_complete(instance) else "partial"

    def validate(self, instance: Instance, complete: bool = True) -> None:
        if self.n != instance.n:
            raise InvalidAllocation(f"allocation has {self.n} agents, instance has {instance.n}")
        for i, b in enumerate(self.bundles):
            for o in b:
                if o < 0 or o >= instance.m:
                    raise InvalidAllocation(f"agent {i} holds unknown item {o}")
        if not self.respects_upper(instance):
            raise InvalidAllocation("allocation exceeds an upper capacity")
        if complete and not self.is_complete(instance):
            raise IncompleteAllocation("allocation misses a lower capacity bound")

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.bundles == other.bundles

    def __hash__(self):
        return hash(tuple(frozenset(b) for b in self.bundles))

    def __repr__(self):
        return "Allocation(" + repr([sorted(b) for b in self.bundles]) + ")"


def _normalize_caps(caps, count: int, what: str) -> tuple:
    caps = list(caps)
    if len(caps) == 2 and all(isinstance(c, (int, np.integer)) for c in caps):
        caps = [tuple(caps)] * count
    if len(caps) != count:
        raise MalformedProfile(f"expected {count} {what} capacity intervals, got {len(caps)}")
    out = []
    for k, (lo, hi) in enumerate(caps):
        if int(lo) != lo or int(hi) != hi:
            raise MalformedProfile(f"{what} {k}: capacities must be integers")
        lo, hi = int(lo), int(hi)
        if lo < 0 or hi < lo:
            raise MalformedProfile(f"{what} {k}: bad capacity interval [{lo}, {hi}]")
        out.append((lo, hi))
    return tuple(out)


def _normalize_profile(raw_profile, m: int | None) -> tuple[Profile, int]:
    agents = []
    seen_max = -1
    for i, classes in enumerate(raw_profile):
        norm = []
        for cls in classes:
            if isinstance(cls, (int, np.integer)):
                cls = (int(cls),)
            cls = tuple(sorted(int(o) for o in cls))
            if not cls:
                raise MalformedProfile(f"agent {i}: empty equivalence class")
            seen_max = max(seen_max, cls[-1])
            norm.append(cls)
        agents.append(tuple(norm))
    if not agents:
        raise MalformedProfile("profile has no agents")
    if m is None:
        m = seen_max + 1
    if m <= 0:
        raise MalformedProfile("instance has no items")
    for i, classes in enumerate(agents):
        flat = [o for cls in classes for o in cls]
        if sorted(flat) != list(range(m)):
            raise MalformedProfile(f"agent {i}: classes do not partition items 0..{m - 1}")
    return tuple(agents), m


def profile_from_utilities(utilities) -> Profile:
    """Group items into equivalence classes by decreasing utility."""
    util = np.asarray(utilities, dtype=float)
    profile = []
    for row in util:
        classes: list[list[int]] = []
        last = None
        for o in sorted(range(len(row)), key=lambda o: (-row[o], o)):
            if last is None or row[o] != last:
                classes.append([])
                last = row[o]
            classes[-1].append(o)
        profile.append(tuple(tuple(c) for c in classes))
    return tuple(profile)


def borda_utilities(profile: Profile, m: int) -> np.ndarray:
    """Borda scores, averaged over the positions a tied class spans.

    >>> borda_utilities((((0,), (1, 2), (3,)),), 4).tolist()
    [[4.0, 2.5, 2.5, 1.0]]
    """
    util = np.zeros((len(profile), m))
    for i, classes in enumerate(profile):
        pos = 1
        for cls in classes:
            last = pos + len(cls) - 1
            # mean of m-pos+1 .. m-last+1
            score = m + 1 - (pos + last) / 2
            for o in cls:
                util[i, o] = score
            pos = last + 1
    return util


def check_consistency(profile: Profile, utilities: np.ndarray) -> None:
    for i, classes in enumerate(profile):
        prev = None
        for j, cls in enumerate(classes):
            vals = {float(utilities[i, o]) for o in cls}
            if len(vals) != 1:
                raise InconsistentUtilities(f"agent {i}: class {j} has unequal utilities {sorted(vals)}")
            (v,) = vals
            if not math.isfinite(v):
                raise InconsistentUtilities(f"agent {i}: non-finite utility")
            if prev is not None and not v < prev:
                raise InconsistentUtilities(
                    f"agent {i}: class {j} utility {v} is not below class {j - 1} utility {prev}"
                )
            prev = v


def build_instance(
    raw_profile,
    raw_utilities=None,
    agent_caps=None,
    item_caps=None,
    *,
    m: int | None = None,
    check_feasible: bool = True,
) -> Instance:
    """Validate raw data and return an :class:`Instance`.

    ``raw_profile`` lists, per agent, equivalence classes best first (a bare
    int is a singleton class).  If ``raw_profile`` is None it is derived from
    ``raw_utilities``.  Without utilities, Borda scores are synthesized.
    Capacities are either one ``(lo, hi)`` pair for everybody or one pair per
    agent/item; defaults are ``[0, m]`` per agent and ``[0, n]`` per item.

    Raises MalformedProfile, InconsistentUtilities or InfeasibleCapacities.
    """
    if raw_profile is None:
        if raw_utilities is None:
            raise MalformedProfile("need a profile or utilities")
        util = np.asarray(raw_utilities, dtype=float)
        if util.ndim != 2 or util.shape[1] == 0:
            raise MalformedProfile("utilities must be an (n, m) matrix with m >= 1")
        raw_profile = profile_from_utilities(util)
        m = util.shape[1]
    profile, m = _normalize_profile(raw_profile, m)
    n = len(profile)
    scoring = None
    if raw_utilities is None:
        util = borda_utilities(profile, m)
        scoring = "borda"
    else:
        util = np.asarray(raw_utilities, dtype=float)
        if util.shape != (n, m):
            raise MalformedProfile(f"utilities shape {util.shape} != ({n}, {m})")
    check_consistency(profile, util)
    agent_caps = _normalize_caps(agent_caps if agent_caps is not None else (0, m), n, "agent")
    item_caps = _normalize_caps(item_caps if item_caps is not None else (0, n), m, "item")
    inst = Instance(n, m, profile, util, agent_caps, item_caps, scoring)
    if check_feasible:
        from .welfare import check_feasible as _check

        _check(inst)
    return inst


def rank_vector(instance: Instance, allocation: Allocation) -> RankVector:
    counts = [0] * instance.num_classes
    for i, b in enumerate(allocation.bundles):
        for o in b:
            counts[instance.ranks[i, o]] += 1
    return RankVector(counts)


def is_balanced(allocation: Allocation) -> bool:
    sizes = allocation.sizes()
    return not sizes or max(sizes) - min(sizes) <= 1


def lsowa_weights(instance: Instance) -> np.ndarray:
    """Linear OWA weights ``(K-k+1)/K`` for ``k=1..K``, K = largest agent cap."""
    k_max = max(hi for _, hi in instance.agent_caps)
    k_max = max(k_max, 1)
    return (k_max - np.arange(k_max)) / k_max


def owa_value(values: Sequence[float], weights: np.ndarray) -> float:
    vals = sorted(values, reverse=True)
    return float(sum(w * v for w, v in zip(weights, vals)))


def bundle_values(instance: Instance, allocation: Allocation) -> list[float]:
    return [instance.utility(i, b) for i, b in enumerate(allocation.bundles)]


OBJECTIVES = ("utilitarian", "nash", "egalitarian", "lsowa", "rank")


def welfare(instance: Instance, allocation: Allocation, objective: str = "utilitarian"):
    """Welfare of a complete allocation.

    ``nash`` is the plain product of bundle utilities (it can be zero or
    negative); use :func:`nash_key` for the tie-aware ordering used by the
    optimizer.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if not allocation.is_complete(instance):
        raise IncompleteAllocation("welfare is defined on complete allocations only")
    if objective == "rank":
        return rank_vector(instance, allocation)
    vals = bundle_values(instance, allocation)
    if objective == "utilitarian":
        return float(sum(vals))
    if objective == "nash":
        return float(np.prod(vals))
    if objective == "egalitarian":
        return float(min(vals))
    weights = lsowa_weights(instance)
    return float(
        sum(
            owa_value([instance.utilities[i, o] for o in b], weights)
            for i, b in enumerate(allocation.bundles)
        )
    )


def nash_key(values: Sequence[float]) -> tuple[int, float]:
    """(number of agents with positive utility, product over them)."""
    pos = [v for v in values if v > 0]
    return len(pos), float(np.prod(pos)) if pos else 1.0
