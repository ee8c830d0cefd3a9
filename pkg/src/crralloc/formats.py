"""Text formats: instance files, allocation files and PrefLib-style orders.

Instance file (UTF-8, 0-based agent and item indices, ``#`` comments)::

    agents 4
    items 6
    scoring borda          # optional; utilities then default to Borda
    agentcap 0 3 3         # or "agentcap * 3 3" for every agent
    itemcap 0 2 2          # or "itemcap * 2 2"
    pref 0: 0,1,2,{3,4},5
    util 0: 6,5,4,3,3,1    # optional, one value per item

Allocation file: one line per agent, ``i: o_a o_b ...``.

PrefLib-style profile: ``count: alt,{alt,alt},alt`` lines with 1-based
alternatives; ``#`` lines are metadata (``# NUMBER ALTERNATIVES: m`` is
honoured).
"""
from __future__ import annotations

import re

import numpy as np

from .errors import MalformedProfile, ParseError, UnknownAlternative
from .model import Allocation, Instance, borda_utilities, build_instance


def parse_order(text: str, line: int | None = None, col: int = 1) -> list[list[int]]:
    """Parse ``a,{b,c},d`` into ``[[a], [b, c], [d]]`` (integers as written)."""
    classes: list[list[int]] = []
    pos = 0
    s = text

    def fail(msg, at):
        raise ParseError(msg, line, col + at)

    def read_int(at):
        m = re.compile(r"\s*(-?\d+)\s*").match(s, at)
        if not m:
            fail("expected an integer", at)
        return int(m.group(1)), m.end()

    if not s.strip():
        fail("empty order", 0)
    while True:
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos < len(s) and s[pos] == "{":
            pos += 1
            group = []
            while True:
                val, pos = read_int(pos)
                group.append(val)
                if pos < len(s) and s[pos] == ",":
                    pos += 1
                    continue
                if pos < len(s) and s[pos] == "}":
                    pos += 1
                    break
                fail("expected ',' or '}'", pos)
            classes.append(group)
        else:
            val, pos = read_int(pos)
            classes.append([val])
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos == len(s):
            break
        if s[pos] != ",":
            fail("expected ','", pos)
        pos += 1
    return classes


def _fmt_number(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _fmt_order(classes) -> str:
    parts = []
    for cls in classes:
        if len(cls) == 1:
            parts.append(str(cls[0]))
        else:
            parts.append("{" + ",".join(str(o) for o in cls) + "}")
    return ",".join(parts)


def serialize_instance(instance: Instance) -> str:
    lines = [f"agents {instance.n}", f"items {instance.m}"]
    borda = instance.scoring == "borda" and np.array_equal(
        instance.utilities, borda_utilities(instance.profile, instance.m)
    )
    if borda:
        lines.append("scoring borda")
    for i, (lo, hi) in enumerate(instance.agent_caps):
        lines.append(f"agentcap {i} {lo} {hi}")
    for o, (lo, hi) in enumerate(instance.item_caps):
        lines.append(f"itemcap {o} {lo} {hi}")
    for i, classes in enumerate(instance.profile):
        lines.append(f"pref {i}: {_fmt_order(classes)}")
    if not borda:
        for i in range(instance.n):
            lines.append(f"util {i}: " + ",".join(_fmt_number(v) for v in instance.utilities[i]))
    return "\n".join(lines) + "\n"


def _index(tok: str, count: int, what: str, line: int):
    if tok == "*":
        return None
    try:
        k = int(tok)
    except ValueError:
        raise ParseError(f"bad {what} index {tok!r}", line) from None
    if not 0 <= k < count:
        raise ParseError(f"{what} index {k} out of range", line)
    return k


def parse_instance(text: str, check_feasible: bool = True) -> Instance:
    """Parse an instance file and validate it with :func:`build_instance`."""
    n = m = None
    scoring = None
    agent_caps: dict = {}
    item_caps: dict = {}
    prefs: dict = {}
    utils: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key in ("agents", "items"):
            try:
                val = int(rest)
            except ValueError:
                raise ParseError(f"'{key}' needs an integer", ln) from None
            if val <= 0:
                raise ParseError(f"'{key}' must be positive", ln)
            if key == "agents":
                n = val
            else:
                m = val
        elif key == "scoring":
            if rest != "borda":
                raise ParseError(f"unknown scoring rule {rest!r}", ln)
            scoring = rest
        elif key in ("agentcap", "itemcap"):
            if n is None or m is None:
                raise ParseError("'agents' and 'items' must come first", ln)
            toks = rest.split()
            if len(toks) != 3:
                raise ParseError(f"'{key}' needs: index lo hi", ln)
            count = n if key == "agentcap" else m
            k = _index(toks[0], count, key[:-3], ln)
            try:
                lo, hi = int(toks[1]), int(toks[2])
            except ValueError:
                raise ParseError("capacities must be integers", ln) from None
            target = agent_caps if key == "agentcap" else item_caps
            for idx in range(count) if k is None else [k]:
                target[idx] = (lo, hi)
        elif key in ("pref", "util"):
            if n is None or m is None:
                raise ParseError("'agents' and 'items' must come first", ln)
            head, sep, body = rest.partition(":")
            if not sep:
                raise ParseError(f"'{key}' line needs 'i: ...'", ln)
            i = _index(head.strip(), n, "agent", ln)
            if i is None:
                raise ParseError(f"'{key}' needs an explicit agent index", ln)
            col = len(key) + 1 + len(head) + 2
            if key == "pref":
                prefs[i] = parse_order(body, ln, col)
            else:
                try:
                    vals = [float(v) for v in body.split(",")]
                except ValueError:
                    raise ParseError("utilities must be numbers", ln) from None
                if len(vals) != m:
                    raise ParseError(f"expected {m} utilities, got {len(vals)}", ln)
                utils[i] = vals
        else:
            raise ParseError(f"unknown directive {key!r}", ln)
    if n is None or m is None:
        raise ParseError("missing 'agents' or 'items' header")
    missing = [i for i in range(n) if i not in prefs]
    if missing and len(utils) != n:
        raise ParseError(f"no preferences for agents {missing}")
    if utils and len(utils) != n:
        raise ParseError("utilities must be given for every agent or none")
    if utils and scoring == "borda":
        raise ParseError("'scoring borda' conflicts with explicit utilities")
    profile = [prefs[i] for i in range(n)] if not missing else None
    raw_utils = [utils[i] for i in range(n)] if utils else None
    a_caps = [agent_caps.get(i, (0, m)) for i in range(n)]
    i_caps = [item_caps.get(o, (0, n)) for o in range(m)]
    return build_instance(profile, raw_utils, a_caps, i_caps, m=m, check_feasible=check_feasible)


def serialize_allocation(allocation: Allocation) -> str:
    return "".join(
        f"{i}: " + " ".join(str(o) for o in sorted(b)) + "\n" if b else f"{i}:\n"
        for i, b in enumerate(allocation.bundles)
    )


def parse_allocation(text: str, n: int) -> Allocation:
    alloc = Allocation.empty(n)
    seen = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected 'agent: items...'", ln)
        try:
            i = int(head)
            items = [int(t) for t in body.split()]
        except ValueError:
            raise ParseError("agent and item ids must be integers", ln) from None
        if not 0 <= i < n:
            raise ParseError(f"unknown agent {i}", ln)
        if i in seen:
            raise ParseError(f"agent {i} listed twice", ln)
        seen.add(i)
        if len(set(items)) != len(items):
            raise ParseError(f"agent {i} holds a duplicate item", ln)
        alloc.bundles[i] = set(items)
    return alloc


def parse_preflib(text: str, m: int | None = None) -> tuple:
    """Profile (0-based classes) from PrefLib-style ``count: order`` lines.

    Each line is expanded into ``count`` identical agents; alternatives an
    agent leaves out form one trailing least-preferred class.
    """
    rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            mm = re.match(r"#\s*NUMBER ALTERNATIVES:\s*(\d+)", line)
            if mm and m is None:
                m = int(mm.group(1))
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected 'count: order'", ln)
        try:
            count = int(head)
        except ValueError:
            raise ParseError(f"bad multiplicity {head.strip()!r}", ln, 1) from None
        if count < 0:
            raise ParseError("negative multiplicity", ln, 1)
        rows.append((ln, count, parse_order(body, ln, len(head) + 2)))
    if not rows:
        raise ParseError("no preference lines")
    if m is None:
        m = max(a for _, _, classes in rows for cls in classes for a in cls)
    profile = []
    for ln, count, classes in rows:
        seen = set()
        norm = []
        for cls in classes:
            for a in cls:
                if not 1 <= a <= m:
                    raise UnknownAlternative(f"alternative {a} not in 1..{m}", ln)
                if a in seen:
                    raise ParseError(f"alternative {a} ranked twice", ln)
                seen.add(a)
            norm.append(tuple(sorted(a - 1 for a in cls)))
        rest = tuple(o for o in range(m) if o + 1 not in seen)
        if rest:
            norm.append(rest)
        profile.extend([tuple(norm)] * count)
    if not profile:
        raise MalformedProfile("all multiplicities are zero")
    return tuple(profile)
