"""Synthetic phi-sweep experiments and their CSV output."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .baseline import exact_baseline
from .crr import w_crr
from .errors import BudgetExceeded
from .fairness import NOTIONS, pairwise_report
from .mallows import MallowsConfig, mallows_profile
from .model import build_instance, welfare
from .welfare import make_goal, max_rank, max_utilitarian

OBJECTIVES = ("UM", "UM-CRR", "RM", "RM-CRR", "Nash", "LSOWA", "Egal")
CSV_COLUMNS = ("phi", "trial", "objective", "notion", "fraction", "welfare", "runtime_ms", "status")


@dataclass
class ExperimentConfig:
    n: int = 10
    m: int = 20
    agent_caps: tuple = (3, 6)
    item_caps: tuple = (3, 4)
    phis: tuple = (0.0, 0.25, 0.5, 0.75, 0.95)
    trials: int = 25
    objectives: tuple = OBJECTIVES
    seed: int = 0
    budget: int = 20_000
    notions: tuple = NOTIONS
    sign: str = "positive"

    def __post_init__(self):
        self.agent_caps = tuple(self.agent_caps)
        self.item_caps = tuple(self.item_caps)
        self.phis = tuple(float(p) for p in self.phis)
        self.objectives = tuple(self.objectives)
        self.notions = tuple(self.notions)
        unknown = set(self.objectives) - set(OBJECTIVES)
        if unknown:
            raise ValueError(f"unknown objectives {sorted(unknown)}")
        bad = set(self.notions) - set(NOTIONS)
        if bad:
            raise ValueError(f"unknown notions {sorted(bad)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        for phi in self.phis:
            if not 0.0 <= phi <= 1.0:
                raise ValueError(f"phi {phi} outside [0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def trial_seed(master: int, phi_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, phi_index, trial]).generate_state(1, dtype=np.uint64)[0])


def sample_instance(config: ExperimentConfig, phi_index: int, trial: int):
    mallows = MallowsConfig(
        config.phis[phi_index], tuple(range(config.m)), trial_seed(config.seed, phi_index, trial)
    )
    profile = mallows_profile(mallows, config.n)
    return build_instance(profile, None, config.agent_caps, config.item_caps)


def solve_objective(instance, objective: str, budget: int):
    if objective == "UM":
        return max_utilitarian(instance)[0]
    if objective == "RM":
        return max_rank(instance)[0]
    if objective == "UM-CRR":
        return w_crr(instance, make_goal(instance, "utilitarian_max"))
    if objective == "RM-CRR":
        return w_crr(instance, make_goal(instance, "rank_max"))
    baseline = {"Nash": "nash", "LSOWA": "lsowa", "Egal": "egalitarian"}[objective]
    return exact_baseline(instance, baseline, budget)


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".10g")


def run_trial(config: ExperimentConfig, phi_index: int, trial: int, timing: bool = False) -> list[dict]:
    """Rows for one sampled instance: one per (objective, notion)."""
    phi = config.phis[phi_index]
    try:
        instance = sample_instance(config, phi_index, trial)
    except Exception as exc:  # recorded, the sweep goes on
        status = f"error:{type(exc).__name__}"
        return [
            dict(phi=phi, trial=trial, objective=obj, notion=notion, fraction=None, welfare=None,
                 runtime_ms=None, status=status)
            for obj in config.objectives
            for notion in config.notions
        ]
    rows = []
    for obj in config.objectives:
        start = time.perf_counter()
        fractions: dict = {}
        value = None
        try:
            alloc = solve_objective(instance, obj, config.budget)
            status = "ok"
        except BudgetExceeded as exc:
            # best-found allocation, excluded from the aggregates
            alloc, status = exc.incumbent, "approximate"
        except Exception as exc:
            alloc, status = None, f"error:{type(exc).__name__}"
        elapsed = (time.perf_counter() - start) * 1000.0
        if alloc is not None:
            fractions = pairwise_report(instance, alloc, config.sign).fractions
            value = welfare(instance, alloc, "utilitarian")
        for notion in config.notions:
            rows.append(
                dict(
                    phi=phi,
                    trial=trial,
                    objective=obj,
                    notion=notion,
                    fraction=fractions.get(notion),
                    welfare=value,
                    runtime_ms=elapsed if timing else None,
                    status=status,
                )
            )
    return rows


def _run_task(args):
    config, phi_index, trial, timing = args
    return run_trial(config, phi_index, trial, timing)


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)

    def mean(self, phi: float, objective: str, notion: str) -> float | None:
        for row in self.aggregates:
            if row["trial"] == "mean" and row["phi"] == phi and row["objective"] == objective and row["notion"] == notion:
                return row["fraction"]
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows + self.aggregates:
            writer.writerow(
                [
                    _fmt(row["phi"]),
                    row["trial"],
                    row["objective"],
                    row["notion"],
                    _fmt(row["fraction"]),
                    _fmt(row["welfare"]),
                    _fmt(row["runtime_ms"]),
                    row["status"],
                ]
            )
        return buf.getvalue()


def aggregate(config: ExperimentConfig, rows: list[dict]) -> list[dict]:
    """Per (phi, objective, notion) mean and std over successful runs."""
    out = []
    for phi in config.phis:
        for obj in config.objectives:
            for notion in config.notions:
                sel = [
                    r for r in rows
                    if r["phi"] == phi and r["objective"] == obj and r["notion"] == notion
                    and r["status"] == "ok" and r["fraction"] is not None
                ]
                fr = np.array([r["fraction"] for r in sel], dtype=float)
                wf = np.array([r["welfare"] for r in sel], dtype=float)
                for stat, fn in (("mean", np.mean), ("std", np.std)):
                    out.append(
                        dict(
                            phi=phi,
                            trial=stat,
                            objective=obj,
                            notion=notion,
                            fraction=float(fn(fr)) if len(fr) else None,
                            welfare=float(fn(wf)) if len(wf) else None,
                            runtime_ms=None,
                            status=f"aggregate:{len(sel)}",
                        )
                    )
    return out


def run_experiment(config: ExperimentConfig, jobs: int = 1, timing: bool = False) -> ExperimentResult:
    """Sweep phi; every (phi, trial) gets a seed derived from the master seed.

    Parallel and serial runs produce the same rows in the same order.
    """
    tasks = [(config, k, t, timing) for k in range(len(config.phis)) for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(task) for task in tasks]
    rows = [row for chunk in chunks for row in chunk]
    return ExperimentResult(rows, aggregate(config, rows))
