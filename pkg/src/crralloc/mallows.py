"""Mallows-model rankings by repeated insertion.

The generator is numpy's PCG64 (``numpy.random.default_rng``), seeded
explicitly, so samples reproduce across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MallowsConfig:
    phi: float
    reference: tuple
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if sorted(self.reference) != list(range(len(self.reference))):
            raise ValueError("reference must be a permutation of 0..m-1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def insertion_probabilities(phi: float, i: int) -> np.ndarray:
    """Probabilities of inserting the i-th reference item (1-based) at 1..i."""
    weights = np.array([phi ** (i - j) for j in range(1, i + 1)], dtype=float)
    return weights / weights.sum()


def mallows_sample(phi: float, reference: Sequence[int], rng: np.random.Generator) -> list[int]:
    """One strict ranking; phi=0 returns ``reference``, phi=1 is uniform."""
    ranking: list[int] = []
    for i, item in enumerate(reference, start=1):
        if phi == 0.0:
            pos = i - 1
        else:
            pos = int(rng.choice(i, p=insertion_probabilities(phi, i)))
        ranking.insert(pos, item)
    return ranking


def mallows_profile(config: MallowsConfig, n: int) -> tuple:
    """``n`` independent rankings as a profile of singleton classes."""
    rng = config.rng()
    return tuple(
        tuple((o,) for o in mallows_sample(config.phi, config.reference, rng)) for _ in range(n)
    )
