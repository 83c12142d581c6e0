"""Seeded input generators shared by the CLI and the test corpora."""

from __future__ import annotations

import numpy as np

from .boole import RationalPoleSum
from .core_seq import BilateralSequence
from .ergodic import FinitePermutationSystem, ObservableField


def delta(at: int = 0, weight: float = 1.0) -> BilateralSequence:
    return BilateralSequence.delta(at, weight)


def symmetric_pair(center: int = 0, gap: int = 1, weight: float = 1.0) -> BilateralSequence:
    return BilateralSequence.from_mapping({center - gap: weight, center + gap: weight})


def random_l1(seed: int, support: int = 200, low: float = -1.0, high: float = 1.0,
              offset: int = 0) -> BilateralSequence:
    """Entries uniform in ``[low, high]`` on ``support`` consecutive indices."""
    rng = np.random.default_rng(seed)
    vals = rng.uniform(low, high, size=support)
    return BilateralSequence(offset, vals)


def random_pole_sum(rng: np.random.Generator, max_order: int = 12, pole_range: float = 10.0,
                    max_weight: float = 5.0) -> RationalPoleSum:
    n = int(rng.integers(1, max_order + 1))
    poles = rng.uniform(-pole_range, pole_range, size=n)
    # 1 - U lies in (0, 1]
    weights = max_weight * (1.0 - rng.random(n))
    return RationalPoleSum(poles, weights)


def cyclic_system(M: int, step: int = 1) -> FinitePermutationSystem:
    return FinitePermutationSystem.cyclic(M, step)


def random_system(M: int, seed: int) -> FinitePermutationSystem:
    return FinitePermutationSystem.random(M, seed)


def random_observable(M: int, seed: int, low: float = -1.0, high: float = 1.0) -> ObservableField:
    return ObservableField(np.random.default_rng(seed).uniform(low, high, size=M))
