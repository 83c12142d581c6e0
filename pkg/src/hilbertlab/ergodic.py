"""Ergodic Hilbert transforms on finite permutation systems.

A permutation ``tau`` of ``{0, ..., M-1}`` with uniform measure ``1/M`` is an
invertible measure-preserving system on which every level-set measure is an
exact count.  Orbits are walked forward with ``map`` and backward with
``inverse``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core_seq import BilateralSequence, check_lambda
from .hilbert import _check_n


@dataclass(frozen=True, eq=False)
class FinitePermutationSystem:
    map: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.map, dtype=np.int64).reshape(-1)
        M = perm.size
        if M == 0:
            raise ValueError("system must have at least one point")
        if not np.array_equal(np.sort(perm), np.arange(M)):
            raise ValueError("map is not a permutation of 0..M-1")
        inv = np.empty_like(perm)
        inv[perm] = np.arange(M)
        perm.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "map", perm)
        object.__setattr__(self, "inverse", inv)

    @property
    def size(self) -> int:
        return self.map.size

    @classmethod
    def cyclic(cls, M: int, step: int = 1) -> "FinitePermutationSystem":
        return cls((np.arange(M) + step) % M)

    @classmethod
    def identity(cls, M: int) -> "FinitePermutationSystem":
        return cls(np.arange(M))

    @classmethod
    def random(cls, M: int, seed: int) -> "FinitePermutationSystem":
        return cls(np.random.default_rng(seed).permutation(M))

    def power(self, j: int, points=None) -> np.ndarray:
        """``tau^j`` applied to ``points`` (all points by default)."""
        x = np.arange(self.size) if points is None else np.asarray(points, dtype=np.int64)
        step = self.map if j >= 0 else self.inverse
        for _ in range(abs(j)):
            x = step[x]
        return x

    def preimage(self, subset) -> np.ndarray:
        """Indicator of ``tau^{-1} E`` for an indicator array ``E``."""
        return np.asarray(subset, dtype=bool)[self.map]

    def measure(self, subset) -> float:
        return np.count_nonzero(subset) / self.size

    def to_dict(self) -> dict:
        return {"size": self.size, "map": self.map.tolist()}

    @classmethod
    def from_dict(cls, data) -> "FinitePermutationSystem":
        if "map" not in data:
            raise ValueError("system JSON is missing field 'map'")
        sys_ = cls(data["map"])
        if "size" in data and int(data["size"]) != sys_.size:
            raise ValueError(f"system JSON 'size' {data['size']} does not match map length {sys_.size}")
        return sys_

    @classmethod
    def load(cls, path) -> "FinitePermutationSystem":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class ObservableField:
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise ValueError("observable values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.size

    def l1_norm(self) -> float:
        return float(np.mean(np.abs(self.values)))

    @classmethod
    def indicator(cls, M: int, points: Iterable[int]) -> "ObservableField":
        v = np.zeros(M)
        v[list(points)] = 1.0
        return cls(v)

    def to_dict(self) -> dict:
        return {"values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data) -> "ObservableField":
        if "values" not in data:
            raise ValueError("observable JSON is missing field 'values'")
        return cls(data["values"])

    @classmethod
    def load(cls, path) -> "ObservableField":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _check_pair(sys: FinitePermutationSystem, f: ObservableField):
    if f.size != sys.size:
        raise ValueError(f"observable has {f.size} values but the system has {sys.size} points")


def orbit_sequence(sys: FinitePermutationSystem, f: ObservableField, x: int, K: int) -> BilateralSequence:
    """``a_k = f(tau^k x)`` for ``|k| <= K``, zero beyond."""
    _check_pair(sys, f)
    if not 0 <= x < sys.size:
        raise ValueError(f"point {x} outside 0..{sys.size - 1}")
    K = _check_n(K)
    fwd = [x]
    bwd = [x]
    for _ in range(K):
        fwd.append(int(sys.map[fwd[-1]]))
        bwd.append(int(sys.inverse[bwd[-1]]))
    pts = bwd[:0:-1] + fwd
    return BilateralSequence(-K, f.values[pts])


def ergodic_truncated_hilbert(sys: FinitePermutationSystem, f: ObservableField, n: int) -> ObservableField:
    """``sum_{1<=|i|<=n} f(tau^i x) / i`` at every point, paired as ``(f(tau^i x) - f(tau^-i x)) / i``."""
    return ObservableField(_truncated_levels(sys, f, _check_n(n))[-1])


def _truncated_levels(sys: FinitePermutationSystem, f: ObservableField, N: int) -> np.ndarray:
    _check_pair(sys, f)
    fwd = np.arange(sys.size)
    bwd = fwd.copy()
    acc = np.zeros(sys.size)
    out = np.empty((N, sys.size))
    for i in range(1, N + 1):
        fwd = sys.map[fwd]
        bwd = sys.inverse[bwd]
        acc = acc + (f.values[fwd] - f.values[bwd]) / i
        out[i - 1] = acc
    return out


def ergodic_maximal(sys: FinitePermutationSystem, f: ObservableField, N: int) -> ObservableField:
    """Pointwise ``max_{n<=N}`` of the absolute truncated transform."""
    levels = _truncated_levels(sys, f, _check_n(N))
    return ObservableField(np.abs(levels).max(axis=0))


def ergodic_level_measure(field: ObservableField, lam: float) -> float:
    """``mu{x : |field(x)| > lam}`` under the uniform measure."""
    lam = check_lambda(lam)
    return np.count_nonzero(np.abs(field.values) > lam) / field.size


@dataclass
class ErgodicSumReport:
    lam: float
    size: int
    per_n_counts: list
    bound_value: float

    @property
    def per_n_measures(self) -> list:
        return [c / self.size for c in self.per_n_counts]

    @property
    def cumulative(self) -> list:
        return [c / self.size for c in np.cumsum(self.per_n_counts).tolist()]

    @property
    def total(self) -> float:
        return sum(self.per_n_counts) / self.size

    @property
    def growth(self) -> str:
        """Linear when the last level still has positive measure."""
        return "linear" if self.per_n_counts and self.per_n_counts[-1] > 0 else "bounded"

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "measure", "cumulative"])
        for n, (m, c) in enumerate(zip(self.per_n_measures, self.cumulative), start=1):
            w.writerow([n, repr(m), repr(c)])


def ergodic_complete_sum(
    sys: FinitePermutationSystem, f: ObservableField, lam: float, N: int
) -> ErgodicSumReport:
    """``sum_{n<=N} mu{|H_n f| > lam}`` with its per-level breakdown."""
    lam = check_lambda(lam)
    levels = _truncated_levels(sys, f, _check_n(N))
    counts = np.count_nonzero(np.abs(levels) > lam, axis=1).tolist()
    return ErgodicSumReport(lam, sys.size, counts, f.l1_norm() / lam)


@dataclass(frozen=True)
class TransferenceVerdict:
    passed: bool
    measures: dict
    counterexample: Optional[tuple] = None  # (j, x)


def transference_check(
    sys: FinitePermutationSystem,
    f: ObservableField,
    lam: float,
    n: int,
    j_range: Sequence[int],
) -> TransferenceVerdict:
    """Check ``{G_j > lam} == tau^{-j}{G_0 > lam}`` and equal measures.

    ``G_j(x) = |sum_{1<=|i|<=n} f(tau^{i+j} x) / i|`` is evaluated from a
    table of orbit points ``tau^k x``; the preimage side uses the same table
    column ``k = j``.  Neither side goes through the transform routines.
    """
    _check_pair(sys, f)
    lam = check_lambda(lam)
    n = _check_n(n)
    js = list(j_range)
    R = max([abs(j) for j in js] + [0]) + n
    # orbit[x, k + R] = tau^k x
    orbit = np.empty((sys.size, 2 * R + 1), dtype=np.int64)
    orbit[:, R] = np.arange(sys.size)
    for k in range(1, R + 1):
        orbit[:, R + k] = sys.map[orbit[:, R + k - 1]]
        orbit[:, R - k] = sys.inverse[orbit[:, R - k + 1]]
    fo = f.values[orbit]
    inv_i = np.array([1.0 / i for i in range(-n, n + 1) if i != 0])

    def G(j):
        cols = [R + j + i for i in range(-n, n + 1) if i != 0]
        return np.abs(fo[:, cols] @ inv_i)

    E = G(0) > lam
    measures = {}
    for j in js:
        Ej = G(j) > lam
        pre = E[orbit[:, R + j]]
        measures[j] = sys.measure(Ej)
        bad = np.flatnonzero(Ej != pre)
        if bad.size:
            return TransferenceVerdict(False, measures, (j, int(bad[0])))
        if measures[j] != sys.measure(E):
            return TransferenceVerdict(False, measures, (j, None))
    return TransferenceVerdict(True, measures)
