"""Bilateral finite-support sequences, integer windows and level-set reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np


@dataclass(frozen=True, eq=False)
class BilateralSequence:
    """Real sequence indexed by the integers with finite support.

    ``values[m]`` is the coefficient at index ``support_min + m``; every
    index outside the stored span is zero.  Instances are always kept in
    canonical form: the first and last stored entries are nonzero, or the
    sequence is empty (no stored entries, ``support_min == 0``).
    """

    support_min: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise ValueError("sequence values must be finite")
        nz = np.flatnonzero(vals)
        if nz.size == 0:
            start, vals = 0, vals[:0]
        else:
            start = int(self.support_min) + int(nz[0])
            vals = vals[nz[0] : nz[-1] + 1]
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "support_min", start)
        object.__setattr__(self, "values", vals)

    @classmethod
    def empty(cls) -> "BilateralSequence":
        return cls(0, np.zeros(0))

    @classmethod
    def delta(cls, at: int = 0, weight: float = 1.0) -> "BilateralSequence":
        return cls(at, np.array([weight]))

    @classmethod
    def from_mapping(cls, entries: Mapping[int, float]) -> "BilateralSequence":
        """Densify a sparse ``{index: value}`` mapping."""
        if not entries:
            return cls.empty()
        lo, hi = min(entries), max(entries)
        vals = np.zeros(hi - lo + 1)
        for j, v in entries.items():
            vals[j - lo] += v
        return cls(lo, vals)

    @property
    def is_empty(self) -> bool:
        return self.values.size == 0

    @property
    def support_max(self) -> int:
        """Index of the last stored entry (undefined for the empty sequence)."""
        if self.is_empty:
            raise ValueError("empty sequence has no support")
        return self.support_min + self.values.size - 1

    @property
    def span(self) -> int:
        """``support_max - support_min``; zero for a single entry or empty."""
        return max(self.values.size - 1, 0)

    def indices(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_min + self.values.size)

    def __getitem__(self, j: int) -> float:
        m = j - self.support_min
        if 0 <= m < self.values.size:
            return float(self.values[m])
        return 0.0

    def at(self, idx) -> np.ndarray:
        """Vectorized lookup; indices outside the support give 0."""
        idx = np.asarray(idx, dtype=np.int64)
        m = idx - self.support_min
        ok = (m >= 0) & (m < self.values.size)
        out = np.zeros(idx.shape)
        out[ok] = self.values[m[ok]]
        return out

    def scale(self, c: float) -> "BilateralSequence":
        return BilateralSequence(self.support_min, c * self.values)

    def __add__(self, other: "BilateralSequence") -> "BilateralSequence":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        lo = min(self.support_min, other.support_min)
        hi = max(self.support_max, other.support_max)
        idx = np.arange(lo, hi + 1)
        return BilateralSequence(lo, self.at(idx) + other.at(idx))

    def __rmul__(self, c: float) -> "BilateralSequence":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilateralSequence):
            return NotImplemented
        return self.support_min == other.support_min and np.array_equal(
            self.values, other.values
        )

    def __hash__(self):
        return hash((self.support_min, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"BilateralSequence(support_min={self.support_min}, values={self.values.tolist()})"

    def to_dict(self) -> dict:
        return {"support_min": self.support_min, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "BilateralSequence":
        try:
            return cls(int(data["support_min"]), np.asarray(data["values"], dtype=float))
        except KeyError as exc:
            raise ValueError(f"sequence JSON is missing field {exc.args[0]!r}") from None

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "BilateralSequence":
        return cls.from_dict(json.loads(Path(path).read_text()))


def canonicalize(a: BilateralSequence) -> BilateralSequence:
    """Return the canonical form (construction already canonicalizes)."""
    return BilateralSequence(a.support_min, a.values)


def l1_norm(a: BilateralSequence) -> float:
    return float(np.sum(np.abs(a.values)))


def translate(a: BilateralSequence, t: int) -> BilateralSequence:
    """Sequence ``b`` with ``b[j] == a[j + t]``."""
    if a.is_empty:
        return a
    return BilateralSequence(a.support_min - int(t), a.values)


@dataclass(frozen=True)
class IntegerWindow:
    """Inclusive integer range ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __contains__(self, k: int) -> bool:
        return self.lo <= k <= self.hi

    def widen(self, r: int) -> "IntegerWindow":
        return IntegerWindow(self.lo - r, self.hi + r)

    def union(self, other: "IntegerWindow") -> "IntegerWindow":
        return IntegerWindow(min(self.lo, other.lo), max(self.hi, other.hi))

    @classmethod
    def parse(cls, text: str) -> "IntegerWindow":
        """Parse ``"LO..HI"``."""
        lo, sep, hi = text.partition("..")
        if not sep:
            raise ValueError(f"window must look like LO..HI, got {text!r}")
        return cls(int(lo), int(hi))


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0 or math.isinf(lam):
        raise ValueError(f"lambda must be a positive finite real, got {lam}")
    return lam


def count_exceedances(values, lam: float) -> int:
    """Number of entries with ``|value| > lam`` (strict).

    ``values`` may be an array over a window or a ``{k: value}`` mapping.
    """
    lam = check_lambda(lam)
    if isinstance(values, Mapping):
        values = list(values.values())
    return int(np.count_nonzero(np.abs(np.asarray(values, dtype=float)) > lam))


@dataclass(frozen=True)
class LevelSetReport:
    """One level-set measurement: ``ratio = lam * count / l1``.

    ``count`` is an integer for counting measure; ergodic reports put the
    (normalized) measure there instead.
    """

    lam: float
    count: float
    l1: float
    kind: str = ""

    @property
    def ratio(self) -> float:
        if self.l1 == 0:
            return 0.0
        return self.lam * self.count / self.l1
