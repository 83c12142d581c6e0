"""Complete-convergence sums and the translated-block maximal hypothesis.

``A_n = {k : |truncated_n a(k)| > lam}``.  The series ``sum_n #A_n`` is only
ever probed to an explicit horizon ``N``; its growth is classified exactly
from the limit set ``A_inf``, which is reached once ``n`` passes every
support point seen from the window.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core_seq import BilateralSequence, IntegerWindow, check_lambda, l1_norm
from .hilbert import (
    TransformField,
    _check_n,
    full_hilbert,
    maximal_hilbert,
    partial_sum_tables,
    sufficient_window,
    truncated_hilbert,
    truncated_hilbert_levels,
)


@dataclass(frozen=True)
class TranslatedBlockSpec:
    """Shifts ``t_1..t_N``; block ``n`` is ``{-n..n} - t_n``."""

    translates: tuple

    def __post_init__(self):
        object.__setattr__(self, "translates", tuple(int(t) for t in self.translates))

    @property
    def horizon(self) -> int:
        return len(self.translates)

    @classmethod
    def zero(cls, N: int) -> "TranslatedBlockSpec":
        return cls((0,) * N)

    @classmethod
    def linear(cls, N: int, c: int = 1) -> "TranslatedBlockSpec":
        return cls(tuple(c * n for n in range(1, N + 1)))

    def to_dict(self) -> dict:
        return {"translates": list(self.translates)}

    @classmethod
    def from_dict(cls, data) -> "TranslatedBlockSpec":
        if "translates" not in data:
            raise ValueError("translate JSON is missing field 'translates'")
        return cls(data["translates"])

    @classmethod
    def load(cls, path) -> "TranslatedBlockSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def exceedance_set(a: BilateralSequence, n: int, lam: float) -> frozenset:
    """The finite set ``A_n``, computed over the sufficient window."""
    n = _check_n(n)
    lam = check_lambda(lam)
    if a.is_empty:
        return frozenset()
    return truncated_hilbert(a, n, sufficient_window(a, lam)).exceedance_set(lam)


def exceedance_sets(a: BilateralSequence, lam: float, N: int) -> list[frozenset]:
    """``[A_1, ..., A_N]`` in one pass."""
    N = _check_n(N)
    lam = check_lambda(lam)
    if a.is_empty:
        return [frozenset()] * N
    window = sufficient_window(a, lam)
    levels = truncated_hilbert_levels(a, N, window)
    out = []
    for row in levels:
        hits = np.flatnonzero(np.abs(row) > lam) + window.lo
        out.append(frozenset(hits.tolist()))
    return out


def settling_level(a: BilateralSequence, lam: float) -> int:
    """Smallest ``n0`` with ``A_n == A_inf`` for every ``n >= n0``."""
    lam = check_lambda(lam)
    if a.is_empty:
        return 1
    n0 = 1
    for ks, n_lo, table in partial_sum_tables(a, sufficient_window(a, lam)):
        member = np.abs(table) > lam
        final = member[:, -1]
        differs = member != final[:, None]
        # levels below n_lo have value 0, i.e. are never members
        last_diff = np.where(
            differs.any(axis=1),
            n_lo + (member.shape[1] - 1 - np.argmax(differs[:, ::-1], axis=1)),
            np.where(final, n_lo - 1, 0),
        )
        n0 = max(n0, int(last_diff.max()) + 1)
    return n0


@dataclass
class CompleteConvergenceReport:
    lam: float
    per_n_counts: list
    bound_value: float
    limit_count: int
    settles_at: int
    maximal_count: int

    @property
    def horizon(self) -> int:
        return len(self.per_n_counts)

    @property
    def partial_sum(self) -> int:
        return int(sum(self.per_n_counts))

    @property
    def cumulative(self) -> list:
        return np.cumsum(self.per_n_counts, dtype=np.int64).tolist()

    @property
    def stabilized_at(self) -> Optional[int]:
        """``n0`` if ``A_n`` has provably reached its limit within the horizon."""
        return self.settles_at if self.settles_at <= self.horizon else None

    @property
    def growth(self) -> str:
        """``"linear"`` when ``S_N ~ limit_count * N``, else ``"bounded"``."""
        return "linear" if self.limit_count > 0 else "bounded"

    @property
    def empirical_constant(self) -> float:
        """``S_N / (||a||_1 / lam)``; grows with ``N`` when growth is linear."""
        if self.bound_value == 0:
            return 0.0
        return self.partial_sum / self.bound_value

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "count_A_n", "cumulative_S"])
        for n, (c, s) in enumerate(zip(self.per_n_counts, self.cumulative), start=1):
            w.writerow([n, c, s])

    def summary(self) -> dict:
        return {
            "lambda": self.lam,
            "horizon": self.horizon,
            "partial_sum": self.partial_sum,
            "bound_value": self.bound_value,
            "limit_count": self.limit_count,
            "stabilized_at": self.stabilized_at,
            "growth": self.growth,
            "maximal_count": self.maximal_count,
        }


def partial_sum_S(a: BilateralSequence, lam: float, N: int) -> CompleteConvergenceReport:
    """``S_N = sum_{n<=N} #A_n`` with the exact limit behaviour of ``#A_n``."""
    lam = check_lambda(lam)
    N = _check_n(N)
    if a.is_empty:
        return CompleteConvergenceReport(lam, [0] * N, 0.0, 0, 1, 0)
    sets = exceedance_sets(a, lam, N)
    window = sufficient_window(a, lam)
    limit = full_hilbert(a, window).count(lam)
    max_count = maximal_hilbert(a, window).count(lam)
    return CompleteConvergenceReport(
        lam=lam,
        per_n_counts=[len(s) for s in sets],
        bound_value=l1_norm(a) / lam,
        limit_count=limit,
        settles_at=settling_level(a, lam),
        maximal_count=max_count,
    )


def greedy_disjoint_translates(a: BilateralSequence, lam: float, N: int) -> TranslatedBlockSpec:
    """Shifts placing ``A_1 - t_1, A_2 - t_2, ...`` left to right, disjointly.

    The first non-empty set stays put; each later non-empty ``A_n`` is
    shifted so its minimum lands one past the maximum placed so far.
    Empty sets get shift 0.
    """
    sets = exceedance_sets(a, lam, N)
    ts = []
    top = None
    for s in sets:
        if not s:
            ts.append(0)
            continue
        t = 0 if top is None else min(s) - (top + 1)
        ts.append(t)
        top = max(s) - t
    spec = TranslatedBlockSpec(ts)
    placed = translated_sets(sets, spec)
    if not pairwise_disjoint(placed):
        raise AssertionError("greedy translates are not pairwise disjoint")
    return spec


def translated_sets(sets: Sequence[frozenset], spec: TranslatedBlockSpec) -> list[frozenset]:
    return [frozenset(k - t for k in s) for s, t in zip(sets, spec.translates)]


def pairwise_disjoint(sets: Sequence[frozenset]) -> bool:
    seen: set = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True


def translated_block_maximal(
    a: BilateralSequence, spec: TranslatedBlockSpec, window: IntegerWindow
) -> TransformField:
    """``max_{n<=N} |sum_{i in [-n-t_n, n-t_n], i != 0} a[k+i] / i|``.

    Each row holds prefix sums of ``a[j] / (j - k)`` over the support, so
    every block is one difference.
    """
    if spec.horizon == 0:
        raise ValueError("translate spec must be non-empty")
    out = np.zeros(window.width)
    if a.is_empty:
        return TransformField(window, out, "translated_maximal", spec.horizon)
    js = a.indices()
    width = js.size
    ns = np.arange(1, spec.horizon + 1)
    ts = np.asarray(spec.translates, dtype=np.int64)
    rows = max(1, (1 << 20) // max(width, spec.horizon))
    for start in range(window.lo, window.hi + 1, rows):
        ks = np.arange(start, min(start + rows, window.hi + 1))
        d = js[None, :] - ks[:, None]
        terms = np.divide(a.values[None, :], d, out=np.zeros(d.shape), where=d != 0)
        prefix = np.concatenate([np.zeros((ks.size, 1)), np.cumsum(terms, axis=1)], axis=1)
        best = np.zeros(ks.size)
        for n, t in zip(ns, ts):
            # j = k + i ranges over [k - n - t, k + n - t], clipped to the support
            lo = np.clip(ks - n - t - a.support_min, 0, width)
            hi = np.clip(ks + n - t - a.support_min + 1, 0, width)
            r = np.arange(ks.size)
            block = np.where(hi > lo, prefix[r, hi] - prefix[r, lo], 0.0)
            np.maximum(best, np.abs(block), out=best)
        out[ks - window.lo] = best
    return TransformField(window, out, "translated_maximal", spec.horizon)


@dataclass(frozen=True)
class HypothesisResult:
    lam: float
    lhs_count: int
    rhs_count: int

    @property
    def ratio(self) -> float:
        if self.rhs_count == 0:
            return math.inf if self.lhs_count > 0 else 0.0
        return self.lhs_count / self.rhs_count

    @property
    def infinite(self) -> bool:
        return self.rhs_count == 0 and self.lhs_count > 0

    def __iter__(self):
        return iter((self.lhs_count, self.rhs_count, self.ratio))


def hypothesis_test(a: BilateralSequence, lam: float, spec: TranslatedBlockSpec) -> HypothesisResult:
    """Compare translated-block and centered-block maximal level sets.

    Both sides use the same horizon ``N = len(spec)``.  An empty right side
    with a non-empty left side gives ``ratio = inf`` (flagged, not raised).
    """
    lam = check_lambda(lam)
    if a.is_empty:
        return HypothesisResult(lam, 0, 0)
    window = sufficient_window(a, lam)
    shift = max((abs(t) for t in spec.translates), default=0)
    lhs = translated_block_maximal(a, spec, window.widen(shift)).count(lam)
    rhs = maximal_hilbert(a, window, horizon=spec.horizon).count(lam)
    return HypothesisResult(lam, lhs, rhs)


def write_hypothesis_csv(results: Sequence[HypothesisResult], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "lhs", "rhs", "ratio"])
    for r in results:
        w.writerow([repr(r.lam), r.lhs_count, r.rhs_count, "inf" if r.infinite else repr(r.ratio)])
