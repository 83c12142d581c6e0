"""Truncated, full and maximal discrete Hilbert transforms.

All truncated sums use the paired form

    sum_{1 <= |i| <= n} a[k+i] / i  =  sum_{i=1}^{n} (a[k+i] - a[k-i]) / i

accumulated in ascending ``i``, so data symmetric about ``k`` cancels
exactly.  For a point ``k`` only the ``i`` in ``[n_lo(k), n_lo(k) + span]``
can reach the support, where ``n_lo(k)`` is the distance from ``k`` to the
support hull (at least 1).  The partial sums over that range are kept in a
table with one row per ``k``; every truncation level and the running
maximum are read off it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .core_seq import (
    BilateralSequence,
    IntegerWindow,
    LevelSetReport,
    check_lambda,
    l1_norm,
)

# rows * columns per chunk of the partial-sum table
_CHUNK_CELLS = 1 << 20


@dataclass(frozen=True, eq=False)
class TransformField:
    """Values of a transform over an integer window.

    ``kind`` is ``"truncated"``, ``"full"``, ``"maximal"`` or
    ``"translated_maximal"``; ``n`` is the truncation level (or the horizon
    for horizon-limited maximal fields, ``None`` when unlimited).
    """

    window: IntegerWindow
    values: np.ndarray
    kind: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.values.shape != (self.window.width,):
            raise ValueError("field values do not match window width")

    def indices(self) -> np.ndarray:
        return self.window.indices()

    def __getitem__(self, k: int) -> float:
        if k not in self.window:
            raise KeyError(f"index {k} outside window [{self.window.lo}, {self.window.hi}]")
        return float(self.values[k - self.window.lo])

    def as_dict(self) -> dict:
        return dict(zip(self.indices().tolist(), self.values.tolist()))

    def exceedance_set(self, lam: float) -> frozenset:
        lam = check_lambda(lam)
        hits = np.flatnonzero(np.abs(self.values) > lam)
        return frozenset((hits + self.window.lo).tolist())

    def count(self, lam: float) -> int:
        lam = check_lambda(lam)
        return int(np.count_nonzero(np.abs(self.values) > lam))

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "kind", "n", "value"])
        n = "" if self.n is None else self.n
        for k, v in zip(self.indices().tolist(), self.values.tolist()):
            w.writerow([k, self.kind, n, repr(v)])


def _hull_distance(a: BilateralSequence, ks: np.ndarray) -> np.ndarray:
    return np.maximum(np.maximum(a.support_min - ks, ks - a.support_max), 0)


def partial_sum_tables(
    a: BilateralSequence, window: IntegerWindow
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(ks, n_lo, table)`` chunks covering ``window``.

    ``table[r, m]`` is the truncated transform at ``ks[r]`` with
    ``n = n_lo[r] + m``.  Levels below ``n_lo`` give 0 and levels above
    ``n_lo + span`` give the last column.  ``a`` must be non-empty.
    """
    width = a.span + 1
    rows = max(1, _CHUNK_CELLS // width)
    m = np.arange(width)
    for start in range(window.lo, window.hi + 1, rows):
        ks = np.arange(start, min(start + rows, window.hi + 1))
        n_lo = np.maximum(_hull_distance(a, ks), 1)
        n = n_lo[:, None] + m[None, :]
        k = ks[:, None]
        inc = (a.at(k + n) - a.at(k - n)) / n
        yield ks, n_lo, np.cumsum(inc, axis=1)


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"truncation level must be an integer >= 1, got {n}")
    return int(n)


def truncated_hilbert(a: BilateralSequence, n: int, window: IntegerWindow) -> TransformField:
    """``sum_{1<=|i|<=n} a[k+i]/i`` for each ``k`` in ``window``."""
    n = _check_n(n)
    out = np.zeros(window.width)
    if not a.is_empty:
        for ks, n_lo, table in partial_sum_tables(a, window):
            col = np.minimum(n - n_lo, a.span)
            rows = np.arange(ks.size)
            vals = table[rows, np.maximum(col, 0)]
            out[ks - window.lo] = np.where(col >= 0, vals, 0.0)
    return TransformField(window, out, "truncated", n)


def truncated_hilbert_levels(
    a: BilateralSequence, N: int, window: IntegerWindow
) -> np.ndarray:
    """Array of shape ``(N, width)``; row ``n-1`` is the level-``n`` field."""
    N = _check_n(N)
    out = np.zeros((N, window.width))
    if a.is_empty:
        return out
    levels = np.arange(1, N + 1)
    for ks, n_lo, table in partial_sum_tables(a, window):
        col = levels[:, None] - n_lo[None, :]
        gathered = np.take_along_axis(table.T, np.clip(col, 0, a.span), axis=0)
        out[:, ks - window.lo] = np.where(col >= 0, gathered, 0.0)
    return out


def full_hilbert(a: BilateralSequence, window: IntegerWindow) -> TransformField:
    """``sum_{j != k} a[j] / (j - k)`` summed directly over the support."""
    out = np.zeros(window.width)
    if not a.is_empty:
        nz = np.flatnonzero(a.values)
        js = (nz + a.support_min).astype(np.int64)
        vals = a.values[nz]
        rows = max(1, _CHUNK_CELLS // js.size)
        for start in range(0, window.width, rows):
            ks = np.arange(start, min(start + rows, window.width)) + window.lo
            d = js[None, :] - ks[:, None]
            terms = np.divide(vals[None, :], d, out=np.zeros(d.shape), where=d != 0)
            out[ks - window.lo] = terms.sum(axis=1)
    return TransformField(window, out, "full")


def maximal_hilbert(
    a: BilateralSequence, window: IntegerWindow, horizon: Optional[int] = None
) -> TransformField:
    """``max_{1<=n} |truncated(n)(k)|``, optionally restricted to ``n <= horizon``.

    Without a horizon the maximum is exact: the partial sums are constant
    once ``n`` passes the farthest support point.
    """
    if horizon is not None:
        horizon = _check_n(horizon)
    out = np.zeros(window.width)
    if not a.is_empty:
        for ks, n_lo, table in partial_sum_tables(a, window):
            mag = np.abs(table)
            if horizon is not None:
                n = n_lo[:, None] + np.arange(a.span + 1)[None, :]
                mag[n > horizon] = 0.0
            out[ks - window.lo] = mag.max(axis=1)
    return TransformField(window, out, "maximal", horizon)


def sufficient_window(a: BilateralSequence, lam: float) -> IntegerWindow:
    """Window outside of which no truncated sum can exceed ``lam``.

    Every partial sum at ``k`` is bounded by ``||a||_1 / dist(k, supp a)``,
    so padding the support by ``ceil(||a||_1 / lam)`` on both sides suffices.
    """
    lam = check_lambda(lam)
    if a.is_empty:
        raise ValueError("sufficient_window needs a non-empty sequence")
    pad = math.ceil(l1_norm(a) / lam)
    return IntegerWindow(a.support_min - pad, a.support_max + pad)


_FIELDS = {"full": full_hilbert, "maximal": maximal_hilbert}


def weak_type_report(
    a: BilateralSequence, lambdas: Sequence[float], kind: str = "full"
) -> list[LevelSetReport]:
    """Empirical weak-(1,1) constants ``lam * #{|T a| > lam} / ||a||_1``.

    The field is evaluated once on the window of the smallest ``lam``,
    which contains the sufficient window of every other ``lam``.
    """
    if kind not in _FIELDS:
        raise ValueError(f"kind must be 'full' or 'maximal', got {kind!r}")
    lambdas = [check_lambda(lam) for lam in lambdas]
    if not lambdas:
        return []
    norm = l1_norm(a)
    if a.is_empty:
        return [LevelSetReport(lam, 0, 0.0, kind) for lam in lambdas]
    field = _FIELDS[kind](a, sufficient_window(a, min(lambdas)))
    return [LevelSetReport(lam, field.count(lam), norm, kind) for lam in lambdas]
