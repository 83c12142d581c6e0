"""Level sets of positive rational pole sums ``g(s) = sum a_i / (s - t_i)``.

For positive weights ``g`` decreases strictly between consecutive poles,
from ``+inf`` just right of a pole to ``-inf`` just left of the next one.
So ``g = lam`` has exactly one root to the right of each pole and the set
``{g > lam}`` is the union of the intervals ``(t_i, m_i)``; its length is
``sum a_i / lam`` regardless of where the poles sit.

Roots are located by bisection on the offset ``u = s - t_i`` from the
nearest pole, which keeps full relative precision in ``m_i - t_i`` even
when the root hugs the pole (large ``lam``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .core_seq import check_lambda

_MAX_BISECT = 2200


@dataclass(frozen=True, eq=False)
class RationalPoleSum:
    poles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.poles, dtype=np.float64).reshape(-1)
        a = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if t.size != a.size:
            raise ValueError("poles and weights differ in length")
        if t.size == 0:
            raise ValueError("need at least one pole")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
            raise ValueError("poles and weights must be finite")
        if np.any(a <= 0):
            raise ValueError("weights must be strictly positive")
        # coincident poles merge by summing their weights
        t, inv = np.unique(t, return_inverse=True)
        merged = np.zeros(t.size)
        np.add.at(merged, inv.reshape(-1), a)
        t.setflags(write=False)
        merged.setflags(write=False)
        object.__setattr__(self, "poles", t)
        object.__setattr__(self, "weights", merged)

    @property
    def order(self) -> int:
        return self.poles.size

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def shifted(self, c: float) -> "RationalPoleSum":
        return RationalPoleSum(self.poles + c, self.weights)

    def to_dict(self) -> dict:
        return {"poles": self.poles.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "RationalPoleSum":
        for key in ("poles", "weights"):
            if key not in data:
                raise ValueError(f"pole-sum JSON is missing field {key!r}")
        return cls(np.asarray(data["poles"], float), np.asarray(data["weights"], float))

    @classmethod
    def load(cls, path) -> "RationalPoleSum":
        return cls.from_dict(json.loads(Path(path).read_text()))


def eval_g(rs: RationalPoleSum, s: float) -> float:
    if np.any(rs.poles == s):
        raise ValueError(f"g is undefined at the pole s={s}")
    return float(np.sum(rs.weights / (s - rs.poles)))


def _g_near_pole(rs: RationalPoleSum, u: np.ndarray) -> np.ndarray:
    """``g(t_i + u_i)`` for every ``i``, from pole-relative offsets."""
    t, a = rs.poles, rs.weights
    rel = t[:, None] - t[None, :]  # rel[i, j] = t_i - t_j
    d = rel + u[:, None]
    return np.sum(a[None, :] / d, axis=1)


@np.errstate(divide="ignore", invalid="ignore", over="ignore")
def _bisect_offsets(rs: RationalPoleSum, target: float, side: str) -> np.ndarray:
    """Offsets from each pole to its root of ``g = target``.

    ``side="above"`` (``target > 0``): roots ``t_i + u_i`` right of each pole.
    ``side="below"`` (``target < 0``): roots ``t_i - u_i`` left of each pole.
    Bisection runs until the bracket cannot be split in floating point.
    """
    t = rs.poles
    lam = abs(target)
    gaps = np.diff(t)
    outer = np.array([rs.total_weight / lam])
    if side == "above":
        hi = np.concatenate([gaps, outer])
        sign = 1.0
    else:
        hi = np.concatenate([outer, gaps])
        sign = -1.0
    lo = np.zeros_like(hi)

    def h(u):
        # decreasing in u for side=above, increasing for side=below
        return _g_near_pole(rs, sign * u) - target

    # g is bounded by sum(a) / distance beyond the outermost pole; rounding
    # can put the far end a hair short of the root, so nudge it outward
    far = -1 if side == "above" else 0
    for _ in range(60):
        far_val = _g_near_pole(rs, sign * hi)[far] - target
        if not ((far_val > 0) if side == "above" else (far_val < 0)):
            break
        hi[far] *= 1.0 + 1e-12
    else:
        raise RuntimeError("root bracketing failed on the unbounded interval")

    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        val = h(mid)
        go_right = val > 0 if side == "above" else val < 0
        lo = np.where(active & go_right, mid, lo)
        hi = np.where(active & ~go_right, mid, hi)
    else:
        raise RuntimeError("bisection did not converge")

    # pick the closer endpoint of the final one-ulp bracket
    h_lo = np.abs(h(np.where(lo > 0, lo, hi)))
    h_hi = np.abs(h(hi))
    return np.where((lo > 0) & (h_lo < h_hi), lo, hi)


@dataclass(frozen=True)
class LevelRoots:
    lam: float
    roots: np.ndarray
    offsets: np.ndarray  # roots - poles, each > 0


def level_roots(rs: RationalPoleSum, lam: float) -> LevelRoots:
    """The ``n`` solutions of ``g(s) = lam``; ``t_i < m_i < t_{i+1}``."""
    lam = check_lambda(lam)
    u = _bisect_offsets(rs, lam, "above")
    return LevelRoots(lam, rs.poles + u, u)


def level_set_measure(rs: RationalPoleSum, lam: float, side: str = "above") -> float:
    """Lebesgue measure of ``{g > lam}`` (above) or ``{g < -lam}`` (below)."""
    lam = check_lambda(lam)
    if side == "above":
        u = _bisect_offsets(rs, lam, "above")
    elif side == "below":
        u = _bisect_offsets(rs, -lam, "below")
    else:
        raise ValueError(f"side must be 'above' or 'below', got {side!r}")
    return float(np.sum(u))


def vieta_check(rs: RationalPoleSum, lam: float) -> float:
    """``|sum m_i - sum t_i - sum a_i / lam|`` from the numerically found roots."""
    roots = level_roots(rs, lam).roots
    return abs(float(np.sum(roots)) - float(np.sum(rs.poles)) - rs.total_weight / lam)


def vieta_tolerance(rs: RationalPoleSum, lam: float) -> float:
    return 1e-8 * max(1.0, float(np.sum(np.abs(rs.poles))) + rs.total_weight / lam)


def polynomial_root_sum(rs: RationalPoleSum, lam: float) -> float:
    """Sum of roots of the cross-multiplied equation, read off its coefficients.

    ``lam * prod(s - t_j) - sum_i a_i prod_{j != i}(s - t_j) = 0`` has
    leading coefficient ``lam``; the root sum is ``-c_{n-1} / lam``.
    """
    lam = check_lambda(lam)
    t, a = rs.poles, rs.weights
    p = lam * np.poly(t)
    for i in range(t.size):
        q = np.poly(np.delete(t, i)) if t.size > 1 else np.ones(1)
        p[1:] -= a[i] * q
    return float(-p[1] / p[0])


def measure_rows(rs: RationalPoleSum, lambdas) -> list[dict]:
    """Report rows ``(lambda, side, measure, expected, residual)``."""
    rows = []
    for lam in lambdas:
        expected = rs.total_weight / lam
        for side in ("above", "below"):
            meas = level_set_measure(rs, lam, side)
            rows.append(
                {
                    "lambda": lam,
                    "side": side,
                    "measure": meas,
                    "expected": expected,
                    "residual": abs(meas - expected) / expected,
                }
            )
    return rows


def write_measure_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "side", "measure", "expected", "residual"])
    for r in rows:
        w.writerow([repr(r["lambda"]), r["side"], repr(r["measure"]), repr(r["expected"]), repr(r["residual"])])
