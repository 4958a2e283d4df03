"""Minkowski dimension estimation and fractal codimension recovery.

Three finite-k formula estimators for a decreasing sequence y_k -> 0
(per-index traces plus a final value), a grid box-counting oracle for point
sets and horizontal segment unions, the closed-form dimension values, and the
snap from an estimated dimension back to the integer codimension.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .entryexit import FractalSequence
from .errors import DegenerateGap, InsufficientScales


class EstimatorMethod(Enum):
    CAHEN = "cahen"
    BOREL = "borel"
    TAIL_NUCLEUS = "tail_nucleus"
    BOX_COUNT = "box_count"


@dataclass(frozen=True)
class DimensionEstimate:
    method: EstimatorMethod
    per_k: np.ndarray  # rows (k, value)
    final_value: float
    k_window: tuple

    def __post_init__(self):
        per_k = np.asarray(self.per_k, dtype=float)
        object.__setattr__(self, "per_k", per_k)
        if per_k.size == 0:
            raise ValueError("per_k trace must be nonempty")


def _seq_arrays(seq):
    if not isinstance(seq, FractalSequence):
        seq = FractalSequence.from_heights(np.asarray(seq, dtype=float))
    if len(seq.heights) < 3:
        raise ValueError("need at least 3 heights")
    if np.any(seq.gaps <= 0.0):
        raise DegenerateGap("sequence contains a zero (underflowed) height gap")
    return seq.heights, seq.gaps


def cahen_estimate(seq):
    """dim ~ ln k / (-ln(y_k - y_{k+1}))."""
    heights, gaps = _seq_arrays(seq)
    kk = np.arange(1, len(gaps))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.log(kk) / (-np.log(gaps[1:]))
    good = np.isfinite(vals)
    if not np.any(good):
        raise DegenerateGap("no usable k-range for the Cahen estimate")
    kk, vals = kk[good], vals[good]
    per_k = np.column_stack((kk, vals))
    return DimensionEstimate(
        method=EstimatorMethod.CAHEN,
        per_k=per_k,
        final_value=float(vals[-1]),
        k_window=(int(kk[0]), int(kk[-1])),
    )


def borel_estimate(seq):
    """dim ~ 1 / (1 - ln(y_k)/ln k); k = 1 is skipped (ln 1 = 0)."""
    heights, _ = _seq_arrays(seq)
    kk = np.arange(2, len(heights))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 1.0 / (1.0 - np.log(heights[kk]) / np.log(kk))
    good = np.isfinite(vals)
    if not np.any(good):
        raise DegenerateGap("no usable k-range for the Borel estimate")
    kk, vals = kk[good], vals[good]
    per_k = np.column_stack((kk, vals))
    return DimensionEstimate(
        method=EstimatorMethod.BOREL,
        per_k=per_k,
        final_value=float(vals[-1]),
        k_window=(int(kk[0]), int(kk[-1])),
    )


def tail_nucleus_estimate(seq):
    """dim ~ 1 - ln(k*(y_k - y_{k+1}) + y_k) / ln((y_k - y_{k+1})/2)."""
    heights, gaps = _seq_arrays(seq)
    kk = np.arange(1, len(gaps))
    g = gaps[1:]
    y = heights[1 : len(gaps)]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 1.0 - np.log(kk * g + y) / np.log(g / 2.0)
    good = np.isfinite(vals)
    if not np.any(good):
        raise DegenerateGap("no usable k-range for the tail-nucleus estimate")
    kk, vals = kk[good], vals[good]
    per_k = np.column_stack((kk, vals))
    return DimensionEstimate(
        method=EstimatorMethod.TAIL_NUCLEUS,
        per_k=per_k,
        final_value=float(vals[-1]),
        k_window=(int(kk[0]), int(kk[-1])),
    )


_ESTIMATORS = {
    EstimatorMethod.CAHEN: cahen_estimate,
    EstimatorMethod.BOREL: borel_estimate,
    EstimatorMethod.TAIL_NUCLEUS: tail_nucleus_estimate,
}


def estimate_all(seq):
    """All three formula estimators as {EstimatorMethod: DimensionEstimate}."""
    return {method: fn(seq) for method, fn in _ESTIMATORS.items()}


def select_estimate(estimates):
    """Auto-selection: tail-nucleus for dense sequences (any final > 0.5),
    Cahen otherwise."""
    density = max(est.final_value for est in estimates.values())
    method = EstimatorMethod.TAIL_NUCLEUS if density > 0.5 else EstimatorMethod.CAHEN
    return method, estimates[method]


def best_estimate(estimates, reference):
    """Estimator whose final value is closest to a known reference."""
    method = min(estimates, key=lambda m: abs(estimates[m].final_value - reference))
    return method, estimates[method]


def dyadic_scales(coarse_exp, fine_exp):
    """Box sizes 2^-i for i = coarse_exp..fine_exp (decreasing sizes)."""
    if fine_exp <= coarse_exp:
        raise ValueError("fine_exp must exceed coarse_exp")
    return 2.0 ** (-np.arange(coarse_exp, fine_exp + 1, dtype=float))


def _count_boxes_points(points, eps):
    return len(np.unique(np.floor(points / eps)))


def _count_boxes_segments(segments, eps):
    rows = np.floor(segments[:, 2] / eps).astype(np.int64)
    c0 = np.floor(np.minimum(segments[:, 0], segments[:, 1]) / eps).astype(np.int64)
    c1 = np.floor(np.maximum(segments[:, 0], segments[:, 1]) / eps).astype(np.int64)
    order = np.lexsort((c0, rows))
    count = 0
    cur_row = None
    cur_hi = 0
    for idx in order:
        r = rows[idx]
        a = c0[idx]
        b = c1[idx]
        if r != cur_row or a > cur_hi + 1:
            count += int(b - a + 1)
            cur_hi = b
        elif b > cur_hi:
            count += int(b - cur_hi)
            cur_hi = b
        cur_row = r
    return count


def box_count_dimension(data, scales):
    """Least-squares box-count slope over the middle 60% of a scale grid.

    ``data`` is either a 1-D array of points on the line or an (S, 3) array of
    horizontal segments (x_left, x_right, y).  Boxes are anchored at 0.
    """
    data = np.asarray(data, dtype=float)
    scales = np.unique(np.asarray(scales, dtype=float))[::-1]
    if scales.size < 5:
        raise InsufficientScales("need at least 5 box scales")
    if np.any(scales <= 0):
        raise InsufficientScales("box scales must be positive")
    if scales[0] / scales[-1] < 1e3:
        raise InsufficientScales("box scales must span at least 3 decades")
    if data.ndim == 1:
        if data.size < 100:
            raise InsufficientScales("need at least 100 points")
        counts = np.array([_count_boxes_points(data, e) for e in scales], dtype=float)
    elif data.ndim == 2 and data.shape[1] == 3:
        if data.shape[0] < 100:
            raise InsufficientScales("need at least 100 segments")
        counts = np.array([_count_boxes_segments(data, e) for e in scales], dtype=float)
    else:
        raise ValueError("data must be 1-D points or an (S, 3) segment array")
    log_inv_eps = np.log(1.0 / scales)
    log_n = np.log(counts)
    m = scales.size
    lo = int(round(0.2 * m))
    hi = m - lo
    if hi - lo < 2:
        raise InsufficientScales("middle scale window too small for a slope fit")
    slope = float(np.polyfit(log_inv_eps[lo:hi], log_n[lo:hi], 1)[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        pointwise = log_n / log_inv_eps
    per_k = np.column_stack((np.arange(m), pointwise))
    return DimensionEstimate(
        method=EstimatorMethod.BOX_COUNT,
        per_k=per_k,
        final_value=slope,
        k_window=(lo, hi - 1),
    )


def _check_contact_order(n):
    if n < 2 or n % 2 != 0:
        raise ValueError("contact order n must be an even integer >= 2")


def theoretical_dimension(n, j):
    """(2j+1)/(n+2j+1); 1 for infinite codimension (j = inf)."""
    _check_contact_order(n)
    if j == math.inf:
        return 1.0
    if j < 0 or int(j) != j:
        raise ValueError("j must be a nonnegative integer or inf")
    j = int(j)
    return (2 * j + 1) / (n + 2 * j + 1)


def chirp_theoretical_dimension(n, j):
    """(n+4j+1)/(n+2j+1) in [1, 2); finite codimension only."""
    _check_contact_order(n)
    if j == math.inf:
        raise ValueError("chirp dimension is only defined for finite codimension")
    if j < 0 or int(j) != j:
        raise ValueError("j must be a nonnegative integer")
    j = int(j)
    return (n + 4 * j + 1) / (n + 2 * j + 1)


@dataclass(frozen=True)
class CodimensionReport:
    """Snap of an estimated dimension onto the admissible value set."""

    contact_order_n: int
    estimated_dimension: float
    recovered_j: float | None  # int, math.inf, or None when unresolved
    codimension: float | None  # recovered_j + 1, math.inf, or None
    snap_distance: float
    candidates: tuple  # two nearest (j_or_inf, dimension) pairs

    @property
    def resolved(self):
        return self.codimension is not None

    @property
    def infinite(self):
        return self.codimension == math.inf


def default_snap_threshold(n):
    """0.04 at n = 2, halved for each doubling of n."""
    return 0.08 / n


def codimension_from_dimension(n, estimated_dimension, snap_threshold=None):
    """Snap a dimension estimate to {(2j+1)/(n+2j+1)} ∪ {1} and invert to j.

    Returns an unresolved report (codimension None, two nearest candidates)
    when no admissible value lies within snap_threshold.
    """
    _check_contact_order(n)
    d = float(estimated_dimension)
    if not 0.0 <= d <= 1.0:
        raise ValueError("estimated dimension must lie in [0, 1]")
    if snap_threshold is None:
        snap_threshold = default_snap_threshold(n)
    cand_js = {math.inf}
    if d < 1.0:
        j_real = ((n + 1) * d - 1.0) / (2.0 * (1.0 - d))
        j_lo = max(0, math.floor(j_real))
        cand_js.update({max(0, j_lo - 1), j_lo, j_lo + 1})
    else:
        cand_js.add(0)
    cands = sorted(
        ((j, theoretical_dimension(n, j)) for j in cand_js),
        key=lambda item: abs(d - item[1]),
    )
    best_j, best_dim = cands[0]
    second = cands[1] if len(cands) > 1 else cands[0]
    snap_distance = abs(d - best_dim)
    if snap_distance > snap_threshold:
        return CodimensionReport(
            contact_order_n=n,
            estimated_dimension=d,
            recovered_j=None,
            codimension=None,
            snap_distance=snap_distance,
            candidates=(cands[0], second),
        )
    if best_j == math.inf:
        recovered, codim = math.inf, math.inf
    else:
        recovered, codim = int(best_j), int(best_j) + 1
    return CodimensionReport(
        contact_order_n=n,
        estimated_dimension=d,
        recovered_j=recovered,
        codimension=codim,
        snap_distance=snap_distance,
        candidates=(cands[0], second),
    )


def chirp_segments(model, seq):
    """Horizontal-extent fast-orbit segments (x_left, x_right, y) per height."""
    heights = np.asarray(seq.heights if isinstance(seq, FractalSequence) else seq, dtype=float)
    if heights.size == 0:
        raise ValueError("sequence must be nonempty")
    base = getattr(model, "contact_y", 0.0)
    rows = np.empty((heights.size, 3))
    for i, h in enumerate(heights):
        xa = model.alpha_limit(h)
        xw = model.omega_limit(h)
        rows[i, 0] = min(xa, xw)
        rows[i, 1] = max(xa, xw)
        rows[i, 2] = base + h
    return rows
