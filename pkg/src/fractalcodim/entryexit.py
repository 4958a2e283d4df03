"""Fractal sequence generation by iterating the entry-exit relation I(.,.) = 0."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketFailure,
    DegenerateGap,
    NoConvergence,
)
from .models import Orientation, _check_height, orientation as model_orientation

# bracket lower end starts at h*1e-3 and shrinks geometrically until the
# residual changes sign; the root approaches h as the sequence densifies
_BRACKET_START = 1e-3
_BRACKET_SHRINK = 0.1
_BRACKET_TRIES = 13  # initial try + 12 shrinks

_HARD_FAIL_ITERATIONS = 10


@dataclass(frozen=True)
class SequenceConfig:
    """Run parameters for one fractal-sequence generation."""

    h0: float
    max_iterations: int
    root_tol: float = 1e-10
    min_height: float = 1e-14

    def __post_init__(self):
        if not (self.h0 > 0 and math.isfinite(self.h0)):
            raise ValueError("h0 must be a positive finite number")
        if self.max_iterations < 2:
            raise ValueError("max_iterations must be >= 2")
        if not 0.0 < self.min_height < self.h0:
            raise ValueError("min_height must satisfy 0 < min_height < h0")
        if not (self.root_tol > 0):
            raise ValueError("root_tol must be positive")


@dataclass(frozen=True)
class FractalSequence:
    """Strictly decreasing section heights produced by the entry-exit relation.

    ``gaps[k]`` holds ``heights[k] - heights[k+1]`` at full relative precision;
    in extreme configurations the gap can be smaller than one ulp of the
    heights, in which case the rounded ``heights`` array carries ties while
    ``gaps`` stays strictly positive and authoritative.
    """

    heights: np.ndarray
    gaps: np.ndarray
    orientation: Orientation | None
    residuals: np.ndarray
    truncated_early: bool
    sdi_scale: float

    def __post_init__(self):
        heights = np.asarray(self.heights, dtype=float)
        gaps = np.asarray(self.gaps, dtype=float)
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=float))
        if heights.ndim != 1 or len(heights) < 1:
            raise ValueError("heights must be a nonempty 1-D array")
        if np.any(heights <= 0):
            raise ValueError("heights must be positive")
        if len(gaps) != len(heights) - 1:
            raise ValueError("need exactly one gap per consecutive height pair")
        if np.any(np.diff(heights) > 0):
            raise ValueError("heights must be non-increasing")

    @classmethod
    def from_heights(cls, heights):
        """Wrap an externally supplied decreasing sequence (estimator input)."""
        heights = np.asarray(heights, dtype=float)
        gaps = -np.diff(heights)
        if np.any(gaps <= 0):
            raise DegenerateGap("height differences must be strictly positive")
        return cls(
            heights=heights,
            gaps=gaps,
            orientation=None,
            residuals=np.zeros(len(gaps)),
            truncated_early=False,
            sdi_scale=math.nan,
        )

    def __len__(self):
        return len(self.heights)


def _brentq(f, xa, xb, fa, fb, xtol, maxiter):
    """Classic Brent root bracketing on [xa, xb]; returns (root, f(root))."""
    if fa == 0.0:
        return xa, fa
    if fb == 0.0:
        return xb, fb
    if (fa > 0) == (fb > 0):
        raise BracketFailure("no sign change over the supplied bracket")
    xc, fc = xa, fa
    e = d = xb - xa
    eps = 2.220446049250313e-16
    for _ in range(maxiter):
        if abs(fc) < abs(fb):
            xa, xb, xc = xb, xc, xb
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * eps * abs(xb) + xtol
        m = 0.5 * (xc - xb)
        if abs(m) <= tol or fb == 0.0:
            return xb, fb
        if abs(e) < tol or abs(fa) <= abs(fb):
            e = d = m
        else:
            s = fb / fa
            if xa == xc:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (xb - xa) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                e = d = m
        xa, fa = xb, fb
        xb = xb + (d if abs(d) > tol else (tol if m > 0 else -tol))
        fb = f(xb)
        if (fb > 0) == (fc > 0):
            xc, fc = xa, fa
            e = d = xb - xa
    return xb, fb


def _next_gap(model, h_prev, orientation, root_tol, scale):
    """Solve one entry-exit step; returns (gap, |residual|) with gap > 0."""
    use_mp = getattr(model, "_use_mp", None)
    if use_mp is not None and use_mp(h_prev):
        return model._mp_next_gap(h_prev, orientation)

    f = model._residual_fn(orientation, h_prev)
    f_hi = f(h_prev)  # = I(h_prev, h_prev), nonzero for a nondegenerate model
    lo = h_prev * _BRACKET_START
    f_lo = None
    for _ in range(_BRACKET_TRIES):
        f_lo = f(lo)
        if f_lo == 0.0 or (f_lo > 0) != (f_hi > 0):
            break
        lo *= _BRACKET_SHRINK
    else:
        raise BracketFailure(
            f"no sign change of the entry-exit residual on ({lo:g}, {h_prev:g})"
        )
    # machine-tight root: the residual acceptance bound is ulp-level
    xtol = 4.4e-16 * h_prev
    root, f_root = _brentq(f, lo, h_prev, f_lo, f_hi, xtol, 200)
    resid = abs(f_root)
    gap = h_prev - root
    if gap <= 0.0:
        raise NoConvergence(
            f"entry-exit step stagnated at h = {h_prev:g}: "
            "gap below double-precision resolution"
        )
    if not resid <= root_tol * scale:
        raise NoConvergence(
            f"entry-exit residual {resid:g} exceeds tolerance {root_tol * scale:g}"
        )
    return gap, resid


def next_height(model, h_prev, orientation, root_tol=1e-10):
    """The unique h_next < h_prev with I(h_next, h_prev) = 0 (entry-solved)
    or I(h_prev, h_next) = 0 (exit-solved)."""
    _check_height(model, h_prev)
    scale = abs(model._equal_heights(h_prev)[0])
    gap, _ = _next_gap(model, h_prev, orientation, root_tol, scale)
    return h_prev - gap


def generate_sequence(model, cfg):
    """Iterate the entry-exit relation from cfg.h0.

    Produces up to ``cfg.max_iterations + 1`` heights.  A solve failure or a
    height below ``cfg.min_height`` after the first ten iterations truncates
    the run (recorded, not fatal); earlier failures are hard errors.
    """
    _check_height(model, cfg.h0)
    if cfg.min_height >= cfg.h0:
        raise ValueError("min_height must be below h0")
    orient = model_orientation(model, cfg.h0)
    scale = abs(model._equal_heights(cfg.h0)[0])

    heights = [cfg.h0]
    gaps = []
    residuals = []
    truncated = False
    h = cfg.h0
    for k in range(cfg.max_iterations):
        try:
            gap, resid = _next_gap(model, h, orient, cfg.root_tol, scale)
        except (BracketFailure, NoConvergence) as exc:
            if k < _HARD_FAIL_ITERATIONS:
                raise
            truncated = True
            break
        h_next = h - gap
        if h_next <= 0.0:
            truncated = True
            break
        heights.append(h_next)
        gaps.append(gap)
        residuals.append(resid)
        if h_next < cfg.min_height:
            truncated = True
            break
        h = h_next
    return FractalSequence(
        heights=np.array(heights),
        gaps=np.array(gaps),
        orientation=orient,
        residuals=np.array(residuals),
        truncated_early=truncated,
        sdi_scale=scale,
    )
