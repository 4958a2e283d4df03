"""Truncated power series arithmetic and the inversion route to codimension.

The slow-fast Hopf normal form x' = y - x^2 + x^3*h1(x) is straightened by
x -> Psi(x) = x*sqrt(1 - x*h1(x)); the slow forcing of the straightened
system is g = -Psi^{-1} * (Psi^{-1})', and the codimension is read off the
even part of g(x) = -x + x^2*gt(x).  Psi^{-1} is computed by the Lagrange
coefficient-extraction formula, which keeps the parity structure explicit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompositionConstantTerm, NotInvertible, WrongShape


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0..c_N of a formal power series truncated at order N."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size < 2:
            raise ValueError("a truncated series needs order >= 1 (>= 2 coefficients)")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def order(self):
        return self.coefficients.size - 1

    def __getitem__(self, i):
        return float(self.coefficients[i]) if i <= self.order else 0.0

    def truncated(self, order):
        if order >= self.order:
            return self
        return TruncatedSeries(self.coefficients[: order + 1])

    @classmethod
    def from_coeffs(cls, coeffs, order=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if order is not None:
            out = np.zeros(order + 1)
            out[: min(coeffs.size, order + 1)] = coeffs[: order + 1]
            coeffs = out
        return cls(coeffs)

    @classmethod
    def identity(cls, order):
        out = np.zeros(order + 1)
        out[1] = 1.0
        return cls(out)

    def __add__(self, other):
        return series_add(self, other)

    def __mul__(self, other):
        return series_mul(self, other)

    def __neg__(self):
        return TruncatedSeries(-self.coefficients)

    def __call__(self, other):
        return series_compose(self, other)


def series_add(a, b):
    order = min(a.order, b.order)
    return TruncatedSeries(a.coefficients[: order + 1] + b.coefficients[: order + 1])


def series_mul(a, b):
    order = min(a.order, b.order)
    full = np.convolve(a.coefficients[: order + 1], b.coefficients[: order + 1])
    return TruncatedSeries(full[: order + 1])


def series_compose(a, b):
    """a(b(x)); b must have zero constant term."""
    if b.coefficients[0] != 0.0:
        raise CompositionConstantTerm("inner series must have zero constant term")
    order = min(a.order, b.order)
    bt = b.truncated(order)
    result = TruncatedSeries(np.zeros(order + 1))
    for i in range(order, -1, -1):
        result = series_mul(result, bt)
        coeffs = result.coefficients.copy()
        coeffs[0] += a[i]
        result = TruncatedSeries(coeffs)
    return result


def series_derivative(a):
    if a.order < 2:
        return TruncatedSeries(np.array([a[1], 0.0]))
    idx = np.arange(1, a.order + 1)
    return TruncatedSeries(a.coefficients[1:] * idx)


def series_reciprocal(a):
    """1/a for a series with nonzero constant term."""
    c0 = a.coefficients[0]
    if c0 == 0.0:
        raise ZeroDivisionError("series has zero constant term")
    n = a.order
    out = np.zeros(n + 1)
    out[0] = 1.0 / c0
    for i in range(1, n + 1):
        out[i] = -np.dot(a.coefficients[1 : i + 1], out[i - 1 :: -1]) / c0
    return TruncatedSeries(out)


def _sqrt_one_plus(w):
    """(1 + w)^(1/2) for a series w with zero constant term (binomial series)."""
    order = w.order
    acc = TruncatedSeries(np.zeros(order + 1))
    coeffs = acc.coefficients.copy()
    coeffs[0] = 1.0
    acc = TruncatedSeries(coeffs)
    term = TruncatedSeries.from_coeffs([1.0], order=order)
    binom = 1.0
    for k in range(1, order + 1):
        binom *= (0.5 - (k - 1)) / k
        term = series_mul(term, w)
        acc = series_add(acc, TruncatedSeries(binom * term.coefficients))
    return acc


def psi_from_h1(h1, order=None):
    """Psi(x) = x*sqrt(1 - x*h1(x)) as a series with Psi'(0) = 1."""
    if order is None:
        order = h1.order + 1
    if order < 2:
        raise ValueError("truncation order must be >= 2")
    # w = -x*h1(x), zero constant term
    w = np.zeros(order + 1)
    take = min(h1.order + 1, order)
    w[1 : take + 1] = -h1.coefficients[:take]
    root = _sqrt_one_plus(TruncatedSeries(w))
    psi = np.zeros(order + 1)
    psi[1:] = root.coefficients[:-1]
    return TruncatedSeries(psi)


def series_invert(psi):
    """Psi^{-1} by Lagrange inversion: [x^i] Psi^{-1} = [x^(i-1)] (x/Psi)^i / i."""
    if psi.coefficients[0] != 0.0:
        raise NotInvertible("series must have zero constant term")
    if psi.coefficients[1] != 1.0:
        raise NotInvertible("series must have unit linear coefficient (normalize first)")
    n = psi.order
    # x/Psi(x) = 1/(1 + psi_2 x + psi_3 x^2 + ...)
    shifted = TruncatedSeries.from_coeffs(psi.coefficients[1:], order=n - 1)
    ratio = series_reciprocal(shifted)
    out = np.zeros(n + 1)
    out[1] = 1.0
    power = ratio
    for i in range(2, n + 1):
        power = series_mul(power, ratio)
        out[i] = power[i - 1] / i
    return TruncatedSeries(out)


def g_from_h1(h1, order=None):
    """Slow forcing g = -Psi^{-1} * (Psi^{-1})' of the straightened system."""
    psi = psi_from_h1(h1, order=order)
    inv = series_invert(psi)
    g = series_mul(-inv, series_derivative(inv))
    return g


@dataclass(frozen=True)
class SeriesCodimension:
    """Verdict of the series route: finite codimension j+1 with even-part
    leading coefficient alpha, or infinite up to the truncation order."""

    finite: bool
    j: int | None
    codimension: int | None
    alpha: float | None
    truncation_order: int

    @property
    def infinite_up_to_order(self):
        return None if self.finite else self.truncation_order


ZERO_TOL_REL = 1e-10


def codimension_from_series(g, zero_tol_rel=ZERO_TOL_REL):
    """Read the codimension off g(x) = -x + x^2*gt(x).

    Finds the first even index 2j with nonvanishing coefficient in
    gt(x) + gt(-x); vanishing is judged relative to the largest even-part
    coefficient.  Returns the infinite verdict when all computed even
    coefficients vanish.
    """
    if abs(g[0]) > 1e-12 or abs(g[1] + 1.0) > 1e-9:
        raise WrongShape("series must have the shape -x + x^2*gt(x)")
    gt = g.coefficients[2:]
    n_gt = gt.size  # gt coefficients 0..n_gt-1
    even_idx = np.arange(0, n_gt, 2)
    even_part = 2.0 * gt[even_idx]  # gt(x) + gt(-x) keeps only even powers
    # Genuine zeros land at rounding scale; judge vanishing against the
    # largest gt coefficient so an identically-odd gt reads as infinite.
    scale = np.max(np.abs(gt)) if gt.size else 0.0
    order = g.order
    if scale == 0.0:
        return SeriesCodimension(False, None, None, None, order)
    tol = zero_tol_rel * scale
    for pos, coeff in zip(even_idx, even_part):
        if abs(coeff) > tol:
            j = int(pos // 2)
            return SeriesCodimension(True, j, j + 1, float(coeff), order)
    return SeriesCodimension(False, None, None, None, order)
