"""Contact-point model families at the singular limit.

Each model exposes, on a vertical section through its nilpotent contact point
(heights h > 0 above the point):

* ``omega_limit(h)`` / ``alpha_limit(h)`` -- attracting / repelling
  critical-curve coordinates of the fast orbit through the section point,
* ``sdi(h_entry, h_exit)`` -- the slow divergence integral between
  ``alpha_limit(h_entry)`` and ``omega_limit(h_exit)``,
* ``slow_flow_sign`` -- +1 when the slow flow runs from the repelling to the
  attracting branch, -1 for the opposite direction.

The SDI is evaluated as (odd-even symmetrized core) + (one-sided tail), which
is algebraically identical to the direct end-to-end integral but avoids the
catastrophic cancellation that otherwise swamps the entry-exit residual when
the two endpoints are nearly mirror images.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, runtime_checkable

import mpmath
import numpy as np

from . import _kernels as K
from .errors import (
    DegenerateModel,
    NoConvergence,
    NonAdmissibleHeight,
    QuadratureFailure,
)

# Production quadrature runs at relative tolerance with a machine-rounding
# floor; the residual acceptance criterion (|I| at a solved pair relative to
# I(h0, h0)) is far tighter than a fixed 1e-12 absolute error would allow.
QUAD_ABS = 1e-300
QUAD_REL = 1e-12

# Relative gap size below which an entry-exit step (and the SDI itself) is
# handed to the extended-precision path: double precision cannot deliver
# residuals at 1e-10 * |I(h0,h0)| once the step falls below ~1e4 ulps of the
# height, since the residual granularity at machine-adjacent heights is
# ~eps * |I| * h/gap.
MP_GAP_RATIO = 3e-4


class Orientation(Enum):
    """Which slot of I(entry, exit) = 0 the new height is solved from."""

    ENTRY_SOLVED = "entry"
    EXIT_SOLVED = "exit"


@runtime_checkable
class SlowFastModel(Protocol):
    contact_order: int
    slow_flow_sign: int
    h_max: float

    def omega_limit(self, h: float) -> float: ...

    def alpha_limit(self, h: float) -> float: ...

    def sdi(self, h_entry: float, h_exit: float) -> float: ...


def _check_height(model, h):
    if not (isinstance(h, (int, float)) and math.isfinite(h)):
        raise NonAdmissibleHeight(f"height {h!r} is not a finite number")
    if not 0.0 < h <= model.h_max:
        raise NonAdmissibleHeight(
            f"height {h:g} outside admissible range (0, {model.h_max:g}] of {type(model).__name__}"
        )


def _quad(which, pars, a, b):
    val, status = K.adaptive_simpson(which, pars, a, b, QUAD_ABS, QUAD_REL)
    if status != 0 or not math.isfinite(val):
        raise QuadratureFailure(
            f"adaptive Simpson failed on [{a:g}, {b:g}] (integrand {which})"
        )
    return val


@dataclass(frozen=True)
class NormalFormModel:
    """x' = y - x^n, y' = eps*(beta*x^m + alpha*x^(m+2j+1)).

    n even >= 2 (contact order), m odd >= 1 with m <= 2(n-1) (finite slow
    divergence), alpha != 0, beta in {+1, -1}.
    """

    n: int
    m: int
    j: int
    alpha: float
    beta: int

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError("contact order n must be an even integer >= 2")
        if self.m < 1 or self.m % 2 != 1:
            raise ValueError("singularity order m must be an odd integer >= 1")
        if self.m > 2 * (self.n - 1):
            raise ValueError("finite slow divergence requires m <= 2(n-1)")
        if self.j < 0:
            raise ValueError("j must be a nonnegative integer")
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        if self.beta not in (1, -1):
            raise ValueError("beta must be +1 or -1")

    @property
    def contact_order(self):
        return self.n

    @property
    def slow_flow_sign(self):
        return self.beta

    @property
    def h_max(self):
        return 0.5

    def _pars(self):
        return np.array(
            [
                float(self.n * self.n),
                float(2 * self.n - 2 - self.m),
                float(2 * self.j + 1),
                float(self.alpha),
                float(self.beta),
            ]
        )

    def omega_limit(self, h):
        _check_height(self, h)
        return h ** (1.0 / self.n)

    def alpha_limit(self, h):
        _check_height(self, h)
        return -(h ** (1.0 / self.n))

    def _pole_guard(self, xmax):
        # beta + alpha*x^q (and the symmetrized denominator) vanish at
        # |x| = |alpha|^(-1/q); the integral is singular past that point.
        q = 2 * self.j + 1
        x_pole = abs(self.alpha) ** (-1.0 / q)
        if xmax >= x_pole * (1.0 - 1e-12):
            raise QuadratureFailure(
                f"slow-divergence integrand has a pole at |x| = {x_pole:g} "
                f"inside the integration range (reached |x| = {xmax:g})"
            )

    def _sdi_double(self, h_entry, h_exit):
        pars = self._pars()
        inv_n = 1.0 / self.n
        a_end = h_entry**inv_n
        b_end = h_exit**inv_n
        m_end = min(a_end, b_end)
        self._pole_guard(max(a_end, b_end))
        sym = _quad(K.NF_SYM, pars, 0.0, m_end)
        if b_end >= a_end:
            tail = _quad(K.NF_NAIVE, pars, m_end, b_end)
        else:
            tail = _quad(K.NF_NEG, pars, m_end, a_end)
        return -(sym + tail)

    def _sdi_raw(self, h_entry, h_exit):
        if self._use_mp(max(h_entry, h_exit)):
            return float(self._mp_sdi(h_entry, h_exit))
        return self._sdi_double(h_entry, h_exit)

    def sdi(self, h_entry, h_exit):
        _check_height(self, h_entry)
        _check_height(self, h_exit)
        return self._sdi_raw(h_entry, h_exit)

    def _equal_heights(self, h):
        """(I(h,h), degenerate?) with I computed cancellation-free.

        The symmetrized integrand is single-signed (and scaled by alpha), so
        the sign of I(h,h) is exact and the integral vanishes only in the
        excluded alpha = 0 case.
        """
        if self._use_mp(h):
            value, ratio = self._mp_equal_info(h)
            return value, ratio <= 10.0 ** (-(self._mp_dps(h) - 15))
        pars = self._pars()
        y_end = h ** (1.0 / self.n)
        self._pole_guard(y_end)
        sym = _quad(K.NF_SYM, pars, 0.0, y_end)
        value = -sym
        return value, value == 0.0

    def _gap_scale(self, h):
        # leading size of h_k - h_{k+1}; used only for solver tolerances
        return (
            2.0
            * self.n
            * abs(self.alpha)
            / (2 * self.n - self.m + 2 * self.j)
            * h ** ((self.n + 2 * self.j + 1) / self.n)
        )

    def _use_mp(self, h):
        return self._gap_scale(h) < MP_GAP_RATIO * h

    def _residual_fn(self, orientation, h_fixed):
        if orientation is Orientation.ENTRY_SOLVED:
            return lambda h: self._sdi_raw(h, h_fixed)
        return lambda h: self._sdi_raw(h_fixed, h)

    # -- extended-precision path -------------------------------------------
    #
    # Within the pole guard |alpha| * x^(2j+1) < 1 the SDI has a convergent
    # series antiderivative on each half-axis:
    #     T_s(x) = int_0^x n^2 t^p / (beta + s*alpha*t^q) dt
    #            = n^2 beta * sum_i (-s*alpha*beta)^i x^(p+qi+1) / (p+qi+1)
    # and I(y, yt) = T_minus(y^(1/n)) - T_plus(yt^(1/n)).  Evaluated with
    # mpmath this resolves entry-exit gaps far below one ulp of the heights.

    def _mp_dps(self, h):
        rel = self._gap_scale(h) / h
        if rel <= 0.0:
            return 60
        return int(min(200, max(40, 30 - math.log10(rel))))

    def _mp_T(self, x, sign):
        n2 = self.n * self.n
        p = 2 * self.n - 2 - self.m
        q = 2 * self.j + 1
        alpha = mpmath.mpf(self.alpha)
        beta = mpmath.mpf(self.beta)
        r = -sign * alpha * beta * x**q
        if abs(r) >= mpmath.mpf("0.99999"):
            raise QuadratureFailure(
                "series antiderivative does not converge: pole too close"
            )
        eps = mpmath.mpf(10) ** (-(mpmath.mp.dps + 5))
        power = x ** (p + 1)
        total = mpmath.mpf(0)
        i = 0
        while True:
            term = power / (p + q * i + 1)
            total += term
            if abs(term) <= eps * abs(total):
                break
            power *= r
            i += 1
            if i > 200000:
                raise NoConvergence("series antiderivative did not converge")
        return n2 * beta * total

    def _mp_sdi(self, h_entry, h_exit):
        with mpmath.workdps(self._mp_dps(max(h_entry, h_exit))):
            inv_n = mpmath.mpf(1) / self.n
            a_end = mpmath.mpf(h_entry) ** inv_n
            b_end = mpmath.mpf(h_exit) ** inv_n
            return self._mp_T(a_end, -1) - self._mp_T(b_end, 1)

    def _mp_equal_info(self, h):
        with mpmath.workdps(self._mp_dps(h)):
            y_end = mpmath.mpf(h) ** (mpmath.mpf(1) / self.n)
            t_minus = self._mp_T(y_end, -1)
            t_plus = self._mp_T(y_end, 1)
            value = t_minus - t_plus
            scale = abs(t_minus) + abs(t_plus)
            return float(value), float(abs(value) / scale)

    def _mp_next_gap(self, h_prev, orientation):
        with mpmath.workdps(self._mp_dps(h_prev)):
            inv_n = mpmath.mpf(1) / self.n
            n2 = self.n * self.n
            p = 2 * self.n - 2 - self.m
            q = 2 * self.j + 1
            alpha = mpmath.mpf(self.alpha)
            beta = mpmath.mpf(self.beta)
            x_fix = mpmath.mpf(h_prev) ** inv_n
            tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 8))
            x = x_fix
            if orientation is Orientation.ENTRY_SOLVED:
                # solve T_minus(x) = T_plus(x_fix) for the entry endpoint
                target = self._mp_T(x_fix, 1)
                for _ in range(120):
                    resid = self._mp_T(x, -1) - target
                    deriv = n2 * x**p / (beta - alpha * x**q)
                    step = resid / deriv
                    x = x - step
                    if abs(step) <= tol * abs(x):
                        break
                else:
                    raise NoConvergence("extended-precision entry-exit solve did not converge")
                final = abs(self._mp_T(x, -1) - target)
            else:
                # solve T_plus(x) = T_minus(x_fix) for the exit endpoint
                target = self._mp_T(x_fix, -1)
                for _ in range(120):
                    resid = target - self._mp_T(x, 1)
                    deriv = -(n2 * x**p / (beta + alpha * x**q))
                    step = resid / deriv
                    x = x - step
                    if abs(step) <= tol * abs(x):
                        break
                else:
                    raise NoConvergence("extended-precision entry-exit solve did not converge")
                final = abs(target - self._mp_T(x, 1))
            h_next = x**self.n
            gap = mpmath.mpf(h_prev) - h_next
            if gap <= 0:
                raise NoConvergence("extended-precision solve produced a nonpositive gap")
            return float(gap), float(final)


@dataclass(frozen=True)
class ClassicalLienardModel:
    """x' = y - F(x), y' = -eps*x with F(x) = x^2 + a*x^(2j+3).

    ``allow_degenerate`` gates the a = 0 test hook (symmetric F, identically
    vanishing entry-exit integral); production constructions require a != 0.
    """

    j: int
    a_coeff: float
    allow_degenerate: bool = False

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("j must be a nonnegative integer")
        if self.a_coeff == 0.0 and not self.allow_degenerate:
            raise DegenerateModel(
                "a_coeff = 0 makes F symmetric and the entry-exit integral "
                "identically zero (construction-gated test hook)"
            )

    @property
    def contact_order(self):
        return 2

    @property
    def slow_flow_sign(self):
        # slow flow dx/ds = -x/F'(x) ~ -1/2 moves from the attracting
        # branch (x > 0) to the repelling branch (x < 0)
        return -1

    def _fold_cap(self, side):
        """|x| of the fold of F on the given side; inf when monotone."""
        a = self.a_coeff
        if a == 0.0:
            return math.inf
        fold_side = -1 if a > 0 else 1
        if side != fold_side:
            return math.inf
        return (2.0 / ((2 * self.j + 3) * abs(a))) ** (1.0 / (2 * self.j + 1))

    @property
    def h_max(self):
        a = self.a_coeff
        if a == 0.0:
            return math.inf
        side = -1 if a > 0 else 1
        cap = self._fold_cap(side)
        return K.lienard_F(side * cap, self.j, a)

    def _pars(self):
        return np.array([float(self.j), float(self.a_coeff)])

    def _root(self, h, side):
        x, status = K.lienard_root(h, self.j, self.a_coeff, side, self._fold_cap(side))
        if status != 0 or not math.isfinite(x):
            raise NoConvergence(f"root search for F(x) = {h:g} failed on side {side}")
        return x

    def omega_limit(self, h):
        _check_height(self, h)
        return self._root(h, 1)

    def alpha_limit(self, h):
        _check_height(self, h)
        return self._root(h, -1)

    def _gap_scale(self, h):
        return 2.0 * abs(self.a_coeff) * h ** (self.j + 1.5)

    def _use_mp(self, h):
        return self._gap_scale(h) < MP_GAP_RATIO * h

    def _sdi_from_roots(self, xa, xe):
        pars = self._pars()
        p_end = -xa
        m_end = min(p_end, xe)
        sym = _quad(K.LI_SYM, pars, 0.0, m_end)
        if xe >= p_end:
            tail = _quad(K.LI_NAIVE, pars, p_end, xe)
        else:
            tail = _quad(K.LI_NEG, pars, xe, p_end)
        return sym + tail

    def _sdi_raw(self, h_entry, h_exit):
        if self._use_mp(max(h_entry, h_exit)):
            return float(self._mp_sdi(h_entry, h_exit))
        return self._sdi_from_roots(self._root(h_entry, -1), self._root(h_exit, 1))

    def sdi(self, h_entry, h_exit):
        _check_height(self, h_entry)
        _check_height(self, h_exit)
        return self._sdi_raw(h_entry, h_exit)

    def _equal_heights(self, h):
        if self._use_mp(h):
            value, ratio = self._mp_equal_info(h)
            return value, ratio <= 10.0 ** (-(self._mp_dps(h) - 15))
        xa = self._root(h, -1)
        xe = self._root(h, 1)
        value = self._sdi_from_roots(xa, xe)
        scale = abs(_quad(K.LI_NAIVE, self._pars(), 0.0, xe)) + abs(
            _quad(K.LI_NEG, self._pars(), 0.0, -xa)
        )
        return value, abs(value) <= 1e-13 * scale

    def _residual_fn(self, orientation, h_fixed):
        if orientation is Orientation.ENTRY_SOLVED:
            xe = self._root(h_fixed, 1)
            return lambda h: self._sdi_from_roots(self._root(h, -1), xe)
        xa = self._root(h_fixed, -1)
        return lambda h: self._sdi_from_roots(xa, self._root(h, 1))

    # -- extended-precision path -------------------------------------------
    #
    # When the entry-exit gap falls below double resolution of the heights
    # (gap/h < TINY_GAP_RATIO) every double-precision formulation of the
    # residual is pure rounding noise.  F is polynomial, so the SDI has the
    # exact antiderivative
    #     A(x) = 2x^2 + 4a x^(2j+3) + (2j+3)^2 a^2 / (4j+4) * x^(4j+4)
    # and the step is solved with mpmath at enough digits to resolve the gap.

    def _mp_dps(self, h):
        rel = self._gap_scale(h) / h
        if rel <= 0.0:
            return 60
        return int(min(200, max(40, 30 - math.log10(rel))))

    def _mp_F(self, x):
        a = mpmath.mpf(self.a_coeff)
        return x * x + a * x ** (2 * self.j + 3)

    def _mp_A(self, x):
        a = mpmath.mpf(self.a_coeff)
        c = 2 * self.j + 3
        return 2 * x * x + 4 * a * x**c + mpmath.mpf(c * c) * a * a / (4 * self.j + 4) * x ** (4 * self.j + 4)

    def _mp_root(self, h, side):
        target = mpmath.mpf(h)
        x = mpmath.findroot(lambda x: self._mp_F(x) - target, side * mpmath.sqrt(target))
        return x

    def _mp_equal_info(self, h):
        with mpmath.workdps(self._mp_dps(h)):
            xa = self._mp_root(h, -1)
            xe = self._mp_root(h, 1)
            value = self._mp_A(xe) - self._mp_A(xa)
            scale = 4 * mpmath.mpf(h)
            ratio = abs(value) / scale
            return float(value), float(ratio)

    def _mp_sdi(self, h_entry, h_exit):
        with mpmath.workdps(self._mp_dps(max(h_entry, h_exit))):
            xa = self._mp_root(h_entry, -1)
            xe = self._mp_root(h_exit, 1)
            return self._mp_A(xe) - self._mp_A(xa)

    def _mp_solve_matching(self, target, x0):
        """Newton solve of A(x) = target started at x0 (derivative F'(x)^2/x)."""
        a = mpmath.mpf(self.a_coeff)
        c = 2 * self.j + 3
        x = x0
        tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 8))
        for _ in range(120):
            phi = self._mp_A(x) - target
            fp = 2 * x + c * a * x ** (c - 1)
            dphi = fp * fp / x
            step = phi / dphi
            x = x - step
            if abs(step) <= tol * abs(x):
                return x
        raise NoConvergence("extended-precision entry-exit solve did not converge")

    def _mp_next_gap(self, h_prev, orientation):
        with mpmath.workdps(self._mp_dps(h_prev)):
            if orientation is Orientation.EXIT_SOLVED:
                x_fixed = self._mp_root(h_prev, -1)
                x = self._mp_solve_matching(self._mp_A(x_fixed), -x_fixed)
            else:
                x_fixed = self._mp_root(h_prev, 1)
                x = self._mp_solve_matching(self._mp_A(x_fixed), -x_fixed)
            h_next = self._mp_F(x)
            gap = mpmath.mpf(h_prev) - h_next
            resid = abs(self._mp_A(x) - self._mp_A(x_fixed))
            if gap <= 0:
                raise NoConvergence("extended-precision solve produced a nonpositive gap")
            return float(gap), float(resid)


@dataclass(frozen=True)
class TwoStrokeModel:
    """x' = y(delta - y), y' = (-x + alpha*y)(delta - y) - eps*(beta - gamma*x)
    at the Hopf condition beta = alpha*gamma*delta.

    Contact point p = (alpha*delta, delta); section heights are measured as
    y - delta > 0.  At eps = 0 the fast orbits in {y > delta} coincide with
    trajectories of the reduced linear system u' = delta + v, v' = alpha*v - u
    in coordinates centered at p.
    """

    alpha_p: float
    delta_p: float
    gamma_p: float

    def __post_init__(self):
        if not (self.alpha_p > 0 and self.delta_p > 0 and self.gamma_p > 0):
            raise ValueError("alpha_p, delta_p, gamma_p must all be positive")

    @property
    def beta_p(self):
        return self.alpha_p * self.gamma_p * self.delta_p

    @property
    def contact_order(self):
        return 2

    @property
    def slow_flow_sign(self):
        # dx/ds = gamma*delta > 0: from the attracting branch (x < alpha*delta)
        # to the repelling branch (x > alpha*delta)
        return -1

    @property
    def contact_x(self):
        return self.alpha_p * self.delta_p

    @property
    def contact_y(self):
        return self.delta_p

    @property
    def h_max(self):
        return 0.2 * self.delta_p

    def _crossing(self, h, forward):
        vtol = 1e-15 * (self.delta_p + 1.0)
        u, status = K.twostroke_crossing(h, self.alpha_p, self.delta_p, forward, 1e-13, vtol)
        if status != 0 or not math.isfinite(u):
            side = "repelling" if forward else "attracting"
            raise NoConvergence(
                f"fast orbit through height {h:g} never reached the critical line "
                f"on the {side} side"
            )
        return u

    def omega_limit(self, h):
        _check_height(self, h)
        return self.contact_x + self._crossing(h, False)

    def alpha_limit(self, h):
        _check_height(self, h)
        return self.contact_x + self._crossing(h, True)

    def _sdi_from_offsets(self, u_entry, u_exit):
        return (u_exit * u_exit - u_entry * u_entry) / (2.0 * self.gamma_p * self.delta_p)

    def _sdi_raw(self, h_entry, h_exit):
        return self._sdi_from_offsets(self._crossing(h_entry, True), self._crossing(h_exit, False))

    def sdi(self, h_entry, h_exit):
        _check_height(self, h_entry)
        _check_height(self, h_exit)
        return self._sdi_raw(h_entry, h_exit)

    def _equal_heights(self, h):
        ua = self._crossing(h, True)
        uw = self._crossing(h, False)
        value = self._sdi_from_offsets(ua, uw)
        degenerate = abs(uw * uw - ua * ua) <= 1e-13 * (uw * uw + ua * ua)
        return value, degenerate

    def _gap_scale(self, h):
        return 4.0 * self.alpha_p / (3.0 * self.delta_p) * math.sqrt(2.0 * self.delta_p) * h**1.5

    def _residual_fn(self, orientation, h_fixed):
        if orientation is Orientation.ENTRY_SOLVED:
            uw = self._crossing(h_fixed, False)
            return lambda h: self._sdi_from_offsets(self._crossing(h, True), uw)
        ua = self._crossing(h_fixed, True)
        return lambda h: self._sdi_from_offsets(ua, self._crossing(h, False))


def omega_limit(model, h):
    return model.omega_limit(h)


def alpha_limit(model, h):
    return model.alpha_limit(h)


def sdi(model, h_entry, h_exit):
    return model.sdi(h_entry, h_exit)


def orientation(model, h_probe):
    """Decide which recursion slot generates a decreasing sequence.

    Combines the sign of I(h, h) with the slow-flow direction: the new height
    sits in the entry slot (I(h_next, h_prev) = 0) when sign(I) matches the
    repelling-to-attracting flow direction, in the exit slot otherwise.
    """
    _check_height(model, h_probe)
    value, degenerate = model._equal_heights(h_probe)
    if degenerate:
        raise DegenerateModel(
            f"slow divergence integral vanishes at equal heights h = {h_probe:g}"
        )
    if (value > 0) == (model.slow_flow_sign > 0):
        return Orientation.ENTRY_SOLVED
    return Orientation.EXIT_SOLVED
