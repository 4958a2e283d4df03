"""Hot numeric kernels: adaptive Simpson quadrature, bracketed root finding and
reduced-orbit crossing detection.

Every kernel is compiled with numba's ``@njit`` when available.  Setting the
environment variable ``SLOWFAST_NO_NUMBA=1`` (or running without numba
installed) selects the pure-Python/numpy fallback path, which executes the
identical code uncompiled.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get("SLOWFAST_NO_NUMBA", "").strip().lower() not in (
    "1",
    "true",
    "yes",
)

if NUMBA_ENABLED:

    def _jit(func):
        return numba.njit(cache=True, nogil=True)(func)

else:

    def _jit(func):
        return func


# Integrand selectors for the shared adaptive-Simpson driver.
NF_NAIVE = 0  # n^2 x^p / (beta + alpha x^q), p = 2n-2-m, q = 2j+1
NF_SYM = 1  # f(x) + f(-x) = -2 alpha n^2 x^(p+q) / (beta^2 - alpha^2 x^(2q))
NF_NEG = 2  # f(-x) = -n^2 x^p / (beta - alpha x^q)
LI_NAIVE = 3  # F'(x)^2 / x with F = x^2 + a x^(2j+3)
LI_SYM = 4  # g(x) + g(-x) = 8 (2j+3) a x^(2j+2)
LI_NEG = 5  # g(-x) = -F'(-x)^2 / x

_MAX_DEPTH = 48
_STACK = 64
_MAX_EVALS = 4_000_000


@_jit
def _integrand(which, x, pars):
    if which <= 2:
        n2 = pars[0]
        p = int(pars[1])
        q = int(pars[2])
        alpha = pars[3]
        beta = pars[4]
        if which == 0:
            return n2 * x**p / (beta + alpha * x**q)
        if which == 1:
            xq = x**q
            return -2.0 * alpha * n2 * x**p * xq / (beta * beta - alpha * alpha * xq * xq)
        return -n2 * x**p / (beta - alpha * x**q)
    jj = int(pars[0])
    a = pars[1]
    c = 2 * jj + 3
    if which == 4:
        return 8.0 * c * a * x ** (2 * jj + 2)
    if x == 0.0:
        return 0.0
    if which == 3:
        fp = 2.0 * x + c * a * x ** (2 * jj + 2)
        return fp * fp / x
    fp = -2.0 * x + c * a * x ** (2 * jj + 2)
    return -(fp * fp) / x


@_jit
def adaptive_simpson(which, pars, a, b, abs_tol, rel_tol):
    """Adaptive Simpson integral of the selected integrand over [a, b].

    Returns (value, status); status 0 = converged, 1 = tolerance not reached.
    """
    if a == b:
        return 0.0, 0
    fa = _integrand(which, a, pars)
    mid = 0.5 * (a + b)
    fm = _integrand(which, mid, pars)
    fb = _integrand(which, b, pars)
    if not (np.isfinite(fa) and np.isfinite(fm) and np.isfinite(fb)):
        return np.nan, 1
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    tol = abs_tol
    if rel_tol * abs(whole) > tol:
        tol = rel_tol * abs(whole)
    # frame: a, mid, b, fa, fm, fb, simpson(a,b), tol, depth
    st = np.empty((_STACK, 9))
    st[0, 0] = a
    st[0, 1] = mid
    st[0, 2] = b
    st[0, 3] = fa
    st[0, 4] = fm
    st[0, 5] = fb
    st[0, 6] = whole
    st[0, 7] = tol
    st[0, 8] = 0.0
    top = 0
    total = 0.0
    neval = 3
    status = 0
    while top >= 0:
        a0 = st[top, 0]
        m0 = st[top, 1]
        b0 = st[top, 2]
        fa0 = st[top, 3]
        fm0 = st[top, 4]
        fb0 = st[top, 5]
        s0 = st[top, 6]
        t0 = st[top, 7]
        d0 = st[top, 8]
        top -= 1
        lm = 0.5 * (a0 + m0)
        rm = 0.5 * (m0 + b0)
        flm = _integrand(which, lm, pars)
        frm = _integrand(which, rm, pars)
        neval += 2
        if not (np.isfinite(flm) and np.isfinite(frm)):
            return np.nan, 1
        if neval > _MAX_EVALS:
            return total, 1
        sl = (m0 - a0) * (fa0 + 4.0 * flm + fm0) / 6.0
        sr = (b0 - m0) * (fm0 + 4.0 * frm + fb0) / 6.0
        d = sl + sr - s0
        # second branch: Richardson difference is at rounding scale, no
        # further subdivision can help
        if abs(d) <= 15.0 * t0 or abs(d) <= 1.2e-14 * (abs(sl) + abs(sr) + abs(s0)):
            total += sl + sr + d / 15.0
        elif d0 >= _MAX_DEPTH or top + 2 >= _STACK:
            total += sl + sr + d / 15.0
            status = 1
        else:
            half = 0.5 * t0
            top += 1
            st[top, 0] = a0
            st[top, 1] = lm
            st[top, 2] = m0
            st[top, 3] = fa0
            st[top, 4] = flm
            st[top, 5] = fm0
            st[top, 6] = sl
            st[top, 7] = half
            st[top, 8] = d0 + 1.0
            top += 1
            st[top, 0] = m0
            st[top, 1] = rm
            st[top, 2] = b0
            st[top, 3] = fm0
            st[top, 4] = frm
            st[top, 5] = fb0
            st[top, 6] = sr
            st[top, 7] = half
            st[top, 8] = d0 + 1.0
    return total, status


@_jit
def lienard_F(x, j, a):
    return x * x + a * x ** (2 * j + 3)


@_jit
def lienard_root(h, j, a, side, cap):
    """Root of F(x) = h with sign(x) = side and smallest |x|.

    cap is the |x| of the fold on that side (np.inf when the branch is
    monotone).  Bracket grows geometrically from 0; Brent refines to relative
    tolerance 1e-14 within 200 iterations.  Returns (x, status).
    """
    if h <= 0.0:
        return np.nan, 2
    t = np.sqrt(h)
    if t > cap:
        t = cap
    val = -1.0
    for _ in range(300):
        x = side * t
        val = lienard_F(x, j, a) - h
        if val >= 0.0:
            break
        t_next = t * 1.6
        if t_next >= cap:
            t = cap
            x = side * t
            val = lienard_F(x, j, a) - h
            break
        t = t_next
    if val < 0.0:
        return np.nan, 2
    # Brent on [0, side*t]; F(0) - h = -h < 0
    xa = 0.0
    fa = -h
    xb = side * t
    fb = val
    if fb == 0.0:
        return xb, 0
    xc = xa
    fc = fa
    e = xb - xa
    d = e
    eps = 2.220446049250313e-16
    for _ in range(200):
        if abs(fc) < abs(fb):
            xa = xb
            xb = xc
            xc = xa
            fa = fb
            fb = fc
            fc = fa
        tol = 2.0 * eps * abs(xb) + 1e-14 * abs(xb) + 1e-300
        m = 0.5 * (xc - xb)
        if abs(m) <= tol or fb == 0.0:
            return xb, 0
        if abs(e) < tol or abs(fa) <= abs(fb):
            e = m
            d = e
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
            if p > 0.0:
                q = -q
            else:
                p = -p
            s = e
            e = d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                e = m
                d = e
        xa = xb
        fa = fb
        if abs(d) > tol:
            xb = xb + d
        elif m > 0.0:
            xb = xb + tol
        else:
            xb = xb - tol
        fb = lienard_F(xb, j, a) - h
        if (fb > 0.0) == (fc > 0.0):
            xc = xa
            fc = fa
            e = xb - xa
            d = e
    return xb, 0


@_jit
def _ts_rk4(u, v, al, de, sg, dt):
    k1u = sg * (de + v)
    k1v = sg * (al * v - u)
    u1 = u + 0.5 * dt * k1u
    v1 = v + 0.5 * dt * k1v
    k2u = sg * (de + v1)
    k2v = sg * (al * v1 - u1)
    u2 = u + 0.5 * dt * k2u
    v2 = v + 0.5 * dt * k2v
    k3u = sg * (de + v2)
    k3v = sg * (al * v2 - u2)
    u3 = u + dt * k3u
    v3 = v + dt * k3v
    k4u = sg * (de + v3)
    k4v = sg * (al * v3 - u3)
    return (
        u + dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0,
        v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0,
    )


@_jit
def _ts_rk4_n(u, v, al, de, sg, tau, nsub):
    dt = tau / nsub
    for _ in range(nsub):
        u, v = _ts_rk4(u, v, al, de, sg, dt)
    return u, v


@_jit
def twostroke_crossing(h, al, de, forward, loc_tol, vtol):
    """Crossing offset u = x - alpha*delta where the reduced orbit through
    (u, v) = (0, h) meets the critical line v = 0.

    The reduced system is u' = delta + v, v' = alpha*v - u; forward reduced
    time yields the repelling-side crossing (u > 0), backward the attracting
    side (u < 0).  Adaptive step-doubling RK4 with sign-change detection and
    secant refinement of the crossing time.  Returns (u, status).
    """
    if h <= 0.0:
        return np.nan, 2
    sg = 1.0 if forward else -1.0
    u = 0.0
    v = h
    tscale = np.sqrt(2.0 * h / de) + 1e-6
    dt = 0.02 * tscale
    tmax = 500.0 * tscale + 50.0
    span = de + h
    t = 0.0
    nstep = 0
    while t < tmax:
        nstep += 1
        if nstep > 2_000_000:
            return np.nan, 2
        err = 0.0
        u2 = u
        v2 = v
        for _ in range(80):
            u1, v1 = _ts_rk4(u, v, al, de, sg, dt)
            uh, vh = _ts_rk4(u, v, al, de, sg, 0.5 * dt)
            u2, v2 = _ts_rk4(uh, vh, al, de, sg, 0.5 * dt)
            du = abs(u1 - u2)
            dv = abs(v1 - v2)
            err = (du if du > dv else dv) / 15.0
            sc = loc_tol * (abs(u2) + abs(v2) + span)
            if err <= sc or dt <= 1e-13 * tscale:
                break
            fac = 0.9 * (sc / (err + 1e-300)) ** 0.2
            if fac < 0.2:
                fac = 0.2
            dt *= fac
        if v2 <= 0.0:
            lo = 0.0
            flo = v
            hi = dt
            fhi = v2
            ur = u2
            for _ in range(160):
                if abs(fhi) <= vtol:
                    return ur, 0
                if hi - lo <= 1e-16 * dt:
                    break
                if fhi != flo:
                    tau = hi - fhi * (hi - lo) / (fhi - flo)
                else:
                    tau = 0.5 * (lo + hi)
                if not (lo < tau < hi):
                    tau = 0.5 * (lo + hi)
                un, vn = _ts_rk4_n(u, v, al, de, sg, tau, 4)
                if vn > 0.0:
                    lo = tau
                    flo = vn
                else:
                    hi = tau
                    fhi = vn
                    ur = un
            return ur, 0
        u = u2
        v = v2
        t += dt
        if abs(u) > 1e7 * span or abs(v) > 1e7 * span:
            return np.nan, 2
        sc = loc_tol * (abs(u) + abs(v) + span)
        if err < 0.1 * sc:
            dt *= 1.6
    return np.nan, 2
