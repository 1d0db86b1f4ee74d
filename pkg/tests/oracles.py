"""Independent reference computations used by the tests.

All oracles work on the continuous 1D problem in the transformed variable
``-v'' = lam*g(v) + (1 + v)*h`` on ``(0, 1)`` with ``mu = 1`` and constant
``h``.  They rely only on numpy/scipy, not on the package under test.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq, minimize_scalar


def g_ref(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = s > -1.0
    out[m] = (1.0 + s[m]) * np.log1p(s[m])
    return out


def G_quad(s: float) -> float:
    """Numerical antiderivative of ``g`` (``mu = 1``) from 0 to ``s``."""
    val, _ = quad(lambda t: float(g_ref(t)), 0.0, s, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def _rhs(lam, h):
    def f(x, y):
        v, dv = y
        return [dv, -(lam * float(g_ref(v)) + (1.0 + v) * h)]

    return f


def _shoot(lam, h, slope, x_end=1.0, dense=False):
    return solve_ivp(
        _rhs(lam, h), (0.0, x_end), [0.0, slope], method="DOP853", rtol=1e-12, atol=1e-14, dense_output=dense
    )


def shooting_solution(lam: float, h: float, slope_lo: float, slope_hi: float):
    """Solution of the Dirichlet problem whose initial slope lies in the bracket.

    The bracket must enclose a sign change of ``v(1; slope)``; the root is
    refined by bisection (Brent) and a dense interpolant of ``v`` returned.
    """
    end = lambda s: _shoot(lam, h, s).y[0, -1]  # noqa: E731
    s = brentq(end, slope_lo, slope_hi, xtol=1e-14, rtol=1e-14, maxiter=400)
    sol = _shoot(lam, h, s, dense=True)
    return lambda x: sol.sol(np.asarray(x, dtype=float))[0]


def scan_slopes(lam: float, h: float, slopes) -> list[tuple[float, float]]:
    """Consecutive slope pairs where ``v(1; slope)`` changes sign."""
    vals = [_shoot(lam, h, s).y[0, -1] for s in slopes]
    return [(a, b) for a, b, fa, fb in zip(slopes, slopes[1:], vals, vals[1:]) if fa * fb < 0]


def _lam_for_peak(a: float, h: float, lam_hi: float = 40.0) -> float:
    """``lam`` for which the symmetric solution with ``v(1/2) = a`` vanishes at ``x = 1``."""

    def end(lam):
        sol = solve_ivp(_rhs(lam, h), (0.5, 1.0), [a, 0.0], method="DOP853", rtol=1e-12, atol=1e-14)
        return sol.y[0, -1]

    return brentq(end, 0.0, lam_hi, xtol=1e-13)


def lambda_bar_continuous(h: float, a_lo: float, a_hi: float) -> float:
    """Fold value: maximum of ``lam(a)`` along the positive branch."""
    res = minimize_scalar(lambda a: -_lam_for_peak(a, h), bounds=(a_lo, a_hi), method="bounded",
                          options={"xatol": 1e-10})
    return -res.fun
