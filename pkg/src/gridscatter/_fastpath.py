"""Compiled integration kernels for the built-in system family.

Optional: everything here mirrors the generic pure-Python steppers
bit-for-bit (same operation order, same mod-2*pi reduction) and only exists
because the reference-grade runs take ~1.4e7 RK4 steps.  When numba is not
installed the package silently falls back to the Python paths.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

TWO_PI = 2.0 * math.pi

__all__ = ["HAVE_NUMBA", "available", "run_euler", "run_rk4", "run_paver"]


def available() -> bool:
    return HAVE_NUMBA


def records_for(n_steps: int, stride: int) -> int:
    """Number of recorded rows: every stride-th step plus the final one."""
    return n_steps // stride + 1 + (1 if n_steps % stride else 0)


if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _f2(pw, mode, ms, amps):
        if mode == 1:
            c = math.cos(pw)
            return (4.0 * c - 2.0) / (5.0 - 4.0 * c)
        s = 0.0
        for j in range(ms.size):
            s += amps[j] * math.cos(ms[j] * pw)
        return s

    @njit(cache=True)
    def _euler(eps, kappa, n_steps, stride, t0, x1, x2, p, mode, ms, amps, out):
        r = 0
        out[r, 0] = t0
        out[r, 1] = x1
        out[r, 2] = x2
        out[r, 3] = p
        r += 1
        for k in range(n_steps):
            pw = p % TWO_PI
            x2 = x2 + kappa * _f2(pw, mode, ms, amps)
            pn = p + kappa * (x1 / eps)
            x1 = x1 + kappa * 1.0
            p = pn
            if not (math.isfinite(x2) and math.isfinite(p)):
                return -(k + 1)
            kk = k + 1
            if kk % stride == 0 or kk == n_steps:
                out[r, 0] = t0 + kk * kappa
                out[r, 1] = x1
                out[r, 2] = x2
                out[r, 3] = p
                r += 1
        return r

    @njit(cache=True, inline="always")
    def _deriv(x1, p, eps, mode, ms, amps):
        return 1.0, _f2(p % TWO_PI, mode, ms, amps), x1 / eps

    @njit(cache=True)
    def _rk4(eps, kappa, n_steps, stride, t0, x1, x2, p, mode, ms, amps, out):
        r = 0
        out[r, 0] = t0
        out[r, 1] = x1
        out[r, 2] = x2
        out[r, 3] = p
        r += 1
        for k in range(n_steps):
            a1, b1, c1 = _deriv(x1, p, eps, mode, ms, amps)
            a2, b2, c2 = _deriv(x1 + 0.5 * kappa * a1, p + 0.5 * kappa * c1, eps, mode, ms, amps)
            a3, b3, c3 = _deriv(x1 + 0.5 * kappa * a2, p + 0.5 * kappa * c2, eps, mode, ms, amps)
            a4, b4, c4 = _deriv(x1 + kappa * a3, p + kappa * c3, eps, mode, ms, amps)
            x1 = x1 + (kappa / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            x2 = x2 + (kappa / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            p = p + (kappa / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            if not (math.isfinite(x2) and math.isfinite(p)):
                return -(k + 1)
            kk = k + 1
            if kk % stride == 0 or kk == n_steps:
                out[r, 0] = t0 + kk * kappa
                out[r, 1] = x1
                out[r, 2] = x2
                out[r, 3] = p
                r += 1
        return r

    @njit(cache=True, inline="always")
    def _paver_f2(t, p, n1f, w, qs, qamps):
        s = 0.0
        for j in range(qs.size):
            s += qamps[j] * math.cos(qs[j] * (n1f * p + w * t))
        return s

    @njit(cache=True)
    def _paver(eps, kappa, n_steps, stride, t0, x1, x2, p, n1f, w, qs, qamps, out):
        # Resonant field: I2' = sum_q a_{q n1} cos(q (n1 phi + n2 Omega t)),
        # I1' = 1, phi' = I1/eps; w = n2*Omega.  RK4 stages carry explicit t.
        r = 0
        out[r, 0] = t0
        out[r, 1] = x1
        out[r, 2] = x2
        out[r, 3] = p
        r += 1
        for k in range(n_steps):
            t = t0 + k * kappa
            th = t + 0.5 * kappa
            tf = t + kappa
            b1 = _paver_f2(t, p, n1f, w, qs, qamps)
            c1 = x1 / eps
            b2 = _paver_f2(th, p + 0.5 * kappa * c1, n1f, w, qs, qamps)
            c2 = (x1 + 0.5 * kappa) / eps
            b3 = _paver_f2(th, p + 0.5 * kappa * c2, n1f, w, qs, qamps)
            c3 = (x1 + 0.5 * kappa) / eps
            b4 = _paver_f2(tf, p + kappa * c3, n1f, w, qs, qamps)
            c4 = (x1 + kappa) / eps
            x2 = x2 + (kappa / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            p = p + (kappa / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            x1 = x1 + kappa
            if not (math.isfinite(x2) and math.isfinite(p)):
                return -(k + 1)
            kk = k + 1
            if kk % stride == 0 or kk == n_steps:
                out[r, 0] = t0 + kk * kappa
                out[r, 1] = x1
                out[r, 2] = x2
                out[r, 3] = p
                r += 1
        return r


def _dispatch(kernel, eps, kappa, n_steps, stride, t0, state, args):
    x1, x2, p = state
    out = np.empty((records_for(n_steps, stride), 4))
    r = kernel(eps, kappa, n_steps, stride, t0, x1, x2, p, *args, out)
    if r < 0:
        return -r, out  # diverged at step -r
    return 0, out


def run_euler(eps, kappa, n_steps, stride, t0, state, mode, ms, amps):
    """Returns (diverged_step or 0, rows); rows are (t, I1, I2, phi)."""
    return _dispatch(_euler, eps, kappa, n_steps, stride, t0, state, (mode, ms, amps))


def run_rk4(eps, kappa, n_steps, stride, t0, state, mode, ms, amps):
    return _dispatch(_rk4, eps, kappa, n_steps, stride, t0, state, (mode, ms, amps))


def run_paver(eps, kappa, n_steps, stride, t0, state, n1, w, qs, qamps):
    return _dispatch(_paver, eps, kappa, n_steps, stride, t0, state, (float(n1), w, qs, qamps))
