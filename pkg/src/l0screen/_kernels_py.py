"""Pure numpy implementation of the relaxation inner loop.

Mirrors ``_kernels.pyx`` operation for operation; used when the compiled
extension is unavailable or disabled.
"""

import numpy as np

CONVERGED = 0
ITERATION_LIMIT = 1
SCREEN_HIT = 2


def fista_steps(a, y, x, z, t, weights, big_m, step, n_steps):
    """Run ``n_steps`` accelerated proximal-gradient iterations in place.

    Parameters
    ----------
    a : (m, p) C-contiguous float64 array
        Columns of the dictionary that are not forced to zero.
    y : (m,) float64 array
    x : (p,) float64 array
        Current iterate, overwritten with the last iterate.
    z : (p,) float64 array
        Extrapolation point, overwritten.
    t : float
        Momentum counter carried between calls.
    weights : (p,) float64 array
        Per-coordinate l1 weight (``lam/M`` for undecided, 0 for forced-nonzero).
    big_m : float
        Box radius.
    step : float
        Step size, at most ``1/L``.

    Returns
    -------
    float
        Updated momentum counter. It is reset to 1 whenever the gradient
        restart test fires.
    """
    thresh = step * weights
    for _ in range(n_steps):
        r = y - a @ z
        v = z + step * (a.T @ r)
        x_new = np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)
        np.clip(x_new, -big_m, big_m, out=x_new)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        diff = x_new - x
        if float((z - x_new) @ diff) > 0.0:
            t_new = 1.0
            z[:] = x_new
        else:
            z[:] = x_new + ((t - 1.0) / t_new) * diff
        x[:] = x_new
        t = t_new
    return t


def evaluate(a, y, x, is_bar, lam, big_m, y_sqnorm, n_one, u, corr):
    """Fill ``u = y - a x`` and ``corr = a.T u``; return ``(primal, dual)``."""
    ratio = lam / big_m
    u[:] = y - a @ x
    corr[:] = a.T @ u
    ax = y - u
    bar = is_bar.astype(bool)
    z = np.abs(corr) - ratio
    primal = 0.5 * float(u @ u) + ratio * float(np.abs(x[bar]).sum()) + lam * n_one
    dual = (
        0.5 * y_sqnorm
        - 0.5 * float(ax @ ax)
        - float((big_m * np.maximum(z[bar], 0.0)).sum())
        - float((big_m * z[~bar]).sum())
    )
    return primal, dual


def relax_loop(a, y, x, z, t, is_bar, lam, big_m, step, y_sqnorm, n_one,
               gap_tol, it0, it_max, period, screen_limit, u, corr):
    """Iterate until the gap closes, a screening test passes, or ``it_max``.

    The primal/dual pair is evaluated before the first step and then every
    ``period`` steps. A screening test passes for an undecided index when
    ``dual + M * ||a_l^T u| - lam/M| > screen_limit`` (only checked after
    at least one step overall, i.e. ``it > 0``).

    Returns ``(status, it, t, primal, dual)`` with ``u``/``corr`` holding the
    last evaluation.
    """
    weights = np.where(is_bar.astype(bool), lam / big_m, 0.0)
    bar = is_bar.astype(bool)
    it = it0
    while True:
        primal, dual = evaluate(a, y, x, is_bar, lam, big_m, y_sqnorm, n_one, u, corr)
        if primal - dual <= gap_tol:
            return CONVERGED, it, t, primal, dual
        if it > 0 and screen_limit < np.inf and bar.any():
            worst = big_m * np.abs(np.abs(corr[bar]) - lam / big_m)
            if dual + float(worst.max()) > screen_limit:
                return SCREEN_HIT, it, t, primal, dual
        if it >= it_max:
            return ITERATION_LIMIT, it, t, primal, dual
        n_steps = min(period, it_max - it)
        t = fista_steps(a, y, x, z, t, weights, big_m, step, n_steps)
        it += n_steps
