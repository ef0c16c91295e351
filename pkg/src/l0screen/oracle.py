"""Brute-force reference solver: enumerate every support, fit each one.

Kept deliberately simple: no bounding, every support is fitted. The only
shortcut is that a support whose unconstrained least-squares fit lies in the
box and passes the first-order test needs no projected-gradient run, since
that fit is then the box-constrained minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import lsq_linear

from .model import ZERO_THRESHOLD, Instance, full_objective

MAX_ORACLE_N = 20
_BATCH = 4096


@dataclass(frozen=True)
class OracleConfig:
    max_support_size: Optional[int] = None
    ls_tolerance: float = 1e-10

    def __post_init__(self):
        if not self.ls_tolerance > 0:
            raise ValueError("ls_tolerance must be positive")


def gradient_map_norm(a_t: np.ndarray, y: np.ndarray, x_t: np.ndarray, big_m: float) -> float:
    """Largest first-order violation of the box-constrained fit on a support.

    A coordinate is stationary when its gradient vanishes or when it sits on
    the box face the negative gradient points out of.
    """
    g = a_t.T @ (a_t @ x_t - y)
    viol = np.abs(g)
    at_upper = (x_t >= big_m) & (g <= 0)
    at_lower = (x_t <= -big_m) & (g >= 0)
    viol[at_upper | at_lower] = 0.0
    return float(viol.max(initial=0.0))


def _projected_gradient(a_t, y, x_t, big_m, tol, max_iter=200000):
    lip = float(np.linalg.norm(a_t, 2)) ** 2
    if lip == 0.0:
        return np.zeros_like(x_t)
    step = 1.0 / lip
    for _ in range(max_iter):
        if gradient_map_norm(a_t, y, x_t, big_m) <= tol:
            break
        g = a_t.T @ (a_t @ x_t - y)
        x_t = np.clip(x_t - step * g, -big_m, big_m)
    return x_t


def box_ls(instance: Instance, support, ls_tolerance: float = 1e-10) -> np.ndarray:
    """Minimize ``0.5 * ||y - A_T x_T||^2`` over ``||x_T||_inf <= M``.

    Returns a length-``n`` vector that is zero off the support.
    """
    support = np.asarray(sorted(int(i) for i in support), dtype=np.intp)
    x = np.zeros(instance.n)
    if support.size == 0:
        return x
    if support.min() < 0 or support.max() >= instance.n:
        raise IndexError(f"support {support.tolist()} out of range for n={instance.n}")
    a_t = instance.a_matrix[:, support]
    y = instance.y
    big_m = instance.big_m
    x_t, *_ = np.linalg.lstsq(a_t, y, rcond=None)
    if np.max(np.abs(x_t)) > big_m or gradient_map_norm(a_t, y, x_t, big_m) > ls_tolerance:
        # bounded-variable LS gives the start; projected gradient certifies it
        start = lsq_linear(a_t, y, bounds=(-big_m, big_m), method="bvls", tol=1e-14).x
        x_t = _projected_gradient(a_t, y, np.clip(start, -big_m, big_m), big_m, ls_tolerance)
    x[support] = x_t
    return x


def iter_supports(n: int, max_size: Optional[int] = None):
    """Supports by size ascending, lexicographic within a size."""
    top = n if max_size is None else min(n, max_size)
    for size in range(top + 1):
        yield from combinations(range(n), size)


def _fit_batch(instance: Instance, supports: np.ndarray, ls_tolerance: float):
    """Objectives of a batch of equal-size supports, shape ``(C,)``, plus fits.

    Solves the normal equations for the whole batch at once. Every fit must
    lie in the box and pass the first-order test on ``A_T`` itself; the ones
    that do not (or whose Gram block is singular) are redone by :func:`box_ls`.
    """
    a = instance.a_matrix
    y = instance.y
    a_t = a[:, supports].transpose(1, 0, 2)  # (C, m, s)
    gram = np.einsum("cms,cmt->cst", a_t, a_t)
    rhs = np.einsum("cms,m->cs", a_t, y)
    redo = np.zeros(len(supports), dtype=bool)
    try:
        x_t = np.linalg.solve(gram, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        x_t = np.zeros_like(rhs)
        redo[:] = True
    r = y[None, :] - np.einsum("cms,cs->cm", a_t, x_t)
    grad = np.einsum("cms,cm->cs", a_t, r)
    redo |= ~np.all(np.isfinite(x_t), axis=1)
    redo |= np.max(np.abs(x_t), axis=1) > instance.big_m
    redo |= np.max(np.abs(grad), axis=1) > ls_tolerance
    values = 0.5 * np.einsum("cm,cm->c", r, r) + instance.lam * np.count_nonzero(
        np.abs(x_t) > ZERO_THRESHOLD, axis=1
    )
    for c in np.flatnonzero(redo):
        x = box_ls(instance, supports[c], ls_tolerance)
        x_t[c] = x[supports[c]]
        values[c] = full_objective(instance, x)
    return values, x_t


def exhaustive_solve(instance: Instance, config: Optional[OracleConfig] = None):
    """Global minimizer ``(x, objective)`` by enumerating all supports.

    Supports of one size are fitted together; ties keep the first support in
    enumeration order.
    """
    config = config or OracleConfig()
    n = instance.n
    if n > MAX_ORACLE_N:
        raise ValueError(f"n={n} exceeds the enumeration limit {MAX_ORACLE_N}")
    best_x = np.zeros(n)
    best = full_objective(instance, best_x)
    top = n if config.max_support_size is None else min(n, config.max_support_size)
    for size in range(1, top + 1):
        supports = np.array(list(combinations(range(n), size)), dtype=np.intp)
        for lo in range(0, len(supports), _BATCH):
            chunk = supports[lo : lo + _BATCH]
            values, fits = _fit_batch(instance, chunk, config.ls_tolerance)
            c = int(np.argmin(values))
            if values[c] < best:
                best = float(values[c])
                best_x = np.zeros(n)
                best_x[chunk[c]] = fits[c]
    return best_x, full_objective(instance, best_x)
