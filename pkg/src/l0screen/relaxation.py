"""Convex relaxation of a node and its dual.

At node ``(S0, S1, S_bar)`` the l0 term on undecided entries is replaced by
``(lam/M) * |x_i|``; forced-nonzero entries pay ``lam`` each and carry no l1
term. The relaxation is a box-constrained LASSO solved here by accelerated
proximal gradient, with the residual ``u = y - A x`` as dual candidate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .model import BOX_TOLERANCE, Instance, Node, check_box, pivots_from_correlations


@dataclass(frozen=True)
class RelaxationConfig:
    gap_tolerance: float = 1e-8
    max_iterations: int = 20000
    screening_check_period: int = 5

    def __post_init__(self):
        if not self.gap_tolerance > 0:
            raise ValueError("gap_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.screening_check_period < 1:
            raise ValueError("screening_check_period must be >= 1")


@dataclass
class RelaxationResult:
    """Primal/dual pair returned by :func:`solve_relaxation`.

    ``dual_value`` is a certified lower bound on the relaxation optimum (and
    hence on every feasible point of the node) whether or not the solver
    converged. ``interrupted`` holds whatever the screening callback returned
    when it stopped the solve early.
    """

    x: np.ndarray
    u: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    converged: bool
    iterations: int = 0
    interrupted: object = None
    timed_out: bool = False


def _check_node_feasible(instance: Instance, node: Node, x: np.ndarray) -> None:
    if x.shape != (instance.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({instance.n},)")
    check_box(instance, x)
    if node.zero_idx.size:
        worst = float(np.max(np.abs(x[node.zero_idx])))
        if worst > BOX_TOLERANCE:
            raise ValueError(f"x is nonzero on S0 (max |x_i| = {worst:.3e})")


def relaxed_primal(instance: Instance, node: Node, x) -> float:
    """Relaxation objective at a node-feasible ``x``."""
    x = np.asarray(x, dtype=np.float64)
    _check_node_feasible(instance, node, x)
    r = instance.residual(x)
    l1 = float(np.abs(x[node.bar_idx]).sum())
    return 0.5 * float(r @ r) + instance.ratio * l1 + instance.lam * len(node.s_one)


def dual_from_correlations(instance: Instance, node: Node, u, corr_bar, corr_one) -> float:
    ymu = instance.y - u
    _, at_zero, _ = pivots_from_correlations(corr_bar, instance.lam, instance.big_m)
    raw_one, _, _ = pivots_from_correlations(corr_one, instance.lam, instance.big_m)
    return (
        0.5 * instance.y_sqnorm
        - 0.5 * float(ymu @ ymu)
        - float(at_zero.sum())
        - float(raw_one.sum())
    )


def dual_objective(instance: Instance, node: Node, u) -> float:
    """Dual function of the node relaxation; a lower bound for any ``u``."""
    u = np.asarray(u, dtype=np.float64)
    corr = instance.correlations(u)
    return dual_from_correlations(instance, node, u, corr[node.bar_idx], corr[node.one_idx])


def penalty_conjugate(v, ratio: float, big_m: float, l1_mask) -> float:
    """Fenchel conjugate of ``ratio * ||x_S||_1`` restricted to the box.

    ``l1_mask`` marks the coordinates in ``S``; the others are only boxed, so
    their contribution is ``M * |v_i|``.
    """
    v = np.asarray(v, dtype=np.float64)
    mask = np.asarray(l1_mask, dtype=bool)
    if mask.shape != v.shape:
        raise ValueError("l1_mask and v must have the same shape")
    av = np.abs(v)
    return float(big_m * (np.maximum(av[mask] - ratio, 0.0).sum() + av[~mask].sum()))


def dual_from_primal(instance: Instance, x) -> np.ndarray:
    """Dual candidate ``y - A x`` attached to a primal iterate."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (instance.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({instance.n},)")
    return instance.residual(x)


ScreeningCallback = Callable[[Node, np.ndarray, np.ndarray, np.ndarray, float], object]

#: iterations run inside the kernel between deadline checks
_CHUNK = 2000


def solve_relaxation(
    instance: Instance,
    node: Node,
    warm_start: Optional[np.ndarray] = None,
    config: Optional[RelaxationConfig] = None,
    screening_callback: Optional[ScreeningCallback] = None,
    deadline: Optional[float] = None,
    backend=None,
) -> RelaxationResult:
    """Solve the node relaxation to an absolute duality gap.

    Every ``config.screening_check_period`` iterations the current pair is
    evaluated. If ``screening_callback`` is given it is called as
    ``callback(node, x, u, corr_free, dual_value)`` where ``corr_free`` holds
    ``a_i^T u`` for ``node.free_idx``; a truthy return value stops the solve
    and is stored in ``RelaxationResult.interrupted``. A callback exposing a
    numeric ``upper_bound`` attribute is taken to run the node-screening
    tests against that bound; the kernel then pre-checks the tests itself and
    only calls back when one passes.

    ``deadline`` is a ``time.perf_counter()`` value past which the solve
    returns its current (valid) dual bound with ``timed_out`` set.
    ``backend`` overrides the kernel module picked at import.
    """
    config = config or RelaxationConfig()
    impl = backend or kernels
    n = instance.n
    free = node.free_idx
    a_free = np.ascontiguousarray(instance.a_matrix[:, free])
    y = np.ascontiguousarray(instance.y)
    is_bar = np.ascontiguousarray(node.status[free] == 2, dtype=np.uint8)
    n_one = len(node.s_one)

    x_free = np.zeros(free.size)
    if warm_start is not None:
        ws = np.asarray(warm_start, dtype=np.float64)
        if ws.shape != (n,):
            raise ValueError(f"warm_start has shape {ws.shape}, expected ({n},)")
        x_free = np.clip(ws[free], -instance.big_m, instance.big_m)
    z_free = x_free.copy()
    u = np.empty(instance.m)
    corr = np.empty(free.size)
    lip = instance.lipschitz
    step = 1.0 / lip if lip > 0 else 0.0

    bound = getattr(screening_callback, "upper_bound", None)
    fast_screen = screening_callback is not None and bound is not None
    if fast_screen:
        from .screening import SCREENING_SLACK

        limit = float(bound) + SCREENING_SLACK
    else:
        limit = np.inf
    period = config.screening_check_period
    if screening_callback is not None and not fast_screen:
        chunk = period
    else:
        chunk = max(period, _CHUNK - _CHUNK % period)

    t = 1.0
    it = 0
    interrupted = None
    timed_out = False
    while True:
        it_max = min(config.max_iterations, it + chunk)
        status, it, t, primal, dual = impl.relax_loop(
            a_free, y, x_free, z_free, t, is_bar, instance.lam, instance.big_m, step,
            instance.y_sqnorm, n_one, config.gap_tolerance, it, it_max, period, limit, u, corr,
        )
        if status == kernels.CONVERGED:
            break
        if screening_callback is not None and (status == kernels.SCREEN_HIT or not fast_screen) and it > 0:
            interrupted = screening_callback(node, _scatter(x_free, free, n), u.copy(), corr.copy(), dual)
            if interrupted:
                break
            if status == kernels.SCREEN_HIT:
                # the callback disagreed with the kernel pre-check; stop asking
                limit = np.inf
        if it >= config.max_iterations:
            break
        if deadline is not None and time.perf_counter() > deadline:
            timed_out = True
            break
    gap = primal - dual
    return RelaxationResult(
        x=_scatter(x_free, free, n),
        u=u,
        primal_value=primal,
        dual_value=dual,
        gap=gap,
        converged=gap <= config.gap_tolerance,
        iterations=it,
        interrupted=interrupted or None,
        timed_out=timed_out,
    )


def _scatter(x_free: np.ndarray, free: np.ndarray, n: int) -> np.ndarray:
    x = np.zeros(n)
    x[free] = x_free
    return x
