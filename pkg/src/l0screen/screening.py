"""Node-screening tests.

For an undecided index ``l`` at node ``nu`` and any dual vector ``u``, the
relaxation bounds of the two children are ``D(u) + pivot0_l(u)`` (for
``x_l = 0``) and ``D(u) + pivot1_l(u)`` (for ``x_l != 0``). A child whose
bound exceeds the incumbent value cannot hold a better point, so ``l`` may be
fixed to the other branch. Bounds only grow down the tree, which lets every
fixing found at ``nu`` be applied together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Instance, Node, pivots_from_correlations
from .relaxation import dual_from_correlations

#: a test passes only when the child bound exceeds the incumbent by this much
SCREENING_SLACK = 1e-12


@dataclass(frozen=True)
class ScreeningResult:
    fix_to_zero: frozenset[int] = field(default_factory=frozenset)
    fix_to_one: frozenset[int] = field(default_factory=frozenset)
    prune_node: bool = False

    def __bool__(self):
        return self.prune_node or bool(self.fix_to_zero) or bool(self.fix_to_one)

    @property
    def n_fixed(self) -> int:
        return len(self.fix_to_zero) + len(self.fix_to_one)


def screen_from_correlations(
    instance: Instance,
    node: Node,
    corr_bar: np.ndarray,
    base: float,
    upper_bound: float,
) -> ScreeningResult:
    """Run both tests on every undecided index.

    ``corr_bar`` holds ``a_l^T u`` for ``node.bar_idx`` (same order) and
    ``base`` the node's dual value at ``u``.
    """
    if not np.isfinite(upper_bound) or node.bar_idx.size == 0:
        return ScreeningResult()
    _, at_zero, at_one = pivots_from_correlations(corr_bar, instance.lam, instance.big_m)
    limit = upper_bound + SCREENING_SLACK
    # the x_l = 0 child is hopeless: l must be nonzero
    zero_child_out = base + at_zero > limit
    one_child_out = base + at_one > limit
    both = zero_child_out & one_child_out
    bar = node.bar_idx
    return ScreeningResult(
        fix_to_zero=frozenset(bar[one_child_out].tolist()),
        fix_to_one=frozenset(bar[zero_child_out].tolist()),
        prune_node=bool(both.any()),
    )


def node_screen(instance: Instance, node: Node, u, upper_bound: float) -> ScreeningResult:
    """Screening tests at ``node`` with dual vector ``u`` against ``upper_bound``."""
    u = np.asarray(u, dtype=np.float64)
    corr = instance.correlations(u)
    base = dual_from_correlations(instance, node, u, corr[node.bar_idx], corr[node.one_idx])
    return screen_from_correlations(instance, node, corr[node.bar_idx], base, upper_bound)


def apply_screening(node: Node, result: ScreeningResult) -> Node:
    """Sub-node with every fixing of ``result`` applied in one move."""
    if result.prune_node:
        raise ValueError("screening pruned the node; discard it instead of applying fixes")
    if not result:
        return node
    return node.fix(to_zero=result.fix_to_zero, to_one=result.fix_to_one)


class ScreeningMonitor:
    """Relaxation callback running the tests against a fixed incumbent value.

    ``solve_relaxation`` reads ``upper_bound`` to pre-screen inside its
    kernel, so the Python call only happens when some test passes.
    """

    def __init__(self, instance: Instance, upper_bound: float):
        self.instance = instance
        self.upper_bound = float(upper_bound)

    def __call__(self, node, x, u, corr_free, dual):
        corr_bar = corr_free[node.status[node.free_idx] == 2]
        result = screen_from_correlations(self.instance, node, corr_bar, dual, self.upper_bound)
        return result if result else None
