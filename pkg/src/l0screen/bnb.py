"""Branch-and-bound engine with optional node screening."""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.optimize import lsq_linear

from .model import Instance, Node, child_one, child_zero, full_objective
from .relaxation import RelaxationConfig, RelaxationResult, solve_relaxation
from .screening import ScreeningMonitor, ScreeningResult, apply_screening, node_screen

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    exploration: Literal["depth_first", "best_bound"] = "depth_first"
    screening_enabled: bool = True
    time_limit_seconds: float = 1000.0
    gap_tolerance: float = 1e-6
    relaxation: RelaxationConfig = field(default_factory=RelaxationConfig)
    #: relative to M when left as None (1e-6 * M)
    support_threshold: Optional[float] = None
    trace: bool = False
    #: keep every pruning decision in ``SolveStats.prune_log``
    audit: bool = False

    def __post_init__(self):
        if not self.time_limit_seconds > 0:
            raise ValueError("time_limit_seconds must be positive")
        if not self.gap_tolerance > 0:
            raise ValueError("gap_tolerance must be positive")
        if self.exploration not in ("depth_first", "best_bound"):
            raise ValueError(f"unknown exploration order {self.exploration!r}")


@dataclass
class Solution:
    x: np.ndarray
    objective: float
    optimal: bool


@dataclass
class SolveStats:
    #: relaxations carried to their stopping test (not cut short by screening)
    nodes_processed: int = 0
    #: every relaxation solve started, including ones screening interrupted
    relaxations_started: int = 0
    nodes_screened_out: int = 0
    variables_fixed_by_screening: int = 0
    nodes_pruned_by_bound: int = 0
    wall_time_seconds: float = 0.0
    timed_out: bool = False
    incumbent_history: list = field(default_factory=list)
    #: ``(kind, bound, incumbent)`` triples, filled when ``audit`` is on
    prune_log: list = field(default_factory=list)


def _box_lsq(a_t: np.ndarray, y: np.ndarray, big_m: float) -> np.ndarray:
    x_t, *_ = np.linalg.lstsq(a_t, y, rcond=None)
    if np.max(np.abs(x_t), initial=0.0) <= big_m:
        return x_t
    return lsq_linear(a_t, y, bounds=(-big_m, big_m), method="bvls", tol=1e-12).x


def upper_bound_heuristic(
    instance: Instance, node: Node, x_relax, support_threshold: Optional[float] = None
):
    """Round a relaxation point to a feasible point of the node.

    Keeps ``S1`` plus the undecided entries above ``support_threshold`` in
    magnitude and refits them by box-constrained least squares.
    """
    x_relax = np.asarray(x_relax, dtype=np.float64)
    if support_threshold is None:
        support_threshold = 1e-6 * instance.big_m
    bar = node.bar_idx
    keep = bar[np.abs(x_relax[bar]) > support_threshold]
    support = np.union1d(node.one_idx, keep)
    x = np.zeros(instance.n)
    if support.size:
        x_t = _box_lsq(instance.a_matrix[:, support], instance.y, instance.big_m)
        x[support] = np.clip(x_t, -instance.big_m, instance.big_m)
    return x, full_objective(instance, x)


def branch(node: Node, x_relax):
    """Split on the undecided entry of largest magnitude (ties: smallest index)."""
    bar = node.bar_idx
    if bar.size == 0:
        raise ValueError("cannot branch on a leaf node")
    x_relax = np.asarray(x_relax, dtype=np.float64)
    l = int(bar[int(np.argmax(np.abs(x_relax[bar])))])
    return l, child_zero(node, l), child_one(node, l)


@dataclass
class _Pending:
    node: Node
    warm_start: Optional[np.ndarray]
    parent_u: Optional[np.ndarray]
    parent_bound: float


class _Search:
    def __init__(self, instance: Instance, config: SolverConfig):
        self.instance = instance
        self.config = config
        self.stats = SolveStats()
        self.best_x = np.zeros(instance.n)
        self.best_value = full_objective(instance, self.best_x)
        self.stats.incumbent_history.append(self.best_value)
        self._ids = itertools.count()
        self._order = itertools.count()
        self._queue: list = []

    # queue ---------------------------------------------------------------
    def push(self, item: _Pending):
        if self.config.exploration == "depth_first":
            self._queue.append(item)
        else:
            heapq.heappush(self._queue, (item.parent_bound, next(self._order), item))

    def pop(self) -> _Pending:
        if self.config.exploration == "depth_first":
            return self._queue.pop()
        return heapq.heappop(self._queue)[2]

    # bookkeeping -----------------------------------------------------------
    def offer(self, x: np.ndarray, value: float):
        if value < self.best_value:
            self.best_value = value
            self.best_x = x
            self.stats.incumbent_history.append(value)

    def prunable(self, bound: float) -> bool:
        return bound >= self.best_value - self.config.gap_tolerance

    def log_prune(self, kind: str, bound: float):
        if self.config.audit:
            self.stats.prune_log.append((kind, bound, self.best_value))

    def record_screening(self, result: ScreeningResult):
        if result.prune_node:
            self.stats.nodes_screened_out += 1
        else:
            self.stats.nodes_screened_out += result.n_fixed
            self.stats.variables_fixed_by_screening += result.n_fixed

    # main loop -------------------------------------------------------------
    def bound(self, node: Node, warm: Optional[np.ndarray], deadline: float):
        """Solve the node relaxation, following screening fixes as they appear.

        Returns ``(node, relaxation)``; ``relaxation`` is None if the node was
        discarded by screening.
        """
        callback = None
        if self.config.screening_enabled:
            callback = ScreeningMonitor(self.instance, self.best_value)
        while True:
            self.stats.relaxations_started += 1
            rel = solve_relaxation(
                self.instance, node, warm, self.config.relaxation, callback, deadline
            )
            result = rel.interrupted
            if result is None:
                if not rel.timed_out:
                    self.stats.nodes_processed += 1
                return node, rel
            self.record_screening(result)
            if result.prune_node:
                self.log_prune("screen", rel.dual_value)
                return node, None
            node = apply_screening(node, result)
            warm = rel.x

    def trace(self, node_id: int, node: Node, bound: float, fixes: int):
        if self.config.trace:
            logger.info(
                "node=%d |S0|=%d |S1|=%d bound=%.10g incumbent=%.10g screened=%d",
                node_id, len(node.s_zero), len(node.s_one), bound, self.best_value, fixes,
            )

    def run(self) -> tuple[Solution, SolveStats]:
        cfg = self.config
        start = time.perf_counter()
        deadline = start + cfg.time_limit_seconds
        self.push(_Pending(Node.root(self.instance.n), None, None, -np.inf))
        while self._queue:
            if time.perf_counter() > deadline:
                self.stats.timed_out = True
                break
            item = self.pop()
            node = item.node
            if self.prunable(item.parent_bound):
                self.stats.nodes_pruned_by_bound += 1
                self.log_prune("parent", item.parent_bound)
                continue
            fixed_before = self.stats.variables_fixed_by_screening
            if cfg.screening_enabled and item.parent_u is not None:
                result = node_screen(self.instance, node, item.parent_u, self.best_value)
                if result:
                    self.record_screening(result)
                    if result.prune_node:
                        self.log_prune("screen", item.parent_bound)
                        continue
                    node = apply_screening(node, result)
            node, rel = self.bound(node, item.warm_start, deadline)
            node_id = next(self._ids)
            if rel is None:
                self.trace(node_id, node, np.inf, self.stats.variables_fixed_by_screening - fixed_before)
                continue
            if rel.timed_out:
                self.stats.timed_out = True
                break
            x_feas, value = upper_bound_heuristic(
                self.instance, node, rel.x, cfg.support_threshold
            )
            self.offer(x_feas, value)
            self.trace(node_id, node, rel.dual_value, self.stats.variables_fixed_by_screening - fixed_before)
            if self.prunable(rel.dual_value):
                self.stats.nodes_pruned_by_bound += 1
                self.log_prune("bound", rel.dual_value)
                continue
            if node.is_leaf:
                # the heuristic fit on S1 already solved this leaf exactly
                continue
            self._branch(node, rel)
        self.stats.wall_time_seconds = time.perf_counter() - start
        solution = Solution(
            x=self.best_x,
            objective=self.best_value,
            optimal=not self.stats.timed_out,
        )
        return solution, self.stats

    def _branch(self, node: Node, rel: RelaxationResult):
        l, zero, one = branch(node, rel.x)
        warm_zero = rel.x.copy()
        warm_zero[l] = 0.0
        # pushed last, popped first: the x_l != 0 child is explored first
        self.push(_Pending(zero, warm_zero, rel.u, rel.dual_value))
        self.push(_Pending(one, rel.x, rel.u, rel.dual_value))


def solve(instance: Instance, config: Optional[SolverConfig] = None) -> tuple[Solution, SolveStats]:
    """Globally minimize the l0-penalized box-constrained least squares.

    Returns the best point found and run statistics. ``Solution.optimal`` is
    False when the time limit stopped the search.
    """
    return _Search(instance, config or SolverConfig()).run()
