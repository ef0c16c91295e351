"""Problem data, branch-and-bound nodes, objectives and pivot values.

The problem solved throughout the package is

    min_x  0.5 * ||y - A x||^2 + lam * ||x||_0    s.t.  ||x||_inf <= M

Indices are 0-based everywhere in the code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

#: entries with ``|x_i| > ZERO_THRESHOLD`` count as nonzero in the l0 term
ZERO_THRESHOLD = 1e-10
#: slack allowed on the box constraint before a point is declared infeasible
BOX_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Instance:
    """Data ``(A, y, lam, M)`` of one problem.

    Arrays are copied to float64 and made read-only so an instance can be
    shared freely between solvers.
    """

    a_matrix: np.ndarray
    y: np.ndarray
    lam: float
    big_m: float

    def __post_init__(self):
        a = np.array(self.a_matrix, dtype=np.float64, order="C")
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        if a.ndim != 2:
            raise ValueError(f"a_matrix must be 2-D, got shape {a.shape}")
        m, n = a.shape
        if m < 1 or n < 1:
            raise ValueError(f"a_matrix must be non-empty, got shape {a.shape}")
        if y.shape[0] != m:
            raise ValueError(f"y has length {y.shape[0]}, expected m={m}")
        lam = float(self.lam)
        big_m = float(self.big_m)
        if not (np.isfinite(lam) and lam > 0):
            raise ValueError(f"lambda must be positive, got {lam!r}")
        if not (np.isfinite(big_m) and big_m > 0):
            raise ValueError(f"big_m must be positive, got {big_m!r}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
            raise ValueError("A and y must be finite")
        a.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "big_m", big_m)

    @property
    def m(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n(self) -> int:
        return self.a_matrix.shape[1]

    @property
    def ratio(self) -> float:
        """The l1 weight ``lam / M`` of the relaxation."""
        return self.lam / self.big_m

    @cached_property
    def y_sqnorm(self) -> float:
        return float(self.y @ self.y)

    @cached_property
    def lipschitz(self) -> float:
        """Largest eigenvalue of ``A^T A``, by power iteration."""
        return power_iteration(self.a_matrix)

    def correlations(self, u: np.ndarray) -> np.ndarray:
        """``A^T u`` for all columns."""
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.m,):
            raise ValueError(f"u has shape {u.shape}, expected ({self.m},)")
        return self.a_matrix.T @ u

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.y - self.a_matrix @ x


def power_iteration(a: np.ndarray, tol: float = 1e-6, max_iter: int = 500) -> float:
    """Largest eigenvalue of ``a.T @ a``.

    Starts from a fixed-seed Gaussian vector: structured starts such as the
    all-ones vector can sit on a lower eigenvector of small or symmetric
    matrices. Power estimates approach the top eigenvalue from below and the
    stopping test only bounds the last change, so the result is padded by 1%
    to stay usable as a ``1/L`` step size.
    """
    n = a.shape[1]
    if n == 0 or not np.any(a):
        return 0.0
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = a.T @ (a @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return est * 1.01


@dataclass(frozen=True, eq=False)
class Node:
    """Partition ``(S0, S1, S_bar)`` of the variable indices.

    ``s_zero`` entries are forced to zero, ``s_one`` entries are forced
    nonzero and ``s_bar`` entries are undecided.
    """

    s_zero: frozenset[int]
    s_one: frozenset[int]
    s_bar: frozenset[int]
    n: int = field(repr=False, default=-1)

    def __post_init__(self):
        s0, s1, sb = (frozenset(int(i) for i in s) for s in (self.s_zero, self.s_one, self.s_bar))
        n = self.n if self.n >= 0 else len(s0) + len(s1) + len(sb)
        if s0 & s1 or s0 & sb or s1 & sb:
            raise ValueError("node index sets must be pairwise disjoint")
        if (s0 | s1 | sb) != frozenset(range(n)):
            raise ValueError(f"node index sets must cover 0..{n - 1}")
        object.__setattr__(self, "s_zero", s0)
        object.__setattr__(self, "s_one", s1)
        object.__setattr__(self, "s_bar", sb)
        object.__setattr__(self, "n", n)

    @classmethod
    def root(cls, n: int) -> Node:
        return cls(frozenset(), frozenset(), frozenset(range(n)), n)

    def __eq__(self, other):
        if not isinstance(other, Node):
            return NotImplemented
        return (self.s_zero, self.s_one, self.s_bar) == (other.s_zero, other.s_one, other.s_bar)

    def __hash__(self):
        return hash((self.s_zero, self.s_one))

    @property
    def depth(self) -> int:
        return len(self.s_zero) + len(self.s_one)

    @property
    def is_leaf(self) -> bool:
        return not self.s_bar

    @cached_property
    def status(self) -> np.ndarray:
        """Per-index code: 0 for S0, 1 for S1, 2 for S_bar."""
        st = np.full(self.n, 2, dtype=np.int8)
        st[sorted(self.s_zero)] = 0
        st[sorted(self.s_one)] = 1
        st.setflags(write=False)
        return st

    @cached_property
    def zero_idx(self) -> np.ndarray:
        return np.flatnonzero(self.status == 0)

    @cached_property
    def one_idx(self) -> np.ndarray:
        return np.flatnonzero(self.status == 1)

    @cached_property
    def bar_idx(self) -> np.ndarray:
        return np.flatnonzero(self.status == 2)

    @cached_property
    def free_idx(self) -> np.ndarray:
        """Indices not forced to zero (``S1 | S_bar``), sorted."""
        return np.flatnonzero(self.status != 0)

    def fix(self, to_zero: Iterable[int] = (), to_one: Iterable[int] = ()) -> Node:
        """Move several undecided indices at once."""
        z = frozenset(int(i) for i in to_zero)
        o = frozenset(int(i) for i in to_one)
        if z & o:
            raise ValueError(f"indices {sorted(z & o)} cannot be fixed both ways")
        bad = (z | o) - self.s_bar
        if bad:
            raise ValueError(f"indices {sorted(bad)} are not undecided at this node")
        return Node(self.s_zero | z, self.s_one | o, self.s_bar - z - o, self.n)

    def __repr__(self):
        return f"Node(S0={sorted(self.s_zero)}, S1={sorted(self.s_one)}, S_bar={sorted(self.s_bar)})"


def child_zero(node: Node, l: int) -> Node:
    """Sub-node with ``x_l = 0`` imposed."""
    if l not in node.s_bar:
        raise ValueError(f"index {l} is not undecided at {node!r}")
    return node.fix(to_zero=(l,))


def child_one(node: Node, l: int) -> Node:
    """Sub-node with ``x_l != 0`` imposed."""
    if l not in node.s_bar:
        raise ValueError(f"index {l} is not undecided at {node!r}")
    return node.fix(to_one=(l,))


class PivotValues(NamedTuple):
    raw: float
    at_zero: float
    at_one: float


def pivots_from_correlations(corr, lam: float, big_m: float):
    """Pivot arrays ``(raw, at_zero, at_one)`` from ``a_i^T u`` values.

    ``at_zero - at_one == raw`` and ``at_zero * at_one == 0`` hold exactly in
    floating point: both clipped terms are built from the same difference.
    """
    z = np.abs(corr) - lam / big_m
    raw = big_m * z
    at_zero = big_m * np.maximum(z, 0.0)
    at_one = big_m * np.maximum(-z, 0.0)
    return raw, at_zero, at_one


def pivot(instance: Instance, u, i: int) -> PivotValues:
    """The three pivot values of index ``i`` at dual vector ``u``."""
    if not 0 <= i < instance.n:
        raise IndexError(f"index {i} out of range for n={instance.n}")
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (instance.m,):
        raise ValueError(f"u has shape {u.shape}, expected ({instance.m},)")
    corr = float(instance.a_matrix[:, i] @ u)
    raw, at_zero, at_one = pivots_from_correlations(corr, instance.lam, instance.big_m)
    return PivotValues(float(raw), float(at_zero), float(at_one))


def l0_count(x, threshold: float = ZERO_THRESHOLD) -> int:
    return int(np.count_nonzero(np.abs(x) > threshold))


def check_box(instance: Instance, x: np.ndarray) -> None:
    excess = float(np.max(np.abs(x), initial=0.0)) - instance.big_m
    if excess > BOX_TOLERANCE * max(1.0, instance.big_m):
        raise ValueError(f"x violates the box |x_i| <= {instance.big_m} by {excess:.3e}")


def full_objective(instance: Instance, x) -> float:
    """``0.5 * ||y - A x||^2 + lam * ||x||_0`` for a box-feasible ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (instance.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({instance.n},)")
    check_box(instance, x)
    r = instance.residual(x)
    return 0.5 * float(r @ r) + instance.lam * l0_count(x)
