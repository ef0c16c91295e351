import numpy as np
import pytest

from l0screen import Instance, Node


def random_instance(rng, m, n, lam=None, big_m=None):
    a = rng.standard_normal((m, n))
    a /= np.linalg.norm(a, axis=0)
    y = rng.standard_normal(m)
    lam = float(rng.uniform(0.05, 1.0)) if lam is None else lam
    big_m = float(rng.uniform(0.5, 3.0)) if big_m is None else big_m
    return Instance(a, y, lam, big_m)


def random_node(rng, n):
    status = rng.integers(0, 3, size=n)
    return Node(
        frozenset(np.flatnonzero(status == 0).tolist()),
        frozenset(np.flatnonzero(status == 1).tolist()),
        frozenset(np.flatnonzero(status == 2).tolist()),
        n,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_instance():
    return Instance(np.array([[1.0]]), np.array([2.0]), 1.0, 2.0)


@pytest.fixture
def identity3():
    return Instance(np.eye(3), np.array([10.0, 0.1, 0.0]), 1.0, 20.0)
