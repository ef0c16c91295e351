import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l0screen import Instance, Node, child_one, child_zero, full_objective, pivot
from l0screen.model import ZERO_THRESHOLD, l0_count, pivots_from_correlations

from conftest import random_instance


def test_instance_rejects_bad_data():
    with pytest.raises(ValueError):
        Instance(np.eye(2), np.zeros(2), 0.0, 1.0)
    with pytest.raises(ValueError):
        Instance(np.eye(2), np.zeros(2), 1.0, -1.0)
    with pytest.raises(ValueError):
        Instance(np.eye(2), np.zeros(3), 1.0, 1.0)
    with pytest.raises(ValueError):
        Instance(np.zeros((0, 2)), np.zeros(0), 1.0, 1.0)


def test_instance_arrays_are_read_only():
    inst = Instance(np.eye(2), np.ones(2), 1.0, 1.0)
    with pytest.raises(ValueError):
        inst.a_matrix[0, 0] = 5.0
    with pytest.raises(ValueError):
        inst.y[0] = 5.0


def test_lipschitz_upper_bounds_top_eigenvalue(rng):
    inst = random_instance(rng, 15, 25)
    top = np.linalg.eigvalsh(inst.a_matrix.T @ inst.a_matrix)[-1]
    assert top <= inst.lipschitz <= 1.02 * top


def test_lipschitz_on_symmetric_two_column_matrices():
    # columns of equal norm: the all-ones start is an eigenvector here
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = int(rng.integers(2, 10))
        a = rng.standard_normal((m, 2))
        a /= np.linalg.norm(a, axis=0)
        top = np.linalg.eigvalsh(a.T @ a)[-1]
        lip = Instance(a, np.ones(m), 1.0, 1.0).lipschitz
        assert top <= lip <= 1.02 * top


def test_pivot_at_zero_dual_vector():
    inst = Instance(np.eye(2), np.ones(2), 0.7, 2.0)
    p = pivot(inst, np.zeros(2), 1)
    assert p.raw == pytest.approx(-0.7)
    assert p.at_zero == 0.0
    assert p.at_one == pytest.approx(0.7)


def test_pivot_boundary_is_zero():
    inst = Instance(np.eye(2), np.ones(2), 1.0, 2.0)
    p = pivot(inst, np.array([0.5, 0.0]), 0)
    assert p == (0.0, 0.0, 0.0)


def test_pivot_hand_example():
    inst = Instance(np.array([[1.0], [0.0]]), np.zeros(2), 1.0, 2.0)
    p = pivot(inst, np.array([2.0, 0.0]), 0)
    assert p.raw == pytest.approx(3.0)
    assert p.at_zero == pytest.approx(3.0)
    assert p.at_one == 0.0


def test_pivot_index_out_of_range():
    inst = Instance(np.eye(2), np.ones(2), 1.0, 1.0)
    with pytest.raises(IndexError):
        pivot(inst, np.zeros(2), 2)
    with pytest.raises(IndexError):
        pivot(inst, np.zeros(2), -1)


def test_pivot_rejects_wrong_u_length():
    inst = Instance(np.eye(2), np.ones(2), 1.0, 1.0)
    with pytest.raises(ValueError):
        pivot(inst, np.zeros(3), 0)


@settings(max_examples=300, deadline=None)
@given(
    corr=st.floats(-1e6, 1e6, allow_nan=False),
    lam=st.floats(1e-6, 1e3),
    big_m=st.floats(1e-3, 1e3),
)
def test_pivot_identities_exact(corr, lam, big_m):
    raw, at_zero, at_one = pivots_from_correlations(np.array([corr]), lam, big_m)
    assert at_zero[0] >= 0.0 and at_one[0] >= 0.0
    assert at_zero[0] - at_one[0] == raw[0]
    assert at_zero[0] * at_one[0] == 0.0


def test_full_objective_examples():
    inst = Instance(np.eye(2), np.array([3.0, 0.0]), 1.0, 10.0)
    assert full_objective(inst, np.zeros(2)) == pytest.approx(4.5)
    assert full_objective(inst, np.array([3.0, 0.0])) == pytest.approx(1.0)
    zero_y = Instance(np.eye(2), np.zeros(2), 1.0, 10.0)
    assert full_objective(zero_y, np.zeros(2)) == 0.0


def test_full_objective_rejects_box_violation():
    inst = Instance(np.eye(2), np.ones(2), 1.0, 1.0)
    with pytest.raises(ValueError):
        full_objective(inst, np.array([1.5, 0.0]))


def test_zero_threshold_counting():
    x = np.array([ZERO_THRESHOLD, 2 * ZERO_THRESHOLD, 0.0, -1.0])
    assert l0_count(x) == 2


def test_full_objective_permutation_invariant(rng):
    inst = random_instance(rng, 6, 5, big_m=10.0)
    x = rng.uniform(-1, 1, 5) * (rng.random(5) < 0.5)
    perm = rng.permutation(5)
    permuted = Instance(inst.a_matrix[:, perm], inst.y, inst.lam, inst.big_m)
    assert full_objective(permuted, x[perm]) == pytest.approx(full_objective(inst, x), abs=1e-12)


def test_children_examples():
    root = Node.root(5)
    c = child_zero(root, 3)
    assert c.s_zero == {3} and c.s_one == set() and c.s_bar == set(range(5)) - {3}
    g = child_one(child_zero(root, 1), 2)
    assert g.s_zero == {1} and g.s_one == {2}
    assert root.s_bar == set(range(5))
    with pytest.raises(ValueError):
        child_zero(c, 3)
    with pytest.raises(ValueError):
        child_one(g, 2)


def test_node_rejects_bad_partitions():
    with pytest.raises(ValueError):
        Node(frozenset({0}), frozenset({0}), frozenset({1}))
    with pytest.raises(ValueError):
        Node(frozenset({0}), frozenset(), frozenset({2}), 3)


def test_node_fix_many():
    node = Node.root(6).fix(to_zero=[1, 4], to_one=[2])
    assert node.s_zero == {1, 4} and node.s_one == {2} and node.s_bar == {0, 3, 5}
    with pytest.raises(ValueError):
        node.fix(to_zero=[1])
    with pytest.raises(ValueError):
        node.fix(to_zero=[0], to_one=[0])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.data())
def test_partition_survives_child_chains(n, data):
    node = Node.root(n)
    while node.s_bar:
        l = data.draw(st.sampled_from(sorted(node.s_bar)))
        node = child_zero(node, l) if data.draw(st.booleans()) else child_one(node, l)
        assert node.s_zero | node.s_one | node.s_bar == set(range(n))
        assert not (node.s_zero & node.s_one or node.s_zero & node.s_bar or node.s_one & node.s_bar)
    assert node.is_leaf and node.depth == n
