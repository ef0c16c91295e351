import numpy as np
import pytest

from l0screen.datagen import PRNG_NAME, GenSpec, generate, sinc_column, snr_db, toeplitz_dictionary


@pytest.mark.parametrize("setup", ["gaussian", "toeplitz"])
def test_deterministic(setup):
    a = generate(GenSpec(setup, 30, 40, 4, 11))
    b = generate(GenSpec(setup, 30, 40, 4, 11))
    assert a.instance.a_matrix.tobytes() == b.instance.a_matrix.tobytes()
    assert a.instance.y.tobytes() == b.instance.y.tobytes()
    assert a.instance.lam == b.instance.lam and a.instance.big_m == b.instance.big_m
    c = generate(GenSpec(setup, 30, 40, 4, 12))
    assert not np.array_equal(a.instance.y, c.instance.y)


@pytest.mark.parametrize("setup", ["gaussian", "toeplitz"])
def test_calibration_formulas(setup):
    g = generate(GenSpec(setup, 50, 100, 5, 3))
    inst = g.instance
    assert np.allclose(np.linalg.norm(inst.a_matrix, axis=0), 1.0, atol=1e-12)
    assert np.count_nonzero(g.x_true) == 5
    assert np.all(np.abs(g.x_true[g.x_true != 0]) >= 1.0)
    clean = inst.a_matrix @ g.x_true
    assert g.sigma == pytest.approx(np.linalg.norm(clean) / np.sqrt(10 * 50), rel=1e-14)
    assert inst.lam == pytest.approx(2 * g.sigma**2 * np.log(100 / 5 - 1), rel=1e-14)
    assert inst.big_m == pytest.approx(1.5 * np.max(np.abs(inst.a_matrix.T @ inst.y)), rel=1e-14)
    assert g.metadata["prng"] == PRNG_NAME and g.metadata["seed"] == 3


def test_full_scale_example():
    g = generate(GenSpec("gaussian", 500, 1000, 5, 0))
    assert np.allclose(np.linalg.norm(g.instance.a_matrix, axis=0), 1.0, atol=1e-12)
    assert g.instance.lam == pytest.approx(2 * g.sigma**2 * np.log(199), rel=1e-14)


def test_toeplitz_structure():
    m, n, w = 40, 30, 0.8
    raw = toeplitz_dictionary(m, n, w)
    col = sinc_column(m, w)
    assert col[m // 2] == 1.0
    np.testing.assert_array_equal(raw[:, 0], col)
    # constant (circular) diagonals: A[r, c] == A[r + 1 mod m, c + 1]
    np.testing.assert_array_equal(np.roll(raw[:, :-1], 1, axis=0), raw[:, 1:])


def test_toeplitz_width_recorded():
    g = generate(GenSpec("toeplitz", 100, 50, 5, 0))
    assert g.metadata["sinc_width"] == 2.0
    g = generate(GenSpec("toeplitz", 100, 50, 5, 0, sinc_width=3.5))
    assert g.metadata["sinc_width"] == 3.5


def test_rejects_bad_specs():
    with pytest.raises(ValueError):
        GenSpec("gaussian", 20, 30, 30, 0)
    with pytest.raises(ValueError):
        GenSpec("gaussian", 20, 30, 15, 0)  # n/k - 1 = 1
    with pytest.raises(ValueError):
        GenSpec("gaussian", 20, 30, 0, 0)
    with pytest.raises(ValueError):
        GenSpec("uniform", 20, 30, 3, 0)
    with pytest.raises(ValueError):
        GenSpec("toeplitz", 20, 30, 3, 0, sinc_width=0.0)


def test_snr_near_ten_db():
    vals = []
    for seed in range(20):
        g = generate(GenSpec("gaussian", 200, 400, 5, seed))
        vals.append(snr_db(g.instance.a_matrix, g.x_true, g.instance.y))
    assert abs(np.mean(vals) - 10.0) < 1.0
