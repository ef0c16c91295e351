import numpy as np
import pytest

from l0screen import Node, child_one, child_zero, solve_relaxation
from l0screen import kernels
from l0screen.kernels import available_backends

from conftest import random_instance

BACKENDS = available_backends()


def test_fallback_is_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
def test_backends_agree(rng):
    for _ in range(5):
        inst = random_instance(rng, 15, 20, lam=float(rng.uniform(0.02, 0.2)))
        node = child_one(child_zero(Node.root(20), 3), 7)
        results = [solve_relaxation(inst, node, backend=mod) for mod in BACKENDS.values()]
        ref = results[0]
        for res in results[1:]:
            assert res.iterations == ref.iterations
            np.testing.assert_allclose(res.x, ref.x, atol=1e-10)
            assert res.dual_value == pytest.approx(ref.dual_value, abs=1e-10)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_evaluate_matches_formula(rng, name):
    mod = BACKENDS[name]
    inst = random_instance(rng, 7, 5)
    a = np.ascontiguousarray(inst.a_matrix)
    x = rng.uniform(-inst.big_m, inst.big_m, 5)
    is_bar = np.array([1, 1, 0, 1, 0], dtype=np.uint8)
    u = np.empty(7)
    corr = np.empty(5)
    primal, dual = mod.evaluate(a, inst.y, x, is_bar, inst.lam, inst.big_m, inst.y_sqnorm, 2, u, corr)
    r = inst.y - a @ x
    np.testing.assert_allclose(u, r, atol=1e-13)
    np.testing.assert_allclose(corr, a.T @ r, atol=1e-13)
    bar = is_bar.astype(bool)
    expect_p = 0.5 * r @ r + inst.ratio * np.abs(x[bar]).sum() + 2 * inst.lam
    z = np.abs(corr) - inst.ratio
    expect_d = (0.5 * inst.y_sqnorm - 0.5 * (inst.y - r) @ (inst.y - r)
                - inst.big_m * np.maximum(z[bar], 0).sum() - inst.big_m * z[~bar].sum())
    assert primal == pytest.approx(expect_p, abs=1e-12)
    assert dual == pytest.approx(expect_d, abs=1e-12)


def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(script))
    mod["main"](["--sizes", "8x12", "--repeats", "1"])
    out = capsys.readouterr().out
    assert "8x12" in out and "python" in out
