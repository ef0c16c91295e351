"""Seeded synthetic instances: Gaussian and Toeplitz (shifted sinc) dictionaries.

Random draws come from numpy's ``PCG64`` generator seeded with ``GenSpec.seed``,
in a fixed order: dictionary, support, signs, amplitudes, noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .model import Instance

PRNG_NAME = "numpy.PCG64"
SETUPS = ("gaussian", "toeplitz")


@dataclass(frozen=True)
class GenSpec:
    setup: Literal["gaussian", "toeplitz"]
    m: int
    n: int
    k: int
    seed: int
    #: sinc main-lobe half width in samples; None means m / 50
    sinc_width: float | None = None

    def __post_init__(self):
        if self.setup not in SETUPS:
            raise ValueError(f"setup must be one of {SETUPS}, got {self.setup!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must lie in [1, n], got k={self.k}, n={self.n}")
        if self.n / self.k - 1 <= 1:
            raise ValueError(
                f"n/k - 1 = {self.n / self.k - 1:.3g} must exceed 1 for a positive lambda"
            )
        if self.sinc_width is not None and not self.sinc_width > 0:
            raise ValueError("sinc_width must be positive")

    @property
    def width(self) -> float:
        return self.m / 50 if self.sinc_width is None else float(self.sinc_width)


@dataclass
class GeneratedInstance:
    instance: Instance
    x_true: np.ndarray
    sigma: float
    seed: int
    metadata: dict = field(default_factory=dict)


def sinc_column(m: int, width: float) -> np.ndarray:
    """``sinc((j - m/2) / width)`` for ``j = 0..m-1`` (normalized sinc)."""
    return np.sinc((np.arange(m) - m / 2) / width)


def toeplitz_dictionary(m: int, n: int, width: float) -> np.ndarray:
    """Unnormalized dictionary whose column ``i`` is the sinc rolled down by ``i``."""
    col = sinc_column(m, width)
    return np.stack([np.roll(col, i) for i in range(n)], axis=1)


def normalize_columns(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0):
        raise ValueError("dictionary has a zero column")
    return a / norms


def calibrate(a: np.ndarray, y: np.ndarray, sigma: float, n: int, k: int):
    """Penalty and box radius used for every generated instance."""
    lam = 2.0 * sigma**2 * np.log(n / k - 1)
    big_m = 1.5 * float(np.max(np.abs(a.T @ y)))
    return float(lam), big_m


def generate(spec: GenSpec) -> GeneratedInstance:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    m, n, k = spec.m, spec.n, spec.k
    if spec.setup == "gaussian":
        a = rng.standard_normal((m, n))
    else:
        a = toeplitz_dictionary(m, n, spec.width)
    a = normalize_columns(a)

    support = np.sort(rng.choice(n, size=k, replace=False))
    signs = rng.choice(np.array([-1.0, 1.0]), size=k)
    amplitudes = 1.0 + np.abs(rng.standard_normal(k))
    x_true = np.zeros(n)
    x_true[support] = signs * amplitudes

    clean = a @ x_true
    sigma = float(np.linalg.norm(clean) / np.sqrt(10 * m))
    noise = sigma * rng.standard_normal(m)
    y = clean + noise

    lam, big_m = calibrate(a, y, sigma, n, k)
    if not lam > 0:
        raise ValueError("calibrated lambda is not positive")
    metadata = {
        "setup": spec.setup,
        "seed": spec.seed,
        "k": k,
        "prng": PRNG_NAME,
        "sigma": sigma,
        "x_true_support": support.tolist(),
        "x_true_values": x_true[support].tolist(),
    }
    if spec.setup == "toeplitz":
        metadata["sinc_width"] = spec.width
        metadata["shift"] = "circular"
    return GeneratedInstance(
        instance=Instance(a, y, lam, big_m),
        x_true=x_true,
        sigma=sigma,
        seed=spec.seed,
        metadata=metadata,
    )


def snr_db(a: np.ndarray, x_true: np.ndarray, y: np.ndarray) -> float:
    clean = a @ x_true
    noise = y - clean
    return float(10 * np.log10((clean @ clean) / (noise @ noise)))
