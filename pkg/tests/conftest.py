import functools

import numpy as np
import pytest

from axizeit.algebra import BracketParams, ExtElement


@functools.lru_cache(maxsize=None)
def params_cached(n: int, hbar_scale: float | None = None) -> BracketParams:
    return BracketParams.build(n, hbar_scale=hbar_scale)


def random_skew(n: int, rng: np.random.Generator,
                traceless: bool = False) -> np.ndarray:
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = 0.5 * (A - A.conj().T)
    if traceless:
        A = A - (np.trace(A) / n) * np.eye(n)
    return A


def random_ext(n: int, rng: np.random.Generator) -> ExtElement:
    return ExtElement(random_skew(n, rng, traceless=True),
                      random_skew(n, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
