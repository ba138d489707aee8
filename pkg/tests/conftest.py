"""Shared instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from spantube import FunctionSet, PolyFunc


def constant_set(values, domain=(0.0, 1.0), ids=None) -> FunctionSet:
    """Function set of horizontal lines at the given y values."""
    a, b = domain
    ids = ids or [f"c{k}" for k in range(len(values))]
    funcs = tuple(
        PolyFunc(((a, v), (b, v)), ids[k]) for k, v in enumerate(values)
    )
    return FunctionSet(funcs, (a, b))


def random_walk_function(rng: np.random.Generator, links: int, slope_max: float,
                         y0_range: tuple[float, float], fid: str) -> PolyFunc:
    """Random slope-bounded piecewise-linear function on [0, 1]."""
    k = links + 1
    base = np.linspace(0.0, 1.0, k)
    if k > 2:
        base[1:-1] += rng.uniform(-0.3, 0.3, k - 2) / (k - 1)
    ys = np.empty(k)
    ys[0] = rng.uniform(*y0_range)
    ys[1:] = ys[0] + np.cumsum(rng.uniform(-slope_max, slope_max, k - 1) * np.diff(base))
    return PolyFunc(tuple(zip(base, ys)), fid)


def random_function_set(seed: int, n: int, max_links: int, min_links: int = 2,
                        slope_max: float = 1.5,
                        y0_range: tuple[float, float] = (0.0, 1.5)) -> FunctionSet:
    rng = np.random.default_rng(seed)
    funcs = tuple(
        random_walk_function(rng, int(rng.integers(min_links, max_links + 1)),
                             slope_max, y0_range, f"f{i}")
        for i in range(n)
    )
    return FunctionSet(funcs, (0.0, 1.0))


def random_instance(seed: int) -> tuple[FunctionSet, int]:
    """A random (function set, p) pair with n in 3..5, links <= 8, 1 < p < n."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    funcs = tuple(
        random_walk_function(rng, int(rng.integers(2, 9)), 1.5, (0.0, 1.5), f"f{i}")
        for i in range(n)
    )
    p = int(rng.integers(2, n))
    return FunctionSet(funcs, (0.0, 1.0)), p


def random_three_set(seed: int, max_links: int = 50,
                     slope_max: float = 3.0) -> FunctionSet:
    rng = np.random.default_rng(seed)
    funcs = tuple(
        random_walk_function(rng, int(rng.integers(2, max_links + 1)),
                             slope_max, (0.0, 3.0), f"f{i}")
        for i in range(3)
    )
    return FunctionSet(funcs, (0.0, 1.0))


def dense_coverage_counts(fs: FunctionSet, witness: PolyFunc, epsilon: float,
                          samples: int, tol: float = 1e-9) -> np.ndarray:
    """Number of functions within epsilon + tol of the witness per sample x."""
    a, b = fs.domain
    xs = np.linspace(a, b, samples)
    return (np.abs(fs.values_at(xs) - witness.values(xs)) <= epsilon + tol).sum(axis=0)


@pytest.fixture
def two_constants() -> FunctionSet:
    return constant_set([0.0, 2.0])


@pytest.fixture
def three_constants() -> FunctionSet:
    return constant_set([0.0, 2.0, 4.0])
