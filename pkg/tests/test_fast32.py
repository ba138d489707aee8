import numpy as np
import pytest

from spantube import FunctionSet, PolyFunc, optimize, optimize_3_2

from .conftest import (
    constant_set,
    dense_coverage_counts,
    random_three_set,
)
from .oracles import local_max_values, local_min_values

TOL = 1e-9


def test_three_constants(three_constants):
    sol = optimize_3_2(three_constants)
    assert sol.epsilon_star == pytest.approx(1.0, abs=TOL)
    assert sol.p == 2


def test_constant_middle_band():
    fs = constant_set([0.0, 4.0, 2.0], ids=["low", "high", "mid"])
    assert optimize_3_2(fs).epsilon_star == pytest.approx(1.0, abs=TOL)


def test_requires_three_functions(two_constants):
    with pytest.raises(ValueError):
        optimize_3_2(two_constants)


def test_forced_transition():
    # the middle role swaps halfway: covering one fixed pair the whole way
    # costs 2, a transition at the crossing costs only the spread there
    fs = FunctionSet(
        (
            PolyFunc(((0, 0), (1, 0)), "flat"),
            PolyFunc(((0, 2), (1, -2)), "falling"),
            PolyFunc(((0, -2), (1, 2)), "rising"),
        ),
        (0, 1),
    )
    sol = optimize_3_2(fs)
    general = optimize(fs, 2)
    assert sol.epsilon_star == pytest.approx(general.epsilon_star, abs=TOL)
    counts = dense_coverage_counts(fs, sol.witness, sol.epsilon_star, 5000)
    assert counts.min() >= 2


@pytest.mark.parametrize("seed", range(25))
def test_matches_general_optimizer(seed):
    fs = random_three_set(seed)
    fast = optimize_3_2(fs)
    general = optimize(fs, 2)
    assert abs(fast.epsilon_star - general.epsilon_star) <= TOL
    counts = dense_coverage_counts(fs, fast.witness, fast.epsilon_star, 4000)
    assert counts.min() >= 2


@pytest.mark.parametrize("seed", range(10))
def test_width_is_a_difference_extremum(seed):
    from spantube import envelopes

    fs = random_three_set(seed + 60)
    width = 2 * optimize_3_2(fs).epsilon_star
    upper, lower, median = envelopes(fs)
    pool = (
        local_max_values(upper.ys - median.ys)
        + local_max_values(median.ys - lower.ys)
        + local_min_values(upper.ys - lower.ys)
    )
    assert any(abs(width - v) <= TOL for v in pool)


@pytest.mark.parametrize("seed", range(6))
def test_refinement_leaves_optimum_unchanged(seed):
    fs = random_three_set(seed + 90, max_links=10)
    base = optimize_3_2(fs).epsilon_star

    refined = []
    for f in fs.functions:
        pts = []
        for (x0, y0), (x1, y1) in zip(f.points[:-1], f.points[1:]):
            pts.append((x0, y0))
            pts.append(((x0 + x1) / 2, (y0 + y1) / 2))  # collinear dummy vertex
        pts.append(f.points[-1])
        refined.append(PolyFunc(tuple(pts), f.id))
    again = optimize_3_2(FunctionSet(tuple(refined), fs.domain)).epsilon_star
    assert abs(base - again) <= TOL
