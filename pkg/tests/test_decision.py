import numpy as np
import pytest

from spantube import GridSpec, decide, envelopes, extract_witness, grid_decide, sweep

from .conftest import (
    constant_set,
    dense_coverage_counts,
    random_function_set,
    random_instance,
)


class TestTrivialInstances:
    def test_two_constants_feasible_with_midline_witness(self, two_constants):
        out = decide(two_constants, 1.0, 2)
        assert out.feasible
        xs = np.linspace(0, 1, 50)
        assert np.allclose(out.witness.values(xs), 1.0, atol=1e-6)

    def test_two_constants_infeasible_below_half_gap(self, two_constants):
        assert not decide(two_constants, 0.9, 2).feasible

    def test_three_constants_witness_stays_in_one_band(self, three_constants):
        out = decide(three_constants, 1.0, 2)
        assert out.feasible
        xs = np.linspace(0, 1, 200)
        wy = out.witness.values(xs)
        in_low = np.all(np.abs(wy - 1.0) <= 1e-6)
        in_high = np.all(np.abs(wy - 3.0) <= 1e-6)
        assert in_low or in_high

    def test_argument_errors(self, two_constants):
        with pytest.raises(ValueError):
            decide(two_constants, 1.0, 3)
        with pytest.raises(ValueError):
            decide(two_constants, -0.1, 1)

    def test_extract_witness_requires_feasibility(self, two_constants):
        result = sweep(two_constants, 0.5, 2)
        assert not result.feasible
        with pytest.raises(RuntimeError):
            extract_witness(result, two_constants, 0.5)


class TestFullCoverageClosedForm:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_envelope_spread(self, seed):
        fs = random_function_set(seed, n=2 + seed % 4, max_links=8)
        n = len(fs.functions)
        upper, lower, _ = envelopes(fs)
        threshold = float((upper.ys - lower.ys).max() / 2.0)
        assert decide(fs, threshold, n).feasible
        assert decide(fs, threshold + 1e-6, n).feasible
        if threshold > 1e-6:
            assert not decide(fs, threshold - 1e-6, n).feasible


class TestMonotonicity:
    @pytest.mark.parametrize("seed", range(8))
    def test_monotone_in_epsilon(self, seed):
        fs, p = random_instance(seed)
        rng = np.random.default_rng(seed)
        eps = np.sort(rng.uniform(0.0, 1.5, 5))
        feas = [decide(fs, e, p).feasible for e in eps]
        # once feasible, stays feasible
        assert all(b or not a for a, b in zip(feas, feas[1:]))

    @pytest.mark.parametrize("seed", range(8))
    def test_monotone_in_p(self, seed):
        fs, _ = random_instance(seed)
        n = len(fs.functions)
        eps = 0.4
        feas = [decide(fs, eps, p).feasible for p in range(1, n + 1)]
        assert feas[0]  # p = 1 always feasible
        assert all(a or not b for a, b in zip(feas, feas[1:]))


class TestWitnessValidity:
    @pytest.mark.parametrize("seed", range(10))
    def test_dense_sampled_coverage(self, seed):
        fs, p = random_instance(seed + 50)
        rng = np.random.default_rng(seed)
        eps = rng.uniform(0.2, 1.0)
        out = decide(fs, eps, p)
        if not out.feasible:
            eps = 2.0
            out = decide(fs, eps, p)
        assert out.feasible
        a, b = fs.domain
        assert out.witness.domain == (a, b)
        counts = dense_coverage_counts(fs, out.witness, eps, 10_000)
        assert counts.min() >= p


class TestGridAgreement:
    @pytest.mark.parametrize("seed", range(6))
    def test_agrees_away_from_resolution_band(self, seed):
        fs, p = random_instance(seed + 200)
        grid = GridSpec(5e-4, 1e-3)
        rng = np.random.default_rng(seed)
        for eps in rng.uniform(0.05, 1.2, 4):
            exact = decide(fs, eps, p).feasible
            approx = grid_decide(fs, eps, p, grid)
            if exact != approx:
                # disagreements are only allowed within the resolution band
                flipped = decide(fs, eps + (2e-3 if not exact else -2e-3), p).feasible
                assert flipped != exact
