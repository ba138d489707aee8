import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hys

from spantube import (
    DomainError,
    FunctionSet,
    PolyFunc,
    ValidationError,
    clip,
    enumerate_events,
    envelopes,
    evaluate,
    load_function_set,
)
from spantube.polyline import CROSSING, VERTEX, function_set_to_dict

from .conftest import constant_set, random_function_set
from .oracles import brute_force_crossings


class TestPolyFuncValidation:
    def test_needs_two_points(self):
        with pytest.raises(ValidationError):
            PolyFunc(((0.0, 1.0),))

    def test_rejects_non_monotone_x(self):
        with pytest.raises(ValidationError, match="strictly increasing"):
            PolyFunc(((0.0, 0.0), (0.5, 1.0), (0.5, 2.0)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError, match="non-finite"):
            PolyFunc(((0.0, 0.0), (1.0, float("nan"))))

    def test_function_set_domain_mismatch_names_function(self):
        f_ok = PolyFunc(((0.0, 0.0), (1.0, 0.0)), "good")
        f_bad = PolyFunc(((0.0, 0.0), (0.9, 0.0)), "short")
        with pytest.raises(ValidationError, match="short"):
            FunctionSet((f_ok, f_bad), (0.0, 1.0))


class TestEvaluate:
    def test_midpoint_of_single_segment(self):
        f = PolyFunc(((0, 0), (1, 2)))
        assert evaluate(f, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_constant_function(self):
        f = PolyFunc(((0, 3), (1, 3)))
        assert evaluate(f, 0.7) == pytest.approx(3.0, abs=1e-12)

    def test_second_segment_interpolation(self):
        f = PolyFunc(((0, 0), (0.5, 1), (1, 0)))
        assert evaluate(f, 0.75) == pytest.approx(0.5, abs=1e-12)

    def test_breakpoint_value(self):
        f = PolyFunc(((0, 0), (0.5, 1), (1, 0)))
        assert evaluate(f, 0.5) == 1.0

    def test_outside_domain_raises(self):
        f = PolyFunc(((0, 0), (1, 2)))
        with pytest.raises(DomainError):
            evaluate(f, 1.5)

    @settings(max_examples=60, deadline=None)
    @given(hys.floats(0.01, 0.99), hys.floats(0.0, 1.0), hys.floats(0.0, 1.0))
    def test_convex_combination_inside_segment(self, t, u, v):
        # pick three parameters inside one segment; the middle value must be
        # the convex combination of the outer two
        f = PolyFunc(((0, 1.5), (1, -2.5)))
        lo, hi = 0.2, 0.8
        x1 = lo + u * (hi - lo)
        x2 = lo + v * (hi - lo)
        xm = x1 + t * (x2 - x1)
        expect = evaluate(f, x1) + t * (evaluate(f, x2) - evaluate(f, x1))
        assert abs(evaluate(f, xm) - expect) <= 1e-9


class TestEnvelopes:
    def test_two_constants_even_median_rule(self, two_constants):
        upper, lower, median = envelopes(two_constants)
        for x in (0.0, 0.3, 1.0):
            assert upper(x) == 2.0
            assert lower(x) == 0.0
            assert median(x) == 0.0  # even n: lower of the middle pair

    def test_single_crossing_breakpoint(self):
        fs = FunctionSet(
            (PolyFunc(((0, 0), (1, 2)), "up"), PolyFunc(((0, 2), (1, 0)), "down")),
            (0, 1),
        )
        upper, lower, _ = envelopes(fs)
        assert any(abs(x - 0.5) < 1e-9 and abs(y - 1.0) < 1e-9 for x, y in upper.points)
        assert any(abs(x - 0.5) < 1e-9 and abs(y - 1.0) < 1e-9 for x, y in lower.points)
        assert upper(0.25) == pytest.approx(1.5)
        assert lower(0.25) == pytest.approx(0.5)

    def test_three_constants_odd_median(self):
        fs = constant_set([0.0, 1.0, 4.0])
        _, _, median = envelopes(fs)
        assert median(0.5) == 1.0

    @pytest.mark.parametrize("seed", range(8))
    def test_dense_sampling_matches_direct_evaluation(self, seed):
        fs = random_function_set(seed, n=2 + seed % 4, max_links=8)
        upper, lower, median = envelopes(fs)
        rng = np.random.default_rng(seed)
        xs = rng.uniform(0, 1, 1000)
        vals = fs.values_at(xs)
        n = len(fs.functions)
        assert np.allclose(upper.values(xs), vals.max(axis=0), atol=1e-9)
        assert np.allclose(lower.values(xs), vals.min(axis=0), atol=1e-9)
        med = np.sort(vals, axis=0)[(n - 1) // 2]
        assert np.allclose(median.values(xs), med, atol=1e-9)
        assert np.all(lower.values(xs) <= median.values(xs) + 1e-9)
        assert np.all(median.values(xs) <= upper.values(xs) + 1e-9)


class TestEnumerateEvents:
    def test_two_constants_four_vertices(self, two_constants):
        events = enumerate_events(two_constants)
        assert len(events) == 4
        assert all(e.kind == VERTEX for e in events)

    def test_crossing_pair(self):
        fs = FunctionSet(
            (PolyFunc(((0, 0), (1, 2)), "up"), PolyFunc(((0, 2), (1, 0)), "down")),
            (0, 1),
        )
        events = enumerate_events(fs)
        crossings = [e for e in events if e.kind == CROSSING]
        assert len(events) == 5
        assert len(crossings) == 1
        assert crossings[0].x == pytest.approx(0.5)
        assert crossings[0].y == pytest.approx(1.0)
        assert crossings[0].indices == (0, 1)

    def test_ordering_vertex_before_crossing(self):
        fs = FunctionSet(
            (PolyFunc(((0, 0), (0.5, 1), (1, 2)), "a"), PolyFunc(((0, 2), (0.5, 1), (1, 0)), "b")),
            (0, 1),
        )
        events = enumerate_events(fs)
        at_half = [e for e in events if abs(e.x - 0.5) < 1e-9]
        kinds = [e.kind for e in at_half]
        assert kinds == [VERTEX, VERTEX, CROSSING]

    def test_collinear_overlap_reports_endpoints_only(self):
        fs = FunctionSet(
            (
                PolyFunc(((0, 0), (0.4, 1), (0.6, 1), (1, 0)), "tent"),
                PolyFunc(((0, 1), (1, 1)), "flat"),
            ),
            (0, 1),
        )
        crossings = [e for e in enumerate_events(fs) if e.kind == CROSSING]
        assert [round(e.x, 9) for e in crossings] == [0.4, 0.6]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_segment_intersection_brute_force(self, seed):
        fs = random_function_set(seed + 100, n=3 + seed % 3, max_links=8)
        events = enumerate_events(fs)
        funcs = fs.functions
        for i in range(len(funcs)):
            for j in range(i + 1, len(funcs)):
                got = sorted(e.x for e in events if e.kind == CROSSING and e.indices == (i, j))
                want = brute_force_crossings(funcs[i], funcs[j])
                assert len(got) == len(want), (i, j, got, want)
                assert np.allclose(got, want, atol=1e-7)


class TestClip:
    def test_identity(self, two_constants):
        out = clip(two_constants, 0.0, 1.0)
        assert out.domain == (0.0, 1.0)
        for f, g in zip(out.functions, two_constants.functions):
            assert f.points == g.points

    def test_interpolated_endpoints(self):
        fs = FunctionSet((PolyFunc(((0, 0), (1, 2)), "f"),), (0, 1))
        out = clip(fs, 0.25, 0.75)
        assert out.functions[0].points == ((0.25, 0.5), (0.75, 1.5))

    def test_constants_keep_values(self, three_constants):
        out = clip(three_constants, 0.2, 0.3)
        for f, v in zip(out.functions, (0.0, 2.0, 4.0)):
            assert f(0.25) == v

    def test_bad_interval_raises(self, two_constants):
        with pytest.raises(ValueError):
            clip(two_constants, 0.5, 0.5)
        with pytest.raises(ValueError):
            clip(two_constants, 0.7, 0.2)
        with pytest.raises(ValueError):
            clip(two_constants, -0.5, 0.5)

    @pytest.mark.parametrize("seed", range(5))
    def test_clipped_evaluation_matches_original(self, seed):
        fs = random_function_set(seed + 40, n=3, max_links=8)
        out = clip(fs, 0.2, 0.9)
        xs = np.random.default_rng(seed).uniform(0.2, 0.9, 200)
        for f, g in zip(out.functions, fs.functions):
            assert np.allclose(f.values(xs), g.values(xs), atol=1e-12)


class TestJsonRoundTrip:
    def test_round_trip(self, tmp_path, three_constants):
        path = tmp_path / "fs.json"
        path.write_text(json.dumps(function_set_to_dict(three_constants)))
        loaded = load_function_set(path)
        assert loaded.domain == three_constants.domain
        for f, g in zip(loaded.functions, three_constants.functions):
            assert f.points == g.points and f.id == g.id

    def test_loader_names_offending_function(self, tmp_path):
        doc = {
            "domain": [0, 1],
            "functions": [
                {"id": "ok", "points": [[0, 0], [1, 0]]},
                {"id": "broken", "points": [[0, 0], [0, 1]]},
            ],
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="'broken' \\(index 1\\)"):
            load_function_set(path)

    def test_loader_rejects_malformed_json(self, tmp_path):
        path = tmp_path / "trunc.json"
        path.write_text('{"domain": [0, 1], "functions": [')
        with pytest.raises(ValidationError, match="malformed JSON"):
            load_function_set(path)
