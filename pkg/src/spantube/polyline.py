"""Piecewise-linear functions over a shared interval.

This module is the geometric substrate for everything else: immutable
x-monotone polylines, sets of them on a common domain, envelope and
pointwise-median construction, arrangement events (vertices and pairwise
crossings), and domain clipping.  All types are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV = "SPANTUBE_TOLERANCE"


def tolerance(tol: float | None = None) -> float:
    """Coincidence tolerance: explicit value, SPANTUBE_TOLERANCE, or 1e-9."""
    if tol is not None:
        return float(tol)
    return float(os.environ.get(TOLERANCE_ENV, DEFAULT_TOLERANCE))


class ValidationError(ValueError):
    """Input data violates a structural invariant."""


class DomainError(ValueError):
    """An evaluation point lies outside a function's domain."""


@dataclass(frozen=True)
class PolyFunc:
    """An x-monotone piecewise-linear function given by its breakpoints.

    Breakpoint x-coordinates must be finite and strictly increasing, and
    there must be at least two of them.  Evaluation between breakpoints is
    linear interpolation.
    """

    points: tuple[tuple[float, float], ...]
    id: str = ""
    xs: np.ndarray = field(init=False, repr=False, compare=False)
    ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            pts = tuple((float(x), float(y)) for x, y in self.points)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"breakpoints must be (x, y) pairs: {exc}") from None
        if len(pts) < 2:
            raise ValidationError("a piecewise-linear function needs at least 2 breakpoints")
        for k, (x, y) in enumerate(pts):
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValidationError(f"non-finite coordinate at breakpoint {k}")
        xs = np.array([p[0] for p in pts], dtype=float)
        ys = np.array([p[1] for p in pts], dtype=float)
        if not np.all(np.diff(xs) > 0):
            k = int(np.nonzero(~(np.diff(xs) > 0))[0][0]) + 1
            raise ValidationError(f"x-coordinates not strictly increasing at breakpoint {k}")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.xs[0]), float(self.xs[-1])

    def values(self, x: np.ndarray) -> np.ndarray:
        """Interpolated values at an array of in-domain x positions."""
        return np.interp(x, self.xs, self.ys)

    def __call__(self, x: float) -> float:
        return float(np.interp(x, self.xs, self.ys))

    def max_abs_slope(self) -> float:
        return float(np.max(np.abs(np.diff(self.ys) / np.diff(self.xs))))

    def with_id(self, new_id: str) -> "PolyFunc":
        return PolyFunc(self.points, new_id)


@dataclass(frozen=True)
class FunctionSet:
    """One or more PolyFuncs sharing the domain [a, b] with a < b."""

    functions: tuple[PolyFunc, ...]
    domain: tuple[float, float]

    def __post_init__(self) -> None:
        funcs = tuple(self.functions)
        if len(funcs) < 1:
            raise ValidationError("a function set needs at least one function")
        a, b = (float(self.domain[0]), float(self.domain[1]))
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise ValidationError(f"invalid domain [{a}, {b}]")
        tol = tolerance()
        for k, f in enumerate(funcs):
            fa, fb = f.domain
            if abs(fa - a) > tol or abs(fb - b) > tol:
                raise ValidationError(
                    f"function '{f.id}' (index {k}) spans [{fa}, {fb}], expected [{a}, {b}]"
                )
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(self, "domain", (a, b))

    @classmethod
    def from_functions(cls, functions: Iterable[PolyFunc]) -> "FunctionSet":
        funcs = tuple(functions)
        if not funcs:
            raise ValidationError("a function set needs at least one function")
        return cls(funcs, funcs[0].domain)

    def __len__(self) -> int:
        return len(self.functions)

    def values_at(self, x: np.ndarray) -> np.ndarray:
        """n x len(x) matrix of function values."""
        return np.vstack([f.values(x) for f in self.functions])

    def max_abs_slope(self) -> float:
        return max(f.max_abs_slope() for f in self.functions)


VERTEX = "vertex"
CROSSING = "crossing"


@dataclass(frozen=True)
class EventPoint:
    """A vertex of one function or a crossing point of two functions."""

    x: float
    y: float
    kind: str  # VERTEX or CROSSING
    indices: tuple[int, ...]  # (i,) for a vertex, (i, j) with i < j for a crossing

    def sort_key(self) -> tuple:
        return (self.x, 0 if self.kind == VERTEX else 1, self.indices)


def evaluate(f: PolyFunc, x: float, tol: float | None = None) -> float:
    """Value of f at x; raises DomainError outside [a, b]."""
    tol = tolerance(tol)
    a, b = f.domain
    if x < a - tol or x > b + tol:
        raise DomainError(f"x={x} outside domain [{a}, {b}] of function '{f.id}'")
    return float(np.interp(x, f.xs, f.ys))


def _dedupe_sorted(values: np.ndarray, tol: float) -> np.ndarray:
    """Drop values within tol of their predecessor (input must be sorted)."""
    if len(values) == 0:
        return values
    keep = np.empty(len(values), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(values) > tol
    return values[keep]


def pair_crossing_xs(f: PolyFunc, g: PolyFunc, offset: float = 0.0,
                     tol: float | None = None) -> np.ndarray:
    """x positions where f(x) - g(x) equals offset, sorted ascending.

    Where f - g - offset vanishes identically over a subinterval (collinear
    overlap) only the endpoints of the maximal overlap run are reported.
    """
    tol = tolerance(tol)
    xs = np.union1d(f.xs, g.xs)
    d = np.interp(xs, f.xs, f.ys) - np.interp(xs, g.xs, g.ys) - offset
    zero = np.abs(d) <= tol
    # a piece is identically ~zero iff both of its ends are
    piece_zero = zero[:-1] & zero[1:]
    interior = np.zeros(len(xs), dtype=bool)
    if len(xs) > 2:
        interior[1:-1] = piece_zero[:-1] & piece_zero[1:]
    hits = [xs[zero & ~interior]]
    sign_change = ((d[:-1] > tol) & (d[1:] < -tol)) | ((d[:-1] < -tol) & (d[1:] > tol))
    k = np.nonzero(sign_change)[0]
    if len(k):
        roots = xs[k] + d[k] / (d[k] - d[k + 1]) * (xs[k + 1] - xs[k])
        hits.append(np.clip(roots, xs[k], xs[k + 1]))
    out = np.sort(np.concatenate(hits))
    return _dedupe_sorted(out, tol)


def arrangement_xs(fs: FunctionSet, tol: float | None = None) -> np.ndarray:
    """Sorted unique x coordinates of all vertices and pairwise crossings."""
    tol = tolerance(tol)
    parts = [f.xs for f in fs.functions]
    funcs = fs.functions
    for i in range(len(funcs)):
        for j in range(i + 1, len(funcs)):
            parts.append(pair_crossing_xs(funcs[i], funcs[j], 0.0, tol))
    xs = _dedupe_sorted(np.sort(np.concatenate(parts)), tol)
    a, b = fs.domain
    xs = xs[(xs >= a - tol) & (xs <= b + tol)]
    xs[0], xs[-1] = a, b
    return xs


def envelopes(fs: FunctionSet, tol: float | None = None) -> tuple[PolyFunc, PolyFunc, PolyFunc]:
    """Upper envelope, lower envelope, and pointwise median of a set.

    All three share the same breakpoint grid: the x coordinates of every
    vertex and pairwise crossing.  Between consecutive grid points no two
    functions cross, so max/min/median are linear there and the polylines
    are exact.  For even n the median takes the lower of the two middle
    values.
    """
    xs = arrangement_xs(fs, tol)
    vals = fs.values_at(xs)
    n = len(fs.functions)
    upper = vals.max(axis=0)
    lower = vals.min(axis=0)
    median = np.sort(vals, axis=0)[(n - 1) // 2]
    return (
        PolyFunc(tuple(zip(xs, upper)), "upper"),
        PolyFunc(tuple(zip(xs, lower)), "lower"),
        PolyFunc(tuple(zip(xs, median)), "median"),
    )


def enumerate_events(fs: FunctionSet, tol: float | None = None) -> list[EventPoint]:
    """All vertex and pairwise-crossing events, sorted by x.

    Ties at equal x put vertex events before crossing events, then order by
    function indices, so sweeps over the list are reproducible.
    """
    tol = tolerance(tol)
    events: list[EventPoint] = []
    funcs = fs.functions
    for i, f in enumerate(funcs):
        for x, y in f.points:
            events.append(EventPoint(x, y, VERTEX, (i,)))
    for i in range(len(funcs)):
        for j in range(i + 1, len(funcs)):
            for x in pair_crossing_xs(funcs[i], funcs[j], 0.0, tol):
                y = float(np.interp(x, funcs[i].xs, funcs[i].ys))
                events.append(EventPoint(float(x), y, CROSSING, (i, j)))
    events.sort(key=EventPoint.sort_key)
    return events


def clip(fs: FunctionSet, lo: float, hi: float, tol: float | None = None) -> FunctionSet:
    """Restrict every function to [lo, hi], interpolating new endpoints."""
    tol = tolerance(tol)
    a, b = fs.domain
    if not (lo < hi):
        raise ValueError(f"empty or inverted clip interval [{lo}, {hi}]")
    if lo < a - tol or hi > b + tol:
        raise ValueError(f"clip interval [{lo}, {hi}] outside domain [{a}, {b}]")
    lo = max(lo, a)
    hi = min(hi, b)
    if hi - lo <= tol:
        raise ValueError(f"clip interval [{lo}, {hi}] is degenerate")
    out = []
    for f in fs.functions:
        inner = (f.xs > lo + tol) & (f.xs < hi - tol)
        pts = [(lo, float(np.interp(lo, f.xs, f.ys)))]
        pts.extend((float(x), float(y)) for x, y in zip(f.xs[inner], f.ys[inner]))
        pts.append((hi, float(np.interp(hi, f.xs, f.ys))))
        out.append(PolyFunc(tuple(pts), f.id))
    return FunctionSet(tuple(out), (lo, hi))


# ---------------------------------------------------------------------------
# JSON serialization:
#   {"domain": [a, b], "functions": [{"id": "...", "points": [[x, y], ...]}, ...]}
# ---------------------------------------------------------------------------

def function_set_from_dict(data: dict) -> FunctionSet:
    if not isinstance(data, dict):
        raise ValidationError("function set document must be a JSON object")
    try:
        a, b = data["domain"]
    except (KeyError, TypeError, ValueError):
        raise ValidationError("missing or malformed 'domain' entry (expected [a, b])") from None
    raw = data.get("functions")
    if not isinstance(raw, list) or not raw:
        raise ValidationError("'functions' must be a nonempty list")
    funcs = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ValidationError(f"function entry {k} is not an object")
        fid = str(entry.get("id", f"f{k}"))
        pts = entry.get("points")
        if not isinstance(pts, list):
            raise ValidationError(f"function '{fid}' (index {k}): missing 'points' list")
        try:
            funcs.append(PolyFunc(tuple((p[0], p[1]) for p in pts), fid))
        except (ValidationError, TypeError, IndexError) as exc:
            raise ValidationError(f"function '{fid}' (index {k}): {exc}") from None
    return FunctionSet(tuple(funcs), (float(a), float(b)))


def function_set_to_dict(fs: FunctionSet) -> dict:
    return {
        "domain": [fs.domain[0], fs.domain[1]],
        "functions": [
            {"id": f.id, "points": [[x, y] for x, y in f.points]} for f in fs.functions
        ],
    }


def load_function_set(path: str | Path) -> FunctionSet:
    """Load and validate a function set file, naming the first violation."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    return function_set_from_dict(data)


def save_function_set(fs: FunctionSet, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(function_set_to_dict(fs), fh)
        fh.write("\n")
