"""Deliberately naive brute-force solvers used as test oracles.

grid_decide discretizes the time-pitch plane and runs a reachability pass
over admissible grid cells; grid_optimize bisects the width over it;
scan_optimize replaces the optimizer's binary search with a linear scan of
the candidate list.  None of these are exported through the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decision import decide
from .optimizer import TubeSolution, _candidate_values, _fallback_widen
from .polyline import FunctionSet, tolerance


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution; pick y_step at or below the tolerance you want."""

    x_step: float
    y_step: float

    def __post_init__(self) -> None:
        if not (self.x_step > 0 and self.y_step > 0):
            raise ValueError("grid steps must be positive")


def _admissible_runs(values: np.ndarray, deltas: np.ndarray, p: int) -> list[tuple[int, int]]:
    """Maximal inclusive level-index runs where interval depth >= p.

    values/deltas describe one column's sorted interval-endpoint events
    (+1 at each interval's first level, -1 one past its last level).
    """
    depth = 0
    runs: list[tuple[int, int]] = []
    start: int | None = None
    for v, d in zip(values, deltas):
        was_ok = depth >= p
        depth += d
        if depth >= p and start is None:
            start = int(v)
        elif depth < p and was_ok and start is not None:
            end = int(v) - 1
            if end >= start:
                if runs and start <= runs[-1][1] + 1:
                    runs[-1] = (runs[-1][0], end)
                else:
                    runs.append((start, end))
            start = None
    return runs


def grid_decide(fs: FunctionSet, epsilon: float, p: int, grid: GridSpec,
                tol: float | None = None) -> bool:
    """Feasibility on a discrete grid.

    x is discretized into columns and y into levels spanning the data range
    widened by epsilon.  A (column, level) cell is admissible iff at least p
    functions are within epsilon of the level's y there; feasible iff a path
    of admissible cells runs from the first column to the last.  Per column
    step the path may drift ceil(max_slope * x_step / y_step) + 1 levels
    (the +1 is slack against discretizing steep segments) and may also move
    freely inside one contiguous admissible run, since a continuous function
    can traverse a feasible band with arbitrarily steep slope.
    """
    n = len(fs.functions)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range [1, {n}]")
    if grid.y_step > epsilon:
        raise ValueError(
            f"grid too coarse: y_step={grid.y_step} exceeds epsilon={epsilon}"
        )
    a, b = fs.domain
    ncols = max(2, int(math.ceil((b - a) / grid.x_step)) + 1)
    xs = np.linspace(a, b, ncols)
    vals = fs.values_at(xs)                       # n x ncols
    y_min = float(vals.min()) - epsilon
    nlev = int(math.ceil((float(vals.max()) + epsilon - y_min) / grid.y_step)) + 1

    lo_idx = np.ceil((vals - epsilon - y_min) / grid.y_step).astype(np.int64)
    hi_idx = np.floor((vals + epsilon - y_min) / grid.y_step).astype(np.int64)
    np.clip(lo_idx, 0, nlev - 1, out=lo_idx)
    np.clip(hi_idx, 0, nlev - 1, out=hi_idx)

    events = np.concatenate([lo_idx, hi_idx + 1], axis=0)        # 2n x ncols
    deltas = np.concatenate([np.ones(n, np.int64), -np.ones(n, np.int64)])
    order = np.argsort(events, axis=0, kind="stable")
    sorted_events = np.take_along_axis(events, order, axis=0)
    sorted_deltas = deltas[order]

    jump = int(math.ceil(fs.max_abs_slope() * grid.x_step / grid.y_step)) + 1

    reach: list[tuple[int, int]] | None = None
    for c in range(ncols):
        runs = _admissible_runs(sorted_events[:, c], sorted_deltas[:, c], p)
        if reach is None:
            new = runs
        else:
            new = [
                r for r in runs
                if any(r[0] <= ph + jump and pl - jump <= r[1] for pl, ph in reach)
            ]
        if not new:
            return False
        reach = new
    return True


def grid_optimize(fs: FunctionSet, p: int, grid: GridSpec,
                  tol: float | None = None) -> float:
    """Bisection on the half-width over grid_decide, to y_step resolution.

    Returns the midpoint of the final bracket.
    """
    n = len(fs.functions)
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range [1, {n}]")
    ncols = max(2, int(math.ceil((fs.domain[1] - fs.domain[0]) / grid.x_step)) + 1)
    xs = np.linspace(fs.domain[0], fs.domain[1], ncols)
    vals = fs.values_at(xs)
    hi = float((vals.max(axis=0) - vals.min(axis=0)).max() / 2.0) + grid.y_step
    lo = 0.0
    while hi - lo > grid.y_step:
        mid = max(0.5 * (lo + hi), grid.y_step)  # stay above the coarseness guard
        if mid >= hi:
            break
        if grid_decide(fs, mid, p, grid, tol):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def scan_optimize(fs: FunctionSet, p: int, tol: float | None = None) -> float:
    """First feasible candidate width by ascending linear scan.

    Equals the optimizer's binary-search result whenever feasibility is
    monotone over the sorted candidate list.
    """
    n = len(fs.functions)
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range [1, {n}]")
    tol = tolerance(tol)
    if p == 1:
        return 0.0  # any single function is its own zero-width tube
    cands = _candidate_values(fs, p, tol)
    for cand in cands:
        if decide(fs, cand.epsilon, p, tol).feasible:
            return cand.epsilon
    start = cands[-1].epsilon if cands else 0.0
    return _fallback_widen(fs, p, start, tol).epsilon_star
