"""Fixed-width spanning-tube feasibility and witness construction.

Given a function set, a half-width epsilon and a count p, decides whether a
continuous template exists whose vertical segment of length 2*epsilon meets
at least p functions at every x, and builds a concrete witness polyline when
one exists.

The method is a slab decomposition: collect every x where the vertical
order of the shifted boundary curves {f_i - eps, f_i + eps} can change (all
vertices plus crossings of boundary-curve pairs), compute the depth->=p
intervals ("cells") in each slab between consecutive events, and propagate
reachability left to right, connecting cells across an event when their
closed y-intervals intersect there.  Coverage comparisons are closed with a
half-tolerance pad so that the exact optimum is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyline import (
    FunctionSet,
    PolyFunc,
    _dedupe_sorted,
    pair_crossing_xs,
    tolerance,
)


@dataclass(frozen=True)
class DecisionOutcome:
    """Feasibility verdict plus a witness template when feasible."""

    feasible: bool
    witness: PolyFunc | None = None


@dataclass
class Cell:
    """A maximal depth->=p interval between two boundary curves in one slab.

    Boundary-curve references are (function index, sign) pairs: the curve
    f_index(x) + sign * pad.
    """

    slab: int
    lower_boundary: tuple[int, int]
    upper_boundary: tuple[int, int]
    reachable: bool = False


@dataclass
class SweepResult:
    """Slab decomposition with reachability, as produced by the sweep."""

    event_xs: np.ndarray            # len S+1, spanning [a, b]
    cells: list[list[Cell]]         # per slab, bottom to top
    predecessors: list[list[int | None]]  # per slab, per cell
    pad: float
    feasible: bool


def _event_grid(fs: FunctionSet, pad: float, tol: float) -> np.ndarray:
    """Event x coordinates: vertices plus boundary-curve crossings."""
    funcs = fs.functions
    parts = [f.xs for f in funcs]
    offsets = sorted({0.0, 2.0 * pad, -2.0 * pad})
    for i in range(len(funcs)):
        for j in range(i + 1, len(funcs)):
            for off in offsets:
                parts.append(pair_crossing_xs(funcs[i], funcs[j], off, tol))
    xs = _dedupe_sorted(np.sort(np.concatenate(parts)), tol)
    a, b = fs.domain
    xs = xs[(xs >= a - tol) & (xs <= b + tol)]
    xs[0], xs[-1] = a, b
    return xs


def _slab_cells(slab: int, lows: np.ndarray, highs: np.ndarray, p: int) -> list[Cell]:
    """Maximal y-intervals covered by at least p tube intervals in a slab.

    lows/highs are the boundary values at the slab midpoint.  Interval
    starts sort before ends at equal values so that tubes touching in a
    single point still produce a (degenerate) cell.
    """
    endpoints = [(lows[i], 0, i) for i in range(len(lows))]
    endpoints += [(highs[i], 1, i) for i in range(len(highs))]
    endpoints.sort()
    cells: list[Cell] = []
    depth = 0
    open_lower: tuple[int, int] | None = None
    for _value, flag, i in endpoints:
        if flag == 0:
            depth += 1
            if depth == p:
                open_lower = (i, -1)
        else:
            if depth == p and open_lower is not None:
                cells.append(Cell(slab, open_lower, (i, +1)))
                open_lower = None
            depth -= 1
    return cells


def _cell_interval(cell: Cell, fvals: np.ndarray, pad: float) -> tuple[float, float]:
    """Closed y-interval of a cell at an event, from function values there."""
    li, ls = cell.lower_boundary
    ui, us = cell.upper_boundary
    return (fvals[li] + ls * pad, fvals[ui] + us * pad)


def sweep(fs: FunctionSet, epsilon: float, p: int, tol: float | None = None) -> SweepResult:
    """Run the slab decomposition and reachability propagation."""
    n = len(fs.functions)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range [1, {n}]")
    tol = tolerance(tol)
    pad = epsilon + 0.5 * tol

    xs = _event_grid(fs, pad, tol)
    mids = 0.5 * (xs[:-1] + xs[1:])
    mid_vals = fs.values_at(mids)          # n x S
    event_vals = fs.values_at(xs)          # n x (S+1)
    n_slabs = len(mids)

    cells: list[list[Cell]] = []
    for s in range(n_slabs):
        slab_cells = _slab_cells(s, mid_vals[:, s] - pad, mid_vals[:, s] + pad, p)
        if not slab_cells:
            return SweepResult(xs, [], [], pad, False)
        cells.append(slab_cells)

    predecessors: list[list[int | None]] = [[None] * len(cells[0])]
    for c in cells[0]:
        c.reachable = True
    any_reachable = True
    for s in range(1, n_slabs):
        x_event = xs[s]
        fvals = event_vals[:, s]
        prev_ints = [_cell_interval(c, fvals, pad) for c in cells[s - 1]]
        cur_ints = [_cell_interval(c, fvals, pad) for c in cells[s]]
        preds: list[int | None] = []
        any_reachable = False
        for j, (clo, chi) in enumerate(cur_ints):
            pred: int | None = None
            for k, (plo, phi) in enumerate(prev_ints):
                if not cells[s - 1][k].reachable:
                    continue
                if max(clo, plo) <= min(chi, phi):
                    pred = k
                    break
            preds.append(pred)
            if pred is not None:
                cells[s][j].reachable = True
                any_reachable = True
        predecessors.append(preds)
        if not any_reachable:
            return SweepResult(xs, cells, predecessors, pad, False)
    return SweepResult(xs, cells, predecessors, pad, any_reachable)


def extract_witness(result: SweepResult, fs: FunctionSet, epsilon: float,
                    tol: float | None = None) -> PolyFunc:
    """Backtrack one reachable cell chain and emit its midpoint polyline.

    At each interior event the y pick is the midpoint of the closed
    intersection of the two chained cells' intervals; inside a slab the
    witness is the straight segment between consecutive picks, which stays
    inside the (boundary-linear) cell.
    """
    if not result.feasible:
        raise RuntimeError("witness requested for an infeasible instance")
    xs = result.event_xs
    cells = result.cells
    n_slabs = len(cells)
    event_vals = fs.values_at(xs)
    pad = result.pad

    chain = [next(j for j, c in enumerate(cells[-1]) if c.reachable)]
    for s in range(n_slabs - 1, 0, -1):
        pred = result.predecessors[s][chain[-1]]
        chain.append(pred)
    chain.reverse()

    ys = np.empty(len(xs))
    first = _cell_interval(cells[0][chain[0]], event_vals[:, 0], pad)
    ys[0] = 0.5 * (first[0] + first[1])
    for s in range(1, n_slabs):
        plo, phi = _cell_interval(cells[s - 1][chain[s - 1]], event_vals[:, s], pad)
        clo, chi = _cell_interval(cells[s][chain[s]], event_vals[:, s], pad)
        lo, hi = max(plo, clo), min(phi, chi)
        ys[s] = 0.5 * (lo + hi)
    last = _cell_interval(cells[-1][chain[-1]], event_vals[:, -1], pad)
    ys[-1] = 0.5 * (last[0] + last[1])
    return PolyFunc(tuple(zip(xs, ys)), "witness")


def decide(fs: FunctionSet, epsilon: float, p: int, tol: float | None = None) -> DecisionOutcome:
    """Is there a continuous template meeting >= p functions everywhere?

    Pure function of its inputs; coverage comparisons are closed at
    epsilon plus the coincidence tolerance.
    """
    result = sweep(fs, epsilon, p, tol)
    if not result.feasible:
        return DecisionOutcome(False, None)
    return DecisionOutcome(True, extract_witness(result, fs, epsilon, tol))
