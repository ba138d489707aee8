"""Exact spanning-tube optimization via candidate half-widths.

The optimal half-width is always half the vertical distance between some
arrangement event point (a vertex or a crossing of two functions) and its
(p-1)- or p-nearest function.  We enumerate a superset of those distances,
deduplicate, and binary-search the sorted list with the decision algorithm.
The reverse problem (largest coverage p for a fixed width) is a binary
search over p, which is monotone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .decision import DecisionOutcome, decide
from .polyline import (
    EventPoint,
    FunctionSet,
    PolyFunc,
    enumerate_events,
    envelopes,
    tolerance,
)


class CandidateRank(Enum):
    """Which nearest-function rank produced a candidate distance."""

    P_MINUS_2 = "p-2"
    P_MINUS_1 = "p-1"
    P = "p"


@dataclass(frozen=True)
class CandidateValue:
    """One candidate half-width with its provenance."""

    epsilon: float
    source: EventPoint
    nearest_function: int
    rank: CandidateRank


@dataclass(frozen=True)
class TubeSolution:
    """Optimal half-width, a witness template achieving it, and p."""

    epsilon_star: float
    witness: PolyFunc
    p: int


def _candidate_values(fs: FunctionSet, p: int, tol: float) -> list[CandidateValue]:
    """Sorted deduplicated candidate half-widths for any 1 <= p <= n.

    At the optimum, one boundary of the tube passes through an event point
    and the opposite boundary passes through a function on the other side,
    so the defining distance is the vertical distance from an event point to
    a low-ranked nearest function ON ONE SIDE of it.  For every event point
    we therefore rank the functions at or below the point and, separately,
    those at or above it (the event's own functions excluded), and emit the
    (p-2)-th, (p-1)-th and p-th smallest distances of each side; the p-2
    rank covers crossing events, where two functions share the boundary.
    """
    events = enumerate_events(fs, tol)
    ex = np.array([e.x for e in events])
    ey = np.array([e.y for e in events])
    vals = fs.values_at(ex)

    raw: list[tuple[float, EventPoint, int, CandidateRank]] = []
    ranks = (
        (p - 2, CandidateRank.P_MINUS_2),
        (p - 1, CandidateRank.P_MINUS_1),
        (p, CandidateRank.P),
    )
    for col, event in enumerate(events):
        signed = vals[:, col] - ey[col]
        own = set(event.indices)
        others = [j for j in range(len(signed)) if j not in own]
        below = sorted((max(-signed[j], 0.0), j) for j in others if signed[j] <= tol)
        above = sorted((max(signed[j], 0.0), j) for j in others if signed[j] >= -tol)
        for side in (below, above):
            for position, tag in ranks:
                if 1 <= position <= len(side):
                    dist, j = side[position - 1]
                    raw.append((dist / 2.0, event, j, tag))

    raw.sort(key=lambda item: item[0])
    out: list[CandidateValue] = []
    for eps, event, j, tag in raw:
        if out and eps - out[-1].epsilon <= tol:
            continue
        out.append(CandidateValue(float(eps), event, j, tag))
    return out


def candidates(fs: FunctionSet, p: int, tol: float | None = None) -> list[CandidateValue]:
    """Candidate half-widths for the optimization problem (n > 2, 1 < p < n)."""
    n = len(fs.functions)
    if n <= 2 or not 1 < p < n:
        raise ValueError(
            f"candidate enumeration needs n > 2 and 1 < p < n (got n={n}, p={p}); "
            "use the closed forms for p=1 or p=n"
        )
    return _candidate_values(fs, p, tolerance(tol))


def _full_cover_solution(fs: FunctionSet, tol: float) -> TubeSolution:
    """Closed form for p = n: half the largest envelope spread, centered."""
    upper, lower, _ = envelopes(fs, tol)
    # envelopes() builds all three on one breakpoint grid
    spread = upper.ys - lower.ys
    eps = float(spread.max() / 2.0)
    mid = (upper.ys + lower.ys) / 2.0
    witness = PolyFunc(tuple(zip(upper.xs, mid)), "witness")
    return TubeSolution(eps, witness, len(fs.functions))


def _fallback_widen(fs: FunctionSet, p: int, start: float, tol: float) -> TubeSolution:
    """Diagnostic path: no candidate was feasible, which signals a numerical
    robustness bug rather than a valid answer.  Widen until feasible."""
    warnings.warn(
        "no candidate width was feasible; widening beyond the candidate set "
        "(this indicates a numerical robustness problem)",
        RuntimeWarning,
        stacklevel=3,
    )
    eps = max(start, tol)
    for _ in range(80):
        outcome = decide(fs, eps, p, tol)
        if outcome.feasible:
            return TubeSolution(eps, outcome.witness, p)
        eps *= 2.0
    raise RuntimeError("could not find any feasible width; inputs may be invalid")


def optimize(fs: FunctionSet, p: int, tol: float | None = None) -> TubeSolution:
    """Smallest half-width whose tube meets >= p functions everywhere.

    p = n uses the closed form (half the largest upper-lower spread, witness
    the envelope midline); p = 1 is trivially zero around any single
    function; otherwise binary search over the sorted candidate list.
    """
    n = len(fs.functions)
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range [1, {n}]")
    tol = tolerance(tol)
    if p == n:
        return _full_cover_solution(fs, tol)
    if p == 1:
        return TubeSolution(0.0, fs.functions[0].with_id("witness"), 1)

    cands = _candidate_values(fs, p, tol)
    values = [c.epsilon for c in cands]
    outcomes: dict[int, DecisionOutcome] = {}

    def feasible(k: int) -> bool:
        if k not in outcomes:
            outcomes[k] = decide(fs, values[k], p, tol)
        return outcomes[k].feasible

    if not feasible(len(values) - 1):
        return _fallback_widen(fs, p, values[-1], tol)
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    return TubeSolution(values[lo], outcomes[lo].witness, p)


def max_coverage(fs: FunctionSet, epsilon: float,
                 tol: float | None = None) -> tuple[int, PolyFunc]:
    """Largest p coverable by a width-epsilon tube, with a witness.

    Feasibility is monotone decreasing in p, so binary search applies; a
    single function is always its own tube, hence the result is >= 1.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    n = len(fs.functions)
    tol = tolerance(tol)
    outcomes: dict[int, DecisionOutcome] = {}

    def feasible(p: int) -> bool:
        if p not in outcomes:
            outcomes[p] = decide(fs, epsilon, p, tol)
        return outcomes[p].feasible

    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid - 1
    if lo not in outcomes:
        outcomes[lo] = decide(fs, epsilon, lo, tol)
    witness = outcomes[lo].witness
    if witness is None:
        # p = 1 is feasible by definition; fall back to the first function
        witness = fs.functions[0].with_id("witness")
    return lo, witness
