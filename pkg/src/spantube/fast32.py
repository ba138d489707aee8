"""Linear-time optimizer for three functions with coverage two.

Between consecutive arrangement events the top/middle/bottom roles of the
three functions are fixed, and an optimal tube only ever switches between
covering the top pair and covering the bottom pair at an event, realized
with two trapezoids whose shared vertical covers all three values.  A
two-state dynamic program over the events therefore finds the optimum in
time linear in the event count.

States track the best achievable tube WIDTH (twice the half-width) that
reaches each event while covering the top pair (state 1) or the bottom
pair (state 2); the final half-width halves the smaller of the two.
"""

from __future__ import annotations

import numpy as np

from .optimizer import TubeSolution
from .polyline import (
    FunctionSet,
    PolyFunc,
    _dedupe_sorted,
    pair_crossing_xs,
    tolerance,
)

_STAY = 0
_SWITCH = 1


def _event_xs(fs: FunctionSet, tol: float) -> np.ndarray:
    funcs = fs.functions
    parts = [f.xs for f in funcs]
    for i in range(3):
        for j in range(i + 1, 3):
            parts.append(pair_crossing_xs(funcs[i], funcs[j], 0.0, tol))
    xs = _dedupe_sorted(np.sort(np.concatenate(parts)), tol)
    a, b = fs.domain
    xs = xs[(xs >= a - tol) & (xs <= b + tol)]
    xs[0], xs[-1] = a, b
    return xs


def optimize_3_2(fs: FunctionSet, tol: float | None = None) -> TubeSolution:
    """Optimal half-width and witness for n = 3, p = 2, in linear time."""
    if len(fs.functions) != 3:
        raise ValueError(f"this solver requires exactly 3 functions, got {len(fs.functions)}")
    tol = tolerance(tol)

    xs = _event_xs(fs, tol)
    vals = np.sort(fs.values_at(xs), axis=0)
    bot, mid, top = vals[0], vals[1], vals[2]
    gap_top = top - mid     # width of the top pair's interval at each event
    gap_bot = mid - bot     # width of the bottom pair's interval
    span = top - bot        # full spread

    t = len(xs)
    best_top = float(gap_top[0])
    best_bot = float(gap_bot[0])
    moves_top = np.empty(t, dtype=np.int8)
    moves_bot = np.empty(t, dtype=np.int8)
    for k in range(1, t):
        switch_cost = min(span[k - 1], span[k])
        stay = max(best_top, gap_top[k])
        cross = max(best_bot, switch_cost, gap_top[k])
        if stay <= cross:
            new_top, moves_top[k] = stay, _STAY
        else:
            new_top, moves_top[k] = cross, _SWITCH
        stay = max(best_bot, gap_bot[k])
        cross = max(best_top, switch_cost, gap_bot[k])
        if stay <= cross:
            new_bot, moves_bot[k] = stay, _STAY
        else:
            new_bot, moves_bot[k] = cross, _SWITCH
        best_top, best_bot = new_top, new_bot

    width = min(best_top, best_bot)

    # backtrack the covered-pair state at every event
    states = np.empty(t, dtype=np.int8)  # 1 = top pair, 2 = bottom pair
    states[-1] = 1 if best_top <= best_bot else 2
    for k in range(t - 1, 0, -1):
        moved = moves_top[k] if states[k] == 1 else moves_bot[k]
        states[k - 1] = states[k] if moved == _STAY else (3 - states[k])

    # a switch in slab (k-1, k) is placed at whichever end has smaller spread
    covers_all = np.zeros(t, dtype=bool)
    for k in range(1, t):
        if states[k] != states[k - 1]:
            at = k - 1 if span[k - 1] <= span[k] else k
            covers_all[at] = True

    ys = np.where(states == 1, 0.5 * (top + mid), 0.5 * (mid + bot))
    ys = np.where(covers_all, 0.5 * (top + bot), ys)
    witness = PolyFunc(tuple(zip(xs, ys)), "witness")
    return TubeSolution(float(width / 2.0), witness, 2)
