"""Deterministic SVG rendering of a tube over its input curves.

Pure string assembly with fixed styling and fixed-precision coordinates, so
the same inputs always produce byte-identical output.
"""

from __future__ import annotations

import numpy as np

from .polyline import FunctionSet, PolyFunc

_WIDTH, _HEIGHT = 880, 520
_ML, _MR, _MT, _MB = 70, 24, 44, 56

_BAND_FILL = "#f2c14e"
_INPUT_STROKE = "#4a6fa5"
_WITNESS_STROKE = "#b0413e"


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_tube_svg(fs: FunctionSet, witness: PolyFunc, epsilon: float, p: int) -> str:
    """SVG with thin input polylines, the thick witness, and the tube band."""
    a, b = fs.domain
    data_min = min(float(f.ys.min()) for f in fs.functions)
    data_max = max(float(f.ys.max()) for f in fs.functions)
    data_min = min(data_min, float(witness.ys.min()) - epsilon)
    data_max = max(data_max, float(witness.ys.max()) + epsilon)
    y_lo, y_hi = data_min - 2.0, data_max + 2.0  # two semitones of padding

    px_w = _WIDTH - _ML - _MR
    px_h = _HEIGHT - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - a) / (b - a) * px_w

    def sy(y: float) -> float:
        return _HEIGHT - _MB - (y - y_lo) / (y_hi - y_lo) * px_h

    def path_points(xs: np.ndarray, ys: np.ndarray) -> str:
        return " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{_WIDTH // 2}" y="26" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">spanning tube (epsilon={epsilon:g}, p={p})</text>',
    ]

    # shaded band: witness + eps forward, witness - eps backward
    fwd = path_points(witness.xs, witness.ys + epsilon)
    bwd = path_points(witness.xs[::-1], witness.ys[::-1] - epsilon)
    parts.append(
        f'<polygon points="{fwd} {bwd}" fill="{_BAND_FILL}" fill-opacity="0.45" '
        'stroke="none"/>'
    )

    # axes
    x0, y0 = _ML, _HEIGHT - _MB
    parts.append(
        f'<line x1="{x0}" y1="{_MT}" x2="{x0}" y2="{y0}" stroke="#222222" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{_WIDTH - _MR}" y2="{y0}" '
        'stroke="#222222" stroke-width="1"/>'
    )
    for tx in np.linspace(a, b, 5):
        px = sx(tx)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 5}" '
            'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 20}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle">{tx:.2f}</text>'
        )
    for ty in np.linspace(y_lo, y_hi, 6):
        py = sy(ty)
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" '
            'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 9}" y="{_fmt(py + 4)}" font-family="sans-serif" '
            f'font-size="12" text-anchor="end">{ty:.1f}</text>'
        )
    parts.append(
        f'<text x="{_ML + px_w / 2:.1f}" y="{_HEIGHT - 14}" font-family="sans-serif" '
        'font-size="14" text-anchor="middle">relative time</text>'
    )
    parts.append(
        f'<text x="18" y="{_MT + px_h / 2:.1f}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 18 {_MT + px_h / 2:.1f})">MIDI pitch</text>'
    )

    for f in fs.functions:
        parts.append(
            f'<polyline points="{path_points(f.xs, f.ys)}" fill="none" '
            f'stroke="{_INPUT_STROKE}" stroke-width="1" stroke-opacity="0.75"/>'
        )
    parts.append(
        f'<polyline points="{path_points(witness.xs, witness.ys)}" fill="none" '
        f'stroke="{_WITNESS_STROKE}" stroke-width="2.5"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
