"""Minimal-width spanning tubes over sets of piecewise-linear functions.

Compute the narrowest continuous template whose vertical band of half-width
epsilon meets at least p of n given x-monotone polylines at every time, plus
the symbolic-melody preprocessing that produces such polyline sets from note
transcriptions, and a corpus analyzer reporting enclosure fractions.
"""

from .bruteforce import GridSpec, grid_decide, grid_optimize, scan_optimize
from .decision import Cell, DecisionOutcome, SweepResult, decide, extract_witness, sweep
from .fast32 import optimize_3_2
from .melody import (
    AlignmentResult,
    AlignScoring,
    Note,
    Phrase,
    PitchHistogram,
    Transcription,
    align,
    apply_alignment,
    estimate_key_shift,
    load_corpus,
    normalize_time,
    pitch_histogram,
    prepare_corpus,
    save_corpus,
    to_polyfunc,
    transpose,
)
from .optimizer import (
    CandidateRank,
    CandidateValue,
    TubeSolution,
    candidates,
    max_coverage,
    optimize,
)
from .polyline import (
    DomainError,
    EventPoint,
    FunctionSet,
    PolyFunc,
    ValidationError,
    clip,
    enumerate_events,
    envelopes,
    evaluate,
    load_function_set,
    save_function_set,
    tolerance,
)
from .svgplot import render_tube_svg

__version__ = "0.1.0"

__all__ = [
    "AlignScoring",
    "AlignmentResult",
    "CandidateRank",
    "CandidateValue",
    "Cell",
    "DecisionOutcome",
    "DomainError",
    "EventPoint",
    "FunctionSet",
    "GridSpec",
    "Note",
    "Phrase",
    "PitchHistogram",
    "PolyFunc",
    "SweepResult",
    "Transcription",
    "TubeSolution",
    "ValidationError",
    "align",
    "apply_alignment",
    "candidates",
    "clip",
    "decide",
    "enumerate_events",
    "envelopes",
    "estimate_key_shift",
    "evaluate",
    "extract_witness",
    "grid_decide",
    "grid_optimize",
    "load_corpus",
    "load_function_set",
    "max_coverage",
    "normalize_time",
    "optimize",
    "optimize_3_2",
    "pitch_histogram",
    "prepare_corpus",
    "render_tube_svg",
    "save_corpus",
    "save_function_set",
    "scan_optimize",
    "sweep",
    "to_polyfunc",
    "tolerance",
    "transpose",
]
