"""Symbolic-melody preprocessing: from note lists to aligned polylines.

A transcription is a list of (onset, duration, MIDI pitch) notes with
optional phrase annotations.  The pipeline normalizes time to [0, 1],
normalizes key by pitch-histogram correlation against a reference,
temporally aligns each transcription to the reference with global sequence
alignment (unmatched notes get interpolated onsets), and converts each
result to a piecewise-linear pitch curve on the shared domain.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .polyline import FunctionSet, PolyFunc, ValidationError, tolerance

logger = logging.getLogger(__name__)

# minimum spacing enforced between remapped onsets
ONSET_GAP = 1e-6


@dataclass(frozen=True)
class Note:
    """A note event: onset and duration in seconds, MIDI pitch."""

    onset: float
    duration: float
    pitch: float

    def __post_init__(self) -> None:
        if not self.onset >= 0:
            raise ValidationError(f"note onset must be >= 0, got {self.onset}")
        if not self.duration > 0:
            raise ValidationError(f"note duration must be > 0, got {self.duration}")
        if not 0 <= self.pitch <= 127:
            raise ValidationError(f"pitch {self.pitch} outside MIDI range [0, 127]")


@dataclass(frozen=True)
class Phrase:
    """A phrase interval in relative [0, 1] time."""

    start: float
    end: float
    label: str


@dataclass(frozen=True)
class Transcription:
    """A labeled performance: sorted notes plus optional phrase markers."""

    id: str
    style: str
    notes: tuple[Note, ...]
    phrases: tuple[Phrase, ...] | None = None

    def __post_init__(self) -> None:
        if not self.notes:
            raise ValidationError(f"transcription '{self.id}' has no notes")
        tol = tolerance()
        onsets = [n.onset for n in self.notes]
        for k in range(1, len(onsets)):
            if onsets[k] - onsets[k - 1] <= tol:
                raise ValidationError(
                    f"transcription '{self.id}': onsets not strictly increasing "
                    f"at note {k}"
                )
        if self.phrases is not None:
            prev_end = 0.0
            for k, ph in enumerate(self.phrases):
                if not (0.0 <= ph.start < ph.end <= 1.0):
                    raise ValidationError(
                        f"transcription '{self.id}': phrase {k} interval "
                        f"[{ph.start}, {ph.end}] invalid"
                    )
                if ph.start < prev_end - tol:
                    raise ValidationError(
                        f"transcription '{self.id}': phrase {k} overlaps its predecessor"
                    )
                prev_end = ph.end

    def onsets(self) -> np.ndarray:
        return np.array([n.onset for n in self.notes])

    def pitches(self) -> np.ndarray:
        return np.array([n.pitch for n in self.notes])


@dataclass(frozen=True)
class PitchHistogram:
    """Counts of occurrences per rounded MIDI pitch."""

    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class AlignScoring:
    """Alignment scoring: substitution = -mismatch_scale * |pitch difference|."""

    gap_penalty: float = -2.0
    mismatch_scale: float = 1.0


@dataclass(frozen=True)
class AlignmentResult:
    """A monotone matching of target notes onto reference notes.

    matched_pairs are (target index, reference index), strictly increasing
    in both coordinates; gaps are the unmatched target indices; every target
    note appears exactly once across the two.
    """

    matched_pairs: tuple[tuple[int, int], ...]
    gaps: tuple[int, ...]
    remapped_onsets: tuple[float, ...]


def normalize_time(t: Transcription) -> Transcription:
    """Affinely map onsets so the first is 0 and the last is 1.

    Durations are rescaled by the same factor.  Idempotent.
    """
    if len(t.notes) < 2:
        raise ValueError(
            f"transcription '{t.id}' has a single note; relative time is degenerate"
        )
    first = t.notes[0].onset
    last = t.notes[-1].onset
    scale = 1.0 / (last - first)
    notes = tuple(
        Note((n.onset - first) * scale, n.duration * scale, n.pitch) for n in t.notes
    )
    return Transcription(t.id, t.style, notes, t.phrases)


def pitch_histogram(t: Transcription) -> PitchHistogram:
    """Unweighted counts per rounded pitch (one increment per note)."""
    return PitchHistogram(dict(Counter(int(round(n.pitch)) for n in t.notes)))


def transpose(t: Transcription, semitones: int) -> Transcription:
    """Shift every pitch by an integer number of semitones."""
    notes = tuple(Note(n.onset, n.duration, n.pitch + semitones) for n in t.notes)
    return Transcription(t.id, t.style, notes, t.phrases)


def _pearson(u: np.ndarray, v: np.ndarray) -> float:
    du = u - u.mean()
    dv = v - v.mean()
    denom = np.sqrt((du * du).sum() * (dv * dv).sum())
    if denom == 0:
        return 0.0
    return float((du * dv).sum() / denom)


def _histogram_mode(counts: dict[int, int]) -> int:
    # most frequent pitch, ties to the lowest pitch
    return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def estimate_key_shift(t: Transcription, ref: Transcription, max_shift: int = 24) -> int:
    """Integer semitone shift for t that best matches ref's pitch histogram.

    The Pearson correlation is taken over the union of the two histogram
    supports, zero-filled, with one guard bin on each side; ties prefer the
    smallest magnitude, then the smaller shift.  A single-pitch histogram
    cannot be correlated, so that case falls back to aligning the modal
    pitches.
    """
    if max_shift < 0:
        raise ValueError("max_shift must be >= 0")
    ht = pitch_histogram(t).counts
    hr = pitch_histogram(ref).counts
    if len(ht) < 2 or len(hr) < 2:
        shift = _histogram_mode(hr) - _histogram_mode(ht)
        shift = int(np.clip(shift, -max_shift, max_shift))
        logger.warning(
            "degenerate single-pitch histogram; falling back to mode alignment "
            "(shift %+d)", shift,
        )
        return shift
    best_key: tuple[float, int, int] | None = None
    best_shift = 0
    for s in range(-max_shift, max_shift + 1):
        keys = sorted({k + s for k in ht} | set(hr))
        support = range(keys[0] - 1, keys[-1] + 2)
        u = np.array([ht.get(k - s, 0) for k in support], dtype=float)
        v = np.array([hr.get(k, 0) for k in support], dtype=float)
        key = (_pearson(u, v), -abs(s), -s)
        if best_key is None or key > best_key:
            best_key, best_shift = key, s
    return best_shift


def _traceback(pointer: np.ndarray, nt: int, nr: int) -> tuple[list[tuple[int, int]], list[int]]:
    matched: list[tuple[int, int]] = []
    gaps: list[int] = []
    i, j = nt, nr
    while i > 0 or j > 0:
        move = pointer[i, j]
        if move == 0:
            matched.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif move == 1:
            gaps.append(i - 1)
            i -= 1
        else:
            j -= 1
    matched.reverse()
    gaps.reverse()
    return matched, gaps


def align(target: Transcription, reference: Transcription,
          scoring: AlignScoring | None = None) -> AlignmentResult:
    """Globally align target notes to reference notes and remap onsets.

    Matched target notes adopt the reference note's relative onset.
    Unmatched notes between two matches are placed by linear interpolation
    proportional to their original inter-onset position; unmatched notes
    outside the matched span extend the identity map from the nearest match,
    clamped to [0, 1].  The remapped onsets are strictly increasing.

    Both transcriptions are expected to be time- and key-normalized.
    """
    sc = scoring or AlignScoring()
    tp = target.pitches()
    rp = reference.pitches()
    to = target.onsets()
    ro = reference.onsets()
    nt, nr = len(tp), len(rp)

    sub = -sc.mismatch_scale * np.abs(tp[:, None] - rp[None, :])
    score = np.zeros((nt + 1, nr + 1))
    pointer = np.zeros((nt + 1, nr + 1), dtype=np.int8)  # 0 diag, 1 up, 2 left
    score[1:, 0] = sc.gap_penalty * np.arange(1, nt + 1)
    score[0, 1:] = sc.gap_penalty * np.arange(1, nr + 1)
    pointer[1:, 0] = 1
    pointer[0, 1:] = 2
    for i in range(1, nt + 1):
        for j in range(1, nr + 1):
            diag = score[i - 1, j - 1] + sub[i - 1, j - 1]
            up = score[i - 1, j] + sc.gap_penalty
            left = score[i, j - 1] + sc.gap_penalty
            if diag >= up and diag >= left:
                score[i, j] = diag
            elif up >= left:
                score[i, j], pointer[i, j] = up, 1
            else:
                score[i, j], pointer[i, j] = left, 2

    matched, gaps = _traceback(pointer, nt, nr)

    remapped = np.array(to, dtype=float)
    if matched:
        anchors_t = np.array([m[0] for m in matched])
        for ti, ri in matched:
            remapped[ti] = ro[ri]
        first_t, last_t = anchors_t[0], anchors_t[-1]
        for i in range(first_t):
            remapped[i] = remapped[first_t] + (to[i] - to[first_t])
        for i in range(last_t + 1, nt):
            remapped[i] = remapped[last_t] + (to[i] - to[last_t])
        for a, bnd in zip(anchors_t[:-1], anchors_t[1:]):
            if bnd - a > 1:
                frac = (to[a + 1:bnd] - to[a]) / (to[bnd] - to[a])
                remapped[a + 1:bnd] = remapped[a] + frac * (remapped[bnd] - remapped[a])
    np.clip(remapped, 0.0, 1.0, out=remapped)
    for i in range(1, nt):
        if remapped[i] < remapped[i - 1] + ONSET_GAP:
            remapped[i] = remapped[i - 1] + ONSET_GAP
    remapped[-1] = min(remapped[-1], 1.0)
    for i in range(nt - 2, -1, -1):
        if remapped[i] > remapped[i + 1] - ONSET_GAP:
            remapped[i] = remapped[i + 1] - ONSET_GAP

    return AlignmentResult(
        tuple(matched), tuple(gaps), tuple(float(x) for x in remapped)
    )


def apply_alignment(t: Transcription, result: AlignmentResult) -> Transcription:
    """Transcription with onsets replaced by the alignment's remapped onsets."""
    notes = tuple(
        Note(x, n.duration, n.pitch) for x, n in zip(result.remapped_onsets, t.notes)
    )
    return Transcription(t.id, t.style, notes, t.phrases)


def to_polyfunc(t: Transcription, mode: str = "step",
                ramp_fraction: float = 0.01) -> PolyFunc:
    """Convert a time-normalized transcription to a pitch curve on [0, 1].

    Step mode holds each pitch from its onset to the next onset, realizing
    the jump as a steep ramp of width ramp_fraction times the median
    inter-onset gap, ending at the next onset; the final pitch holds to
    x = 1.  Linear mode is the polyline through (onset, pitch).  Both modes
    extend the first/last pitch flat to the domain ends.
    """
    if mode not in ("step", "linear"):
        raise ValueError(f"unknown conversion mode '{mode}'")
    onsets = t.onsets()
    pitches = t.pitches()
    tol = tolerance()
    pts: list[tuple[float, float]] = []
    if len(onsets) == 1:
        return PolyFunc(((0.0, float(pitches[0])), (1.0, float(pitches[0]))), t.id)

    if mode == "linear":
        if onsets[0] > tol:
            pts.append((0.0, float(pitches[0])))
        pts.extend((float(x), float(y)) for x, y in zip(onsets, pitches))
        if onsets[-1] < 1.0 - tol:
            pts.append((1.0, float(pitches[-1])))
        return PolyFunc(tuple(pts), t.id)

    ramp = ramp_fraction * float(np.median(np.diff(onsets)))
    if onsets[0] > tol:
        pts.append((0.0, float(pitches[0])))
    pts.append((float(onsets[0]), float(pitches[0])))
    for k in range(1, len(onsets)):
        if abs(pitches[k] - pitches[k - 1]) > tol:
            # hold the previous pitch until the ramp start, never earlier
            # than just after the previous onset
            start = max(onsets[k] - ramp, onsets[k - 1] + 0.25 * (onsets[k] - onsets[k - 1]))
            if start > onsets[k - 1] + tol and start < onsets[k] - tol:
                pts.append((float(start), float(pitches[k - 1])))
        pts.append((float(onsets[k]), float(pitches[k])))
    if onsets[-1] < 1.0 - tol:
        pts.append((1.0, float(pitches[-1])))
    return PolyFunc(tuple(pts), t.id)


def prepare_corpus(transcriptions: Sequence[Transcription], ref_id: str,
                   mode: str = "step", scoring: AlignScoring | None = None,
                   max_shift: int = 24, ramp_fraction: float = 0.01) -> FunctionSet:
    """Full pipeline: normalize, key-shift, align to the reference, convert.

    All transcriptions must share one style and the reference id must be
    present.  The result is a function set on [0, 1] with one curve per
    transcription, in input order.
    """
    ids = [t.id for t in transcriptions]
    if ref_id not in ids:
        raise ValueError(f"reference id '{ref_id}' not found in corpus")
    styles = {t.style for t in transcriptions}
    if len(styles) > 1:
        raise ValidationError(f"corpus mixes styles: {sorted(styles)}")
    normed = {t.id: normalize_time(t) for t in transcriptions}
    ref = normed[ref_id]
    funcs = []
    for t in transcriptions:
        cur = normed[t.id]
        if t.id != ref_id:
            shift = estimate_key_shift(cur, ref, max_shift)
            if shift:
                cur = transpose(cur, shift)
            cur = apply_alignment(cur, align(cur, ref, scoring))
        funcs.append(to_polyfunc(cur, mode, ramp_fraction))
    return FunctionSet(tuple(funcs), (0.0, 1.0))


# ---------------------------------------------------------------------------
# Corpus JSON:
#   {"style": "...", "transcriptions": [
#       {"id": "...", "notes": [[onset_s, duration_s, pitch], ...],
#        "phrases": [[start, end, "label"], ...]}, ...]}
# or a directory of one-transcription-per-file JSON objects with the same
# per-transcription shape plus a "style" key.  Phrase times are relative
# [0, 1] units (post-normalization).
# ---------------------------------------------------------------------------

def transcription_from_dict(data: dict, style: str | None = None) -> Transcription:
    if not isinstance(data, dict):
        raise ValidationError("transcription entry is not an object")
    tid = str(data.get("id", ""))
    if not tid:
        raise ValidationError("transcription missing 'id'")
    notes_raw = data.get("notes")
    if not isinstance(notes_raw, list) or not notes_raw:
        raise ValidationError(f"transcription '{tid}': missing 'notes' list")
    try:
        notes = tuple(Note(float(o), float(d), float(p)) for o, d, p in notes_raw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"transcription '{tid}': malformed note entry: {exc}") from None
    phrases = None
    if data.get("phrases") is not None:
        try:
            phrases = tuple(
                Phrase(float(s), float(e), str(lab)) for s, e, lab in data["phrases"]
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"transcription '{tid}': malformed phrase entry: {exc}") from None
    return Transcription(tid, str(data.get("style", style or "")), notes, phrases)


def transcription_to_dict(t: Transcription) -> dict:
    out: dict = {
        "id": t.id,
        "notes": [[n.onset, n.duration, n.pitch] for n in t.notes],
    }
    if t.phrases is not None:
        out["phrases"] = [[p.start, p.end, p.label] for p in t.phrases]
    return out


def corpus_to_dict(style: str, transcriptions: Iterable[Transcription]) -> dict:
    return {
        "style": style,
        "transcriptions": [transcription_to_dict(t) for t in transcriptions],
    }


def load_corpus(path: str | Path) -> tuple[str, list[Transcription]]:
    """Load a corpus file or a directory of per-transcription files."""
    p = Path(path)
    if p.is_dir():
        transcriptions = []
        style = ""
        for fname in sorted(p.glob("*.json")):
            with open(fname) as fh:
                try:
                    data = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"{fname}: malformed JSON: {exc}") from None
            t = transcription_from_dict(data)
            style = t.style or style
            transcriptions.append(t)
        if not transcriptions:
            raise ValidationError(f"no transcription files found in {p}")
        return style, transcriptions
    with open(p) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{p}: malformed JSON: {exc}") from None
    if not isinstance(data, dict) or "transcriptions" not in data:
        raise ValidationError(f"{p}: not a corpus document (missing 'transcriptions')")
    style = str(data.get("style", ""))
    transcriptions = [transcription_from_dict(d, style) for d in data["transcriptions"]]
    if not transcriptions:
        raise ValidationError(f"{p}: empty corpus")
    return style, transcriptions


def save_corpus(style: str, transcriptions: Iterable[Transcription],
                path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(corpus_to_dict(style, transcriptions), fh)
        fh.write("\n")
