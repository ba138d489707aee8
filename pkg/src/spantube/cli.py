"""Command-line surface: solve, prepare, analyze, plot.

Exit codes across all commands: 0 for success or a feasible answer, 1 for a
well-posed negative answer (infeasible width), 2 for input or usage errors.
The coincidence tolerance can be overridden with SPANTUBE_TOLERANCE.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from pathlib import Path

from .decision import decide
from .fast32 import optimize_3_2
from .melody import (
    AlignScoring,
    Transcription,
    load_corpus,
    prepare_corpus,
)
from .optimizer import max_coverage, optimize
from .polyline import (
    FunctionSet,
    ValidationError,
    clip,
    function_set_from_dict,
    function_set_to_dict,
    load_function_set,
    save_function_set,
)
from .svgplot import render_tube_svg

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


def _witness_points(witness) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in witness.points]


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _scoring(args: argparse.Namespace) -> AlignScoring:
    return AlignScoring(gap_penalty=-abs(args.nw_gap), mismatch_scale=args.nw_sub_scale)


def _resolve_ref(args: argparse.Namespace, transcriptions: list[Transcription],
                 style: str) -> str:
    ids = sorted(t.id for t in transcriptions)
    if args.ref:
        if args.ref not in ids:
            raise ValidationError(f"reference id '{args.ref}' not in style '{style}'")
        return args.ref
    if args.seed is not None:
        return random.Random((args.seed, style)).choice(ids)
    raise ValidationError(
        "a reference transcription is required: pass --ref, or --seed for a "
        "seeded random choice"
    )


def _cmd_decide(args: argparse.Namespace) -> int:
    fs = load_function_set(args.input)
    outcome = decide(fs, args.epsilon, args.p)
    payload: dict = {"feasible": outcome.feasible}
    if outcome.feasible:
        payload["witness"] = _witness_points(outcome.witness)
    _emit(payload, args.out)
    return EXIT_OK if outcome.feasible else EXIT_NEGATIVE


def _cmd_optimize(args: argparse.Namespace) -> int:
    fs = load_function_set(args.input)
    if args.fast_3_2:
        if len(fs.functions) != 3 or args.p != 2:
            raise ValidationError("--fast-3-2 requires exactly 3 functions and --p 2")
        solution = optimize_3_2(fs)
    else:
        solution = optimize(fs, args.p)
    _emit(
        {"epsilonStar": solution.epsilon_star, "witness": _witness_points(solution.witness)},
        args.out,
    )
    return EXIT_OK


def _cmd_coverage(args: argparse.Namespace) -> int:
    fs = load_function_set(args.input)
    p_star, witness = max_coverage(fs, args.epsilon)
    _emit(
        {
            "pStar": p_star,
            "fraction": round(p_star / len(fs.functions), 3),
            "witness": _witness_points(witness),
        },
        args.out,
    )
    return EXIT_OK


def _cmd_prepare(args: argparse.Namespace) -> int:
    style, transcriptions = load_corpus(args.input)
    ref_id = _resolve_ref(args, transcriptions, style)
    fs = prepare_corpus(transcriptions, ref_id, mode=args.mode, scoring=_scoring(args))
    if args.out:
        save_function_set(fs, args.out)
    else:
        json.dump(function_set_to_dict(fs), sys.stdout)
        print()
    return EXIT_OK


def _load_analysis_inputs(path: str) -> list[tuple[str, object]]:
    """Styles to analyze: (style, FunctionSet) or (style, [Transcription])."""
    p = Path(path)
    entries: list[tuple[str, object]] = []
    if p.is_dir():
        files = sorted(p.glob("*.json"))
        if not files:
            raise ValidationError(f"no JSON files found in {p}")
        loose: list[Transcription] = []
        loose_style = ""
        for fname in files:
            data = json.loads(fname.read_text())
            if isinstance(data, dict) and "functions" in data:
                entries.append((fname.stem, function_set_from_dict(data)))
            elif isinstance(data, dict) and "transcriptions" in data:
                style, ts = load_corpus(fname)
                entries.append((style or fname.stem, ts))
            else:
                from .melody import transcription_from_dict

                t = transcription_from_dict(data)
                loose.append(t)
                loose_style = t.style or loose_style
        if loose:
            entries.append((loose_style or p.name, loose))
        return entries
    data = json.loads(p.read_text())
    if isinstance(data, dict) and "functions" in data:
        return [(p.stem, function_set_from_dict(data))]
    style, ts = load_corpus(p)
    return [(style or p.stem, ts)]


def _fractions_for(fs: FunctionSet, eps_values: list[float]) -> list[float]:
    n = len(fs.functions)
    fractions = [max_coverage(fs, eps)[0] / n for eps in eps_values]
    for prev, cur in zip(fractions, fractions[1:]):
        if cur < prev:
            raise RuntimeError(
                "internal error: coverage fraction decreased with a wider tube"
            )
    return fractions


def _cmd_analyze(args: argparse.Namespace) -> int:
    eps_values = sorted(args.epsilon)
    entries = _load_analysis_inputs(args.input)
    if args.ref and len(entries) > 1:
        raise ValidationError("--ref applies only to a single-style corpus; use --seed")
    decimals = 1 if args.paper_precision else 3

    rows: list[list[str]] = []
    for style, payload in sorted(entries, key=lambda e: e[0]):
        if isinstance(payload, FunctionSet):
            if args.per_phrase:
                raise ValidationError(
                    f"style '{style}': prepared function sets carry no phrase "
                    "annotations; analyze the raw corpus instead"
                )
            fs = payload
            ref_phrases = None
        else:
            transcriptions = payload
            ref_id = _resolve_ref(args, transcriptions, style)
            if args.per_phrase:
                missing = [t.id for t in transcriptions if not t.phrases]
                if missing:
                    raise ValidationError(
                        f"style '{style}': missing phrase annotations on "
                        f"{', '.join(missing)}"
                    )
            fs = prepare_corpus(transcriptions, ref_id, mode=args.mode,
                                scoring=_scoring(args))
            ref_phrases = next(t for t in transcriptions if t.id == ref_id).phrases
        if args.per_phrase:
            for phrase in ref_phrases:
                sub = clip(fs, phrase.start, phrase.end)
                fractions = _fractions_for(sub, eps_values)
                rows.append([style, phrase.label] + [f"{v:.{decimals}f}" for v in fractions])
        else:
            fractions = _fractions_for(fs, eps_values)
            rows.append([style] + [f"{v:.{decimals}f}" for v in fractions])

    header = ["style"] + (["phrase"] if args.per_phrase else [])
    header += [f"eps_{v:g}" for v in eps_values]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    fs = load_function_set(args.input)
    if args.p is not None:
        outcome = decide(fs, args.epsilon, args.p)
        if not outcome.feasible:
            print(
                f"no tube of half-width {args.epsilon} covers {args.p} functions",
                file=sys.stderr,
            )
            return EXIT_NEGATIVE
        witness, p = outcome.witness, args.p
    else:
        p, witness = max_coverage(fs, args.epsilon)
    svg = render_tube_svg(fs, witness, args.epsilon, p)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _add_common(sp: argparse.ArgumentParser, *, out_help: str) -> None:
    sp.add_argument("--input", "-i", required=True, help="input file or directory")
    sp.add_argument("--out", "-o", default=None, help=out_help)


def _add_pipeline_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--ref", default=None, help="reference transcription id")
    sp.add_argument("--seed", type=int, default=None,
                    help="seed for a random reference choice when --ref is absent")
    sp.add_argument("--mode", choices=("step", "linear"), default="step",
                    help="note-to-curve conversion mode")
    sp.add_argument("--nw-gap", type=float, default=2.0,
                    help="alignment gap penalty magnitude")
    sp.add_argument("--nw-sub-scale", type=float, default=1.0,
                    help="alignment substitution scale per semitone")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spantube",
        description="Minimal-width spanning tubes over piecewise-linear melody curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decide", help="test feasibility at a fixed half-width")
    _add_common(sp, out_help="write the JSON result here instead of stdout")
    sp.add_argument("--epsilon", "-e", type=float, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=_cmd_decide)

    sp = sub.add_parser("optimize", help="compute the minimal half-width")
    _add_common(sp, out_help="write the JSON result here instead of stdout")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--fast-3-2", action="store_true",
                    help="use the linear-time path (requires n=3 and p=2)")
    sp.set_defaults(func=_cmd_optimize)

    sp = sub.add_parser("coverage", help="largest coverage at a fixed half-width")
    _add_common(sp, out_help="write the JSON result here instead of stdout")
    sp.add_argument("--epsilon", "-e", type=float, required=True)
    sp.set_defaults(func=_cmd_coverage)

    sp = sub.add_parser("prepare", help="turn a corpus into a function set")
    _add_common(sp, out_help="output function set JSON file")
    _add_pipeline_options(sp)
    sp.set_defaults(func=_cmd_prepare)

    sp = sub.add_parser("analyze", help="enclosure fractions per style (CSV)")
    _add_common(sp, out_help="output CSV file instead of stdout")
    sp.add_argument("--epsilon", "-e", type=float, action="append", required=True,
                    help="half-width; repeat for several columns")
    sp.add_argument("--per-phrase", action="store_true",
                    help="clip to each phrase and re-solve")
    sp.add_argument("--paper-precision", action="store_true",
                    help="print fractions with one decimal")
    _add_pipeline_options(sp)
    sp.set_defaults(func=_cmd_analyze)

    sp = sub.add_parser("plot", help="render the tube as an SVG")
    _add_common(sp, out_help="output SVG file instead of stdout")
    sp.add_argument("--epsilon", "-e", type=float, required=True)
    sp.add_argument("--p", type=int, default=None,
                    help="coverage target; omitted means plot the maximum coverage")
    sp.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches our contract
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ValidationError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
