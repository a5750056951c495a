"""Command line front end: run, compare, verify, plot.

Exit codes are part of the contract: 0 on success, 2 for usage errors
(bad flags, unparsable functions, malformed trace files, float traces
handed to the verifier), 3 when the endpoint signs refuse a run, and 4
when verification finds a claim violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .core import (
    ProblemConfig,
    SignPreconditionViolated,
    Trace,
    TraceFormatError,
    WeightMode,
    run,
    trace_from_jsonl,
    trace_to_jsonl,
)
from .funcdsl import EvalError, FunctionExpr, ParseError, eval_exact, eval_float, parse, to_text
from .numerics import backend_from_name, parse_rational
from .verifier import (
    BackendNotExact,
    Violation,
    check_claim,
    continuity_budget_check,
    extract_witness,
    report_to_json,
)

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_SIGN",
    "EXIT_CLAIM",
    "PlotError",
    "PlotSpec",
    "render_trace_svg",
    "build_parser",
    "main",
]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SIGN = 3
EXIT_CLAIM = 4


class PlotError(ValueError):
    """The plot request cannot produce a well-formed figure."""


# ---------------------------------------------------------------------------
# SVG rendering

@dataclass(frozen=True)
class PlotSpec:
    """What to draw and how; everything has a deterministic default.

    Ranges are floats because rendering is presentation only: exact
    scalars convert at the last moment.  ``x_range``/``y_range`` of
    None means derive them from the trace interval and the sampled
    curve.
    """

    function: FunctionExpr
    trace: Trace
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None
    samples: int = 512
    width: int = 720
    height: int = 480
    margin: Tuple[int, int, int, int] = (28, 30, 46, 64)  # top right bottom left
    curve_color: str = "#153a6b"
    dot_color: str = "#1a1a1a"
    square_color: str = "#8a1f1f"
    epsilon_color: str = "#666666"
    dot_radius: float = 3.0
    square_half: float = 4.5


def _px(v: float) -> str:
    return f"{v:.3f}"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def render_trace_svg(spec: PlotSpec) -> str:
    """Render the function curve, midpoint dots, and the limit square.

    Dots are filled circles at (c_n, f(c_n)) from the trace records;
    the final estimate is an open square at (limit, f(limit)).  Every
    marker carries data-x / data-y attributes in the backend's text
    form, so the numbers can be read back from the file exactly.  A
    dotted horizontal line marks the tolerance at +epsilon.  Output is
    deterministic byte for byte.

    Raises:
        PlotError: on fewer than 2 samples or an empty/degenerate range.
    """
    if spec.samples < 2:
        raise PlotError(f"need at least 2 curve samples, got {spec.samples}")
    trace = spec.trace
    backend = trace.config.backend
    f = spec.function

    if spec.x_range is not None:
        x_lo, x_hi = (float(spec.x_range[0]), float(spec.x_range[1]))
    else:
        x_lo, x_hi = float(trace.config.a), float(trace.config.b)
    if not (math.isfinite(x_lo) and math.isfinite(x_hi)) or x_lo >= x_hi:
        raise PlotError(f"degenerate x range [{x_lo}, {x_hi}]")

    xs = [x_lo + i * (x_hi - x_lo) / (spec.samples - 1) for i in range(spec.samples)]
    curve: List[Tuple[float, Optional[float]]] = []
    for x in xs:
        try:
            y = eval_float(f, x)
        except EvalError:
            y = None
        curve.append((x, y if y is not None and math.isfinite(y) else None))

    dots = [(rec.n, rec.c_n, rec.f_c_n) for rec in trace.steps]
    limit = trace.limit_estimate
    if backend.is_exact:
        f_limit = eval_exact(f, limit)
    else:
        f_limit = eval_float(f, limit)
    epsilon = trace.config.epsilon

    if spec.y_range is not None:
        y_lo, y_hi = (float(spec.y_range[0]), float(spec.y_range[1]))
    else:
        candidates = [y for _, y in curve if y is not None]
        candidates += [float(v) for _, _, v in dots]
        candidates += [float(f_limit), float(epsilon), 0.0]
        lo, hi = min(candidates), max(candidates)
        pad = 0.08 * (hi - lo) if hi > lo else 1.0
        y_lo, y_hi = lo - pad, hi + pad
    if not (math.isfinite(y_lo) and math.isfinite(y_hi)) or y_lo >= y_hi:
        raise PlotError(f"degenerate y range [{y_lo}, {y_hi}]")

    top, right, bottom, left = spec.margin
    plot_w = spec.width - left - right
    plot_h = spec.height - top - bottom

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return top + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts: List[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">'
    )
    parts.append(f"<desc>{_escape(to_text(f))}</desc>")
    parts.append(
        '<defs><clipPath id="plot-area">'
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}"/>'
        "</clipPath></defs>"
    )
    parts.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        'fill="white" stroke="#999999" stroke-width="1"/>'
    )

    # Zero axes and unit ticks, drawn only where they fall inside the frame.
    tick = 4.0
    if y_lo < 0 < y_hi:
        y0 = py(0.0)
        parts.append(
            f'<line x1="{left}" y1="{_px(y0)}" x2="{left + plot_w}" y2="{_px(y0)}" '
            'stroke="#bbbbbb" stroke-width="1"/>'
        )
        for xv in (-1.0, 1.0):
            if x_lo < xv < x_hi:
                xp = px(xv)
                parts.append(
                    f'<line x1="{_px(xp)}" y1="{_px(y0 - tick)}" x2="{_px(xp)}" '
                    f'y2="{_px(y0 + tick)}" stroke="#555555" stroke-width="1"/>'
                )
                parts.append(
                    f'<text x="{_px(xp)}" y="{_px(y0 + 16)}" font-size="11" '
                    f'text-anchor="middle" fill="#555555">{int(xv)}</text>'
                )
    if x_lo < 0 < x_hi:
        x0 = px(0.0)
        parts.append(
            f'<line x1="{_px(x0)}" y1="{top}" x2="{_px(x0)}" y2="{top + plot_h}" '
            'stroke="#bbbbbb" stroke-width="1"/>'
        )
        for yv in (-1.0, 1.0):
            if y_lo < yv < y_hi:
                yp = py(yv)
                parts.append(
                    f'<line x1="{_px(x0 - tick)}" y1="{_px(yp)}" x2="{_px(x0 + tick)}" '
                    f'y2="{_px(yp)}" stroke="#555555" stroke-width="1"/>'
                )
                parts.append(
                    f'<text x="{_px(x0 - 7)}" y="{_px(yp + 4)}" font-size="11" '
                    f'text-anchor="end" fill="#555555">{int(yv)}</text>'
                )

    eps_f = float(epsilon)
    if y_lo < eps_f < y_hi:
        ye = py(eps_f)
        parts.append(
            f'<line x1="{left}" y1="{_px(ye)}" x2="{left + plot_w}" y2="{_px(ye)}" '
            f'stroke="{spec.epsilon_color}" stroke-width="1" stroke-dasharray="2,4"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 6}" y="{_px(ye - 5)}" font-size="11" '
            f'text-anchor="end" fill="{spec.epsilon_color}">'
            f"ε = {_escape(backend.format(epsilon))}</text>"
        )

    segments: List[List[str]] = []
    current: List[str] = []
    for x, y in curve:
        if y is None:
            if current:
                segments.append(current)
                current = []
            continue
        cmd = "L" if current else "M"
        current.append(f"{cmd}{_px(px(x))},{_px(py(y))}")
    if current:
        segments.append(current)
    if segments:
        path = " ".join(" ".join(seg) for seg in segments)
        parts.append(
            f'<path d="{path}" fill="none" stroke="{spec.curve_color}" '
            'stroke-width="1.5" clip-path="url(#plot-area)"/>'
        )

    for n, c_n, f_c_n in dots:
        parts.append(
            f'<circle class="midpoint-dot" cx="{_px(px(float(c_n)))}" '
            f'cy="{_px(py(float(f_c_n)))}" r="{spec.dot_radius}" '
            f'fill="{spec.dot_color}" data-step="{n}" '
            f'data-x="{_escape(backend.format(c_n))}" '
            f'data-y="{_escape(backend.format(f_c_n))}"/>'
        )

    half = spec.square_half
    parts.append(
        f'<rect class="limit-marker" x="{_px(px(float(limit)) - half)}" '
        f'y="{_px(py(float(f_limit)) - half)}" width="{2 * half}" height="{2 * half}" '
        f'fill="none" stroke="{spec.square_color}" stroke-width="1.5" '
        f'data-x="{_escape(backend.format(limit))}" '
        f'data-y="{_escape(backend.format(f_limit))}"/>'
    )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Flag parsing helpers

def _rational_flag(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int_flag(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _add_problem_flags(sub: argparse.ArgumentParser, with_mode: bool) -> None:
    sub.add_argument("--function", "-f", required=True, help="function expression, e.g. 'min((1+6x^2)/7, 8+9x)'")
    sub.add_argument("--a", required=True, type=_rational_flag, help="left endpoint (rational, e.g. -1 or -3/2)")
    sub.add_argument("--b", required=True, type=_rational_flag, help="right endpoint (rational)")
    sub.add_argument("--epsilon", "-e", required=True, type=_rational_flag, help="tolerance (positive rational)")
    sub.add_argument("--max-steps", type=_positive_int_flag, default=40, help="number of steps (default 40)")
    sub.add_argument(
        "--backend",
        choices=["exact", "float"],
        default="exact",
        help="scalar arithmetic (default exact)",
    )
    if with_mode:
        sub.add_argument(
            "--mode",
            choices=[m.value for m in WeightMode],
            default=WeightMode.INTERPOLATED.value,
            help="weight rule (default interpolated)",
        )
        sub.add_argument(
            "--stop-early",
            action="store_true",
            help="stop at the first step with |f(c_n)| < epsilon",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interpbisect",
        description=(
            "Interval halving with a continuously selected pivot: run it, "
            "compare it against the classical sign rule, verify traces, "
            "plot them."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("run", help="run the iteration and write a JSONL trace")
    _add_problem_flags(sub, with_mode=True)
    sub.add_argument("--out", "-o", type=Path, default=Path("trace.jsonl"), help="trace file (default trace.jsonl)")
    sub.set_defaults(handler=_cmd_run)

    sub = commands.add_parser("compare", help="run both weight rules side by side")
    _add_problem_flags(sub, with_mode=False)
    sub.add_argument("--csv", type=Path, default=None, help="also write a CSV with exact values")
    sub.set_defaults(handler=_cmd_compare)

    sub = commands.add_parser("verify", help="check a trace against the per-step claim")
    sub.add_argument("--trace", "-t", required=True, type=Path, help="JSONL trace file")
    sub.add_argument("--function", "-f", required=True, help="the function the trace claims to have run")
    sub.add_argument("--delta", type=_rational_flag, default=None, help="continuity budget delta (with --m)")
    sub.add_argument("--m", type=_positive_int_flag, default=None, help="step for the continuity budget (with --delta)")
    sub.set_defaults(handler=_cmd_verify)

    sub = commands.add_parser("plot", help="render a trace to SVG")
    sub.add_argument("--trace", "-t", required=True, type=Path, help="JSONL trace file")
    sub.add_argument("--function", "-f", required=True, help="function to draw the curve of")
    sub.add_argument("--out", "-o", type=Path, default=Path("plot.svg"), help="output file (default plot.svg)")
    sub.add_argument("--samples", type=_positive_int_flag, default=512, help="curve samples (default 512)")
    sub.add_argument("--x-min", type=_rational_flag, default=None)
    sub.add_argument("--x-max", type=_rational_flag, default=None)
    sub.add_argument("--y-min", type=_rational_flag, default=None)
    sub.add_argument("--y-max", type=_rational_flag, default=None)
    sub.set_defaults(handler=_cmd_plot)

    return parser


# ---------------------------------------------------------------------------
# Subcommands

def _make_config(args: argparse.Namespace, mode: WeightMode, stop_early: bool) -> ProblemConfig:
    backend = backend_from_name(args.backend)
    return ProblemConfig(
        a=backend.convert(args.a),
        b=backend.convert(args.b),
        epsilon=backend.convert(args.epsilon),
        max_steps=args.max_steps,
        weight_mode=mode,
        backend=backend,
        stop_early=stop_early,
    )


def _first_witness_step(trace: Trace) -> Optional[int]:
    eps = trace.config.epsilon
    for rec in trace.steps:
        if abs(rec.f_c_n) < eps:
            return rec.n
    return None


def _cmd_run(args: argparse.Namespace) -> int:
    f = parse(args.function)
    config = _make_config(args, WeightMode(args.mode), args.stop_early)
    trace = run(config, f)
    args.out.write_text(trace_to_jsonl(trace), encoding="utf-8")

    backend = config.backend
    print(f"function: {to_text(f)}")
    count = len(trace.steps)
    print(f"wrote {count} step{'s' if count != 1 else ''} to {args.out}")
    if trace.stopped_early_at is not None:
        print(f"stopped early at step {trace.stopped_early_at}")
    estimate = trace.limit_estimate
    approx = f" ({float(estimate):.9f})" if backend.is_exact else ""
    print(f"limit estimate: {backend.format(estimate)}{approx}")
    print(f"limit error bound: {backend.format(trace.limit_error_bound)}")
    if backend.is_exact:
        cert = extract_witness(trace, f)
        if cert.kind.value == "midpoint":
            print(
                f"witness: |f(c_{cert.index})| < epsilon at "
                f"c_{cert.index} = {backend.format(cert.x)}, "
                f"f = {backend.format(cert.f_x)}"
            )
        else:
            print(
                f"no midpoint witness within {len(trace.steps)} steps; "
                f"limit candidate x = {backend.format(cert.x)} "
                f"with f(x) = {backend.format(cert.f_x)} ({float(cert.f_x):.9f})"
            )
    else:
        j = _first_witness_step(trace)
        if j is None:
            print(f"no recorded |f(c_n)| < epsilon within {len(trace.steps)} steps")
        else:
            print(f"first recorded |f(c_n)| < epsilon at step {j}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    f = parse(args.function)
    trace_i = run(_make_config(args, WeightMode.INTERPOLATED, False), f)
    trace_c = run(_make_config(args, WeightMode.CLASSICAL, False), f)
    backend = trace_i.config.backend

    print(f"function: {to_text(f)}")
    print(
        f"interval [{backend.format(trace_i.config.a)}, {backend.format(trace_i.config.b)}], "
        f"epsilon = {backend.format(trace_i.config.epsilon)}, "
        f"{args.max_steps} steps, backend {backend.name}"
    )
    header = (
        f"{'n':>4} {'c (interp)':>18} {'f(c) (interp)':>18} "
        f"{'c (classical)':>18} {'f(c) (classical)':>18}"
    )
    print(header)
    print("-" * len(header))
    for rec_i, rec_c in zip(trace_i.steps, trace_c.steps):
        print(
            f"{rec_i.n:>4} {float(rec_i.c_n):>18.9f} {float(rec_i.f_c_n):>18.9f} "
            f"{float(rec_c.c_n):>18.9f} {float(rec_c.f_c_n):>18.9f}"
        )
    for label, trace in (("interpolated", trace_i), ("classical", trace_c)):
        j = _first_witness_step(trace)
        if j is None:
            print(f"{label}: no |f(c_n)| < epsilon within {len(trace.steps)} steps")
        else:
            print(f"{label}: first |f(c_n)| < epsilon at step {j}")

    if args.csv is not None:
        lines = ["n,c_interp,f_interp,d_interp,c_classical,f_classical"]
        for rec_i, rec_c in zip(trace_i.steps, trace_c.steps):
            lines.append(
                ",".join(
                    (
                        str(rec_i.n),
                        backend.format(rec_i.c_n),
                        backend.format(rec_i.f_c_n),
                        backend.format(rec_i.d_n),
                        backend.format(rec_c.c_n),
                        backend.format(rec_c.f_c_n),
                    )
                )
            )
        args.csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote CSV to {args.csv}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    if (args.delta is None) != (args.m is None):
        print("verify: --delta and --m go together", file=sys.stderr)
        return EXIT_USAGE
    text = args.trace.read_text(encoding="utf-8")
    trace = trace_from_jsonl(text)
    f = parse(args.function)
    outcomes = check_claim(trace, f)
    witness = extract_witness(trace, f)
    budget = None
    if args.delta is not None:
        budget = continuity_budget_check(trace, args.delta, args.m)
    report = report_to_json(trace, outcomes, witness, budget)
    print(json.dumps(report, indent=2))
    violated = [o.m for o in outcomes if isinstance(o.case, Violation)]
    if violated:
        print(
            f"claim violated at step{'s' if len(violated) > 1 else ''} "
            f"{', '.join(map(str, violated))}",
            file=sys.stderr,
        )
        return EXIT_CLAIM
    return EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    text = args.trace.read_text(encoding="utf-8")
    trace = trace_from_jsonl(text)
    f = parse(args.function)
    x_range = None
    if (args.x_min is None) != (args.x_max is None):
        print("plot: --x-min and --x-max go together", file=sys.stderr)
        return EXIT_USAGE
    if (args.y_min is None) != (args.y_max is None):
        print("plot: --y-min and --y-max go together", file=sys.stderr)
        return EXIT_USAGE
    if args.x_min is not None:
        x_range = (float(args.x_min), float(args.x_max))
    y_range = None
    if args.y_min is not None:
        y_range = (float(args.y_min), float(args.y_max))
    spec = PlotSpec(
        function=f,
        trace=trace,
        x_range=x_range,
        y_range=y_range,
        samples=args.samples,
    )
    args.out.write_text(render_trace_svg(spec), encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"function syntax: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SignPreconditionViolated as exc:
        print(f"run refused: {exc}", file=sys.stderr)
        return EXIT_SIGN
    except (TraceFormatError, BackendNotExact) as exc:
        print(f"trace: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EvalError as exc:
        print(f"evaluation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
