"""Interval halving with a continuously selected pivot.

Classical bisection keeps the half interval whose endpoints straddle the
root, a decision that is discontinuous in the function values.  Here the
kept interval is chosen by a weight

    d_n = clamp_unit(1/2 + f(c_n) / epsilon)

and the next interval is the width-halved window

    a_{n+1} = c_n - d_n (b - a) / 2^n
    b_{n+1} = b_n - d_n (b - a) / 2^n

so ``d_n = 1`` keeps the left half ``[a_n, c_n]``, ``d_n = 0`` keeps the
right half ``[c_n, b_n]``, and intermediate weights slide the window
continuously between those extremes.  The width identity

    b_n - a_n = (b - a) / 2^(n-1)

holds exactly at every step regardless of the weights, which is what the
verifier checks mechanically on exact traces.  The weight map is
1/epsilon-Lipschitz in ``f(c_n)``, so midpoints depend continuously on
the function values; with the classical 0/1 weight (``d_n = 0`` iff
``f(c_n) < 0``) the recurrence reproduces textbook bisection exactly.

Runs record every step into a :class:`Trace`, which serializes to JSONL:
one config line, one line per step, one final line.  Exact scalars are
``num/den`` strings, float scalars are JSON numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

from .funcdsl import FunctionExpr, eval_exact, eval_float
from .numerics import (
    EXACT,
    Scalar,
    ScalarBackend,
    backend_from_name,
    clamp_unit,
)

__all__ = [
    "WeightMode",
    "ProblemConfig",
    "IterationState",
    "StepRecord",
    "Trace",
    "InvalidTolerance",
    "InvalidWeight",
    "SignPreconditionViolated",
    "TraceFormatError",
    "midpoint",
    "interpolation_weight",
    "classical_weight",
    "step",
    "cauchy_bound",
    "run",
    "trace_to_jsonl",
    "trace_from_jsonl",
]


class InvalidTolerance(ValueError):
    """Tolerance must be strictly positive."""


class InvalidWeight(ValueError):
    """Step weights live in [0, 1]."""


class SignPreconditionViolated(ValueError):
    """The endpoints do not satisfy f(a) < 0 < f(b)."""

    def __init__(self, f_a: Scalar, f_b: Scalar):
        self.f_a = f_a
        self.f_b = f_b
        super().__init__(
            f"need f(a) < 0 < f(b), got f(a) = {f_a} and f(b) = {f_b}"
        )


class TraceFormatError(ValueError):
    """The JSONL text is not a trace this module wrote."""


class WeightMode(Enum):
    INTERPOLATED = "interpolated"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class ProblemConfig:
    """One root-bracketing problem: interval, tolerance, and run policy.

    Scalars must already live in ``backend``'s type; the config is the
    single source of truth a trace carries about how it was produced.
    ``stop_early`` ends the run at the first step with |f(c_n)| <
    epsilon instead of running all ``max_steps``.
    """

    a: Scalar
    b: Scalar
    epsilon: Scalar
    max_steps: int = 40
    weight_mode: WeightMode = WeightMode.INTERPOLATED
    backend: ScalarBackend = EXACT
    stop_early: bool = False

    def __post_init__(self) -> None:
        expected = Fraction if self.backend.is_exact else float
        for field in ("a", "b", "epsilon"):
            if not isinstance(getattr(self, field), expected):
                raise TypeError(
                    f"{field} must be {expected.__name__} under the "
                    f"{self.backend.name} backend, got {getattr(self, field)!r}"
                )
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a = {self.a}, b = {self.b}")
        if not self.epsilon > 0:
            raise InvalidTolerance(f"epsilon must be positive, got {self.epsilon}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be at least 1, got {self.max_steps}")

    @property
    def original_width(self) -> Scalar:
        return self.b - self.a


@dataclass(frozen=True)
class IterationState:
    """Interval at step ``n``; width is (b - a) / 2^(n-1) by construction."""

    n: int
    a_n: Scalar
    b_n: Scalar

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"step index starts at 1, got {self.n}")
        if not self.a_n < self.b_n:
            raise ValueError(
                f"degenerate interval at step {self.n}: [{self.a_n}, {self.b_n}]"
            )


@dataclass(frozen=True)
class StepRecord:
    """Everything observable about one step."""

    n: int
    a_n: Scalar
    b_n: Scalar
    c_n: Scalar
    f_c_n: Scalar
    d_n: Scalar


@dataclass(frozen=True)
class Trace:
    """A completed run: config, per-step records, and the final estimate.

    ``limit_estimate`` is the last computed midpoint, and
    ``limit_error_bound`` bounds its distance to the sequence's limit:
    |c_m - c_n| <= (b - a) / 2^(m-1) for all n >= m, with equality
    impossible to exceed because later midpoints stay inside the
    current window.  ``stopped_early_at`` is the step index when the
    early-stop rule fired, else None.
    """

    config: ProblemConfig
    steps: Tuple[StepRecord, ...]
    limit_estimate: Scalar
    limit_error_bound: Scalar
    stopped_early_at: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a trace records at least one step")


def midpoint(state: IterationState) -> Scalar:
    """Midpoint of the current interval."""
    return (state.a_n + state.b_n) / 2


def interpolation_weight(f_c: Scalar, epsilon: Scalar) -> Scalar:
    """``clamp_unit(1/2 + f_c / epsilon)``.

    Saturates to exactly 1 once f_c >= epsilon/2 and to exactly 0 once
    f_c <= -epsilon/2; both saturation points are exact in the float
    backend too, because 0.5 and 1.0 are representable and rounding to
    nearest is monotone.

    Raises:
        InvalidTolerance: if ``epsilon <= 0``.
    """
    if not epsilon > 0:
        raise InvalidTolerance(f"epsilon must be positive, got {epsilon}")
    if isinstance(f_c, float):
        return clamp_unit(0.5 + f_c / epsilon)
    return clamp_unit(Fraction(1, 2) + Fraction(f_c) / Fraction(epsilon))


def classical_weight(f_c: Scalar) -> Scalar:
    """Textbook sign rule as a weight: 0 if f_c < 0, else 1."""
    if isinstance(f_c, float):
        return 0.0 if f_c < 0 else 1.0
    return Fraction(0) if f_c < 0 else Fraction(1)


def step(state: IterationState, d: Scalar, original_width: Scalar) -> IterationState:
    """Advance one step with weight ``d``.

    ``original_width`` is b - a from step 1; threading it explicitly
    keeps the shift (b - a) / 2^n independent of any accumulated
    endpoint error in the float backend.

    Raises:
        InvalidWeight: if ``d`` is outside [0, 1].
    """
    if not (0 <= d <= 1):
        raise InvalidWeight(f"weight must lie in [0, 1], got {d}")
    c = midpoint(state)
    shift = d * original_width / 2**state.n
    return IterationState(state.n + 1, c - shift, state.b_n - shift)


def cauchy_bound(m: int, original_width: Scalar) -> Scalar:
    """Bound on |c_k - c_m| for every k >= m: (b - a) / 2^(m-1).

    All midpoints from step m onward lie in the step-m window, whose
    width is exactly this value.

    Raises:
        ValueError: if ``m < 1``.
    """
    if m < 1:
        raise ValueError(f"step index starts at 1, got {m}")
    return original_width / 2 ** (m - 1)


def run(config: ProblemConfig, f: FunctionExpr) -> Trace:
    """Run the iteration, checking the sign precondition first.

    Evaluates f with the backend the config names, so an exact run is
    rounding-free end to end.

    Raises:
        SignPreconditionViolated: unless f(a) < 0 < f(b) in backend
            arithmetic.
        EvalError: if f divides by zero at a visited point.
    """
    evaluate: Callable[[FunctionExpr, Scalar], Scalar]
    evaluate = eval_exact if config.backend.is_exact else eval_float
    f_a = evaluate(f, config.a)
    f_b = evaluate(f, config.b)
    if not (f_a < 0 and f_b > 0):
        raise SignPreconditionViolated(f_a, f_b)

    width = config.original_width
    state = IterationState(1, config.a, config.b)
    records = []
    stopped_at: Optional[int] = None
    for n in range(1, config.max_steps + 1):
        c = midpoint(state)
        f_c = evaluate(f, c)
        if config.weight_mode is WeightMode.INTERPOLATED:
            d = interpolation_weight(f_c, config.epsilon)
        else:
            d = classical_weight(f_c)
        records.append(StepRecord(n, state.a_n, state.b_n, c, f_c, d))
        if config.stop_early and abs(f_c) < config.epsilon:
            stopped_at = n
            break
        if n < config.max_steps:
            state = step(state, d, width)

    last = records[-1]
    return Trace(
        config=config,
        steps=tuple(records),
        limit_estimate=last.c_n,
        limit_error_bound=cauchy_bound(last.n, width),
        stopped_early_at=stopped_at,
    )


# ---------------------------------------------------------------------------
# JSONL trace format

def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_to_jsonl(trace: Trace) -> str:
    """Serialize: config line, one line per step, final line.

    Exact scalars become ``num/den`` strings, float scalars JSON
    numbers; the output is deterministic byte for byte.
    """
    backend = trace.config.backend
    config = trace.config
    head = {
        "a": backend.to_json(config.a),
        "b": backend.to_json(config.b),
        "epsilon": backend.to_json(config.epsilon),
        "backend": backend.name,
        "mode": config.weight_mode.value,
        "max_steps": config.max_steps,
    }
    if config.stop_early:
        head["stop_early"] = True
    lines = [_dump(head)]
    for rec in trace.steps:
        lines.append(
            _dump(
                {
                    "n": rec.n,
                    "a_n": backend.to_json(rec.a_n),
                    "b_n": backend.to_json(rec.b_n),
                    "c_n": backend.to_json(rec.c_n),
                    "f_c_n": backend.to_json(rec.f_c_n),
                    "d_n": backend.to_json(rec.d_n),
                }
            )
        )
    tail = {
        "limit_estimate": backend.to_json(trace.limit_estimate),
        "limit_error_bound": backend.to_json(trace.limit_error_bound),
    }
    if trace.stopped_early_at is not None:
        tail["stopped_early_at"] = trace.stopped_early_at
    lines.append(_dump(tail))
    return "\n".join(lines) + "\n"


def _parse_line(text: str, what: str, lineno: int) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"line {lineno}: not JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise TraceFormatError(f"line {lineno}: expected a JSON object for {what}")
    return obj


def _take(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise TraceFormatError(f"line {lineno}: missing key {key!r}")
    return obj[key]


def trace_from_jsonl(text: str) -> Trace:
    """Parse a trace serialized by :func:`trace_to_jsonl`.

    Raises:
        TraceFormatError: on any structural problem: bad JSON, missing
            keys, wrong scalar encodings, or non-consecutive step
            indices.
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 3:
        raise TraceFormatError(
            "a trace needs a config line, at least one step line, and a final line"
        )

    head = _parse_line(lines[0], "the config", 1)
    try:
        backend = backend_from_name(_take(head, "backend", 1))
        mode = WeightMode(_take(head, "mode", 1))
    except ValueError as exc:
        raise TraceFormatError(f"line 1: {exc}") from exc
    try:
        config = ProblemConfig(
            a=backend.from_json(_take(head, "a", 1)),
            b=backend.from_json(_take(head, "b", 1)),
            epsilon=backend.from_json(_take(head, "epsilon", 1)),
            max_steps=_take(head, "max_steps", 1),
            weight_mode=mode,
            backend=backend,
            stop_early=bool(head.get("stop_early", False)),
        )
    except (ValueError, TypeError) as exc:
        raise TraceFormatError(f"line 1: bad config: {exc}") from exc

    records = []
    for lineno, line in enumerate(lines[1:-1], start=2):
        obj = _parse_line(line, "a step", lineno)
        try:
            rec = StepRecord(
                n=_take(obj, "n", lineno),
                a_n=backend.from_json(_take(obj, "a_n", lineno)),
                b_n=backend.from_json(_take(obj, "b_n", lineno)),
                c_n=backend.from_json(_take(obj, "c_n", lineno)),
                f_c_n=backend.from_json(_take(obj, "f_c_n", lineno)),
                d_n=backend.from_json(_take(obj, "d_n", lineno)),
            )
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: bad step: {exc}") from exc
        if rec.n != lineno - 1:
            raise TraceFormatError(
                f"line {lineno}: step index {rec.n} out of order (expected {lineno - 1})"
            )
        records.append(rec)

    lineno = len(lines)
    tail = _parse_line(lines[-1], "the final line", lineno)
    stopped = tail.get("stopped_early_at")
    if stopped is not None and (not isinstance(stopped, int) or isinstance(stopped, bool)):
        raise TraceFormatError(f"line {lineno}: stopped_early_at must be an integer")
    try:
        return Trace(
            config=config,
            steps=tuple(records),
            limit_estimate=backend.from_json(_take(tail, "limit_estimate", lineno)),
            limit_error_bound=backend.from_json(_take(tail, "limit_error_bound", lineno)),
            stopped_early_at=stopped,
        )
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: bad final line: {exc}") from exc
