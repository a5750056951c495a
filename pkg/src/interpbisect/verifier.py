"""Mechanical checks on exact traces.

The central claim about the iteration is a per-step disjunction: at
every step m, either some midpoint already seen is an approximate root
(|f(c_j)| < epsilon for some j <= m), or the current endpoints straddle
(f(a_m) < 0 < f(b_m)).  On an exact trace every instance is decidable,
so :func:`check_claim` re-evaluates the function at recorded points and
classifies each step with no tolerance anywhere.  A trace produced by
the float backend is refused outright: rounded comparisons can neither
confirm nor refute the claim.

Two further checks are independent of the iteration: a continuity
budget that certifies the hypotheses |x - c_m| < delta routinely used
with a modulus of continuity, and a brute-force grid search that finds
approximate roots with no reference to the iteration at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .core import Trace, cauchy_bound
from .funcdsl import FunctionExpr, eval_exact
from .numerics import format_rational

__all__ = [
    "BackendNotExact",
    "WitnessFound",
    "SignsStraddle",
    "Violation",
    "ClaimOutcome",
    "WitnessKind",
    "WitnessCertificate",
    "ContinuityBudget",
    "check_claim",
    "extract_witness",
    "continuity_budget_check",
    "grid_oracle",
    "report_to_json",
]


class BackendNotExact(ValueError):
    """Raised when a check that needs exact arithmetic gets a float trace."""


@dataclass(frozen=True)
class WitnessFound:
    """Some midpoint up to this step is an approximate root."""

    j: int
    value: Fraction  # f(c_j), re-evaluated, |value| < epsilon


@dataclass(frozen=True)
class SignsStraddle:
    """The step's endpoints bracket a sign change: f(a_m) < 0 < f(b_m)."""

    f_a_m: Fraction
    f_b_m: Fraction


@dataclass(frozen=True)
class Violation:
    """Neither disjunct holds; the trace does not come from this iteration."""

    detail: str


ClaimCase = Union[WitnessFound, SignsStraddle, Violation]


@dataclass(frozen=True)
class ClaimOutcome:
    m: int
    case: ClaimCase


class WitnessKind(Enum):
    # An approximate root can be certified three ways: a recorded
    # midpoint, the run's limit estimate, or a grid point found with no
    # iteration at all.
    MIDPOINT = "midpoint"
    LIMIT = "limit"
    GRID = "grid"


@dataclass(frozen=True)
class WitnessCertificate:
    """A point together with its re-evaluated function value.

    For MIDPOINT and GRID certificates |f_x| < epsilon holds by
    construction; ``index`` is the step or grid index.  A LIMIT
    certificate carries no such guarantee, it names the candidate the
    run converged toward.
    """

    kind: WitnessKind
    x: Fraction
    f_x: Fraction
    index: Optional[int] = None


@dataclass(frozen=True)
class ContinuityBudget:
    """Exact comparisons backing a delta-based continuity argument.

    ``limit_gap_ok``: (b - a) / 2^(m-1) < delta / 2, a certified
    stand-in for |limit - c_m| (the true gap is at most this width).
    ``halfwidth_ok``: (b - a) / 2^m < delta / 2, so every point of the
    step-(m+1) window is within delta/2 of c_m.  Both being true places
    the limit and the window within delta of each other around c_m.
    """

    delta: Fraction
    m: int
    limit_gap_ok: bool
    halfwidth_ok: bool

    @property
    def passed(self) -> bool:
        return self.limit_gap_ok and self.halfwidth_ok


def _require_exact(trace: Trace) -> None:
    if not trace.config.backend.is_exact:
        raise BackendNotExact(
            "claim checking needs exact arithmetic; this trace was "
            f"computed under the {trace.config.backend.name} backend"
        )


def check_claim(trace: Trace, f: FunctionExpr) -> List[ClaimOutcome]:
    """Classify every step of an exact trace against the disjunction.

    The function is re-evaluated at the recorded points (midpoints for
    the witness disjunct, endpoints for the straddle disjunct), so a
    trace with tampered f-values still verifies against the function
    itself.  The witness case wins when both disjuncts hold.

    Raises:
        BackendNotExact: for float traces.
    """
    _require_exact(trace)
    epsilon = Fraction(trace.config.epsilon)
    outcomes: List[ClaimOutcome] = []
    witness: Optional[WitnessFound] = None
    for rec in trace.steps:
        if witness is None:
            f_c = eval_exact(f, rec.c_n)
            if abs(f_c) < epsilon:
                witness = WitnessFound(j=rec.n, value=f_c)
        if witness is not None:
            outcomes.append(ClaimOutcome(m=rec.n, case=witness))
            continue
        f_a = eval_exact(f, rec.a_n)
        f_b = eval_exact(f, rec.b_n)
        if f_a < 0 < f_b:
            outcomes.append(ClaimOutcome(m=rec.n, case=SignsStraddle(f_a, f_b)))
        else:
            outcomes.append(
                ClaimOutcome(
                    m=rec.n,
                    case=Violation(
                        f"step {rec.n}: no midpoint witness up to here and "
                        f"f({format_rational(rec.a_n)}) = {format_rational(f_a)}, "
                        f"f({format_rational(rec.b_n)}) = {format_rational(f_b)} "
                        "do not straddle"
                    ),
                )
            )
    return outcomes


def extract_witness(trace: Trace, f: FunctionExpr) -> WitnessCertificate:
    """Earliest midpoint witness, else the limit estimate as a candidate.

    Raises:
        BackendNotExact: for float traces.
    """
    _require_exact(trace)
    epsilon = Fraction(trace.config.epsilon)
    for rec in trace.steps:
        f_c = eval_exact(f, rec.c_n)
        if abs(f_c) < epsilon:
            return WitnessCertificate(
                kind=WitnessKind.MIDPOINT, x=rec.c_n, f_x=f_c, index=rec.n
            )
    x = Fraction(trace.limit_estimate)
    return WitnessCertificate(kind=WitnessKind.LIMIT, x=x, f_x=eval_exact(f, x))


def continuity_budget_check(trace: Trace, delta: Fraction, m: int) -> ContinuityBudget:
    """Compare the step-m window against delta/2, exactly.

    Raises:
        BackendNotExact: for float traces.
        ValueError: if ``delta <= 0`` or ``m`` is not a recorded step.
    """
    _require_exact(trace)
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not 1 <= m <= len(trace.steps):
        raise ValueError(
            f"m = {m} is not a recorded step (trace has {len(trace.steps)})"
        )
    width = Fraction(trace.config.original_width)
    half_delta = delta / 2
    return ContinuityBudget(
        delta=delta,
        m=m,
        limit_gap_ok=cauchy_bound(m, width) < half_delta,
        halfwidth_ok=width / 2**m < half_delta,
    )


def grid_oracle(
    f: FunctionExpr,
    a: Fraction,
    b: Fraction,
    epsilon: Fraction,
    grid_n: int,
) -> Optional[WitnessCertificate]:
    """Scan a + k(b - a)/grid_n for k = 0..grid_n, exactly.

    Returns the first grid point with |f| < epsilon as a GRID
    certificate, or None when the whole grid misses.  Independent of
    the iteration: grid points are exact rationals, so agreement with
    a run's witness is evidence, not circularity.

    Raises:
        ValueError: unless a < b, epsilon > 0, and grid_n >= 1.
    """
    a, b, epsilon = Fraction(a), Fraction(b), Fraction(epsilon)
    if not a < b:
        raise ValueError(f"need a < b, got a = {a}, b = {b}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if grid_n < 1:
        raise ValueError(f"grid_n must be at least 1, got {grid_n}")
    width = b - a
    for k in range(grid_n + 1):
        x = a + Fraction(k, grid_n) * width
        f_x = eval_exact(f, x)
        if abs(f_x) < epsilon:
            return WitnessCertificate(kind=WitnessKind.GRID, x=x, f_x=f_x, index=k)
    return None


# ---------------------------------------------------------------------------
# JSON report (consumed by the CLI's verify subcommand)

def _case_to_json(case: ClaimCase) -> dict:
    if isinstance(case, WitnessFound):
        return {
            "case": "witness",
            "j": case.j,
            "value": format_rational(case.value),
        }
    if isinstance(case, SignsStraddle):
        return {
            "case": "straddle",
            "f_a_m": format_rational(case.f_a_m),
            "f_b_m": format_rational(case.f_b_m),
        }
    return {"case": "violation", "detail": case.detail}


def _witness_to_json(cert: WitnessCertificate) -> dict:
    out = {
        "kind": cert.kind.value,
        "x": format_rational(cert.x),
        "f_x": format_rational(cert.f_x),
    }
    if cert.index is not None:
        out["index"] = cert.index
    return out


def report_to_json(
    trace: Trace,
    outcomes: List[ClaimOutcome],
    witness: WitnessCertificate,
    budget: Optional[ContinuityBudget] = None,
) -> dict:
    """Bundle verification results into one JSON-serializable report."""
    violations = sum(1 for o in outcomes if isinstance(o.case, Violation))
    report = {
        "steps": len(trace.steps),
        "epsilon": format_rational(Fraction(trace.config.epsilon)),
        "mode": trace.config.weight_mode.value,
        "claim": [
            {"m": o.m, **_case_to_json(o.case)} for o in outcomes
        ],
        "witness": _witness_to_json(witness),
        "violations": violations,
        "claim_holds": violations == 0,
    }
    if budget is not None:
        report["continuity_budget"] = {
            "delta": format_rational(budget.delta),
            "m": budget.m,
            "limit_gap_within_half_delta": budget.limit_gap_ok,
            "halfwidth_within_half_delta": budget.halfwidth_ok,
            "passed": budget.passed,
        }
    return report
