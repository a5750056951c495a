"""Shared fixtures: the sample problem and the random corpus with traces.

Corpus traces are built once per session and timed; the acceptance test
that carries a wall-clock budget folds the recorded build time into its
own measurement so fixture caching cannot hide cost.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import pytest

from interpbisect import ProblemConfig, Trace, WeightMode, parse, run
from reference import SAMPLE_A, SAMPLE_B, SAMPLE_TEXT, CorpusFunction, make_corpus

CORPUS_SEED = 20260819
CORPUS_SIZE = 100
CORPUS_STEPS = 30
CORPUS_EPSILON = Fraction(1, 3)

# One line per acceptance criterion, echoed after the test summary so the
# verdicts are visible without -s.
ACCEPTANCE_LINES: List[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


@dataclass(frozen=True)
class CorpusBundle:
    """Corpus functions with 30-step exact traces in both weight modes."""

    functions: List[CorpusFunction]
    interpolated: List[Trace]
    classical: List[Trace]
    epsilon: Fraction
    build_seconds: float


@pytest.fixture(scope="session")
def sample_fn():
    return parse(SAMPLE_TEXT)


@pytest.fixture(scope="session")
def sample_trace_third(sample_fn) -> Trace:
    """40 exact interpolated steps of the sample problem at epsilon = 1/3."""
    config = ProblemConfig(a=SAMPLE_A, b=SAMPLE_B, epsilon=Fraction(1, 3))
    return run(config, sample_fn)


@pytest.fixture(scope="session")
def sample_trace_half(sample_fn) -> Trace:
    """40 exact interpolated steps of the sample problem at epsilon = 1/2."""
    config = ProblemConfig(a=SAMPLE_A, b=SAMPLE_B, epsilon=Fraction(1, 2))
    return run(config, sample_fn)


@pytest.fixture(scope="session")
def corpus_bundle() -> CorpusBundle:
    start = time.perf_counter()
    functions = make_corpus(CORPUS_SEED, CORPUS_SIZE, steps=CORPUS_STEPS)
    interpolated = []
    classical = []
    for fn in functions:
        base = dict(a=fn.a, b=fn.b, epsilon=CORPUS_EPSILON, max_steps=CORPUS_STEPS)
        interpolated.append(run(ProblemConfig(**base), fn.expr))
        classical.append(
            run(ProblemConfig(**base, weight_mode=WeightMode.CLASSICAL), fn.expr)
        )
    return CorpusBundle(
        functions=functions,
        interpolated=interpolated,
        classical=classical,
        epsilon=CORPUS_EPSILON,
        build_seconds=time.perf_counter() - start,
    )
