"""Shared fixtures: spectral setups are expensive in double-double, so they are built once."""

from __future__ import annotations

import time

import pytest

from hardybound import experiments
from hardybound.continuation import eps_grid
from hardybound.geometry import CurveSpec

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def setup_h1_n80():
    return experiments.setup(CurveSpec.segment(-1, 1, 1.0), 80, "dd")


@pytest.fixture(scope="session")
def setup_h1_n120():
    t0 = time.perf_counter()
    su = experiments.setup(CurveSpec.segment(-1, 1, 1.0), 120, "dd")
    return su, time.perf_counter() - t0


@pytest.fixture(scope="session")
def powerlaw_h05():
    """Criterion-9 runs: h = 0.5, z ∈ {1.5, 2, 3} + 0.5i, 4 points per decade on [1e-12, 1e-3]."""
    t0 = time.perf_counter()
    su = experiments.setup(CurveSpec.segment(-1, 1, 0.5), 80, "dd")
    grid = eps_grid(1e-12, 1e-3, 4)
    runs = [experiments.powerlaw_study(su, complex(x, 0.5), grid) for x in (1.5, 2.0, 3.0)]
    return su, runs, time.perf_counter() - t0
