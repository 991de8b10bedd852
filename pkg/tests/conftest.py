"""Shared fixtures and oracles for the test suite."""

from __future__ import annotations

from decimal import Decimal

import numpy as np
import pytest

from triarb.market_data import Direction, Pair, SeriesWindow, TriangleSpec
from triarb.rate_product import RateProductSeries

# Monday 1970-01-05; keeps weekday-filtered grids simple.
MONDAY = 4 * 86400


def make_series(
    gammas, start: int = MONDAY, direction: Direction = Direction.DIR1, times=None
) -> RateProductSeries:
    g = np.asarray(gammas, dtype=np.float64)
    t = np.asarray(times, dtype=np.int64) if times is not None else np.arange(
        start, start + g.size, dtype=np.int64
    )
    return RateProductSeries(direction, t, g)


def brute_force_segments(times, gammas):
    """Independent scan oracle: (start, run_length, initial, peak) per run."""
    runs = []
    start = length = init = peak = None
    prev_t = None
    for t, g in zip(times, gammas):
        if g > 1.0:
            if start is not None and prev_t == t - 1:
                length += 1
                if g > peak:
                    peak = g
            else:
                if start is not None:
                    runs.append((int(start), length, init, peak))
                start, length, init, peak = t, 1, g, g
        elif start is not None:
            runs.append((int(start), length, init, peak))
            start = None
        prev_t = t
    if start is not None:
        runs.append((int(start), length, init, peak))
    return runs


@pytest.fixture
def chf_triangle() -> TriangleSpec:
    return TriangleSpec.from_currencies("EUR", "USD", "CHF")


@pytest.fixture
def fine_chf_triangle() -> TriangleSpec:
    """CHF triangle with a fine point grid so injections can hit tight targets."""
    spec = TriangleSpec.from_currencies("EUR", "USD", "CHF")
    pairs = tuple(Pair(p.base, p.quote, Decimal("0.00001")) for p in spec.pairs)
    return TriangleSpec(currencies=spec.currencies, pairs=pairs)


@pytest.fixture
def weekday_window() -> SeriesWindow:
    return SeriesWindow(MONDAY, MONDAY + 3600, frozenset({0, 1, 2, 3, 4}))


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE {outcome}] {name}")
