"""Monte Carlo trading simulation over rate-product series.

A trade is attempted once per opportunity whose initial rate product exceeds
the trade threshold; it is taken at that initial value. Two fill models are
supported: every trade fills independently with a fixed probability, or
trades on runs of at least `certain_fill_min_run_length` grid seconds fill
with certainty while the rest fill with the configured probability. A filled
trade earns volume * (initial_gamma - 1); an unfilled one loses a fixed
number of basis points of volume.

Per-run random streams are spawned from the config seed with numpy's
SeedSequence, so runs are reproducible and independent of execution order.
All simulated sweeps over the fill probability share one uniform draw per
trade per run (common random numbers), which keeps profit monotone in the
fill probability within a run and makes zero crossings well defined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import UndefinedBreakEvenError
from .opportunity import ArbitrageOpportunity, segment_opportunities
from .rate_product import RateProductSeries

BP = 1e-4
LEGS_PER_TRANSACTION = 3
DEFAULT_P_GRID_POINTS = 101


class Scenario(Enum):
    FIXED_FILL = "fixed"
    DURATION_FILL = "duration"


@dataclass(frozen=True)
class SimulationConfig:
    gamma_t: float = 1.0
    scenario: Scenario = Scenario.FIXED_FILL
    fill_prob: float = 1.0
    loss_bp: float = 1.5
    volume: float = 1_000_000.0
    runs: int = 100
    seed: int = 0
    fee_per_trade: float = 0.0
    # Runs at least this long (grid seconds) fill with certainty under
    # DURATION_FILL; a one-second label means the opportunity lasted under
    # a second, hence the default of 2.
    certain_fill_min_run_length: int = 2

    def __post_init__(self):
        if not 0.0 <= self.fill_prob <= 1.0:
            raise ValueError(f"fill_prob must be in [0, 1], got {self.fill_prob}")
        if self.loss_bp < 0:
            raise ValueError(f"loss_bp must be >= 0, got {self.loss_bp}")
        if self.volume <= 0:
            raise ValueError(f"volume must be positive, got {self.volume}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.gamma_t < 1.0:
            raise ValueError(f"gamma_t must be >= 1, got {self.gamma_t}")
        if self.fee_per_trade < 0:
            raise ValueError(f"fee_per_trade must be >= 0, got {self.fee_per_trade}")
        if self.certain_fill_min_run_length < 1:
            raise ValueError("certain_fill_min_run_length must be >= 1")


@dataclass(frozen=True)
class TradeOutcome:
    opportunity: ArbitrageOpportunity
    filled: bool
    pnl: float


@dataclass(frozen=True)
class SimulationResult:
    total_profit: float       # mean over runs
    total_profit_std: float   # sample std over runs
    mean_profit_per_trade_bp: float
    trades_attempted: int
    trades_filled_mean: float
    run_totals: np.ndarray


@dataclass(frozen=True)
class BreakEvenResult:
    analytic_p: float
    simulated_p: float
    simulated_p_std: float
    analytic_clamped: bool = False


@dataclass(frozen=True)
class ProfitSurface:
    p_grid: np.ndarray
    lambda_grid_bp: np.ndarray
    mean_profit_bp: np.ndarray          # shape (len(p_grid), len(lambda_grid_bp))
    breakeven_contour: tuple[tuple[float, float], ...]  # (lambda_bp, p) rows; p is NaN if unreachable


@dataclass(frozen=True)
class MaxVolumeResult:
    max_stake: Optional[float]
    unbounded: bool
    gamma: float
    profit_cap: Optional[float]


def select_trades(series: RateProductSeries, gamma_t: float) -> list[ArbitrageOpportunity]:
    """One trade per opportunity whose initial rate product strictly exceeds gamma_t."""
    if gamma_t < 1.0:
        raise ValueError(f"gamma_t must be >= 1, got {gamma_t}")
    return filter_trades(segment_opportunities(series), gamma_t)


def filter_trades(
    ops: Sequence[ArbitrageOpportunity], gamma_t: float
) -> list[ArbitrageOpportunity]:
    if gamma_t < 1.0:
        raise ValueError(f"gamma_t must be >= 1, got {gamma_t}")
    return [op for op in ops if op.initial_gamma > gamma_t]


def _run_rngs(seed: int, runs: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(runs)
    return [np.random.default_rng(c) for c in children]


def _trade_arrays(trades: Sequence[ArbitrageOpportunity], min_long: int):
    excess = np.array([t.initial_gamma - 1.0 for t in trades], dtype=np.float64)
    long_mask = np.array([t.run_length >= min_long for t in trades], dtype=bool)
    return excess, long_mask


def _fills(u: np.ndarray, cfg: SimulationConfig, long_mask: np.ndarray) -> np.ndarray:
    if cfg.scenario is Scenario.FIXED_FILL:
        return u < cfg.fill_prob
    return long_mask | (u < cfg.fill_prob)


def simulate_trades(
    trades: Sequence[ArbitrageOpportunity], cfg: SimulationConfig
) -> SimulationResult:
    """Monte Carlo fills over an already selected trade list."""
    n = len(trades)
    excess, long_mask = _trade_arrays(trades, cfg.certain_fill_min_run_length)
    loss = cfg.volume * cfg.loss_bp * BP
    fees = n * LEGS_PER_TRANSACTION * cfg.fee_per_trade
    totals = np.empty(cfg.runs, dtype=np.float64)
    filled_counts = np.empty(cfg.runs, dtype=np.float64)
    for r, rng in enumerate(_run_rngs(cfg.seed, cfg.runs)):
        u = rng.random(n)
        filled = _fills(u, cfg, long_mask)
        totals[r] = cfg.volume * excess[filled].sum() - loss * (n - filled.sum()) - fees
        filled_counts[r] = filled.sum()
    # shift by a run total before the moment computation; keeps the std of
    # bit-identical runs (p = 0 or 1) at exactly zero
    std = float((totals - totals[0]).std(ddof=1)) if cfg.runs > 1 else 0.0
    mean_total = float(totals.mean())
    per_trade_bp = mean_total / (n * cfg.volume) / BP if n else 0.0
    return SimulationResult(
        total_profit=mean_total,
        total_profit_std=std,
        mean_profit_per_trade_bp=per_trade_bp,
        trades_attempted=n,
        trades_filled_mean=float(filled_counts.mean()),
        run_totals=totals,
    )


def run_simulation(series: RateProductSeries, cfg: SimulationConfig) -> SimulationResult:
    return simulate_trades(select_trades(series, cfg.gamma_t), cfg)


def replay_run(
    trades: Sequence[ArbitrageOpportunity], cfg: SimulationConfig, run_index: int
) -> list[TradeOutcome]:
    """Reconstruct the per-trade outcomes of one run, bit-identical to simulate_trades."""
    if not 0 <= run_index < cfg.runs:
        raise ValueError(f"run_index {run_index} outside [0, {cfg.runs})")
    _, long_mask = _trade_arrays(trades, cfg.certain_fill_min_run_length)
    rng = _run_rngs(cfg.seed, cfg.runs)[run_index]
    u = rng.random(len(trades))
    filled = _fills(u, cfg, long_mask)
    loss = cfg.volume * cfg.loss_bp * BP
    return [
        TradeOutcome(t, bool(f), cfg.volume * (t.initial_gamma - 1.0) if f else -loss)
        for t, f in zip(trades, filled)
    ]


# ---------------------------------------------------------------------------
# analytic forms


def analytic_total_profit_fixed(
    n_trades: int, volume: float, fill_prob: float, loss_bp: float, mean_excess: float
) -> float:
    """Expected total profit when every trade fills independently with fill_prob."""
    _check_analytic_args(n_trades, volume, fill_prob, loss_bp)
    return n_trades * volume * (fill_prob * mean_excess - (1.0 - fill_prob) * loss_bp * BP)


def analytic_total_profit_duration(
    n_long: int,
    n_short: int,
    volume: float,
    fill_prob: float,
    loss_bp: float,
    mean_excess_long: float,
    mean_excess_short: float,
) -> float:
    """Expected total profit when long runs fill surely and short ones with fill_prob."""
    _check_analytic_args(n_long, volume, fill_prob, loss_bp)
    if n_short < 0:
        raise ValueError(f"counts must be >= 0, got n_short={n_short}")
    certain = n_long * volume * mean_excess_long
    return certain + analytic_total_profit_fixed(
        n_short, volume, fill_prob, loss_bp, mean_excess_short
    )


def analytic_break_even_fixed(mean_excess_bp: float, loss_bp: float) -> float:
    """Fill probability at which the fixed-fill expected profit is zero."""
    if loss_bp <= 0:
        raise ValueError(f"loss_bp must be positive, got {loss_bp}")
    return 1.0 / (1.0 + mean_excess_bp / loss_bp)


def analytic_break_even_duration(
    n_long: int,
    n_short: int,
    mean_excess_long_bp: float,
    mean_excess_short_bp: float,
    loss_bp: float,
) -> tuple[float, bool]:
    """Break-even fill probability for the duration scenario, clamped to [0, 1].

    Returns (p, clamped); clamped is True when the certain long-run profits
    alone cover every possible short-run loss, which drives the raw value
    below zero (or there is no short trade at all).
    """
    if loss_bp <= 0:
        raise ValueError(f"loss_bp must be positive, got {loss_bp}")
    if n_long < 0 or n_short < 0:
        raise ValueError("counts must be >= 0")
    if n_short == 0:
        return 0.0, True
    raw = (1.0 - n_long * mean_excess_long_bp / (n_short * loss_bp)) / (
        1.0 + mean_excess_short_bp / loss_bp
    )
    if raw < 0.0:
        return 0.0, True
    return min(raw, 1.0), False


def _check_analytic_args(count: int, volume: float, fill_prob: float, loss_bp: float) -> None:
    if count < 0:
        raise ValueError(f"counts must be >= 0, got {count}")
    if volume <= 0:
        raise ValueError(f"volume must be positive, got {volume}")
    if not 0.0 <= fill_prob <= 1.0:
        raise ValueError(f"fill_prob must be in [0, 1], got {fill_prob}")
    if loss_bp < 0:
        raise ValueError(f"loss_bp must be >= 0, got {loss_bp}")


# ---------------------------------------------------------------------------
# probability sweeps


def _sorted_fill_curves(
    u: np.ndarray, excess: np.ndarray, p_grid: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """For each p: (sum of excess over trades with u < p, number unfilled)."""
    order = np.argsort(u, kind="stable")
    u_sorted = u[order]
    prefix = np.concatenate(([0.0], np.cumsum(excess[order])))
    k = np.searchsorted(u_sorted, p_grid, side="left")
    return prefix[k], u.size - k


def _scenario_split(excess: np.ndarray, long_mask: np.ndarray, scenario: Scenario):
    """(certain excess sum, random-trade index array) for the scenario."""
    if scenario is Scenario.FIXED_FILL:
        return 0.0, np.arange(excess.size)
    return float(excess[long_mask].sum()), np.flatnonzero(~long_mask)


def profit_surface(
    series: RateProductSeries,
    p_grid: Sequence[float],
    lambda_grid_bp: Sequence[float],
    cfg: SimulationConfig,
) -> ProfitSurface:
    """Mean profit per trade (bp) over a (fill probability, loss) grid.

    Cells share the same per-run uniforms, so each row of the surface is
    monotone in the fill probability; the zero level set is emitted as the
    break-even contour.
    """
    return surface_for_trades(select_trades(series, cfg.gamma_t), p_grid, lambda_grid_bp, cfg)


def surface_for_trades(
    trades: Sequence[ArbitrageOpportunity],
    p_grid: Sequence[float],
    lambda_grid_bp: Sequence[float],
    cfg: SimulationConfig,
) -> ProfitSurface:
    p = np.asarray(p_grid, dtype=np.float64)
    lam_bp = np.asarray(lambda_grid_bp, dtype=np.float64)
    if p.size == 0 or lam_bp.size == 0:
        raise ValueError("probability and loss grids must be non-empty")
    n = len(trades)
    excess, long_mask = _trade_arrays(trades, cfg.certain_fill_min_run_length)
    const_excess, random_idx = _scenario_split(excess, long_mask, cfg.scenario)
    fees = n * LEGS_PER_TRANSACTION * cfg.fee_per_trade

    filled_sum = np.zeros(p.size, dtype=np.float64)
    unfilled = np.zeros(p.size, dtype=np.float64)
    for rng in _run_rngs(cfg.seed, cfg.runs):
        u = rng.random(n)
        fs, nu = _sorted_fill_curves(u[random_idx], excess[random_idx], p)
        filled_sum += fs
        unfilled += nu
    filled_sum /= cfg.runs
    unfilled /= cfg.runs

    # total(p, lam) = V*(const + filled_sum[p]) - V*lam*unfilled[p] - fees
    totals = (
        cfg.volume * (const_excess + filled_sum)[:, None]
        - cfg.volume * (lam_bp * BP)[None, :] * unfilled[:, None]
        - fees
    )
    if n:
        mean_bp = totals / (n * cfg.volume) / BP
    else:
        mean_bp = np.zeros_like(totals)
    contour = tuple(
        (float(lam_bp[j]), _zero_crossing(p, totals[:, j])) for j in range(lam_bp.size)
    )
    return ProfitSurface(p, lam_bp, mean_bp, contour)


def profit_curves_for_trades(
    trades: Sequence[ArbitrageOpportunity], p_grid: Sequence[float], cfg: SimulationConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and std of the total profit across runs at each fill probability.

    One uniform draw per trade per run is shared across the whole sweep.
    """
    p = np.asarray(p_grid, dtype=np.float64)
    excess, long_mask = _trade_arrays(trades, cfg.certain_fill_min_run_length)
    const_excess, random_idx = _scenario_split(excess, long_mask, cfg.scenario)
    fees = len(trades) * LEGS_PER_TRANSACTION * cfg.fee_per_trade
    lam = cfg.volume * cfg.loss_bp * BP
    totals = np.empty((cfg.runs, p.size), dtype=np.float64)
    for r, rng in enumerate(_run_rngs(cfg.seed, cfg.runs)):
        u = rng.random(excess.size)
        fs, nu = _sorted_fill_curves(u[random_idx], excess[random_idx], p)
        totals[r] = cfg.volume * (const_excess + fs) - lam * nu - fees
    std = totals.std(axis=0, ddof=1) if cfg.runs > 1 else np.zeros(p.size)
    return totals.mean(axis=0), std


def _zero_crossing(p_grid: np.ndarray, totals: np.ndarray) -> float:
    """First zero crossing of a nondecreasing profit curve; clamped to [0, 1].

    Returns NaN when the curve never reaches zero on the grid.
    """
    nonneg = np.flatnonzero(totals >= 0.0)
    if nonneg.size == 0:
        return float("nan")
    k = int(nonneg[0])
    if k == 0:
        return float(p_grid[0])
    t0, t1 = totals[k - 1], totals[k]
    p0, p1 = p_grid[k - 1], p_grid[k]
    return float(p0 + (0.0 - t0) * (p1 - p0) / (t1 - t0))


def break_even(
    series: RateProductSeries,
    scenario: Scenario,
    gamma_t: float,
    lambda_bp: float,
    runs: int,
    seed: int,
) -> BreakEvenResult:
    return break_even_for_trades(
        select_trades(series, gamma_t), scenario, lambda_bp, runs, seed
    )


def break_even_for_trades(
    trades: Sequence[ArbitrageOpportunity],
    scenario: Scenario,
    lambda_bp: float,
    runs: int,
    seed: int,
    volume: float = 1_000_000.0,
    certain_fill_min_run_length: int = 2,
) -> BreakEvenResult:
    """Analytic break-even fill probability plus a simulated estimate.

    The simulated estimate sweeps a fixed 101-point probability grid with
    common random numbers per run and linearly interpolates the zero
    crossing of the total profit.
    """
    if lambda_bp <= 0:
        raise ValueError(f"lambda_bp must be positive, got {lambda_bp}")
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not trades:
        raise UndefinedBreakEvenError("no opportunity exceeds the trade threshold")
    excess, long_mask = _trade_arrays(trades, certain_fill_min_run_length)
    excess_bp = excess / BP

    if scenario is Scenario.FIXED_FILL:
        analytic_p = analytic_break_even_fixed(float(excess_bp.mean()), lambda_bp)
        clamped = False
    else:
        n_long = int(long_mask.sum())
        n_short = int(excess.size - n_long)
        mean_long = float(excess_bp[long_mask].mean()) if n_long else 0.0
        mean_short = float(excess_bp[~long_mask].mean()) if n_short else 0.0
        analytic_p, clamped = analytic_break_even_duration(
            n_long, n_short, mean_long, mean_short, lambda_bp
        )

    const_excess, random_idx = _scenario_split(excess, long_mask, scenario)
    p_grid = np.linspace(0.0, 1.0, DEFAULT_P_GRID_POINTS)
    lam_frac = lambda_bp * BP
    estimates = np.empty(runs, dtype=np.float64)
    for r, rng in enumerate(_run_rngs(seed, runs)):
        u = rng.random(excess.size)
        fs, nu = _sorted_fill_curves(u[random_idx], excess[random_idx], p_grid)
        totals = volume * (const_excess + fs) - volume * lam_frac * nu
        crossing = _zero_crossing(p_grid, totals)
        estimates[r] = 1.0 if np.isnan(crossing) else crossing
    std = float(estimates.std(ddof=1)) if runs > 1 else 0.0
    return BreakEvenResult(
        analytic_p=analytic_p,
        simulated_p=float(estimates.mean()),
        simulated_p_std=std,
        analytic_clamped=clamped,
    )


# ---------------------------------------------------------------------------
# leg volume arithmetic


def max_arb_volume(
    leg_limits: Sequence[Optional[float]], rates: Sequence[float]
) -> MaxVolumeResult:
    """Largest initial stake that keeps every leg inside its available volume.

    `leg_limits[i]` caps the amount entering leg i, denominated in that
    leg's input currency; None means unconstrained. `rates[i]` is the
    effective conversion rate of leg i, so the amount entering leg i equals
    the stake times the product of the previous legs' rates.
    """
    if len(leg_limits) != len(rates) or not rates:
        raise ValueError("need one limit per leg")
    gamma = 1.0
    bounds = []
    for limit, rate in zip(leg_limits, rates):
        if rate <= 0:
            raise ValueError(f"leg rates must be positive, got {rate}")
        if limit is not None:
            if limit <= 0:
                raise ValueError(f"leg limits must be positive, got {limit}")
            bounds.append(limit / gamma)  # gamma so far = product of previous rates
        gamma *= rate
    if not bounds:
        return MaxVolumeResult(None, True, gamma, None)
    stake = min(bounds)
    return MaxVolumeResult(stake, False, gamma, stake * (gamma - 1.0))


# ---------------------------------------------------------------------------
# emitters


def write_surface_csv(path, surface: ProfitSurface) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "lambda_bp", "mean_profit_bp"])
        for i, p in enumerate(surface.p_grid):
            for j, lam in enumerate(surface.lambda_grid_bp):
                writer.writerow(
                    [repr(float(p)), repr(float(lam)), repr(float(surface.mean_profit_bp[i, j]))]
                )


def write_contour_csv(path, surface: ProfitSurface) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda_bp", "break_even_p"])
        for lam, p in surface.breakeven_contour:
            writer.writerow([repr(lam), "" if np.isnan(p) else repr(p)])


def write_profit_curves_csv(path, rows: Sequence[tuple[str, float, float, float, float]]) -> None:
    """Rows: (scenario, gamma_t, p, total_profit_mean, total_profit_std)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "gamma_t", "p", "total_profit_mean", "total_profit_std"])
        for scenario, gamma_t, p, mean, std in rows:
            writer.writerow([scenario, repr(gamma_t), repr(p), repr(mean), repr(std)])


def write_breakeven_csv(
    path, rows: Sequence[tuple[str, float, float, float, float, float]]
) -> None:
    """Rows: (scenario, gamma_t, lambda_bp, analytic_p, simulated_p, simulated_p_std)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["scenario", "gamma_t", "lambda_bp", "analytic_p", "simulated_p", "simulated_p_std"]
        )
        for scenario, gamma_t, lam, ap, sp, sps in rows:
            writer.writerow([scenario, repr(gamma_t), repr(lam), repr(ap), repr(sp), repr(sps)])
