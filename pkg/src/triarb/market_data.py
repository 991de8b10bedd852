"""Quote data model, tick-file loading, and per-second triangle alignment.

Prices are kept exact at this layer: every bid/ask is a decimal scaled
integer (an int64 mantissa plus a per-series power-of-ten exponent), never a
binary float. The conversion to floating point happens downstream, when rate
products are computed.

The time grid has a fixed resolution of one second. A grid second carries a
quote only if at least one raw tick fell inside that second; when several
did, the last one wins. Seconds without a tick are marked missing. An
optional weekday filter removes excluded days from the grid entirely.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    CrossedQuoteWarning,
    EmptySeriesError,
    TickOrderingError,
    TickParseError,
)

SECONDS_PER_DAY = 86_400
# Epoch day zero (1970-01-01) was a Thursday; Monday = 0.
_EPOCH_WEEKDAY = 3

WEEKDAYS = frozenset({0, 1, 2, 3, 4})

# Currency precedence used to order market-convention pairs (base first).
_CONVENTION_ORDER = ("EUR", "GBP", "AUD", "NZD", "USD", "CAD", "CHF", "JPY")


def default_point_size(quote_currency: str) -> Decimal:
    """Smallest conventional price increment for a pair quoted in `quote_currency`."""
    return Decimal("0.01") if quote_currency == "JPY" else Decimal("0.0001")


def market_convention_pair(x: str, y: str) -> tuple[str, str]:
    """Order two currency codes as (base, quote) by market convention."""

    def rank(c: str) -> tuple[int, str]:
        try:
            return (_CONVENTION_ORDER.index(c), c)
        except ValueError:
            return (len(_CONVENTION_ORDER), c)

    return (x, y) if rank(x) < rank(y) else (y, x)


@dataclass(frozen=True)
class Pair:
    """An ordered currency pair with its conventional point size."""

    base: str
    quote: str
    point_size: Decimal = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.point_size is None:
            object.__setattr__(self, "point_size", default_point_size(self.quote))
        else:
            object.__setattr__(self, "point_size", Decimal(str(self.point_size)))
        if self.point_size <= 0:
            raise ValueError(f"point size must be positive, got {self.point_size}")

    @property
    def name(self) -> str:
        return f"{self.base}/{self.quote}"

    @property
    def file_stem(self) -> str:
        return f"{self.base}{self.quote}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Quote:
    """One bid/ask quote at an integer epoch second."""

    timestamp: int
    bid: Decimal
    ask: Decimal

    def __post_init__(self):
        if self.bid <= 0 or self.ask <= 0:
            raise ValueError(f"quote prices must be positive: {self}")


@dataclass(frozen=True)
class SeriesWindow:
    """Half-open time interval [start, end) with an optional weekday filter.

    `weekday_filter` uses Monday = 0 .. Sunday = 6; seconds falling on an
    excluded day are not part of the grid at all.
    """

    start: int
    end: int
    weekday_filter: Optional[frozenset[int]] = None

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")
        if self.weekday_filter is not None:
            wf = frozenset(self.weekday_filter)
            if not wf or not wf <= frozenset(range(7)):
                raise ValueError(f"invalid weekday filter {self.weekday_filter}")
            object.__setattr__(self, "weekday_filter", wf)

    def grid_times(self) -> np.ndarray:
        """All grid seconds of the window, ascending (int64)."""
        times = np.arange(self.start, self.end, dtype=np.int64)
        if self.weekday_filter is not None:
            wd = (times // SECONDS_PER_DAY + _EPOCH_WEEKDAY) % 7
            times = times[np.isin(wd, sorted(self.weekday_filter))]
        return times

    def contains(self, t: int) -> bool:
        if not (self.start <= t < self.end):
            return False
        if self.weekday_filter is None:
            return True
        return (t // SECONDS_PER_DAY + _EPOCH_WEEKDAY) % 7 in self.weekday_filter

    def days(self) -> list[date]:
        """Calendar days (UTC) covered by the grid, in order."""
        first = self.start // SECONDS_PER_DAY
        last = (self.end - 1) // SECONDS_PER_DAY
        out = []
        for d in range(first, last + 1):
            if self.weekday_filter is not None and (d + _EPOCH_WEEKDAY) % 7 not in self.weekday_filter:
                continue
            out.append(date(1970, 1, 1) + timedelta(days=d))
        return out


class PairSeries:
    """One pair's quotes on the per-second grid of a window.

    Internally columnar: int64 mantissa arrays for bid and ask plus a shared
    decimal exponent (`scale`), and a boolean mask for missing seconds.
    """

    __slots__ = ("pair", "window", "times", "bid_m", "ask_m", "missing", "scale")

    def __init__(
        self,
        pair: Pair,
        window: SeriesWindow,
        times: np.ndarray,
        bid_m: np.ndarray,
        ask_m: np.ndarray,
        missing: np.ndarray,
        scale: int,
    ):
        self.pair = pair
        self.window = window
        self.times = times
        self.bid_m = bid_m
        self.ask_m = ask_m
        self.missing = missing
        self.scale = scale

    @classmethod
    def from_quotes(cls, pair: Pair, window: SeriesWindow, quotes: Sequence[Quote]) -> "PairSeries":
        """Build a grid series from per-second quotes (at most one per second)."""
        times = window.grid_times()
        scale = 0
        for q in quotes:
            scale = max(scale, -min(q.bid.as_tuple().exponent, 0), -min(q.ask.as_tuple().exponent, 0))
        n = times.size
        bid_m = np.zeros(n, dtype=np.int64)
        ask_m = np.zeros(n, dtype=np.int64)
        missing = np.ones(n, dtype=bool)
        last_t = None
        for q in quotes:
            if last_t is not None and q.timestamp <= last_t:
                raise TickOrderingError(f"quotes not strictly increasing at t={q.timestamp}")
            last_t = q.timestamp
            i = int(np.searchsorted(times, q.timestamp))
            if i >= n or times[i] != q.timestamp:
                continue  # off-grid quote (outside window or filtered weekday)
            bid_m[i] = _to_mantissa(q.bid, scale)
            ask_m[i] = _to_mantissa(q.ask, scale)
            missing[i] = False
        return cls(pair, window, times, bid_m, ask_m, missing, scale)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def n_missing(self) -> int:
        return int(self.missing.sum())

    def quote_at(self, t: int) -> Optional[Quote]:
        i = int(np.searchsorted(self.times, t))
        if i >= self.times.size or self.times[i] != t or self.missing[i]:
            return None
        return Quote(t, self._price(self.bid_m[i]), self._price(self.ask_m[i]))

    def quotes(self) -> Iterator[Quote]:
        """Iterate the non-missing grid entries in time order."""
        for i in np.flatnonzero(~self.missing):
            yield Quote(
                int(self.times[i]), self._price(self.bid_m[i]), self._price(self.ask_m[i])
            )

    def bid_float(self) -> np.ndarray:
        return self.bid_m.astype(np.float64) * 10.0 ** (-self.scale)

    def ask_float(self) -> np.ndarray:
        return self.ask_m.astype(np.float64) * 10.0 ** (-self.scale)

    def _price(self, mantissa: int) -> Decimal:
        return Decimal(int(mantissa)).scaleb(-self.scale)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairSeries):
            return NotImplemented
        return (
            self.pair == other.pair
            and self.window == other.window
            and self.scale == other.scale
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.bid_m, other.bid_m)
            and np.array_equal(self.ask_m, other.ask_m)
            and np.array_equal(self.missing, other.missing)
        )


def _to_mantissa(price: Decimal, scale: int) -> int:
    scaled = price.scaleb(scale)
    mantissa = int(scaled)
    if scaled != mantissa:
        raise ValueError(f"price {price} does not fit decimal scale {scale}")
    return mantissa


class Side(Enum):
    """How a leg consumes its pair's quote: sell base at bid, or buy base at 1/ask."""

    BID = "bid"
    INV_ASK = "inv_ask"


class Direction(Enum):
    """The two transaction directions around a triangle."""

    DIR1 = 1  # A -> B -> C -> A
    DIR2 = 2  # A -> C -> B -> A


@dataclass(frozen=True)
class TriangleSpec:
    """Three currencies, their market pairs, and the leg recipe per direction.

    For a conversion from currency X to Y using pair P: if X is P's base the
    leg sells base at P's bid; if X is P's quote the leg buys base at 1/ask.
    """

    currencies: tuple[str, str, str]
    pairs: tuple[Pair, Pair, Pair]
    legs_dir1: tuple[tuple[Pair, Side], ...] = field(init=False)
    legs_dir2: tuple[tuple[Pair, Side], ...] = field(init=False)

    def __post_init__(self):
        a, b, c = self.currencies
        if len({a, b, c}) != 3:
            raise ValueError(f"triangle currencies must be distinct: {self.currencies}")
        object.__setattr__(self, "legs_dir1", self._route((a, b), (b, c), (c, a)))
        object.__setattr__(self, "legs_dir2", self._route((a, c), (c, b), (b, a)))

    def _route(self, *hops: tuple[str, str]) -> tuple[tuple[Pair, Side], ...]:
        legs = []
        for src, dst in hops:
            pair = self._pair_for(src, dst)
            side = Side.BID if pair.base == src else Side.INV_ASK
            legs.append((pair, side))
        return tuple(legs)

    def _pair_for(self, x: str, y: str) -> Pair:
        for p in self.pairs:
            if {p.base, p.quote} == {x, y}:
                return p
        raise ValueError(f"no pair covers the conversion {x}->{y}")

    def legs(self, direction: Direction) -> tuple[tuple[Pair, Side], ...]:
        return self.legs_dir1 if direction is Direction.DIR1 else self.legs_dir2

    @classmethod
    def from_currencies(
        cls,
        a: str,
        b: str,
        c: str,
        point_sizes: Optional[dict[str, Decimal]] = None,
    ) -> "TriangleSpec":
        """Build a spec with market-convention pair ordering for (a, b, c)."""
        pairs = []
        for x, y in ((a, b), (b, c), (a, c)):
            base, quote = market_convention_pair(x, y)
            name = f"{base}/{quote}"
            ps = (point_sizes or {}).get(name)
            pairs.append(Pair(base, quote, ps) if ps is not None else Pair(base, quote))
        return cls(currencies=(a, b, c), pairs=tuple(pairs))


class AlignedTriangle:
    """The three pair series of a triangle on one shared grid."""

    __slots__ = ("window", "series")

    def __init__(self, window: SeriesWindow, series: tuple[PairSeries, PairSeries, PairSeries]):
        self.window = window
        self.series = series

    @property
    def times(self) -> np.ndarray:
        return self.series[0].times

    def __len__(self) -> int:
        return len(self.series[0])

    def series_for(self, pair: Pair) -> PairSeries:
        for s in self.series:
            if s.pair == pair:
                return s
        raise KeyError(pair.name)

    def missing_flags(self, t: int) -> dict[str, bool]:
        """Per-pair missing flag at grid second t."""
        i = int(np.searchsorted(self.times, t))
        if i >= self.times.size or self.times[i] != t:
            raise KeyError(t)
        return {s.pair.name: bool(s.missing[i]) for s in self.series}


def align_triangle(
    a: PairSeries, b: PairSeries, c: PairSeries, spec: TriangleSpec
) -> AlignedTriangle:
    """Order the three series by the spec's pairs and check they share a grid."""
    provided = {s.pair: s for s in (a, b, c)}
    if len(provided) != 3:
        raise AlignmentError("the three series must cover three distinct pairs")
    ordered = []
    for pair in spec.pairs:
        s = provided.get(pair)
        if s is None:
            raise AlignmentError(f"missing series for pair {pair.name}")
        ordered.append(s)
    w = ordered[0].window
    for s in ordered[1:]:
        if s.window != w:
            raise AlignmentError(
                f"window mismatch: {s.pair.name} has {s.window}, expected {w}"
            )
    return AlignedTriangle(w, tuple(ordered))


def parse_iso_timestamp(raw: str) -> int:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def load_pair_series(path, pair: Pair, window: SeriesWindow) -> PairSeries:
    """Load the tick CSV at `path` onto the window's per-second grid.

    Format: header ``timestamp,bid,ask``; timestamps are integer epoch
    seconds or ISO-8601 UTC (auto-detected from the first data row); prices
    are decimal. Several ticks in one second collapse to the last one.
    Crossed quotes (bid > ask) are accepted with a CrossedQuoteWarning.
    """
    per_second: dict[int, tuple[Decimal, Decimal]] = {}
    iso = None
    last_raw_t = None
    n_crossed = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TickParseError(path, 1, "empty file") from None
        if [h.strip().lower() for h in header] != ["timestamp", "bid", "ask"]:
            raise TickParseError(path, 1, f"expected header timestamp,bid,ask, got {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise TickParseError(path, line_no, f"expected 3 fields, got {len(row)}")
            raw_t, raw_bid, raw_ask = (f.strip() for f in row)
            if iso is None:
                iso = not _looks_like_int(raw_t)
            try:
                t = parse_iso_timestamp(raw_t) if iso else int(raw_t)
            except ValueError:
                raise TickParseError(path, line_no, f"bad timestamp {raw_t!r}") from None
            try:
                bid = Decimal(raw_bid)
                ask = Decimal(raw_ask)
            except InvalidOperation:
                raise TickParseError(path, line_no, f"bad price in {row!r}") from None
            if bid <= 0 or ask <= 0:
                raise TickParseError(path, line_no, f"non-positive price in {row!r}")
            if last_raw_t is not None and t < last_raw_t:
                raise TickOrderingError(
                    f"{path}:{line_no}: timestamp {t} precedes {last_raw_t}"
                )
            last_raw_t = t
            if bid > ask:
                n_crossed += 1
            if window.contains(t):
                per_second[t] = (bid, ask)
    if n_crossed:
        warnings.warn(
            f"{path}: accepted {n_crossed} crossed quote(s) (bid > ask)",
            CrossedQuoteWarning,
            stacklevel=2,
        )
    if not per_second:
        raise EmptySeriesError(f"{path}: no tick falls inside window {window}")
    quotes = [Quote(t, b, a) for t, (b, a) in sorted(per_second.items())]
    return PairSeries.from_quotes(pair, window, quotes)


def _looks_like_int(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


def write_ticks_csv(path, times: Sequence[int], bids: Sequence[Decimal], asks: Sequence[Decimal]) -> None:
    """Write a tick CSV in the loader's format (one row per quoted second)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "bid", "ask"])
        for t, b, a in zip(times, bids, asks):
            writer.writerow([int(t), b, a])


def write_pair_series_csv(path, series: PairSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "bid", "ask"])
        for q in series.quotes():
            writer.writerow([q.timestamp, q.bid, q.ask])
