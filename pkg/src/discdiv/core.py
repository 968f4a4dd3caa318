"""Shared data model for discrete-dividend option pricing.

Times are year fractions measured from the valuation date, rates are
continuously compounded and flat, and volatility is per sqrt(year).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "ConfigError",
    "Dividend",
    "DividendPolicy",
    "DividendSchedule",
    "DomainError",
    "MarketParams",
    "OptionKind",
    "dividend_split",
    "norm_cdf",
    "pv_dividends",
    "remaining_dividends",
]

_SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """A pricing formula was evaluated outside its mathematical domain."""


class ConfigError(ValueError):
    """Invalid construction parameters or solver configuration."""


class OptionKind(enum.Enum):
    CALL = "call"
    PUT = "put"

    @classmethod
    def parse(cls, value: str | OptionKind) -> OptionKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown option kind {value!r}") from None


class DividendPolicy(enum.Enum):
    """What the company pays when the scheduled dividend exceeds the spot.

    LIQUIDATOR pays min(S, d), so the stock is absorbed at zero.
    SURVIVOR pays d only if S >= d and nothing otherwise.
    """

    LIQUIDATOR = "liquidator"
    SURVIVOR = "survivor"

    @classmethod
    def parse(cls, value: str | DividendPolicy) -> DividendPolicy:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown dividend policy {value!r}") from None

    def paid(self, spot: float, amount: float) -> float:
        """Amount actually paid when the pre-dividend spot is `spot`."""
        if self is DividendPolicy.LIQUIDATOR:
            return min(spot, amount)
        return amount if spot >= amount else 0.0


@dataclass(frozen=True)
class MarketParams:
    spot: float
    strike: float
    rate: float
    vol: float
    term: float

    def __post_init__(self) -> None:
        for name in ("spot", "strike", "rate", "vol", "term"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.spot <= 0.0:
            raise ConfigError("spot must be positive")
        if self.strike < 0.0:
            raise ConfigError("strike must be non-negative")
        if self.vol <= 0.0:
            raise ConfigError("vol must be positive")
        if self.term <= 0.0:
            raise ConfigError("term must be positive")

    def with_(self, **changes: float) -> MarketParams:
        return replace(self, **changes)


class Dividend(NamedTuple):
    time: float
    amount: float


@dataclass(frozen=True)
class DividendSchedule:
    """Cash dividends ordered by ex-dividend time."""

    entries: tuple[Dividend, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        entries = tuple(Dividend(float(t), float(d)) for t, d in self.entries)
        prev = 0.0
        for t, d in entries:
            if not (math.isfinite(t) and math.isfinite(d)):
                raise ConfigError("dividend times and amounts must be finite")
            if t <= prev:
                raise ConfigError(
                    "dividend times must be positive and strictly increasing"
                )
            if d < 0.0:
                raise ConfigError("dividend amounts must be non-negative")
            prev = t
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]]) -> DividendSchedule:
        return cls(tuple(pairs))

    @classmethod
    def empty(cls) -> DividendSchedule:
        return cls(())

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Dividend]:
        return iter(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(e.time for e in self.entries)

    @property
    def amounts(self) -> tuple[float, ...]:
        return tuple(e.amount for e in self.entries)

    def window(self, a: float, b: float) -> DividendSchedule:
        """Entries with a < t <= b."""
        return DividendSchedule(tuple(e for e in self.entries if a < e.time <= b))

    def active(self, term: float) -> DividendSchedule:
        """Entries that affect an option of maturity `term`.

        Zero-amount dividends are dropped so they are no-ops everywhere.
        """
        return DividendSchedule(
            tuple(e for e in self.entries if 0.0 < e.time <= term and e.amount > 0.0)
        )

    def before(self, t: float) -> DividendSchedule:
        """Entries strictly before `t`."""
        return DividendSchedule(tuple(e for e in self.entries if e.time < t))

    def with_amounts(self, amounts: Sequence[float]) -> DividendSchedule:
        if len(amounts) != len(self.entries):
            raise ConfigError("amounts length does not match schedule")
        return DividendSchedule(
            tuple(Dividend(e.time, a) for e, a in zip(self.entries, amounts))
        )


def norm_cdf(x: float) -> float:
    """Standard normal CDF.

    Computed from the complementary error function so the lower tail keeps
    full relative precision; absolute error is at the level of double
    rounding (well below 1e-15).
    """
    return 0.5 * math.erfc(-x / _SQRT2)


def pv_dividends(
    schedule: DividendSchedule,
    rate: float,
    window: tuple[float, float],
    valuation_time: float = 0.0,
) -> float:
    """Value at `valuation_time` of the dividends paid in the window (a, b]."""
    a, b = window
    if not a < b:
        raise ConfigError("window must satisfy a < b")
    return math.fsum(
        d * math.exp(-rate * (t - valuation_time))
        for t, d in schedule.entries
        if a < t <= b
    )


def dividend_split(
    schedule: DividendSchedule, rate: float, term: float
) -> tuple[float, float]:
    """Time-weighted split of the dividend PV into spot and strike parts.

    Returns (D_S, D_K): each dividend's PV is weighted (T - t)/T towards the
    spot and t/T towards the strike.  D_S + D_K is the PV over (0, T].
    """
    if term <= 0.0:
        raise ConfigError("term must be positive")
    d_s = d_k = 0.0
    for t, d in schedule.window(0.0, term):
        pv = d * math.exp(-rate * t)
        w = t / term
        d_k += w * pv
        d_s += pv - w * pv
    return d_s, d_k


def remaining_dividends(
    schedule: DividendSchedule,
    rate: float,
    t: float,
    term: float,
    *,
    inclusive: bool = True,
) -> tuple[float, float, float]:
    """Dividends still to be paid in [t, T], valued at time t.

    Returns (total, spot_part, strike_part) where the parts use the
    (T - t_i)/T and t_i/T weights.  With ``inclusive=False`` a dividend
    falling exactly at t is treated as already paid (the t+ side of the
    ex-dividend instant).
    """
    total = spot_part = strike_part = 0.0
    for ti, d in schedule.entries:
        if ti > term or ti < t or (ti == t and not inclusive):
            continue
        v = d * math.exp(-rate * (ti - t))
        total += v
        strike_part += v * ti / term
        spot_part += v * (term - ti) / term
    return total, spot_part, strike_part
