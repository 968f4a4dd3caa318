"""Experiment definitions: builtin families and a flat key-value file format.

A scenario lists nominal maturities and dividend dates in years.  When a
valuation date is set they are converted to ACT/365 year fractions between
calendar dates: whole-month offsets are added as calendar months and anything
else as rounded days.  The builtin table families use this convention
because the published tables were produced from calendar dates; the fig1
family uses nominal years directly.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from dateutil.relativedelta import relativedelta

from ..analytic import PricingMethod
from ..core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
)
from ..mc import McConfig
from ..pde import BoundaryVariant, GridSpec

__all__ = [
    "BUILTINS",
    "Scenario",
    "builtin",
    "calendar_year_fraction",
    "load_scenario",
    "parse_scenario",
]

TABLE_VALUATION_DATE = dt.date(2009, 4, 1)


def calendar_year_fraction(years: float, valuation_date: dt.date) -> float:
    """ACT/365 fraction from `valuation_date` to the date `years` later."""
    months = years * 12.0
    if abs(months - round(months)) < 1e-9:
        end = valuation_date + relativedelta(months=int(round(months)))
    else:
        end = valuation_date + dt.timedelta(days=int(round(years * 365.0)))
    return (end - valuation_date).days / 365.0


@dataclass(frozen=True)
class Scenario:
    name: str
    market: MarketParams
    """Spot, strike, rate and vol; the term is overridden per maturity."""
    schedule: DividendSchedule
    kind: OptionKind
    maturities: tuple[float, ...]
    methods: tuple[PricingMethod, ...] = ()
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR
    grid: GridSpec = field(default_factory=GridSpec)
    boundary: BoundaryVariant = BoundaryVariant.SPOT
    mc: McConfig | None = None
    valuation_date: dt.date | None = None

    def __post_init__(self) -> None:
        mats = tuple(float(m) for m in self.maturities)
        if not mats:
            raise ConfigError("a scenario needs at least one maturity")
        if any(m <= 0.0 for m in mats) or any(
            b <= a for a, b in zip(mats, mats[1:])
        ):
            raise ConfigError("maturities must be positive and strictly increasing")
        object.__setattr__(self, "maturities", mats)
        object.__setattr__(self, "methods", tuple(self.methods))

    def year_fraction(self, years: float) -> float:
        if self.valuation_date is None:
            return years
        return calendar_year_fraction(years, self.valuation_date)

    def market_at(self, maturity: float) -> MarketParams:
        return self.market.with_(term=self.year_fraction(maturity))

    def dividends(self) -> DividendSchedule:
        """Schedule with times converted to year fractions."""
        return DividendSchedule.of(
            (self.year_fraction(t), d) for t, d in self.schedule
        )

    def with_seed(self, seed: int) -> Scenario:
        if self.mc is None:
            return self
        return replace(self, mc=replace(self.mc, seed=seed))


def _family(name: str, kind: OptionKind, schedule, methods, **extra) -> Scenario:
    return Scenario(
        name=name,
        market=MarketParams(spot=100.0, strike=100.0, rate=0.06, vol=0.30, term=1.0),
        schedule=DividendSchedule.of(schedule),
        kind=kind,
        maturities=tuple(float(t) for t in range(1, 12)),
        methods=tuple(PricingMethod(m) for m in methods),
        **extra,
    )


_SINGLE = [(364.0 / 365.0, 50.0)]
_MULTI = [(0.5 + i, 9.0) for i in range(11)]
_CALL_METHODS = ["spot_va", "strike_va", "hybrid", "hybrid_va", "hybrid_va2"]
_PUT_METHODS = [
    "hybrid", "hybrid_pa", "hybrid_va", "hybrid_vapa", "hybrid_va2", "hybrid_vapa2",
]

BUILTINS: dict[str, Scenario] = {
    "table1": _family(
        "table1", OptionKind.CALL, _SINGLE, _CALL_METHODS,
        valuation_date=TABLE_VALUATION_DATE,
    ),
    "table2": _family(
        "table2", OptionKind.CALL, _MULTI, _CALL_METHODS,
        valuation_date=TABLE_VALUATION_DATE,
    ),
    "table3": _family(
        "table3", OptionKind.PUT, _MULTI, _PUT_METHODS,
        valuation_date=TABLE_VALUATION_DATE,
    ),
    "fig1": _family("fig1", OptionKind.PUT, [(6.5, 70.0)], [], mc=McConfig()),
}


def builtin(name: str) -> Scenario:
    try:
        return BUILTINS[name.strip().lower()]
    except KeyError:
        known = ", ".join(sorted(BUILTINS))
        msg = f"unknown builtin scenario {name!r} (known: {known})"
        raise ConfigError(msg) from None


# -- file format -----------------------------------------------------------------

_REQUIRED = ("spot", "strike", "rate", "vol", "kind", "maturities")
_SCALAR_KEYS = {
    "name", "spot", "strike", "rate", "vol", "kind", "policy", "boundary",
    "maturities", "methods", "valuation_date",
    "grid.smin", "grid.smax", "grid.ds", "grid.dt", "grid.rannacher",
    "mc.paths", "mc.seed", "mc.antithetic",
}


def _float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def _int(key: str, text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def parse_scenario(text: str, default_name: str = "custom") -> Scenario:
    """Parse the ``key = value`` format; ``#`` starts a comment.

    ``dividend = <time> <amount>`` may be repeated; every other key may
    appear at most once.
    """
    values: dict[str, str] = {}
    dividends: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key == "dividend":
            parts = value.split()
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: dividend needs '<time> <amount>'")
            t, amount = (_float("dividend", p) for p in parts)
            dividends.append((t, amount))
            continue
        if key not in _SCALAR_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    maturities = [_float("maturities", m) for m in _list(values["maturities"])]
    market = MarketParams(
        spot=_float("spot", values["spot"]),
        strike=_float("strike", values["strike"]),
        rate=_float("rate", values["rate"]),
        vol=_float("vol", values["vol"]),
        term=max(maturities, default=1.0),
    )
    default_grid = GridSpec()
    grid = GridSpec(
        s_min=_float("grid.smin", values.get("grid.smin", str(default_grid.s_min))),
        s_max=_float("grid.smax", values.get("grid.smax", str(default_grid.s_max))),
        ds=_float("grid.ds", values.get("grid.ds", str(default_grid.ds))),
        dt=_float("grid.dt", values.get("grid.dt", str(default_grid.dt))),
        rannacher_steps=_int(
            "grid.rannacher",
            values.get("grid.rannacher", str(default_grid.rannacher_steps)),
        ),
    )
    mc = None
    if any(k.startswith("mc.") for k in values):
        antithetic = values.get("mc.antithetic", "true").lower()
        if antithetic not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError("mc.antithetic: expected a boolean")
        mc = McConfig(
            paths=_int("mc.paths", values.get("mc.paths", str(McConfig.paths))),
            seed=_int("mc.seed", values.get("mc.seed", str(McConfig.seed))),
            antithetic=antithetic in ("true", "1", "yes"),
        )
    valuation_date = None
    if "valuation_date" in values:
        try:
            valuation_date = dt.date.fromisoformat(values["valuation_date"])
        except ValueError:
            raise ConfigError("valuation_date: expected YYYY-MM-DD") from None

    return Scenario(
        name=values.get("name", default_name),
        market=market,
        schedule=DividendSchedule.of(sorted(dividends)),
        kind=OptionKind.parse(values["kind"]),
        maturities=tuple(maturities),
        methods=tuple(PricingMethod.parse(m) for m in _list(values.get("methods", ""))),
        policy=DividendPolicy.parse(values.get("policy", "liquidator")),
        grid=grid,
        boundary=BoundaryVariant.parse(values.get("boundary", "spot")),
        mc=mc,
        valuation_date=valuation_date,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc.strerror}") from None
    return parse_scenario(text, default_name=path.stem)
