"""Scenario evaluation, CN-relative comparison rows and CSV output."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..analytic import PricingMethod, price
from ..core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
)
from ..mc import McResult, mc_price
from ..pde import (
    BoundaryVariant,
    GridSpec,
    cn_price_european,
    psor_price_american_put,
)
from .scenario import Scenario

__all__ = [
    "ComparisonRow",
    "Fig1Series",
    "PostConditionError",
    "Precision",
    "ScenarioError",
    "emit_csv",
    "emit_fig1_csv",
    "fig1_series",
    "run_scenario",
]


class ScenarioError(Exception):
    """A module error raised while evaluating one cell of a scenario."""

    def __init__(self, maturity: float, method: str, cause: Exception) -> None:
        super().__init__(f"T={maturity:g}, method={method}: {cause}")
        self.maturity = maturity
        self.method = method
        self.cause = cause


class PostConditionError(AssertionError):
    """A qualitative finding expected of the fig1 family did not hold."""


class Precision(enum.Enum):
    FULL = "full"
    TABLE = "table"


@dataclass(frozen=True)
class ComparisonRow:
    maturity: float
    """Nominal maturity label in years."""
    term: float
    """Year fraction actually priced."""
    benchmark: float
    prices: Mapping[PricingMethod, float] = field(default_factory=dict)
    mc: McResult | None = None

    def rel_diff(self, method: PricingMethod) -> float:
        """Percent deviation from CN; negative means the method underprices."""
        return 100.0 * (self.prices[method] - self.benchmark) / self.benchmark

    @property
    def rel_diffs(self) -> dict[PricingMethod, float]:
        return {m: self.rel_diff(m) for m in self.prices}


def run_scenario(scenario: Scenario) -> list[ComparisonRow]:
    """CN benchmark plus every requested method at each maturity, in order."""
    schedule = scenario.dividends()
    rows = []
    for maturity in scenario.maturities:
        market = scenario.market_at(maturity)
        bench = _cell(maturity, "cn", lambda: cn_price_european(
            scenario.kind, market, schedule, scenario.policy, scenario.boundary,
            scenario.grid,
        ))
        prices = {}
        for method in scenario.methods:
            prices[method] = _cell(maturity, method.value, lambda m=method: price(
                m, scenario.kind, market, schedule, scenario.policy
            ))
        mc = None
        if scenario.mc is not None:
            mc = _cell(maturity, "mc", lambda: mc_price(
                scenario.kind, market, schedule, scenario.policy, scenario.mc
            ))
        rows.append(ComparisonRow(maturity, market.term, bench, prices, mc))
    return rows


def _cell(maturity, label, fn):
    try:
        return fn()
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        raise ScenarioError(maturity, label, exc) from exc


def _fmt(value: float, precision: Precision, decimals: int) -> str:
    if precision is Precision.FULL:
        return f"{value:.9g}"
    text = f"{value:.{decimals}f}"
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text


def emit_csv(
    rows: Sequence[ComparisonRow], precision: Precision | str = Precision.FULL
) -> str:
    """Header ``T,cn,<m>,<m>_reldiff,...`` plus ``mc,mc_stderr`` when present.

    ``table`` precision rounds prices to 2 decimals and relative differences
    to 1; ``full`` writes 9 significant digits.
    """
    if not rows:
        raise ConfigError("no rows to emit")
    precision = Precision(precision) if isinstance(precision, str) else precision
    methods = list(rows[0].prices)
    has_mc = rows[0].mc is not None
    header = ["T", "cn"]
    for m in methods:
        header += [m.value, f"{m.value}_reldiff"]
    if has_mc:
        header += ["mc", "mc_stderr"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        line = [f"{row.maturity:g}", _fmt(row.benchmark, precision, 2)]
        for m in methods:
            line += [
                _fmt(row.prices[m], precision, 2),
                _fmt(row.rel_diff(m), precision, 1),
            ]
        if has_mc:
            line += [
                _fmt(row.mc.price, precision, 2),
                _fmt(row.mc.std_error, precision, 4),
            ]
        writer.writerow(line)
    return buf.getvalue()


# -- boundary condition comparison -----------------------------------------------

FIG1_MARKET = MarketParams(spot=100.0, strike=100.0, rate=0.06, vol=0.30, term=1.0)
FIG1_SCHEDULE = DividendSchedule.of([(6.5, 70.0)])
FIG1_MATURITIES = tuple(float(t) for t in range(1, 12))


@dataclass(frozen=True)
class Fig1Series:
    maturities: tuple[float, ...]
    european: Mapping[BoundaryVariant, tuple[float, ...]]
    american: tuple[float, ...]


def fig1_series(grid: GridSpec | None = None, *, check: bool = True) -> Fig1Series:
    """European puts under each lower boundary variant next to the American put.

    With ``check`` the expected findings are enforced: the variants coincide
    while no dividend is outstanding, SpotBC never exceeds the American price,
    and StrikeBC exceeds it at the longest maturity.
    """
    grid = grid or GridSpec()
    policy = DividendPolicy.LIQUIDATOR
    european = {v: [] for v in BoundaryVariant}
    american = []
    for T in FIG1_MATURITIES:
        market = FIG1_MARKET.with_(term=T)
        for v in BoundaryVariant:
            european[v].append(
                cn_price_european(
                    OptionKind.PUT, market, FIG1_SCHEDULE, policy, v, grid
                )
            )
        american.append(psor_price_american_put(market, FIG1_SCHEDULE, policy, grid))
    series = Fig1Series(
        FIG1_MATURITIES, {v: tuple(p) for v, p in european.items()}, tuple(american)
    )
    if check:
        _check_fig1(series)
    return series


def _check_fig1(series: Fig1Series) -> None:
    t_div = FIG1_SCHEDULE.times[0]
    spot = series.european[BoundaryVariant.SPOT]
    strike = series.european[BoundaryVariant.STRIKE]
    for i, T in enumerate(series.maturities):
        vals = [series.european[v][i] for v in BoundaryVariant]
        if T < t_div and max(vals) - min(vals) > 1e-6:
            raise PostConditionError(f"boundary variants differ at T={T:g}: {vals}")
        if spot[i] > series.american[i] + 1e-6:
            raise PostConditionError(
                f"SpotBC European {spot[i]:.6f} exceeds American "
                f"{series.american[i]:.6f} at T={T:g}"
            )
    if not strike[-1] > series.american[-1]:
        raise PostConditionError("StrikeBC does not exceed the American put at T=11")


def emit_fig1_csv(
    series: Fig1Series, precision: Precision | str = Precision.FULL
) -> str:
    precision = Precision(precision) if isinstance(precision, str) else precision
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["T", "spot_bc", "strike_bc", "hybrid_bc", "american"])
    for i, T in enumerate(series.maturities):
        writer.writerow(
            [f"{T:g}"]
            + [_fmt(series.european[v][i], precision, 2) for v in BoundaryVariant]
            + [_fmt(series.american[i], precision, 2)]
        )
    return buf.getvalue()
