"""Invariant checks that need no published numbers."""

from __future__ import annotations

from dataclasses import dataclass

from ..analytic import (
    BsInputs,
    PricingMethod,
    bs_price,
    parity_check,
    parity_violation_multi,
    price,
)
from ..core import DividendPolicy, DividendSchedule, MarketParams, OptionKind
from ..mc import McConfig, mc_price
from ..pde import BoundaryVariant, cn_price_european
from .report import FIG1_MARKET, PostConditionError, fig1_series
from .scenario import BUILTINS

__all__ = ["Check", "run_validation"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _zero_dividend_collapse() -> Check:
    worst = 0.0
    empty = DividendSchedule.empty()
    for T in (0.25, 1.0, 5.0, 11.0):
        market = FIG1_MARKET.with_(term=T)
        vanilla = BsInputs(market.spot, market.strike, market.rate, market.vol, T)
        for kind in OptionKind:
            ref = bs_price(kind, vanilla)
            for method in PricingMethod:
                worst = max(worst, abs(price(method, kind, market, empty) - ref))
    return Check(
        "zero-dividend collapse to vanilla", worst < 1e-10, f"max |diff| {worst:.2e}"
    )


def _parity_residuals() -> Check:
    worst = 0.0
    for name in ("table1", "table2"):
        scenario = BUILTINS[name]
        schedule = scenario.dividends()
        for T in scenario.maturities:
            market = scenario.market_at(T)
            for policy in DividendPolicy:
                for method in PricingMethod:
                    expected = 0.0
                    if method.is_pa:
                        expected = parity_violation_multi(
                            market, schedule, policy, method.base
                        )
                    resid = parity_check(method, market, schedule, policy) - expected
                    worst = max(worst, abs(resid))
    return Check("put-call parity residual", worst < 1e-9, f"max residual {worst:.2e}")


def _cn_call_invariance() -> list[Check]:
    """Calls ignore the lower boundary everywhere.

    The dividend policy only moves call prices through paths that fall below
    the dividend, so policy invariance is checked on the small-dividend
    multi family only.
    """
    boundary_spread = policy_spread = 0.0
    for name in ("table1", "table2", "fig1"):
        scenario = BUILTINS[name]
        schedule = scenario.dividends()
        for T in (1.0, 6.0, 11.0):
            market = scenario.market_at(T)
            for policy in DividendPolicy:
                vals = [
                    cn_price_european(OptionKind.CALL, market, schedule, policy, b)
                    for b in BoundaryVariant
                ]
                boundary_spread = max(boundary_spread, max(vals) - min(vals))
            if name == "table2":
                vals = [
                    cn_price_european(OptionKind.CALL, market, schedule, p)
                    for p in DividendPolicy
                ]
                policy_spread = max(policy_spread, max(vals) - min(vals))
    return [
        Check(
            "CN call invariance across boundary variants",
            boundary_spread < 1e-6,
            f"max spread {boundary_spread:.2e}",
        ),
        Check(
            "CN call invariance across policies (multi family)",
            policy_spread < 1e-6,
            f"max spread {policy_spread:.2e}",
        ),
    ]


def _fig1_findings() -> Check:
    try:
        fig1_series()
    except PostConditionError as exc:
        return Check("boundary variants vs American put", False, str(exc))
    return Check("boundary variants vs American put", True, "all findings hold")


def _martingale(seed: int) -> Check:
    market = MarketParams(100.0, 0.0, 0.06, 0.30, 5.0)
    res = mc_price(
        OptionKind.CALL, market, DividendSchedule.empty(),
        config=McConfig(paths=200_000, seed=seed),
    )
    z = (res.price - market.spot) / res.std_error
    return Check("MC martingale", abs(z) < 3.0, f"z-score {z:+.2f}")


def run_validation(seed: int = McConfig.seed) -> list[Check]:
    return [
        _zero_dividend_collapse(),
        _parity_residuals(),
        *_cn_call_invariance(),
        _fig1_findings(),
        _martingale(seed),
    ]

