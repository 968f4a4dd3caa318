"""Black-Scholes-type closed forms for European options with cash dividends.

The catalogue covers the vanilla spot, strike and hybrid adjustments, their
volatility-adjusted (VA) versions, the Brownian-bridge implied volatility
(VA-2) of the generalised hybrid model, and the put-call parity violation
adjustment (PA) that corrects puts for the dividend policy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    ConfigError,
    Dividend,
    DividendPolicy,
    DividendSchedule,
    DomainError,
    MarketParams,
    OptionKind,
    dividend_split,
    norm_cdf,
    pv_dividends,
)

__all__ = [
    "BsInputs",
    "ParityAdjustment",
    "PricingMethod",
    "Va2Context",
    "VolAdjustment",
    "bs_price",
    "implied_vol_va2",
    "parity_check",
    "parity_violation_multi",
    "parity_violation_single",
    "price",
    "price_hybrid",
    "price_hybrid_va",
    "price_hybrid_va2",
    "price_put_pa",
    "price_spot",
    "price_spot_va",
    "price_strike",
    "price_strike_va",
    "va2_context",
    "vol_adjust_hybrid",
    "vol_adjust_spot",
    "vol_adjust_strike",
]


class PricingMethod(enum.Enum):
    SPOT = "spot"
    STRIKE = "strike"
    HYBRID = "hybrid"
    SPOT_VA = "spot_va"
    STRIKE_VA = "strike_va"
    HYBRID_VA = "hybrid_va"
    HYBRID_VA2 = "hybrid_va2"
    HYBRID_PA = "hybrid_pa"
    HYBRID_VAPA = "hybrid_vapa"
    HYBRID_VAPA2 = "hybrid_vapa2"

    @classmethod
    def parse(cls, value: str | PricingMethod) -> PricingMethod:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown pricing method {value!r}") from None

    @property
    def is_pa(self) -> bool:
        return self in _PA_BASE

    @property
    def base(self) -> PricingMethod:
        """The unadjusted method a PA variant is built on (self otherwise)."""
        return _PA_BASE.get(self, self)


_PA_BASE = {
    PricingMethod.HYBRID_PA: PricingMethod.HYBRID,
    PricingMethod.HYBRID_VAPA: PricingMethod.HYBRID_VA,
    PricingMethod.HYBRID_VAPA2: PricingMethod.HYBRID_VA2,
}


@dataclass(frozen=True)
class BsInputs:
    eff_spot: float
    eff_strike: float
    rate: float
    vol: float
    term: float

    def b1_b2(self) -> tuple[float, float]:
        if self.eff_spot <= 0.0:
            raise DomainError(f"effective spot must be positive, got {self.eff_spot}")
        if self.eff_strike <= 0.0:
            raise DomainError(
                f"effective strike must be positive, got {self.eff_strike}"
            )
        if self.vol <= 0.0 or self.term <= 0.0:
            raise DomainError("vol and term must be positive")
        sd = self.vol * math.sqrt(self.term)
        b1 = (
            math.log(self.eff_spot / self.eff_strike)
            + (self.rate + 0.5 * self.vol * self.vol) * self.term
        ) / sd
        return b1, b1 - sd


@dataclass(frozen=True)
class VolAdjustment:
    """Effective volatility and the relative perturbation it represents.

    For spot-style adjustments ``adjusted_vol = vol * (1 + epsilon)``; for
    strike-style and hybrid ones ``adjusted_vol = vol * (1 - epsilon)``.
    """

    adjusted_vol: float
    epsilon: float


@dataclass(frozen=True)
class Va2Context:
    alphas: tuple[float, ...]
    s: float
    k: float
    a: float
    b: float
    bridge_length: float


@dataclass(frozen=True)
class ParityAdjustment:
    policy: DividendPolicy
    delta_p: float


def bs_price(kind: OptionKind, inputs: BsInputs) -> float:
    b1, b2 = inputs.b1_b2()
    disc_k = inputs.eff_strike * math.exp(-inputs.rate * inputs.term)
    if kind is OptionKind.CALL:
        value = inputs.eff_spot * norm_cdf(b1) - disc_k * norm_cdf(b2)
    else:
        value = disc_k * norm_cdf(-b2) - inputs.eff_spot * norm_cdf(-b1)
    return max(value, 0.0)


def _active(market: MarketParams, schedule: DividendSchedule) -> DividendSchedule:
    return schedule.active(market.term)


def _spot_inputs(
    market: MarketParams, schedule: DividendSchedule, vol: float | None = None
) -> BsInputs:
    d = pv_dividends(_active(market, schedule), market.rate, (0.0, market.term))
    s = market.spot - d
    if s <= 0.0:
        raise DomainError(f"dividends exceed spot: S0 - D = {s}")
    vol = market.vol if vol is None else vol
    return BsInputs(s, market.strike, market.rate, vol, market.term)


def _strike_inputs(
    market: MarketParams, schedule: DividendSchedule, vol: float | None = None
) -> BsInputs:
    r, T = market.rate, market.term
    k = market.strike + math.fsum(
        d * math.exp(r * (T - t)) for t, d in _active(market, schedule)
    )
    if k <= 0.0:
        raise DomainError(f"adjusted strike must be positive, got {k}")
    return BsInputs(market.spot, k, r, market.vol if vol is None else vol, T)


def _hybrid_inputs(
    market: MarketParams, schedule: DividendSchedule, vol: float | None = None
) -> BsInputs:
    r, T = market.rate, market.term
    d_s, d_k = dividend_split(_active(market, schedule), r, T)
    s = market.spot - d_s
    if s <= 0.0:
        raise DomainError(f"dividends exceed spot: S0 - D_S = {s}")
    vol = market.vol if vol is None else vol
    return BsInputs(s, market.strike + d_k * math.exp(r * T), r, vol, T)


def price_spot(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    return bs_price(kind, _spot_inputs(market, schedule))


def price_strike(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    return bs_price(kind, _strike_inputs(market, schedule))


def price_hybrid(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    return bs_price(kind, _hybrid_inputs(market, schedule))


# -- volatility adjustments -------------------------------------------------


def _portioned(
    active: DividendSchedule, portions: Sequence[float] | None
) -> list[Dividend]:
    if portions is None:
        return list(active)
    if len(portions) != len(active):
        raise ConfigError("one portion weight is required per active dividend")
    return [Dividend(t, w * d) for (t, d), w in zip(active, portions)]


def vol_adjust_spot(
    market: MarketParams,
    schedule: DividendSchedule,
    spot_portions: Sequence[float] | None = None,
) -> VolAdjustment:
    """Average of the spot-model local variance (S / (S - D_j))^2 over (0, T].

    On the segment (t_{j-1}, t_j] the dividends still to come are j..N, so the
    ratio uses their PV D_j; after the last dividend the ratio is one.
    ``spot_portions`` scales each active dividend (hybrid use).
    """
    S, r, T, sigma = market.spot, market.rate, market.term, market.vol
    divs = _portioned(_active(market, schedule), spot_portions)
    if not divs:
        return VolAdjustment(sigma, 0.0)
    pvs = [d * math.exp(-r * t) for t, d in divs]
    var = 0.0
    prev = 0.0
    remaining = math.fsum(pvs)
    for (t, _), pv in zip(divs, pvs):
        left = S - remaining
        if left <= 0.0:
            raise DomainError(f"remaining dividends exceed spot: S - D_j = {left}")
        var += (S / left) ** 2 * (t - prev)
        remaining -= pv
        prev = t
    var += T - prev
    vol = sigma * math.sqrt(var / T)
    return VolAdjustment(vol, vol / sigma - 1.0)


def vol_adjust_strike(
    market: MarketParams,
    schedule: DividendSchedule,
    strike_portions: Sequence[float] | None = None,
) -> VolAdjustment:
    """Average of the strike-model local variance (S / (S + D_j))^2 over (0, T].

    Before the first dividend the ratio is one; on [t_j, t_{j+1}) it uses the
    PV of the dividends already paid, 1..j (t_{N+1} = T).
    """
    S, r, T, sigma = market.spot, market.rate, market.term, market.vol
    divs = _portioned(_active(market, schedule), strike_portions)
    if not divs:
        return VolAdjustment(sigma, 0.0)
    ends = [t for t, _ in divs[1:]] + [T]
    var = divs[0].time
    paid = 0.0
    for (t, d), end in zip(divs, ends):
        paid += d * math.exp(-r * t)
        var += (S / (S + paid)) ** 2 * (end - t)
    vol = sigma * math.sqrt(var / T)
    return VolAdjustment(vol, 1.0 - vol / sigma)


def vol_adjust_hybrid(
    market: MarketParams, schedule: DividendSchedule
) -> VolAdjustment:
    """Product of the spot and strike corrections applied to the split dividends."""
    T = market.term
    active = _active(market, schedule)
    sigma = market.vol
    if not active:
        return VolAdjustment(sigma, 0.0)
    eps_s = vol_adjust_spot(market, active, [(T - t) / T for t in active.times])
    eps_k = vol_adjust_strike(market, active, [t / T for t in active.times])
    factor = (1.0 + eps_s.epsilon) * (1.0 - eps_k.epsilon)
    return VolAdjustment(sigma * factor, 1.0 - factor)


def price_spot_va(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    vol = vol_adjust_spot(market, schedule).adjusted_vol
    return bs_price(kind, _spot_inputs(market, schedule, vol))


def price_strike_va(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    vol = vol_adjust_strike(market, schedule).adjusted_vol
    return bs_price(kind, _strike_inputs(market, schedule, vol))


def price_hybrid_va(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    vol = vol_adjust_hybrid(market, schedule).adjusted_vol
    return bs_price(kind, _hybrid_inputs(market, schedule, vol))


# -- Brownian-bridge implied volatility ----------------------------------------


def hybrid_alphas(market: MarketParams, schedule: DividendSchedule) -> list[float]:
    T = market.term
    return [(T - t) / T for t in _active(market, schedule).times]


def va2_context(
    market: MarketParams, schedule: DividendSchedule, alphas: Sequence[float]
) -> Va2Context:
    r, T, sigma = market.rate, market.term, market.vol
    active = _active(market, schedule)
    if len(alphas) != len(active):
        raise ConfigError("one alpha is required per active dividend")
    if any(not 0.0 <= al <= 1.0 for al in alphas):
        raise ConfigError("alphas must lie in [0, 1]")
    spot_part = math.fsum(
        al * d * math.exp(-r * t) for (t, d), al in zip(active, alphas)
    )
    # strike-side dividends carried forward to T
    strike_part = math.fsum(
        (1.0 - al) * d * math.exp(-r * (t - T)) for (t, d), al in zip(active, alphas)
    )
    adj_spot = market.spot - spot_part
    if adj_spot <= 0.0:
        raise DomainError(f"dividends exceed spot: S0 - D_S = {adj_spot}")
    adj_strike = market.strike + strike_part
    if adj_strike <= 0.0:
        raise DomainError("adjusted strike must be positive")
    s = math.log(adj_spot)
    k = math.log(adj_strike) - r * T
    sd = sigma * math.sqrt(T)
    m = (s - k) / sd
    return Va2Context(tuple(alphas), s, k, m + 0.5 * sd, m + sd, sigma * sigma * T)


def implied_vol_va2(
    market: MarketParams, schedule: DividendSchedule, alphas: Sequence[float]
) -> float:
    """Closed-form implied volatility of the generalised hybrid model.

    Each dividend is split into a spot portion alpha_i and a strike portion
    1 - alpha_i; the squared local volatility is averaged along the Brownian
    bridge joining the adjusted log-spot and the discounted adjusted
    log-strike.
    """
    r, T, sigma = market.rate, market.term, market.vol
    active = _active(market, schedule)
    if not active:
        return sigma
    ctx = va2_context(market, schedule, alphas)
    a, b, s = ctx.a, ctx.b, ctx.s
    rt = math.sqrt(T)
    times = active.times
    pvs = [d * math.exp(-r * t) for t, d in active]
    spot_w = [al * pv for al, pv in zip(alphas, pvs)]
    strike_w = [(1.0 - al) * pv for al, pv in zip(alphas, pvs)]

    phi_a_end = norm_cdf(a - sigma * rt)
    first = 0.0
    for t, ws, wk in zip(times, spot_w, strike_w):
        phi_t = norm_cdf(a - sigma * t / rt)
        first += ws * (norm_cdf(a) - phi_t) - wk * (phi_t - phi_a_end)

    phi_b = norm_cdf(b)
    phi_b_end = norm_cdf(b - 2.0 * sigma * rt)
    phi_bt = [norm_cdf(b - 2.0 * sigma * t / rt) for t in times]
    second = 0.0
    n = len(times)
    for i in range(n):
        for j in range(n):
            lo, hi = (i, j) if times[i] <= times[j] else (j, i)
            second += spot_w[i] * spot_w[j] * (phi_b - phi_bt[lo])
            second += strike_w[i] * strike_w[j] * (phi_bt[hi] - phi_b_end)
            if i > j:
                second -= 2.0 * spot_w[i] * strike_w[j] * (phi_bt[j] - phi_bt[i])

    c1 = 2.0 * sigma * math.sqrt(2.0 * math.pi / T) * math.exp(0.5 * a * a - s)
    c2 = sigma * math.sqrt(math.pi / (2.0 * T)) * math.exp(0.5 * b * b - 2.0 * s)
    var = sigma * sigma + c1 * first + c2 * second
    if var <= 0.0:
        raise DomainError(f"implied variance is non-positive: {var}")
    return math.sqrt(var)


def price_hybrid_va2(
    kind: OptionKind, market: MarketParams, schedule: DividendSchedule
) -> float:
    vol = implied_vol_va2(market, schedule, hybrid_alphas(market, schedule))
    return bs_price(kind, _hybrid_inputs(market, schedule, vol))


# -- parity violation ------------------------------------------------------------


def _engine_inputs(
    method: PricingMethod, market: MarketParams, schedule: DividendSchedule
) -> BsInputs:
    if method is PricingMethod.HYBRID:
        return _hybrid_inputs(market, schedule)
    if method is PricingMethod.HYBRID_VA:
        return _hybrid_inputs(
            market, schedule, vol_adjust_hybrid(market, schedule).adjusted_vol
        )
    if method is PricingMethod.HYBRID_VA2:
        vol = implied_vol_va2(market, schedule, hybrid_alphas(market, schedule))
        return _hybrid_inputs(market, schedule, vol)
    raise ConfigError(f"{method.value} cannot value effective puts")


def parity_violation_single(
    market: MarketParams, dividend: tuple[float, float], policy: DividendPolicy
) -> float:
    """Exact parity gap for a single dividend (t_D, D) with t_D <= T.

    It is the value of a put struck at D expiring at t_D for the Liquidator
    policy, and of a cash-or-nothing put paying D for the Survivor policy.
    """
    t_d, amount = dividend
    if amount <= 0.0:
        raise DomainError("dividend amount must be positive")
    if not 0.0 < t_d <= market.term:
        raise ConfigError("dividend must fall in (0, T]")
    inputs = BsInputs(market.spot, amount, market.rate, market.vol, t_d)
    if policy is DividendPolicy.LIQUIDATOR:
        return bs_price(OptionKind.PUT, inputs)
    _, b2 = inputs.b1_b2()
    return amount * math.exp(-market.rate * t_d) * norm_cdf(-b2)


def _effective_put(
    method: PricingMethod,
    market: MarketParams,
    schedule: DividendSchedule,
    index: int,
    digital: bool,
) -> float:
    # struck at dividend `index`, expiring on its ex-date, earlier dividends
    # hybrid-split over (0, t_index)
    t_i, d_i = schedule.entries[index]
    sub = market.with_(strike=d_i, term=t_i)
    prior = DividendSchedule(schedule.entries[:index])
    inputs = _engine_inputs(method, sub, prior)
    if not digital:
        return bs_price(OptionKind.PUT, inputs)
    _, b2 = inputs.b1_b2()
    return inputs.eff_strike * math.exp(-inputs.rate * inputs.term) * norm_cdf(-b2)


def parity_violation_multi(
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy,
    method: PricingMethod = PricingMethod.HYBRID_VA,
) -> float:
    """Approximate parity gap for a dividend stream, valued with `method` puts.

    Liquidator: one effective put struck at the last dividend.  Survivor:
    alternating sum of effective digital puts, one per ex-dividend date.
    """
    active = _active(market, schedule)
    if not active:
        return 0.0
    n = len(active)
    if policy is DividendPolicy.LIQUIDATOR:
        return _effective_put(method, market, active, n - 1, digital=False)
    total = 0.0
    for i in range(n):
        sign = 1.0 if (n - 1 - i) % 2 == 0 else -1.0
        total += sign * _effective_put(method, market, active, i, digital=True)
    return total


def parity_adjustment(
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy,
    method: PricingMethod = PricingMethod.HYBRID_VA,
) -> ParityAdjustment:
    return ParityAdjustment(
        policy, parity_violation_multi(market, schedule, policy, method)
    )


def price_put_pa(
    method: PricingMethod,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy,
) -> float:
    """Base-method put minus the parity violation valued with the same method."""
    base = method.base
    if base not in (
        PricingMethod.HYBRID,
        PricingMethod.HYBRID_VA,
        PricingMethod.HYBRID_VA2,
    ):
        raise ConfigError(f"no parity adjustment defined for {method.value}")
    put = _METHODS[base](OptionKind.PUT, market, schedule)
    return put - parity_violation_multi(market, schedule, policy, base)


_METHODS: dict[PricingMethod, Callable[..., float]] = {
    PricingMethod.SPOT: price_spot,
    PricingMethod.STRIKE: price_strike,
    PricingMethod.HYBRID: price_hybrid,
    PricingMethod.SPOT_VA: price_spot_va,
    PricingMethod.STRIKE_VA: price_strike_va,
    PricingMethod.HYBRID_VA: price_hybrid_va,
    PricingMethod.HYBRID_VA2: price_hybrid_va2,
}


def price(
    method: PricingMethod | str,
    kind: OptionKind | str,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
) -> float:
    """Dispatch on the method catalogue.  PA variants only adjust puts."""
    method = PricingMethod.parse(method)
    kind = OptionKind.parse(kind)
    if method.is_pa:
        if kind is OptionKind.CALL:
            return _METHODS[method.base](kind, market, schedule)
        return price_put_pa(method, market, schedule, policy)
    return _METHODS[method](kind, market, schedule)


def parity_check(
    method: PricingMethod | str,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
) -> float:
    """Residual C - P - (S0 - D) + K exp(-rT) of the method's call and put.

    Zero for every unadjusted method; equals the parity violation for the PA
    variants, whose puts deliberately break the relation.
    """
    method = PricingMethod.parse(method)
    d = pv_dividends(_active(market, schedule), market.rate, (0.0, market.term))
    c = price(method, OptionKind.CALL, market, schedule, policy)
    p = price(method, OptionKind.PUT, market, schedule, policy)
    return c - p - (market.spot - d) + market.strike * math.exp(
        -market.rate * market.term
    )
