"""Crank-Nicolson finite differences for the Black-Scholes PDE with cash dividends.

The PDE is integrated backward in time on a uniform spot grid.  At every
ex-dividend date the value is shifted by the policy-dependent payout,
V(S, t_i-) = V(S - d(S), t_i+), using linear interpolation on the grid.
European puts take one of three lower boundary conditions; the American put
is solved with projected SOR against fixed boundaries and serves as the
referee for choosing between them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
    remaining_dividends,
)

__all__ = [
    "BoundaryVariant",
    "CnSolution",
    "ConvergenceError",
    "GridSpec",
    "apply_dividend_jump",
    "boundary_value",
    "cn_price_european",
    "cn_solve",
    "psor_price_american_put",
    "solve_tridiagonal",
    "time_grid",
    "upper_boundary_value",
]

_TIME_EPS = 1e-10


class ConvergenceError(RuntimeError):
    """An iterative or direct linear solve did not produce a usable answer."""


class BoundaryVariant(enum.Enum):
    """Lower boundary condition for European puts.

    SPOT subtracts the remaining dividends from the boundary spot, STRIKE adds
    them to the discounted strike, HYBRID splits them between both.
    """

    SPOT = "spot"
    STRIKE = "strike"
    HYBRID = "hybrid"

    @classmethod
    def parse(cls, value: str | BoundaryVariant) -> BoundaryVariant:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        key = key[:-2] if key.endswith("bc") else key
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown boundary variant {value!r}") from None


@dataclass(frozen=True)
class GridSpec:
    """Discretisation of the (S, t) domain.

    ``rannacher_steps`` fully implicit sub-steps replace the Crank-Nicolson
    step that follows the payoff and each dividend jump, damping the
    oscillations those kinks otherwise leave behind; set it to 0 for the
    plain scheme.
    """

    s_min: float = 0.0
    s_max: float = 500.0
    ds: float = 1.25
    dt: float = 0.05
    rannacher_steps: int = 2

    def __post_init__(self) -> None:
        if not (self.s_min >= 0.0 and self.s_min < self.s_max):
            raise ConfigError("grid requires 0 <= s_min < s_max")
        if self.ds <= 0.0 or self.dt <= 0.0:
            raise ConfigError("ds and dt must be positive")
        n = (self.s_max - self.s_min) / self.ds
        if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 3:
            raise ConfigError("(s_max - s_min) / ds must be an integer >= 3")
        if self.rannacher_steps < 0:
            raise ConfigError("rannacher_steps must be non-negative")

    @property
    def n_intervals(self) -> int:
        return int(round((self.s_max - self.s_min) / self.ds))

    def spots(self) -> np.ndarray:
        return self.s_min + self.ds * np.arange(self.n_intervals + 1)

    def refined(self, factor: int = 2) -> GridSpec:
        return GridSpec(
            self.s_min, self.s_max, self.ds / factor, self.dt / factor,
            self.rannacher_steps,
        )


@dataclass(frozen=True)
class CnSolution:
    kind: OptionKind
    policy: DividendPolicy
    boundary: BoundaryVariant
    american: bool
    spots: np.ndarray
    times: np.ndarray
    values: np.ndarray = field(repr=False)
    """values[n] holds V(S, times[n]) on the t- side of any dividend at times[n]."""

    def price_at(self, spot: float, t_index: int = 0) -> float:
        return float(np.interp(spot, self.spots, self.values[t_index]))


# -- linear algebra kernels ------------------------------------------------------


@njit(cache=True)
def _thomas(lower, diag, upper, rhs):  # pragma: no cover - compiled
    n = diag.shape[0]
    c = np.empty(n)
    d = np.empty(n)
    beta = diag[0]
    if beta == 0.0:
        return c, False
    c[0] = upper[0] / beta
    d[0] = rhs[0] / beta
    for i in range(1, n):
        beta = diag[i] - lower[i] * c[i - 1]
        if beta == 0.0:
            return c, False
        c[i] = upper[i] / beta if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        d[i] -= c[i] * d[i + 1]
    return d, True


def solve_tridiagonal(
    lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """Solve A x = rhs for tridiagonal A by forward elimination and back substitution.

    All four arrays have length n; ``lower[0]`` and ``upper[-1]`` are ignored.
    """
    args = [
        np.ascontiguousarray(a, dtype=np.float64) for a in (lower, diag, upper, rhs)
    ]
    n = args[1].shape[0]
    if any(a.shape != (n,) for a in args):
        raise ConfigError("tridiagonal bands and rhs must share one length")
    x, ok = _thomas(*args)
    if not ok or not np.all(np.isfinite(x)):
        raise ConvergenceError("tridiagonal solve hit a zero pivot")
    return x


@njit(cache=True)
def _psor(lower, diag, upper, rhs, x, floor, omega, tol, max_iter):  # pragma: no cover
    n = diag.shape[0]
    for it in range(1, max_iter + 1):
        err = 0.0
        for i in range(n):
            s = rhs[i]
            if i > 0:
                s -= lower[i] * x[i - 1]
            if i < n - 1:
                s -= upper[i] * x[i + 1]
            y = x[i] + omega * (s / diag[i] - x[i])
            if y < floor[i]:
                y = floor[i]
            e = abs(y - x[i])
            if e > err:
                err = e
            x[i] = y
        if err < tol:
            return it
    return -1


# -- boundaries and dividend shifts ------------------------------------------------


def boundary_value(
    variant: BoundaryVariant,
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    t: float,
    s_edge: float,
    *,
    inclusive: bool = True,
) -> float:
    """Lower boundary value at spot `s_edge` and time `t`.

    Puts use the chosen variant; for calls the lower edge is worthless.
    ``inclusive`` counts a dividend falling exactly at t as still to come.
    """
    if kind is OptionKind.CALL:
        return 0.0
    total, spot_part, strike_part = remaining_dividends(
        schedule.active(market.term), market.rate, t, market.term, inclusive=inclusive
    )
    disc_k = market.strike * math.exp(-market.rate * (market.term - t))
    if variant is BoundaryVariant.SPOT:
        return disc_k - max(s_edge - total, 0.0)
    if variant is BoundaryVariant.STRIKE:
        return disc_k + total - s_edge
    return disc_k + strike_part - max(s_edge - spot_part, 0.0)


def upper_boundary_value(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    t: float,
    s_edge: float,
    *,
    inclusive: bool = True,
) -> float:
    if kind is OptionKind.PUT:
        return 0.0
    total, _, _ = remaining_dividends(
        schedule.active(market.term), market.rate, t, market.term, inclusive=inclusive
    )
    return s_edge - total - market.strike * math.exp(-market.rate * (market.term - t))


def apply_dividend_jump(
    spots: np.ndarray,
    values: np.ndarray,
    amount: float,
    policy: DividendPolicy,
) -> np.ndarray:
    """Map values at t_i+ to t_i- across a dividend of `amount`.

    Liquidator: V(S) <- V(max(S - d, s_min)).  Survivor: V(S) <- V(S - d) when
    S >= d, otherwise V(S) unchanged since nothing is paid.
    """
    if amount == 0.0:
        return values.copy()
    if policy is DividendPolicy.LIQUIDATOR:
        shifted = np.maximum(spots - amount, spots[0])
    else:
        shifted = np.where(spots >= amount, spots - amount, spots)
    return np.interp(shifted, spots, values)


def time_grid(term: float, schedule: DividendSchedule, dt: float) -> np.ndarray:
    """Uniform steps of `dt` from 0 merged with every dividend date and T."""
    n = int(math.floor(term / dt + 1e-9))
    base = [i * dt for i in range(n + 1)]
    events = [t for t in schedule.active(term).times]
    pts = sorted(set(base) | set(events) | {term})
    out = [pts[0]]
    for p in pts[1:]:
        if p - out[-1] > _TIME_EPS:
            out.append(p)
        elif p in events or p == term:
            out[-1] = p  # keep the event time exact
    return np.asarray(out)


# -- solvers ---------------------------------------------------------------------


def cn_solve(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
    boundary: BoundaryVariant = BoundaryVariant.SPOT,
    grid: GridSpec | None = None,
    *,
    american: bool = False,
    omega: float = 1.2,
    tol: float | None = None,
    max_iter: int = 20_000,
) -> CnSolution:
    """Backward Crank-Nicolson integration from T to 0.

    With ``american=True`` (puts only) every step is solved by projected SOR
    against the exercise value and the fixed boundaries V = K - S at the lower
    edge and V = 0 at the upper edge.
    """
    grid = grid or GridSpec()
    if american and kind is not OptionKind.PUT:
        raise ConfigError("the American solver handles puts only")
    if not grid.s_min < market.spot < grid.s_max:
        raise ConfigError("spot must lie strictly inside the grid")
    T, r, K = market.term, market.rate, market.strike
    divs = schedule.active(T)
    div_at = dict(divs.entries)
    S = grid.spots()
    times = time_grid(T, divs, grid.dt)
    if any(t not in set(times) for t in div_at):
        raise ConfigError("dividend dates are not aligned with the time grid")
    tol = 1e-8 * max(K, 1.0) if tol is None else tol

    inner = S[1:-1]
    a = 0.5 * market.vol**2 * inner**2 / grid.ds**2
    b = 0.5 * r * inner / grid.ds
    lo, mid, up = a - b, -2.0 * a - r, a + b
    exercise = np.maximum(K - S, 0.0)

    def edges(t: float) -> tuple[float, float]:
        if american:
            return K - S[0], 0.0
        return (
            boundary_value(boundary, kind, market, divs, t, S[0]),
            upper_boundary_value(kind, market, divs, t, S[-1]),
        )

    def jump(v: np.ndarray, t: float) -> np.ndarray:
        v = apply_dividend_jump(S, v, div_at[t], policy)
        if american:
            v = np.maximum(v, K - S)
        v[0], v[-1] = edges(t)
        return v

    v = np.maximum(S - K, 0.0) if kind is OptionKind.CALL else exercise.copy()
    if T in div_at:
        v = jump(v, T)
    values = np.empty((len(times), len(S)))
    values[-1] = v

    for n in range(len(times) - 1, 0, -1):
        t_hi, t_lo = times[n], times[n - 1]
        restart = n == len(times) - 1 or t_hi in div_at
        if restart and grid.rannacher_steps:
            sub = np.linspace(t_hi, t_lo, grid.rannacher_steps + 1)
            thetas = [1.0] * grid.rannacher_steps
        else:
            sub = np.array([t_hi, t_lo])
            thetas = [0.5]
        for (s_hi, s_lo), theta in zip(zip(sub[:-1], sub[1:]), thetas):
            h = s_hi - s_lo
            b_lo, b_hi = edges(s_lo)
            explicit = (1.0 - theta) * h
            rhs = v[1:-1] + explicit * (lo * v[:-2] + mid * v[1:-1] + up * v[2:])
            rhs[0] += theta * h * lo[0] * b_lo
            rhs[-1] += theta * h * up[-1] * b_hi
            l_band = -theta * h * lo
            d_band = 1.0 - theta * h * mid
            u_band = -theta * h * up
            if american:
                x = np.maximum(v[1:-1], exercise[1:-1])
                it = _psor(l_band, d_band, u_band, rhs, x, exercise[1:-1],
                           omega, tol, max_iter)
                if it < 0:
                    raise ConvergenceError(
                        f"PSOR did not converge within {max_iter} iterations "
                        f"at t={s_lo:.6g}"
                    )
            else:
                x = solve_tridiagonal(l_band, d_band, u_band, rhs)
            v = np.concatenate(([b_lo], x, [b_hi]))
        if t_lo in div_at:
            v = jump(v, t_lo)
        values[n - 1] = v

    return CnSolution(kind, policy, boundary, american, S, times, values)


def cn_price_european(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
    boundary: BoundaryVariant = BoundaryVariant.SPOT,
    grid: GridSpec | None = None,
) -> float:
    sol = cn_solve(kind, market, schedule, policy, boundary, grid)
    return sol.price_at(market.spot)


def psor_price_american_put(
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
    grid: GridSpec | None = None,
    *,
    omega: float = 1.2,
    max_iter: int = 20_000,
) -> float:
    sol = cn_solve(
        OptionKind.PUT, market, schedule, policy, BoundaryVariant.SPOT, grid,
        american=True, omega=omega, max_iter=max_iter,
    )
    return sol.price_at(market.spot)
