"""Antithetic Monte Carlo for GBM with discrete cash dividend jumps.

Between ex-dividend dates the spot follows exact lognormal transitions; at each
date the policy decides what is actually paid.  Paths are generated in fixed
blocks, each seeded from ``SeedSequence(seed, spawn_key=(block,))``, so path i
is the same regardless of how many paths are requested or how the blocks are
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
)

__all__ = ["McConfig", "McResult", "mc_price", "sample_payoffs", "simulate_terminal"]


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 20090401
    antithetic: bool = True
    block_size: int = 1 << 16

    def __post_init__(self) -> None:
        if self.paths <= 0:
            raise ConfigError("paths must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.block_size <= 0 or self.block_size % 2:
            raise ConfigError("block_size must be positive and even")
        if self.antithetic and self.paths % 2:
            raise ConfigError("antithetic sampling needs an even path count")


class McResult(NamedTuple):
    price: float
    std_error: float


def _block_normals(seed: int, block: int, rows: int, cols: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.PCG64(ss)).standard_normal((rows, cols))


def simulate_terminal(
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy,
    z: np.ndarray,
) -> np.ndarray:
    """Terminal spots for standard normal draws `z` of shape (paths, steps).

    Steps are the active dividend dates followed by T; z must have one column
    per step.
    """
    divs = schedule.active(market.term)
    times = list(divs.times) + [market.term]
    if z.shape[1] != len(times):
        raise ConfigError("z must have one column per simulation step")
    r, vol = market.rate, market.vol
    s = np.full(z.shape[0], market.spot)
    prev = 0.0
    for j, t in enumerate(times):
        h = t - prev
        if h > 0.0:
            s = s * np.exp((r - 0.5 * vol * vol) * h + vol * math.sqrt(h) * z[:, j])
        if j < len(divs):
            d = divs.entries[j].amount
            if policy is DividendPolicy.LIQUIDATOR:
                s = np.maximum(s - d, 0.0)
            else:
                s = np.where(s >= d, s - d, s)
        prev = t
    return s


def _samples(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy,
    config: McConfig,
) -> Iterator[np.ndarray]:
    """Undiscounted payoff samples block by block (pair averages if antithetic)."""
    steps = len(schedule.active(market.term)) + 1
    per_block = config.block_size // 2 if config.antithetic else config.block_size
    remaining = config.paths // 2 if config.antithetic else config.paths
    block = 0
    while remaining > 0:
        rows = min(per_block, remaining)
        z = _block_normals(config.seed, block, rows, steps)
        y = _payoff(kind, market.strike, simulate_terminal(market, schedule, policy, z))
        if config.antithetic:
            anti = simulate_terminal(market, schedule, policy, -z)
            y = 0.5 * (y + _payoff(kind, market.strike, anti))
        yield y
        remaining -= rows
        block += 1


def sample_payoffs(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
    config: McConfig | None = None,
) -> np.ndarray:
    """All discounted samples in path order; mostly useful for diagnostics."""
    config = config or McConfig()
    disc = math.exp(-market.rate * market.term)
    return disc * np.concatenate(list(_samples(kind, market, schedule, policy, config)))


def mc_price(
    kind: OptionKind,
    market: MarketParams,
    schedule: DividendSchedule,
    policy: DividendPolicy = DividendPolicy.LIQUIDATOR,
    config: McConfig | None = None,
) -> McResult:
    """Discounted mean payoff and its standard error.

    With antithetic sampling the standard error is taken over pair averages,
    which are the independent samples.
    """
    config = config or McConfig()
    disc = math.exp(-market.rate * market.term)
    sums: list[float] = []
    sq_sums: list[float] = []
    n = 0
    for y in _samples(kind, market, schedule, policy, config):
        sums.append(float(y.sum()))
        sq_sums.append(float(np.dot(y, y)))
        n += y.size
    mean = math.fsum(sums) / n
    var = max(math.fsum(sq_sums) / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return McResult(disc * mean, disc * math.sqrt(var / n))


def _payoff(kind: OptionKind, strike: float, s: np.ndarray) -> np.ndarray:
    if kind is OptionKind.CALL:
        return np.maximum(s - strike, 0.0)
    return np.maximum(strike - s, 0.0)
