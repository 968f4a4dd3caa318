"""European option pricing under discrete cash dividends.

Closed-form approximations (spot, strike and hybrid dividend adjustments,
volatility-adjusted variants and put-call parity corrections), a
Crank-Nicolson benchmark with policy-aware dividend jumps, and an antithetic
Monte Carlo oracle.
"""

from .analytic import PricingMethod, bs_price, parity_adjustment, price
from .core import (
    ConfigError,
    Dividend,
    DividendPolicy,
    DividendSchedule,
    DomainError,
    MarketParams,
    OptionKind,
)

__all__ = [
    "ConfigError",
    "Dividend",
    "DividendPolicy",
    "DividendSchedule",
    "DomainError",
    "MarketParams",
    "OptionKind",
    "PricingMethod",
    "bs_price",
    "parity_adjustment",
    "price",
]

__version__ = "0.1.0"
