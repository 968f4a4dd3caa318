"""Command line entry point.

Exit codes: 0 success, 1 validation or numerical failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from ..analytic import PricingMethod, price
from ..core import (
    ConfigError,
    DividendPolicy,
    DividendSchedule,
    MarketParams,
    OptionKind,
)
from ..mc import McConfig, mc_price
from ..pde import BoundaryVariant, cn_price_european, psor_price_american_put
from .report import (
    PostConditionError,
    Precision,
    ScenarioError,
    emit_csv,
    emit_fig1_csv,
    fig1_series,
    run_scenario,
)
from .scenario import BUILTINS, builtin, load_scenario
from .validate import run_validation

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

_NUMERIC_METHODS = ("cn", "american", "mc")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discdiv",
        description="European options with discrete cash dividends.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument(
        "--precision", choices=[p.value for p in Precision], default="table"
    )
    common.add_argument("--seed", type=_u64, help="Monte Carlo seed override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", parents=[common], help="price a single option")
    p.add_argument(
        "--method", required=True,
        choices=[m.value for m in PricingMethod] + list(_NUMERIC_METHODS),
    )
    p.add_argument("--kind", choices=[k.value for k in OptionKind], default="call")
    p.add_argument("--spot", type=float, default=100.0)
    p.add_argument("--strike", type=float, default=100.0)
    p.add_argument("--rate", type=float, default=0.06)
    p.add_argument("--vol", type=float, default=0.30)
    p.add_argument("--term", type=float, required=True)
    p.add_argument(
        "--dividend", nargs=2, type=float, action="append", default=[],
        metavar=("TIME", "AMOUNT"), help="repeatable",
    )
    p.add_argument(
        "--policy", choices=[x.value for x in DividendPolicy], default="liquidator"
    )
    p.add_argument(
        "--boundary", choices=[b.value for b in BoundaryVariant], default="spot"
    )
    p.add_argument("--paths", type=int, default=McConfig.paths)

    t = sub.add_parser("table", parents=[common], help="reproduce a builtin table")
    t.add_argument("name", choices=sorted(BUILTINS))

    sub.add_parser("fig1", parents=[common], help="boundary variants vs American put")
    sub.add_parser("validate", parents=[common], help="run the invariant suite")

    c = sub.add_parser("compare", parents=[common], help="run a scenario file")
    c.add_argument("--config", required=True, type=Path)
    return parser


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _price(args: argparse.Namespace) -> str:
    market = MarketParams(args.spot, args.strike, args.rate, args.vol, args.term)
    schedule = DividendSchedule.of(sorted((t, d) for t, d in args.dividend))
    kind = OptionKind.parse(args.kind)
    policy = DividendPolicy.parse(args.policy)
    if args.method == "cn":
        value = cn_price_european(
            kind, market, schedule, policy, BoundaryVariant.parse(args.boundary)
        )
    elif args.method == "american":
        if kind is not OptionKind.PUT:
            raise ConfigError("the American solver handles puts only")
        value = psor_price_american_put(market, schedule, policy)
    elif args.method == "mc":
        config = McConfig(paths=args.paths, seed=McConfig.seed if args.seed is None
                          else args.seed)
        res = mc_price(kind, market, schedule, policy, config)
        return f"{res.price:.9g},{res.std_error:.9g}\n"
    else:
        value = price(args.method, kind, market, schedule, policy)
    return f"{value:.9g}\n" if args.precision == "full" else f"{value:.2f}\n"


def _scenario_csv(scenario, args) -> str:
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    return emit_csv(run_scenario(scenario), args.precision)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "price":
            _write(_price(args), args.out)
        elif args.command == "table":
            _write(_scenario_csv(builtin(args.name), args), args.out)
        elif args.command == "compare":
            _write(_scenario_csv(load_scenario(args.config), args), args.out)
        elif args.command == "fig1":
            _write(emit_fig1_csv(fig1_series(), args.precision), args.out)
        elif args.command == "validate":
            kwargs = {} if args.seed is None else {"seed": args.seed}
            checks = run_validation(**kwargs)
            lines = [
                f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}\n"
                for c in checks
            ]
            _write("".join(lines), args.out)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_FAILED
    except (PostConditionError, ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
