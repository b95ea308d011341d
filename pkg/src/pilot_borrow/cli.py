"""Command-line interface.

Subcommands mirror the analyses of the simulation study: ``power`` for one
cell, ``grid`` for a config-driven sweep, ``conflict`` for pilot/definitive
disagreement, ``duration`` and ``recruit`` for the feasibility arithmetic,
and ``replicate`` to dump every intermediate of a single simulated trial.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 grid completed
with flagged (infeasible or unreachable) cells.

The environment variable ``PILOT_BORROW_SEED`` overrides the configured
master seed; an explicit ``--seed`` flag wins over both.
"""

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, RecruitmentPlan, parse_config
from .recruitment import (
    RecruitmentModel,
    expected_duration,
    months_for_probability,
    recruitment_probability,
    round_months,
)
from .runner import (
    STATUS_OK,
    STATUS_UNREACHABLE,
    ResultRow,
    emit_results,
    print_summary,
    run_grid,
)
from .simulate import (
    DEFAULT_MASTER_SEED,
    DesignScenario,
    estimate_power,
    replicate_stream,
    run_conflict_grid,
    trace_replicate,
)

SEED_ENV_VAR = "PILOT_BORROW_SEED"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_FLAGGED = 3


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return None
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    if not 0 <= seed < (1 << 64):
        raise ConfigError(f"{SEED_ENV_VAR} must be an unsigned 64-bit integer")
    return seed


def _resolve_seed(flag_seed: int | None, fallback: int) -> int:
    if flag_seed is not None:
        return flag_seed
    env = _env_seed()
    if env is not None:
        return env
    return fallback


def _float_list(text: str, name: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of numbers") from None
    if not values:
        raise ConfigError(f"{name} must list at least one value")
    return values


def _add_scenario_args(parser: argparse.ArgumentParser, pilot_fraction_default: float):
    parser.add_argument("--p-c", type=float, required=True, help="control success probability")
    parser.add_argument("--rr", type=float, required=True, help="definitive risk ratio")
    parser.add_argument(
        "--pilot-fraction",
        type=float,
        default=pilot_fraction_default,
        help="pilot size as a fraction of the definitive total",
    )
    parser.add_argument(
        "--multiplier",
        type=float,
        default=1.0,
        help="pilot risk-ratio multiplier (1 = no conflict)",
    )
    parser.add_argument("--phi", type=float, default=0.975, help="posterior decision threshold")
    parser.add_argument("--w", type=float, default=0.5, help="initial informative prior weight")
    parser.add_argument("--replicates", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=None, help="master seed (wins over env)")
    parser.add_argument("--workers", type=int, default=1)


def _scenario_from_args(args) -> DesignScenario:
    try:
        return DesignScenario(
            control_rate=args.p_c,
            risk_ratio=args.rr,
            pilot_rr_multiplier=args.multiplier,
            pilot_fraction=args.pilot_fraction,
            threshold=args.phi,
            prior_weight=args.w,
            replicates=args.replicates,
            master_seed=_resolve_seed(args.seed, DEFAULT_MASTER_SEED),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_power(args) -> int:
    scenario = _scenario_from_args(args)
    if args.n_total < 2:
        raise ConfigError(f"--n-total must be >= 2, got {args.n_total}")
    estimate = estimate_power(scenario, args.n_total, workers=args.workers)
    print(
        f"n_total={estimate.n_total} power={estimate.power:.6f} "
        f"se={estimate.standard_error:.6f} replicates={estimate.replicates} "
        f"seed={scenario.master_seed}"
    )
    return EXIT_OK


def _cmd_grid(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    config = parse_config(text)
    overrides = {}
    seed = _resolve_seed(args.seed, config.master_seed)
    if seed != config.master_seed:
        overrides["master_seed"] = seed
    if args.replicates is not None:
        if args.replicates < 1:
            raise ConfigError("--replicates must be >= 1")
        overrides["replicates"] = args.replicates
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_path"] = args.out
    if overrides:
        config = replace(config, **overrides)

    for cell in config.infeasible_cells():
        print(
            f"warning: infeasible cell p_C={cell.control_rate:g} rr={cell.risk_ratio:g} "
            f"c={cell.pilot_rr_multiplier:g} (success probability above 1); flagged, not run",
            file=sys.stderr,
        )
    rows = run_grid(config)
    if config.output_path is not None:
        emit_results(rows, config.output_path, recruitment=config.recruitment)
        print(f"wrote {config.output_path}")
    else:
        print_summary(rows)
    if any(row.status != STATUS_OK for row in rows):
        return EXIT_FLAGGED
    return EXIT_OK


def _cmd_conflict(args) -> int:
    scenario = _scenario_from_args(args)
    multipliers = _float_list(args.multipliers, "--multipliers")
    for multiplier in multipliers:
        if multiplier * scenario.risk_ratio * scenario.control_rate > 1.0:
            raise ConfigError(
                f"multiplier {multiplier:g} makes the pilot success probability exceed 1"
            )
    if not 0.0 < args.target_power < 1.0:
        raise ConfigError("--target-power must lie in (0, 1)")
    results = run_conflict_grid(
        scenario, multipliers, target_power=args.target_power, workers=args.workers
    )
    rows = []
    for multiplier, result in zip(multipliers, results):
        rows.append(
            ResultRow(
                control_rate=scenario.control_rate,
                risk_ratio=scenario.risk_ratio,
                pilot_rr_multiplier=multiplier,
                pilot_fraction=scenario.pilot_fraction,
                n_total=result.n_total,
                pilot_total=result.pilot_total,
                power=result.power_at_n.power,
                power_se=result.power_at_n.standard_error,
                replicates=scenario.replicates,
                durations=(),
                recruit_probs=(),
                status=STATUS_OK if result.achieved else STATUS_UNREACHABLE,
                seed=scenario.master_seed,
            )
        )
    if args.out is not None:
        emit_results(rows, args.out, recruitment=RecruitmentPlan(rates=(), months=()))
        print(f"wrote {args.out}")
    else:
        print_summary(rows)
    if any(row.status != STATUS_OK for row in rows):
        return EXIT_FLAGGED
    return EXIT_OK


def _cmd_duration(args) -> int:
    if args.n < 0:
        raise ConfigError("--n must be >= 0")
    rates = _float_list(args.rates, "--rates")
    for rate in rates:
        if rate <= 0:
            raise ConfigError("--rates entries must be positive")
        months = expected_duration(args.n, rate)
        print(f"rate={rate:g}/month: {months:.6g} months (display {round_months(months)})")
    return EXIT_OK


def _cmd_recruit(args) -> int:
    try:
        model = RecruitmentModel(args.lambda0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.n < 0:
        raise ConfigError("--n must be >= 0")
    if args.months is None and args.solve is None:
        raise ConfigError("recruit needs --months and/or --solve")
    if args.months is not None:
        for m in _float_list(args.months, "--months"):
            if m <= 0:
                raise ConfigError("--months entries must be positive")
            prob = recruitment_probability(model, args.n, m)
            print(f"P(N >= {args.n} within {m:g} months | lambda0={args.lambda0:g}) = {prob:.6f}")
    if args.solve is not None:
        if not 0.0 < args.solve < 1.0:
            raise ConfigError("--solve must lie in (0, 1)")
        months = months_for_probability(model, args.n, args.solve)
        print(
            f"months for P(N >= {args.n}) >= {args.solve:g} at lambda0={args.lambda0:g}: "
            f"{months:.2f}"
        )
    return EXIT_OK


def _format_mixture(mixture) -> str:
    return " + ".join(
        f"{w:.6f} * Beta({p.alpha:g}, {p.beta:g})" for w, p in mixture.components
    )


def _cmd_replicate(args) -> int:
    scenario = _scenario_from_args(args)
    if args.n_total < 2:
        raise ConfigError(f"--n-total must be >= 2, got {args.n_total}")
    if args.index < 0:
        raise ConfigError("--index must be >= 0")
    rng = replicate_stream(scenario.master_seed, args.n_total, args.index)
    trace = trace_replicate(scenario, args.n_total, rng)
    print(f"replicate index={args.index} seed={scenario.master_seed} n_total={args.n_total}")
    print(
        f"pilot draws: control {trace.pilot_control.successes}/{trace.pilot_control.size}, "
        f"treatment {trace.pilot_treatment.successes}/{trace.pilot_treatment.size}"
    )
    print(f"prior control:   {_format_mixture(trace.prior_control)}")
    print(f"prior treatment: {_format_mixture(trace.prior_treatment)}")
    print(
        f"definitive draws: control {trace.definitive_control.successes}/"
        f"{trace.definitive_control.size}, treatment "
        f"{trace.definitive_treatment.successes}/{trace.definitive_treatment.size}"
    )
    print(f"posterior control:   {_format_mixture(trace.posterior_control)}")
    print(f"posterior treatment: {_format_mixture(trace.posterior_treatment)}")
    print(
        f"updated informative weight: control {trace.updated_weight_control:.6f}, "
        f"treatment {trace.updated_weight_treatment:.6f}"
    )
    print(f"superiority probability: {trace.superiority:.6f}")
    print(f"decision: {'superior' if trace.success else 'not superior'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilot-borrow",
        description=(
            "Sample size, duration, and recruitment feasibility for definitive "
            "trials that borrow pilot data through robust mixture priors."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_power = sub.add_parser("power", help="estimate power for one design cell")
    _add_scenario_args(p_power, pilot_fraction_default=0.0)
    p_power.add_argument("--n-total", type=int, required=True, help="definitive total size")
    p_power.set_defaults(func=_cmd_power)

    p_grid = sub.add_parser("grid", help="run a config-driven scenario grid")
    p_grid.add_argument("--config", required=True, help="path to JSON config")
    p_grid.add_argument("--seed", type=int, default=None)
    p_grid.add_argument("--replicates", type=int, default=None)
    p_grid.add_argument("--workers", type=int, default=None)
    p_grid.add_argument("--out", default=None, help="CSV output path (overrides config)")
    p_grid.set_defaults(func=_cmd_grid)

    p_conflict = sub.add_parser("conflict", help="sweep pilot risk-ratio multipliers")
    _add_scenario_args(p_conflict, pilot_fraction_default=0.2)
    p_conflict.add_argument(
        "--multipliers",
        default="0.8,0.85,0.9,0.95,1.0",
        help="comma-separated pilot risk-ratio multipliers",
    )
    p_conflict.add_argument("--target-power", type=float, default=0.80)
    p_conflict.add_argument("--out", default=None, help="CSV output path")
    p_conflict.set_defaults(func=_cmd_conflict)

    p_duration = sub.add_parser("duration", help="expected duration at given rates")
    p_duration.add_argument("--n", type=int, required=True, help="sample size to recruit")
    p_duration.add_argument("--rates", default="2,5,10", help="recruits per month")
    p_duration.set_defaults(func=_cmd_duration)

    p_recruit = sub.add_parser("recruit", help="recruitment probability queries")
    p_recruit.add_argument("--lambda0", type=float, required=True, help="pilot recruits/month")
    p_recruit.add_argument("--n", type=int, required=True, help="recruits needed")
    p_recruit.add_argument("--months", default=None, help="windows to evaluate")
    p_recruit.add_argument(
        "--solve", type=float, default=None, help="find months reaching this probability"
    )
    p_recruit.set_defaults(func=_cmd_recruit)

    p_replicate = sub.add_parser("replicate", help="debug one simulated replicate")
    _add_scenario_args(p_replicate, pilot_fraction_default=0.0)
    p_replicate.add_argument("--n-total", type=int, required=True)
    p_replicate.add_argument("--index", type=int, default=0, help="replicate index")
    p_replicate.set_defaults(func=_cmd_replicate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
