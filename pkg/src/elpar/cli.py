"""Command-line driver: simulate, fit, evaluate, value players, serve.

Every command reads and writes flat files; the single model JSON produced
by `fit` feeds all the others.  Exit codes: 0 success, 2 bad input, 3 the
fit did not converge (the model file is still written), 4 a requested
budget cannot fill every slot.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from .data import (
    Line,
    MatchRecord,
    build_features,
    load_matches,
    load_players,
    replacement_levels,
    train_test_split,
    SnapshotIndex,
)
from .errors import (
    DomainError,
    EngineError,
    InfeasibleBudgetError,
    NotConvergedError,
)
from .evaluate import calibration_curve, outcome_label, residual_summary, write_evaluation_report
from .glm import FEATURE_ORDER, FitConfig, SkellamGlmModel, fit, predict_outcome
from .market import (
    DEFAULT_BUDGET_INCREMENT,
    ValuationRecord,
    build_value_curve,
    cost_per_point,
    fair_transfer_fee,
    optimize_budget,
    valuation_records,
    wage_redistribution,
    write_valuation_table,
)
from .model_io import load_model, save_model
from .points import CANONICAL_FORMATIONS, Formation, elpar_formation_average, elpar_table
from .simulate import write_synthetic_league

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_INFEASIBLE = 4

DEFAULT_SPLIT_FRACTION = 0.8
DEFAULT_SERVICE_PORT = 8000


def _check_port(port: int) -> None:
    if not (1024 <= port <= 65535):
        raise DomainError(f"service port must lie in [1024, 65535], got {port}")


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Everything a full pipeline run needs, resolved from flags."""

    matches_path: Path
    players_path: Path
    split_fraction: float = DEFAULT_SPLIT_FRACTION
    seed: int = 0
    fit_config: FitConfig = dataclasses.field(default_factory=FitConfig)
    formations: tuple[Formation, ...] = CANONICAL_FORMATIONS
    budget_increment: int = DEFAULT_BUDGET_INCREMENT
    service_port: int = DEFAULT_SERVICE_PORT

    def __post_init__(self) -> None:
        if not (0.0 < self.split_fraction < 1.0):
            raise DomainError(
                f"split fraction must lie in (0, 1), got {self.split_fraction}"
            )
        _check_port(self.service_port)


def _feature_data(
    matches: list[MatchRecord], index: SnapshotIndex
) -> list[tuple]:
    return [(build_features(match, index), match.goal_diff) for match in matches]


def _print_coefficient_table(model: SkellamGlmModel) -> None:
    names = ("intercept",) + FEATURE_ORDER
    print(f"{'coefficient':<12} {'b1 (home goals)':>22} {'b2 (away goals)':>22}")
    for i, name in enumerate(names):
        left = f"{model.b1[i]: .6f} ({model.se1[i]:.6f})"
        right = f"{model.b2[i]: .6f} ({model.se2[i]:.6f})"
        print(f"{name:<12} {left:>22} {right:>22}")
    print(f"observations = {model.n_obs}")
    print(f"final_nll = {model.final_nll!r}")
    print(f"converged = {str(model.converged).lower()}")


def cmd_fit(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        matches_path=Path(args.matches),
        players_path=Path(args.players),
        split_fraction=args.split_fraction,
        seed=args.seed,
        fit_config=FitConfig(max_iterations=args.max_iterations),
    )
    matches = load_matches(config.matches_path)
    players = load_players(config.players_path)
    index = SnapshotIndex(players)
    train, test = train_test_split(matches, config.split_fraction, config.seed)
    model = fit(_feature_data(train, index), config.fit_config)
    levels = replacement_levels(players)
    metadata = {
        "matches": str(args.matches),
        "players": str(args.players),
        "split_fraction": config.split_fraction,
        "seed": config.seed,
        "n_train": len(train),
        "n_test": len(test),
    }
    save_model(args.out, model, levels, metadata)
    _print_coefficient_table(model)
    print(f"model written to {args.out}")
    if not model.converged:
        print("warning: fit did not converge; model flagged accordingly", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    model, _, metadata = load_model(args.model)
    matches = load_matches(args.matches)
    players = load_players(args.players)
    index = SnapshotIndex(players)
    fraction = args.split_fraction if args.split_fraction is not None else metadata.get(
        "split_fraction", DEFAULT_SPLIT_FRACTION
    )
    seed = args.seed if args.seed is not None else metadata.get("seed", 0)
    _, test = train_test_split(matches, fraction, seed)
    data = _feature_data(test, index)
    summary = residual_summary(model, data)
    predictions = [predict_outcome(model, features) for features, _ in data]
    outcomes = [outcome_label(goal_diff) for _, goal_diff in data]
    curves = calibration_curve(predictions, outcomes, bin_width=args.bin_width)
    write_evaluation_report(args.out_dir, summary, curves)
    print(f"evaluated {len(data)} held-out matches")
    print(f"residual_mean = {summary.mean!r}")
    print(f"residual_std_dev = {summary.std_dev!r}")
    print(f"report written to {args.out_dir}")
    return EXIT_OK


def cmd_elpar(args: argparse.Namespace) -> int:
    model, levels, _ = load_model(args.model)
    formations = (
        tuple(Formation.parse(text) for text in args.formation)
        if args.formation
        else CANONICAL_FORMATIONS
    )
    if args.min_rating > args.max_rating:
        raise DomainError("min rating must not exceed max rating")
    table = elpar_table(
        model, levels, formations=formations,
        ratings=range(args.min_rating, args.max_rating + 1),
    )
    out = Path(args.out)
    with out.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["formation", "line", "rating", "points", "delta_win", "delta_draw", "delta_loss"]
        )
        for row in table:
            writer.writerow(
                [
                    str(row.formation),
                    row.line.value,
                    f"{row.player_rating:g}",
                    repr(row.points),
                    repr(row.delta_win),
                    repr(row.delta_draw),
                    repr(row.delta_loss),
                ]
            )
    print(f"{len(table)} rows written to {out}")
    return EXIT_OK


def _parse_needs(text: str) -> list[Line]:
    needs = []
    for token in text.split(","):
        token = token.strip()
        try:
            needs.append(Line(token))
        except ValueError:
            raise DomainError(
                f"unknown line {token!r}; expected one of GK, DEF, MID, ATT"
            ) from None
    return needs


def _read_squad(path: str) -> list[tuple[str, Line, float, int]]:
    expected = ["player_id", "line", "rating", "wage_eur_month"]
    rows = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != expected:
            raise DomainError(
                f"{path}: squad header must be {','.join(expected)}"
            )
        for record in reader:
            try:
                line = Line(record["line"])
            except ValueError:
                raise DomainError(f"{path}: unknown line {record['line']!r}") from None
            rows.append(
                (
                    record["player_id"],
                    line,
                    float(record["rating"]),
                    int(record["wage_eur_month"]),
                )
            )
    return rows


def cmd_market(args: argparse.Namespace) -> int:
    model, levels, _ = load_model(args.model)

    if args.fee:
        if args.rating is None or args.slope is None:
            raise DomainError("--fee needs --rating and --slope")
        try:
            line = Line(args.line)
        except ValueError:
            raise DomainError(f"unknown line {args.line!r}") from None
        elpar = elpar_formation_average(model, line, args.rating, levels)
        fee = fair_transfer_fee(elpar, args.games, args.slope)
        print(f"elpar_per_game = {elpar!r}")
        print(f"fair_transfer_fee_millions = {fee!r}")
        return EXIT_OK

    if args.optimize:
        if args.budget is None or args.needs is None:
            raise DomainError("--optimize needs --budget and --needs")
        if args.players is None:
            raise DomainError("--optimize needs --players to build the value curve")
        snapshots = load_players(args.players)
        curve = build_value_curve(snapshots)
        allocation = optimize_budget(
            args.budget,
            _parse_needs(args.needs),
            curve,
            model,
            levels,
            increment=args.increment,
        )
        print(f"budget = {args.budget}")
        for slot in allocation:
            print(
                f"allocation.{slot.line.value} = spend {slot.spend}, "
                f"rating {slot.rating}, elpar {slot.elpar!r}"
            )
        print(f"total_spend = {sum(s.spend for s in allocation)}")
        print(f"total_elpar = {sum(s.elpar for s in allocation)!r}")
        return EXIT_OK

    if args.wages:
        squad_rows = _read_squad(args.wages)
        records = []
        for player_id, line, rating, wage in squad_rows:
            elpar = elpar_formation_average(model, line, rating, levels)
            records.append(
                ValuationRecord(
                    player_id=player_id,
                    line=line,
                    rating=rating,
                    elpar_per_game=elpar,
                    market_value=0,
                    wage=wage,
                    cost_per_point=cost_per_point(0, elpar) if elpar > 0 else None,
                )
            )
        redistributed = wage_redistribution(records)
        print(f"{'player_id':<16} {'line':<5} {'wage':>12} {'elpar_wage':>12}")
        for record, new_wage in zip(records, redistributed):
            print(
                f"{record.player_id:<16} {record.line.value:<5} "
                f"{record.wage:>12} {new_wage:>12}"
            )
        print(f"total = {sum(r.wage for r in records)} -> {sum(redistributed)}")
        return EXIT_OK

    if args.players is None:
        raise DomainError("valuation table needs --players")
    snapshots = load_players(args.players)
    records = valuation_records(snapshots, model, levels)
    write_valuation_table(args.out, records)
    print(f"{len(records)} valuations written to {args.out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    matches_path, players_path = write_synthetic_league(
        args.out_dir,
        n_matches=args.n_matches,
        n_players=args.n_players,
        seed=args.seed,
    )
    print(f"matches written to {matches_path}")
    print(f"players written to {players_path}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    _check_port(args.port)
    import uvicorn

    from .service import create_app

    app = create_app(args.model, players_path=args.players)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elpar",
        description="Positional value engine: Skellam fit, eLPAR, and market tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the goal-difference model")
    p_fit.add_argument("--matches", required=True)
    p_fit.add_argument("--players", required=True)
    p_fit.add_argument("--out", required=True, help="model JSON path")
    p_fit.add_argument("--split-fraction", type=float, default=DEFAULT_SPLIT_FRACTION)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--max-iterations", type=int, default=200)
    p_fit.set_defaults(func=cmd_fit)

    p_eval = sub.add_parser("evaluate", help="residuals and calibration on the test split")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--matches", required=True)
    p_eval.add_argument("--players", required=True)
    p_eval.add_argument("--out-dir", required=True)
    p_eval.add_argument("--split-fraction", type=float, default=None,
                        help="defaults to the fraction recorded in the model")
    p_eval.add_argument("--seed", type=int, default=None,
                        help="defaults to the seed recorded in the model")
    p_eval.add_argument("--bin-width", type=float, default=0.05)
    p_eval.set_defaults(func=cmd_evaluate)

    p_elpar = sub.add_parser("elpar", help="points-above-replacement grid")
    p_elpar.add_argument("--model", required=True)
    p_elpar.add_argument("--out", required=True)
    p_elpar.add_argument("--formation", action="append", default=None,
                         help="restrict to a formation, repeatable (e.g. 3-5-2)")
    p_elpar.add_argument("--min-rating", type=int, default=50)
    p_elpar.add_argument("--max-rating", type=int, default=99)
    p_elpar.set_defaults(func=cmd_elpar)

    p_market = sub.add_parser("market", help="valuations, fees, wages, budgets")
    p_market.add_argument("--model", required=True)
    p_market.add_argument("--players", default=None)
    p_market.add_argument("--out", default="valuations.csv")
    p_market.add_argument("--fee", action="store_true")
    p_market.add_argument("--rating", type=float, default=None)
    p_market.add_argument("--line", default="MID")
    p_market.add_argument("--games", type=int, default=38)
    p_market.add_argument("--slope", type=float, default=None)
    p_market.add_argument("--optimize", action="store_true")
    p_market.add_argument("--budget", type=int, default=None)
    p_market.add_argument("--needs", default=None)
    p_market.add_argument("--increment", type=int, default=DEFAULT_BUDGET_INCREMENT)
    p_market.add_argument("--wages", default=None, help="squad CSV for redistribution")
    p_market.set_defaults(func=cmd_market)

    p_sim = sub.add_parser("simulate", help="write a synthetic league")
    p_sim.add_argument("--out-dir", required=True)
    p_sim.add_argument("--n-matches", type=int, default=200)
    p_sim.add_argument("--n-players", type=int, default=400)
    p_sim.add_argument("--seed", type=int, default=7)
    p_sim.set_defaults(func=cmd_simulate)

    p_serve = sub.add_parser("serve", help="HTTP facade over a fitted model")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--players", default=None,
                         help="players CSV enabling /api/budget/optimize")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=DEFAULT_SERVICE_PORT)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
