"""Command line entry point: single-game simulation, the factorial
experiment, and exact trajectory counting.

Exit codes: 0 success, 2 usage or invalid parameter values, 1 I/O failure.
The environment variable GIFTEX_SEED overrides the default seed whenever
--seed is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import counting, harness
from .behavior import BehaviorParams, feature_label, feature_set
from .engine import Open, StealLimits, Swap
from .errors import GiftexError
from .valuation import ModelKind

DEFAULT_SEED = 42


def _env_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("GIFTEX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"GIFTEX_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="giftex",
        description="Gift exchange game simulator and trajectory counter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="play one game and print the outcome")
    sim.add_argument("--players", type=int, default=29)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--features", default="",
                     help="comma list from pi,sc,ad,bs (default: none)")
    sim.add_argument("--model", default="independent",
                     choices=[k.value for k in ModelKind])
    sim.add_argument("--trace", action="store_true",
                     help="print every action record")

    exp = sub.add_parser("experiment", help="run the 48-condition factorial")
    exp.add_argument("--config", default=None, help="JSON config file")
    exp.add_argument("--games", type=int, default=None,
                     help="games per condition (default from config: 1000)")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--out", default=".", help="output directory")
    exp.add_argument("--format", default="csv", choices=["csv", "json"])
    exp.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default: machine parallelism)")

    cnt = sub.add_parser("count", help="print the exact trajectory count")
    cnt.add_argument("--players", type=int, required=True)
    cnt.add_argument("--lifetime", type=int, default=0,
                     help="lifetime steal cap per gift; 0 = unlimited")
    cnt.add_argument("--with-swap", action="store_true",
                     help="include the n final-swap choices")
    cnt.add_argument("--oracle", action="store_true",
                     help="force brute-force enumeration (players <= 6)")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    seed = _env_seed(args.seed)
    features = feature_set(*args.features.split(",")) if args.features else frozenset()
    config = harness.ExperimentConfig(n_players=args.players)
    model = config.model_for(ModelKind(args.model))
    rng = harness.game_rng(seed, 0, 0)
    game = harness.play_game(
        args.players, config.limits, model, features, BehaviorParams(), rng)
    result = game.result
    print(f"players: {args.players}  model: {args.model}  "
          f"features: {feature_label(features)}  seed: {seed}")
    if args.trace:
        for rec in result.trajectory:
            action = rec.action
            if type(action) is Open:
                desc = f"open gift {action.gift}"
            elif type(action) is Swap:
                desc = ("keep (swap declined)" if action.partner is None
                        else f"swap with seat {action.partner}")
            else:
                desc = f"steal gift {rec.gift} from seat {action.victim}"
            print(f"  round {rec.round:>3} chain {rec.position_in_chain:>2}  "
                  f"seat {rec.actor:>3}: {desc}")
    for seat in range(1, args.players + 1):
        gift = result.final_ownership[seat]
        print(f"seat {seat:>3} -> gift {gift:>3}  "
              f"(value {game.seat_values[seat - 1]:.6f})")
    print(f"steals: {result.steal_count}")
    print(f"chain lengths: {list(result.chain_lengths)}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    if args.config is not None:
        config = harness.load_config(args.config)
    else:
        config = harness.ExperimentConfig()
    overrides = {}
    if args.games is not None:
        overrides["games_per_condition"] = args.games
    seed = args.seed
    if seed is None and "GIFTEX_SEED" in os.environ:
        seed = _env_seed(None)
    if seed is not None:
        overrides["base_seed"] = seed
    if overrides:
        import dataclasses
        config = dataclasses.replace(config, **overrides)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    summaries = harness.run_experiment(config, jobs=jobs)
    effects = harness.compute_effects(summaries)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    destination = out_dir / f"experiment.{args.format}"
    harness.export(summaries, effects, args.format, destination, config=config)
    for s in summaries:
        print(f"{s.model}/{s.features}: steals_per_game={s.steals_per_game:.6f} "
              f"mean_chain_length={s.mean_chain_length:.6f}")
    print(f"wrote {destination}")
    return 0


def _cmd_count(args: argparse.Namespace) -> int:
    n = args.players
    if args.oracle:
        limits = StealLimits(per_round=1, lifetime=args.lifetime)
        value = counting.brute_force_count(n, limits)
    else:
        value = counting.count_trajectories(n, args.lifetime)
    if args.with_swap:
        value *= n
    print(value)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "count":
            return _cmd_count(args)
        parser.error(f"unknown command {args.command!r}")
    except (GiftexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
