"""Full-factorial experiment runner and per-game simulation assembly.

The factorial crosses all 16 feature subsets with the three valuation models
(48 conditions). Every game gets its own generator seeded from
``(base_seed, condition index, game index)``, so results are independent of
execution order and worker count; per-game draws happen in a fixed order:
valuation matrix, appearance signals, strategy assignment, then gameplay.

Per-game metrics: total steals, chain lengths, each seat's true value of its
final gift, and the same values grouped by strategy. Seat and strategy metrics
use true (not perceived) valuations; perception only shapes decisions.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .behavior import (ALL_FEATURES, FEATURE_ORDER, BehaviorParams, Feature,
                       SocialState, adaptive_prob_linear, feature_label,
                       frustration_decay, frustration_on_theft)
from .beliefs import wrapped_gift_value
from .engine import (STANDARD_LIMITS, GameResult, Open, StealLimits, run_game)
from .errors import ConfigurationError
from .strategies import (STRATEGY_ORDER, DecisionContext, Strategy,
                         choose_open_gift, decide as strategy_decide)
from .valuation import (AppearanceVector, ModelKind, ValuationMatrix,
                        ValuationModel, generate_appearance,
                        generate_valuations)

MODEL_ORDER = (ModelKind.INDEPENDENT, ModelKind.CORRELATED, ModelKind.NEGATIVE)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment-wide knobs. Defaults are the standard desk-scale setup;
    `games_per_condition` is deliberately scaled down from the full 5000."""

    n_players: int = 29
    games_per_condition: int = 1000
    base_seed: int = 42
    limits: StealLimits = STANDARD_LIMITS
    behavior: BehaviorParams = BehaviorParams()
    rho: float = 0.7        # correlated-model strength
    sigma_neg: float = 0.2  # negative-model noise sd

    def __post_init__(self) -> None:
        if self.n_players < 1:
            raise ConfigurationError("n_players must be >= 1")
        if self.games_per_condition < 1:
            raise ConfigurationError("games_per_condition must be >= 1")

    def model_for(self, kind: ModelKind) -> ValuationModel:
        return ValuationModel(kind, rho=self.rho, sigma=self.sigma_neg)

    def to_dict(self) -> dict:
        b = self.behavior
        return {
            "n_players": self.n_players,
            "games_per_condition": self.games_per_condition,
            "base_seed": self.base_seed,
            "steal_limits": {"per_round": self.limits.per_round,
                             "lifetime": self.limits.lifetime},
            "behavior": {
                "c0": b.c0, "alpha": b.alpha, "beta": b.beta,
                "gamma": b.gamma, "gamma_prime": b.gamma_prime, "p0": b.p0,
                "lambda1": b.lambda1, "lambda2": b.lambda2, "lambda3": b.lambda3,
                "tau": b.tau, "mu0": b.mu0, "sigma0_sq": b.sigma0_sq,
                "sigma_a": b.sigma_a, "rho_risk": b.rho_risk,
                "threshold": b.threshold,
            },
            "models": {"rho": self.rho, "sigma_neg": self.sigma_neg},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {"n_players", "games_per_condition", "base_seed",
                 "steal_limits", "behavior", "models"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key in ("n_players", "games_per_condition", "base_seed"):
            if key in data:
                kwargs[key] = int(data[key])
        if "steal_limits" in data:
            sl = data["steal_limits"]
            kwargs["limits"] = StealLimits(int(sl.get("per_round", 1)),
                                           int(sl.get("lifetime", 0)))
        if "behavior" in data:
            allowed = {"c0", "alpha", "beta", "gamma", "gamma_prime", "p0",
                       "lambda1", "lambda2", "lambda3", "tau", "mu0",
                       "sigma0_sq", "sigma_a", "rho_risk", "threshold"}
            extra = set(data["behavior"]) - allowed
            if extra:
                raise ConfigurationError(f"unknown behavior keys: {sorted(extra)}")
            kwargs["behavior"] = BehaviorParams(
                **{k: float(v) for k, v in data["behavior"].items()})
        if "models" in data:
            models = data["models"]
            extra = set(models) - {"rho", "sigma_neg"}
            if extra:
                raise ConfigurationError(f"unknown model keys: {sorted(extra)}")
            if "rho" in models:
                kwargs["rho"] = float(models["rho"])
            if "sigma_neg" in models:
                kwargs["sigma_neg"] = float(models["sigma_neg"])
        return cls(**kwargs)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file (all fields optional)."""
    with open(path, "r", encoding="utf-8") as fh:
        return ExperimentConfig.from_dict(json.load(fh))


@dataclass(frozen=True)
class Condition:
    """One cell of the factorial: a valuation model plus a feature subset."""

    index: int
    model_kind: ModelKind
    features: frozenset[Feature]

    @property
    def label(self) -> str:
        return feature_label(self.features)

    @property
    def id(self) -> str:
        return f"{self.model_kind.value}/{self.label}"


def enumerate_conditions(config: ExperimentConfig) -> list[Condition]:
    """All 48 conditions: models in fixed order, feature subsets in
    binary-mask order (empty set first, FULL last)."""
    conditions = []
    for mi, kind in enumerate(MODEL_ORDER):
        for mask in range(1 << len(FEATURE_ORDER)):
            features = frozenset(
                f for bit, f in enumerate(FEATURE_ORDER) if mask >> bit & 1)
            conditions.append(Condition(mi * 16 + mask, kind, features))
    return conditions


# ---------------------------------------------------------------------------
# single game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlayedGame:
    """A finished game plus what the metrics need: strategy per seat and each
    seat's true value of its final gift (index 0 = seat 1)."""

    result: GameResult
    strategies: tuple[Strategy, ...]
    seat_values: tuple[float, ...]
    valuations: ValuationMatrix
    appearance: AppearanceVector

    def mean_chain_length(self) -> float:
        chains = [c for c in self.result.chain_lengths if c > 0]
        return sum(chains) / len(chains) if chains else 0.0


def play_game(
    n: int,
    limits: StealLimits,
    model: ValuationModel,
    features: frozenset[Feature],
    params: BehaviorParams,
    rng: np.random.Generator,
    fixed_strategy: Optional[Strategy] = None,
) -> PlayedGame:
    """Assemble and play one decorated game.

    `fixed_strategy` pins every seat to one strategy (test fixtures); normal
    play assigns strategies uniformly at random per seat.
    """
    params = params.with_features(features)
    vm = generate_valuations(model, n, rng)
    app = generate_appearance(vm.quality, params.sigma_a, rng)
    if fixed_strategy is None:
        codes = rng.integers(0, len(STRATEGY_ORDER), size=n)
        assigned = tuple(STRATEGY_ORDER[int(c)] for c in codes)
    else:
        assigned = (fixed_strategy,) * n
    by_seat = (None,) + assigned  # seat-indexed

    rows = vm.values.tolist()
    V = [None] + [[0.0] + row for row in rows]  # V[seat][gift]
    total_sum = [0.0] + [sum(row) for row in rows]

    pi_on = Feature.PI in features
    sc_on = Feature.SC in features
    ad_on = Feature.AD in features
    bs_on = Feature.BS in features

    signals = [0.0] + app.signals.tolist()
    ce = [0.0] * (n + 1)
    ce_wrapped_sum = 0.0
    if pi_on:
        for g in range(1, n + 1):
            ce[g] = wrapped_gift_value(signals[g], params)
        ce_wrapped_sum = sum(ce)
    wexp: Optional[list[float]] = None
    if bs_on:
        sel_vals = ce if pi_on else signals
        wexp = [0.0] + [math.exp(params.tau * sel_vals[g]) for g in range(1, n + 1)]

    social = SocialState(n)
    frustration = social.frustration
    opened_sum = [0.0] * (n + 1)  # per seat, over opened gifts
    pool = list(range(1, n + 1))  # wrapped gift ids

    per_round, lifetime = limits.per_round, limits.lifetime
    c0, beta = params.c0, params.beta
    c0_alpha = params.c0 * params.alpha
    gamma, gamma_prime = params.gamma, params.gamma_prime
    p0, l1, l2, l3 = params.p0, params.lambda1, params.lambda2, params.lambda3
    threshold = params.threshold
    inv_n = 1.0 / n
    state_box: dict = {"ce_wrapped_sum": ce_wrapped_sum}

    def decide(st, actor, game_rng):
        v_row = V[actor]
        own = st.ownership[actor]
        own_value = v_row[own] if own is not None else 0.0
        locked = st.chain_locked
        round_steals, total_steals = st.round_steals, st.total_steals
        holder = st.holder
        opened = st.opened_order
        if sc_on:
            base_cost = c0 + beta * social.steals_committed[actor]
            h_row = social.history[actor]
        targets = []
        for g in opened:
            if g in locked:
                continue
            if per_round and round_steals[g] >= per_round:
                continue
            if lifetime and total_steals[g] >= lifetime:
                continue
            victim = holder[g]
            if victim == actor:
                continue
            gift_value = v_row[g]
            net = gift_value - own_value
            if sc_on:
                net -= base_cost + c0_alpha * h_row[victim]
            targets.append((victim, net, gift_value))
        opened_count = len(opened)
        opened_mean = opened_sum[actor] / opened_count if opened_count else 0.0
        wrapped_n = len(pool)
        if pi_on:
            wrapped_mean = state_box["ce_wrapped_sum"] / wrapped_n
        else:
            wrapped_mean = (total_sum[actor] - opened_sum[actor]) / wrapped_n
        ctx = DecisionContext(
            actor=actor,
            phase=st.round * inv_n,
            own_value=own_value,
            targets=targets,
            opened_mean=opened_mean,
            wrapped_mean=wrapped_mean,
            wrapped_pool=pool,
            open_weights=wexp,
            threshold=threshold,
        )
        if ad_on and game_rng.random() >= adaptive_prob_linear(
                p0, ctx.phase, frustration[actor], own_value, l1, l2, l3):
            action = Open(choose_open_gift(ctx, game_rng))
        else:
            action = strategy_decide(by_seat[actor], ctx, game_rng)
        # Bookkeeping happens here because the engine either applies exactly
        # this action or aborts the game.
        if type(action) is Open:
            g = action.gift
            pool.remove(g)
            col = g
            for seat in range(1, n + 1):
                opened_sum[seat] += V[seat][col]
            if pi_on:
                state_box["ce_wrapped_sum"] -= ce[g]
        else:
            victim = action.victim
            social.note_steal(actor, victim)
            frustration_on_theft(social, victim, gamma)
        return action

    def swap(st, game_rng):
        # Seat 1 trades for its top-valued gift; strict improvement only.
        row = V[1]
        own = st.ownership[1]
        best_gift, best_value = own, row[own]
        for g in range(1, n + 1):
            if row[g] > best_value:
                best_gift, best_value = g, row[g]
        if best_gift == own:
            return None
        return st.holder[best_gift]

    def round_end(st):
        frustration_decay(social, gamma_prime)

    result = run_game(n, limits, decide, swap=swap, rng=rng,
                      on_round_end=round_end)
    seat_values = tuple(
        V[seat][result.final_ownership[seat]] for seat in range(1, n + 1))
    return PlayedGame(result=result, strategies=assigned,
                      seat_values=seat_values, valuations=vm, appearance=app)


def game_rng(base_seed: int, condition_index: int, game_index: int) -> np.random.Generator:
    """Deterministic per-game generator keyed on (seed, condition, game)."""
    return np.random.default_rng([base_seed, condition_index, game_index])


def game_trace(game: PlayedGame) -> dict:
    """JSON-serializable dump of one game: inputs, trajectory, outcome."""
    records = []
    for rec in game.result.trajectory:
        kind = type(rec.action).__name__.lower()
        records.append({
            "actor": rec.actor, "kind": kind, "round": rec.round,
            "position_in_chain": rec.position_in_chain, "gift": rec.gift,
            **({"victim": rec.action.victim} if kind == "steal" else {}),
            **({"partner": rec.action.partner} if kind == "swap" else {}),
        })
    return {
        "players": game.result.n,
        "valuations": game.valuations.to_jsonable(),
        "appearance": game.appearance.to_jsonable(),
        "strategies": [s.value for s in game.strategies],
        "trajectory": records,
        "final_ownership": {str(k): v for k, v in
                            sorted(game.result.final_ownership.items())},
        "steal_count": game.result.steal_count,
        "chain_lengths": list(game.result.chain_lengths),
    }


# ---------------------------------------------------------------------------
# condition aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionSummary:
    """Aggregate metrics over all games of one condition."""

    index: int
    model: str
    features: str
    features_set: frozenset[Feature]
    games: int
    steals_per_game: float
    mean_chain_length: float  # pooled: total steals / total nonzero chains
    seat_means: tuple[float, ...]
    strategy_means: dict[str, float]
    strategy_counts: dict[str, int]


def run_condition(condition: Condition, config: ExperimentConfig) -> ConditionSummary:
    """Run `games_per_condition` independent games and aggregate metrics."""
    n = config.n_players
    model = config.model_for(condition.model_kind)
    params = config.behavior
    steals_total = 0
    chains_total = 0
    seat_sums = [0.0] * n
    strat_sums = {s: 0.0 for s in STRATEGY_ORDER}
    strat_counts = {s: 0 for s in STRATEGY_ORDER}
    for game_index in range(config.games_per_condition):
        rng = game_rng(config.base_seed, condition.index, game_index)
        game = play_game(n, config.limits, model, condition.features, params, rng)
        steals_total += game.result.steal_count
        chains_total += sum(1 for c in game.result.chain_lengths if c > 0)
        for seat in range(n):
            value = game.seat_values[seat]
            seat_sums[seat] += value
            strat = game.strategies[seat]
            strat_sums[strat] += value
            strat_counts[strat] += 1
    games = config.games_per_condition
    return ConditionSummary(
        index=condition.index,
        model=condition.model_kind.value,
        features=condition.label,
        features_set=condition.features,
        games=games,
        steals_per_game=steals_total / games,
        mean_chain_length=steals_total / chains_total if chains_total else 0.0,
        seat_means=tuple(s / games for s in seat_sums),
        strategy_means={
            s.value: (strat_sums[s] / strat_counts[s] if strat_counts[s] else 0.0)
            for s in STRATEGY_ORDER},
        strategy_counts={s.value: strat_counts[s] for s in STRATEGY_ORDER},
    )


def _condition_worker(payload: tuple[Condition, ExperimentConfig]) -> ConditionSummary:
    condition, config = payload
    return run_condition(condition, config)


def run_experiment(
    config: ExperimentConfig,
    jobs: int = 1,
    conditions: Optional[Sequence[Condition]] = None,
) -> list[ConditionSummary]:
    """Run the factorial. Results are keyed by condition index, so the output
    is identical for any `jobs` value."""
    if conditions is None:
        conditions = enumerate_conditions(config)
    if jobs <= 1:
        summaries = [run_condition(c, config) for c in conditions]
    else:
        ctx = get_context("spawn")
        with ctx.Pool(jobs) as pool:
            summaries = pool.map(
                _condition_worker, [(c, config) for c in conditions])
    return sorted(summaries, key=lambda s: s.index)


# ---------------------------------------------------------------------------
# effects
# ---------------------------------------------------------------------------

def _metric_value(summary: ConditionSummary, metric: str) -> float:
    if metric == "steals_per_game":
        return summary.steals_per_game
    if metric == "mean_chain_length":
        return summary.mean_chain_length
    if metric.startswith("seat_"):
        seat = int(metric[5:])
        if not 1 <= seat <= len(summary.seat_means):
            raise ValueError(f"no such seat metric: {metric}")
        return summary.seat_means[seat - 1]
    if metric.startswith("strat_"):
        name = metric[6:]
        if name not in summary.strategy_means:
            raise ValueError(f"no such strategy metric: {metric}")
        return summary.strategy_means[name]
    raise ValueError(f"unknown metric: {metric}")


def _index_summaries(
    summaries: Iterable[ConditionSummary],
) -> dict[tuple[str, frozenset[Feature]], ConditionSummary]:
    return {(s.model, s.features_set): s for s in summaries}


def _lookup(indexed, model: str, features: frozenset[Feature]) -> ConditionSummary:
    try:
        return indexed[(model, features)]
    except KeyError:
        raise ValueError(
            f"missing condition {model}/{feature_label(features)}") from None


def main_effect(
    summaries: Iterable[ConditionSummary],
    feature: Feature,
    model: str,
    metric: str = "steals_per_game",
) -> float:
    """Marginal effect of one feature: Y({f}) - Y(BASE), same model."""
    indexed = _index_summaries(summaries)
    base = _lookup(indexed, model, frozenset())
    single = _lookup(indexed, model, frozenset({feature}))
    return _metric_value(single, metric) - _metric_value(base, metric)


def interaction(
    summaries: Iterable[ConditionSummary],
    f1: Feature,
    f2: Feature,
    model: str,
    metric: str = "steals_per_game",
) -> float:
    """Standard 2x2 factorial contrast:
    Y({f1,f2}) - Y({f1}) - Y({f2}) + Y(BASE)."""
    if f1 == f2:
        raise ValueError("interaction requires two distinct features")
    indexed = _index_summaries(summaries)
    base = _lookup(indexed, model, frozenset())
    a = _lookup(indexed, model, frozenset({f1}))
    b = _lookup(indexed, model, frozenset({f2}))
    both = _lookup(indexed, model, frozenset({f1, f2}))
    return (_metric_value(both, metric) - _metric_value(a, metric)
            - _metric_value(b, metric) + _metric_value(base, metric))


EFFECT_METRICS = ("steals_per_game", "mean_chain_length")


def compute_effects(
    summaries: Sequence[ConditionSummary],
    metrics: Sequence[str] = EFFECT_METRICS,
) -> dict:
    """Per-model main effects for each feature and pairwise interactions."""
    models = []
    for s in summaries:
        if s.model not in models:
            models.append(s.model)
    main: dict = {}
    inter: dict = {}
    for model in models:
        main[model] = {
            f.name: {m: main_effect(summaries, f, model, m) for m in metrics}
            for f in FEATURE_ORDER}
        inter[model] = {}
        for i, f1 in enumerate(FEATURE_ORDER):
            for f2 in FEATURE_ORDER[i + 1:]:
                inter[model][f"{f1.name}x{f2.name}"] = {
                    m: interaction(summaries, f1, f2, model, m) for m in metrics}
    return {"main_effects": main, "interactions": inter}


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _csv_header(n_seats: int) -> list[str]:
    return (
        ["condition_id", "model", "features", "games", "steals_per_game",
         "mean_chain_length"]
        + [f"seat_{i}" for i in range(1, n_seats + 1)]
        + [f"strat_{s.value}" for s in STRATEGY_ORDER]
    )


def _csv_row(s: ConditionSummary) -> list[str]:
    return (
        [f"{s.model}/{s.features}", s.model, s.features, str(s.games),
         f"{s.steals_per_game:.6f}", f"{s.mean_chain_length:.6f}"]
        + [f"{v:.6f}" for v in s.seat_means]
        + [f"{s.strategy_means[st.value]:.6f}" for st in STRATEGY_ORDER]
    )


def _summary_jsonable(s: ConditionSummary) -> dict:
    return {
        "condition_id": f"{s.model}/{s.features}",
        "model": s.model,
        "features": s.features,
        "games": s.games,
        "steals_per_game": round(s.steals_per_game, 6),
        "mean_chain_length": round(s.mean_chain_length, 6),
        **{f"seat_{i + 1}": round(v, 6) for i, v in enumerate(s.seat_means)},
        **{f"strat_{st.value}": round(s.strategy_means[st.value], 6)
           for st in STRATEGY_ORDER},
    }


def _round_tree(node):
    if isinstance(node, dict):
        return {k: _round_tree(v) for k, v in node.items()}
    if isinstance(node, float):
        return round(node, 6)
    return node


def export(
    summaries: Sequence[ConditionSummary],
    effects: Optional[dict],
    fmt: str,
    destination: Union[str, Path],
    config: Optional[ExperimentConfig] = None,
) -> None:
    """Write the run to `destination` as CSV (one row per condition) or JSON
    (same fields plus a config echo and the effect blocks). Numbers carry six
    fractional digits, and the column order is fixed, so identical runs
    produce byte-identical files."""
    summaries = sorted(summaries, key=lambda s: s.index)
    destination = Path(destination)
    if fmt == "csv":
        n_seats = len(summaries[0].seat_means)
        with open(destination, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_csv_header(n_seats))
            for s in summaries:
                writer.writerow(_csv_row(s))
    elif fmt == "json":
        doc = {
            "config": config.to_dict() if config is not None else None,
            "conditions": [_summary_jsonable(s) for s in summaries],
            "effects": _round_tree(effects) if effects is not None else None,
        }
        with open(destination, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError(f"unknown export format: {fmt}")
