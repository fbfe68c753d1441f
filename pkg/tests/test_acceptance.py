"""Acceptance suite: one test (or test group) per release criterion.

Run with ``pytest tests/test_acceptance.py -v`` for a pass/fail line per
criterion. Two tests assert golden-table entries that are internally
inconsistent (their docstrings carry the arithmetic); they fail by design and
document the discrepancy rather than papering over it.
"""

import math
import time

import numpy as np
import pytest

from giftex.behavior import Feature
from giftex.beliefs import Prior, certainty_equivalent, posterior
from giftex.counting import (UNLIMITED, brute_force_count, count_trajectories,
                             round_action_count, trajectory_count)
from giftex.engine import Open, Steal, StealLimits, Swap, replay
from giftex.harness import (Condition, ExperimentConfig, compute_effects,
                            enumerate_conditions, export, game_rng,
                            interaction, main_effect, play_game,
                            run_condition, run_experiment)
from giftex.strategies import Strategy
from giftex.valuation import ModelKind

pytestmark = pytest.mark.filterwarnings("ignore")


def report(criterion, message):
    print(f"[criterion {criterion}] PASS — {message}")


# ---------------------------------------------------------------------------
# 1. exact combinatorics (golden values)
# ---------------------------------------------------------------------------

def test_criterion_1_exact_combinatorics():
    start = time.perf_counter()
    assert tuple(round_action_count(k) for k in range(1, 9)) == \
        (1, 2, 5, 16, 65, 326, 1957, 13700)
    assert [trajectory_count(n) for n in range(2, 6)] == \
        [4, 60, 3840, 1_248_000]
    # T(6), T(7), T(8) verified three independent ways in this repo (closed
    # form, multiset DP, enumeration; see test_counting.py / test_engine.py).
    assert trajectory_count(6) == 2_441_088_000
    assert f"{trajectory_count(7):.3g}" == "3.34e+13"
    assert f"{trajectory_count(8):.3g}" == "3.67e+18"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(1, f"A(1..8) and T(2..8) exact in {elapsed * 1000:.1f} ms")


def test_criterion_1_inconsistent_reference_values():
    """Golden-table entries for T(6) and T(7) that fail internal consistency.

    The golden table this suite was pinned against lists T(6) = 2,440,488,000
    and T(7) ~ 3.31e13. Neither value can be produced by the counting
    identity T(n) = n! * prod A(k): 2,440,488,000 is not divisible by
    6! = 720, and the same table's own product column gives
    720 * 3,390,400 = 2,441,088,000. The closed form, the multiset DP,
    brute-force enumeration, and exhaustive play through the engine all agree
    on 2,441,088,000 (and on T(7) = 33,440,464,512,000 = 3.34e13). The
    assertions below keep the table's values verbatim, so this test fails by
    design and records the discrepancy.
    """
    assert trajectory_count(6) == 2_440_488_000, (
        "golden table says 2,440,488,000; the identity T(6) = 6! * prod A(k) "
        "gives 2,441,088,000 (2,440,488,000 is not divisible by 720)")
    assert f"{trajectory_count(7):.3g}" == "3.31e+13", (
        "golden table says 3.31e13; the closed form gives 3.34e13")


# ---------------------------------------------------------------------------
# 2. oracle equivalence
# ---------------------------------------------------------------------------

def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    for n in (2, 3, 4, 5):
        assert brute_force_count(n, StealLimits(1, 0)) == trajectory_count(n)
    for n in range(1, 9):
        assert count_trajectories(n, UNLIMITED) == trajectory_count(n)
    for n in range(1, 5):
        for lifetime in (1, 2, 3):
            assert count_trajectories(n, lifetime) == \
                brute_force_count(n, StealLimits(1, lifetime))
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(2, f"closed form == DP == enumeration in {elapsed:.2f} s")


# ---------------------------------------------------------------------------
# 3. counting propositions
# ---------------------------------------------------------------------------

def test_criterion_3_per_round_invariance_and_lifetime_monotonicity():
    for n in range(1, 6):
        reference = brute_force_count(n, StealLimits(0, 0))
        for per_round in (1, 2):
            assert brute_force_count(n, StealLimits(per_round, 0)) == reference
    for n in range(1, 6):
        counts = [count_trajectories(n, L) for L in (1, 2, 3, 4)]
        counts.append(count_trajectories(n, UNLIMITED))
        assert all(a <= b for a, b in zip(counts, counts[1:]))
    report(3, "per-round cap inert; counts weakly increasing in lifetime cap")


# ---------------------------------------------------------------------------
# 4. engine invariants over randomized games
# ---------------------------------------------------------------------------

LIMIT_CHOICES = (StealLimits(1, 0), StealLimits(1, 3), StealLimits(0, 0),
                 StealLimits(2, 0), StealLimits(1, 1), StealLimits(2, 2))


def check_game(game, n, limits):
    result = game.result
    owned = sorted(result.final_ownership.values())
    assert owned == list(range(1, n + 1)), "final ownership must be a bijection"
    assert all(c <= n - 1 for c in result.chain_lengths)
    assert result.steal_count == sum(result.chain_lengths)
    # recompute steal caps straight from the action log
    round_counts = {}
    total_counts = {}
    current_round = 0
    for rec in result.trajectory:
        if type(rec.action) is Swap:
            continue
        if rec.round != current_round:
            current_round = rec.round
            round_counts = {}
        if type(rec.action) is Steal:
            g = rec.gift
            round_counts[g] = round_counts.get(g, 0) + 1
            total_counts[g] = total_counts.get(g, 0) + 1
            if limits.per_round:
                assert round_counts[g] <= limits.per_round
            if limits.lifetime:
                assert total_counts[g] <= limits.lifetime
    end = replay(n, limits, result.trajectory)
    assert {p: end.ownership[p] for p in range(1, n + 1)} == result.final_ownership


def test_criterion_4_engine_invariants_bulk():
    start = time.perf_counter()
    config = ExperimentConfig()
    conditions = enumerate_conditions(config)
    total_games = 100_000
    for i in range(total_games):
        cond = conditions[i % 48]
        n = 2 + (i * 7919) % 11  # 2..12
        limits = LIMIT_CHOICES[(i // 48) % len(LIMIT_CHOICES)]
        model = config.model_for(cond.model_kind)
        game = play_game(n, limits, model, cond.features, config.behavior,
                         game_rng(1234, cond.index, i))
        check_game(game, n, limits)
    # a slice at full table size as well
    for i in range(96):
        cond = conditions[i % 48]
        model = config.model_for(cond.model_kind)
        game = play_game(29, config.limits, model, cond.features,
                         config.behavior, game_rng(4321, cond.index, i))
        check_game(game, 29, config.limits)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(4, f"{total_games + 96} games across 48 conditions in {elapsed:.1f} s")


# ---------------------------------------------------------------------------
# 5. belief math
# ---------------------------------------------------------------------------

def test_criterion_5_belief_math():
    prior = Prior(mean=0.5, variance=0.25)
    post = posterior(prior, signal=0.8, signal_sd=0.3)
    assert post.mean == pytest.approx(0.7205882352941176, abs=1e-9)
    assert post.variance == pytest.approx(0.0661764705882353, abs=1e-9)
    ce = certainty_equivalent(post.mean, post.variance, 0.5)
    assert ce == pytest.approx(0.7040441176470588, abs=1e-9)
    assert post.variance < min(prior.variance, 0.3 * 0.3)
    assert ce <= post.mean
    for risk in (0.0, 0.25, 1.0, 3.0):
        for var in (0.0, 0.1, 0.5):
            assert certainty_equivalent(0.6, var, risk) <= 0.6
    report(5, "posterior and certainty equivalent exact to 1e-9")


# ---------------------------------------------------------------------------
# 6. directional simulation reproduction (desk scale)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def desk_run():
    config = ExperimentConfig()  # 29 players, 1000 games, seed 42
    start = time.perf_counter()
    summaries = run_experiment(config, jobs=1)
    elapsed = time.perf_counter() - start
    assert elapsed < 600.0, "full factorial must stay inside the 10 min budget"
    return {(s.model, s.features): s for s in summaries}, list(summaries)


def base_steals(runs, model):
    return runs[(model, "BASE")].steals_per_game


def test_criterion_6a_social_cost_dominates(desk_run):
    runs, summaries = desk_run
    for model in ("independent", "correlated", "negative"):
        effect = main_effect(summaries, Feature.SC, model)
        base = base_steals(runs, model)
        assert effect < 0
        assert abs(effect) > 0.15 * base, (model, effect, base)
    report("6a", "SC reduces steals by >15% of BASE in all models")


def test_criterion_6b_adaptive_dynamics_reduce_stealing(desk_run):
    _, summaries = desk_run
    for model in ("independent", "correlated", "negative"):
        assert main_effect(summaries, Feature.AD, model) < 0
    report("6b", "AD main effect negative in all models")


def test_criterion_6c_biased_selection_boosts_correlated(desk_run):
    _, summaries = desk_run
    bs_correlated = main_effect(summaries, Feature.BS, "correlated")
    bs_independent = main_effect(summaries, Feature.BS, "independent")
    assert bs_correlated > 0
    assert bs_correlated > bs_independent
    report("6c", f"BS effect correlated {bs_correlated:+.2f} vs "
                 f"independent {bs_independent:+.2f}")


def test_criterion_6d_value_consensus_intensifies_competition(desk_run):
    runs, _ = desk_run
    ind, cor = base_steals(runs, "independent"), base_steals(runs, "correlated")
    assert cor > 1.25 * ind, (ind, cor)
    report("6d", f"BASE steals correlated/independent = {cor / ind:.2f}")


def test_criterion_6e_seat_position_effects(desk_run):
    runs, summaries = desk_run
    for s in summaries:
        assert s.seat_means[0] == max(s.seat_means), \
            f"seat 1 not maximal in {s.model}/{s.features}"
    base_cor = runs[("correlated", "BASE")]
    assert base_cor.seat_means[1] < base_cor.seat_means[28]
    report("6e", "seat 1 maximal in all 48 conditions; seat 2 < seat 29")


def test_criterion_6f_strategy_ordering(desk_run):
    runs, _ = desk_run
    means = runs[("correlated", "BASE")].strategy_means
    coin = means["coin_flip"]
    for name in ("always_steal", "mean_based", "threshold", "expected_value"):
        assert means[name] > coin, (name, means[name], coin)
    assert coin > means["always_open"]
    report("6f", "aggressive > coin_flip > always_open in BASE/correlated")


def test_criterion_6g_social_cost_adaptive_subadditivity(desk_run):
    _, summaries = desk_run
    got = interaction(summaries, Feature.SC, Feature.AD, "correlated")
    assert got > 0
    report("6g", f"SCxAD interaction on steals {got:+.2f} (subadditive)")


def test_criterion_6_inconsistent_reference_magnitudes(desk_run):
    """BASE steal magnitudes pinned to reference values that contradict the
    rule set this artifact implements.

    The golden tables carry two conflicting sets of BASE steals-per-game
    means: one lists 70.8/104.2/74.2 (independent/correlated/negative), the
    other 57.017/87.572/61.371 for the identical configuration, an internal
    disagreement of 19-25%. This build's pinned decision rules land at
    ~73.8/106.4/74.1 (seed 42, 1000 games) — within ~4% of the first set —
    and no rule variant consistent with the documented strategy semantics
    reaches the second set. The +-15% anchors below use the second set, as
    the tolerance was specified against it, so this test fails by design and
    records the conflict; the directional criteria above are the meaningful
    checks.
    """
    runs, _ = desk_run
    anchors = {"independent": 57.017, "correlated": 87.572, "negative": 61.371}
    for model, anchor in anchors.items():
        got = base_steals(runs, model)
        assert abs(got - anchor) <= 0.15 * anchor, (
            f"{model} BASE steals {got:.2f} vs anchor {anchor} "
            f"(conflicting golden set puts the same cell 19-25% higher)")


# ---------------------------------------------------------------------------
# 7. lifetime-cap monotonicity in simulation
# ---------------------------------------------------------------------------

def test_criterion_7_mean_steals_monotone_in_lifetime_cap():
    base_condition = Condition(0, ModelKind.INDEPENDENT, frozenset())
    means = {}
    for lifetime in (1, 3, 0):
        config = ExperimentConfig(limits=StealLimits(1, lifetime))
        summary = run_condition(base_condition, config)
        means[lifetime] = summary.steals_per_game
    assert means[1] <= means[3] <= means[0], means
    report(7, f"steals/game {means[1]:.2f} <= {means[3]:.2f} <= {means[0]:.2f} "
              "for lifetime 1 / 3 / unlimited (common seeds)")


# ---------------------------------------------------------------------------
# 8. determinism of the full experiment
# ---------------------------------------------------------------------------

def test_criterion_8_byte_identical_exports(tmp_path):
    config = ExperimentConfig(n_players=8, games_per_condition=4, base_seed=11)
    paths = []
    for tag, jobs in (("a", 1), ("b", 1), ("c", 2)):
        summaries = run_experiment(config, jobs=jobs)
        effects = compute_effects(summaries)
        path = tmp_path / f"{tag}.csv"
        export(summaries, effects, "csv", path, config=config)
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]
    report(8, "two sequential runs and a 2-worker run export identical bytes")
