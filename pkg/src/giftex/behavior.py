"""Behavioral decorations: social costs, frustration, adaptive steal
probability, biased gift selection, and net steal utility.

The four toggleable features:

* PI -- partial information: wrapped gifts are valued through noisy appearance
  signals and a Gaussian posterior instead of their true values.
* SC -- social costs: each steal carries a norm-violation cost that grows with
  repeat targeting of the same victim and with the thief's lifetime steals.
* AD -- adaptive dynamics: a clipped linear model of phase, frustration, and
  satisfaction gates each steal/open decision.
* BS -- biased selection: opening picks among wrapped gifts by softmax weight
  instead of uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence

from .errors import ConfigurationError


class Feature(Enum):
    PI = "pi"
    SC = "sc"
    AD = "ad"
    BS = "bs"


FEATURE_ORDER = (Feature.PI, Feature.SC, Feature.AD, Feature.BS)

ALL_FEATURES = frozenset(FEATURE_ORDER)


def feature_set(*names: str) -> frozenset[Feature]:
    """Parse feature names (case-insensitive) into a feature set."""
    try:
        return frozenset(Feature(name.strip().lower()) for name in names if name.strip())
    except ValueError as exc:
        raise ConfigurationError(f"unknown feature: {exc}") from None


def feature_label(features: frozenset[Feature]) -> str:
    """Canonical label: BASE, FULL, or '+'-joined names in PI,SC,AD,BS order."""
    if not features:
        return "BASE"
    if features == ALL_FEATURES:
        return "FULL"
    return "+".join(f.name for f in FEATURE_ORDER if f in features)


@dataclass(frozen=True)
class BehaviorParams:
    """Feature switches plus every behavioral constant in one record."""

    features: frozenset[Feature] = frozenset()
    # social costs
    c0: float = 0.05          # base norm-violation cost
    alpha: float = 2.0        # repeat-victim multiplier
    beta: float = 0.1         # reputation cost per lifetime steal
    # frustration dynamics
    gamma: float = 0.15       # increment when stolen from
    gamma_prime: float = 0.05 # decay per round end
    # adaptive steal probability
    p0: float = 0.5           # base steal probability (linear-clip intercept)
    lambda1: float = 0.2      # phase coefficient
    lambda2: float = 0.5      # frustration coefficient
    lambda3: float = 0.3      # satisfaction coefficient
    mu_logit: float = 1.0     # logit scale (logit form only)
    # biased selection
    tau: float = 2.0          # softmax temperature
    # beliefs
    mu0: float = 0.5          # prior mean over quality
    sigma0_sq: float = 0.25   # prior variance
    sigma_a: float = 0.3      # appearance signal noise sd
    rho_risk: float = 0.5     # CARA risk aversion
    # fixed-threshold strategy
    threshold: float = 0.6

    def __post_init__(self) -> None:
        for name in ("c0", "alpha", "beta", "gamma", "gamma_prime", "p0",
                     "lambda1", "lambda2", "lambda3", "tau", "rho_risk",
                     "threshold"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        if self.sigma0_sq <= 0 or self.sigma_a <= 0:
            raise ConfigurationError("variances must be positive")
        if self.mu_logit <= 0:
            raise ConfigurationError("mu_logit must be positive")

    def with_features(self, features: frozenset[Feature]) -> "BehaviorParams":
        return replace(self, features=features)


class SocialState:
    """Per-game social bookkeeping: frustration, steal counts, victim history.

    Counters cover the whole game including chains; the final swap is a strict
    trade and touches nothing here.
    """

    __slots__ = ("n", "frustration", "steals_committed", "history")

    def __init__(self, n: int) -> None:
        self.n = n
        self.frustration = [0.0] * (n + 1)
        self.steals_committed = [0] * (n + 1)
        self.history = [[0] * (n + 1) for _ in range(n + 1)]

    def note_steal(self, thief: int, victim: int) -> None:
        """Record a completed steal in the thief's history and totals."""
        self.history[thief][victim] += 1
        self.steals_committed[thief] += 1

    def prior_steals(self, thief: int, victim: int) -> int:
        return self.history[thief][victim]


def social_cost(social: SocialState, thief: int, victim: int,
                params: BehaviorParams) -> float:
    """Norm violation + relationship damage + cumulative reputation cost."""
    return (
        params.c0
        + params.c0 * params.alpha * social.history[thief][victim]
        + params.beta * social.steals_committed[thief]
    )


def net_steal_utility(
    thief: int,
    victim: int,
    state,
    perceived: Callable[[int, int], float],
    social: Optional[SocialState],
    params: BehaviorParams,
) -> float:
    """Perceived gain of stealing: target value minus current holding minus
    social cost (cost only when SC is enabled; holding counts as 0 if none)."""
    target_gift = state.ownership[victim]
    own_gift = state.ownership[thief]
    own_value = perceived(thief, own_gift) if own_gift is not None else 0.0
    cost = 0.0
    if Feature.SC in params.features:
        cost = social_cost(social, thief, victim, params)
    return perceived(thief, target_gift) - own_value - cost


def frustration_on_theft(social: SocialState, victim: int, gamma: float) -> SocialState:
    """Bump the victim's frustration by gamma, capped at 1."""
    social.frustration[victim] = min(1.0, social.frustration[victim] + gamma)
    return social


def frustration_decay(social: SocialState, gamma_prime: float) -> SocialState:
    """Decay every player's frustration by gamma_prime, floored at 0.

    Called once at each round's end; applies to thieves and victims alike.
    """
    fr = social.frustration
    for i in range(1, social.n + 1):
        fr[i] = max(0.0, fr[i] - gamma_prime)
    return social


def adaptive_prob_linear(
    p0: float, phase: float, frustration: float, satisfaction: float,
    lambda1: float, lambda2: float, lambda3: float,
) -> float:
    """Clipped linear steal probability used by the simulation."""
    p = p0 + lambda1 * phase + lambda2 * frustration - lambda3 * satisfaction
    return min(0.95, max(0.05, p))


def adaptive_prob_logit(
    delta_u: float, phase: float, frustration: float, satisfaction: float,
    lambda1: float, lambda2: float, lambda3: float, mu_logit: float,
) -> float:
    """Sigmoid of the systematic utility difference, scale mu_logit."""
    if mu_logit <= 0:
        raise ConfigurationError("mu_logit must be positive")
    x = (delta_u + lambda1 * phase + lambda2 * frustration
         - lambda3 * satisfaction) / mu_logit
    return 1.0 / (1.0 + math.exp(-x))


def selection_weights(values: Sequence[float], tau: float) -> list[float]:
    """Softmax weights exp(tau * v) / sum, shift-invariant and summing to 1."""
    if len(values) == 0:
        raise ValueError("selection over an empty gift pool")
    if tau < 0:
        raise ConfigurationError("tau must be non-negative")
    top = max(values)
    ws = [math.exp(tau * (v - top)) for v in values]
    total = sum(ws)
    return [w / total for w in ws]
