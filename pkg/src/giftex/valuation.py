"""Valuation matrices, objective gift quality, and appearance signals.

Three generative models for the n x n matrix of subjective values (rows are
players, columns are gifts):

* independent -- every entry i.i.d. Uniform(0,1); quality is the column mean.
* correlated(rho) -- entries blend a shared per-gift quality with uniform
  idiosyncratic noise: clip(rho * q_j + sqrt(1 - rho^2) * eps_ij).
* negative(sigma) -- two camps split by seat parity value gifts oppositely:
  even seats get clip(q_j + N(0, sigma^2)), odd seats clip((1 - q_j) + ...).

All sampling goes through the caller's seeded generator; nothing touches OS
entropy, so regeneration with the same seed is bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class ModelKind(Enum):
    INDEPENDENT = "independent"
    CORRELATED = "correlated"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class ValuationModel:
    """Model kind plus its parameter (rho for correlated, sigma for negative)."""

    kind: ModelKind
    rho: float = 0.7
    sigma: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigurationError(f"rho must be in [0, 1], got {self.rho}")
        if self.sigma <= 0.0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")

    @property
    def name(self) -> str:
        return self.kind.value


INDEPENDENT = ValuationModel(ModelKind.INDEPENDENT)
CORRELATED = ValuationModel(ModelKind.CORRELATED)
NEGATIVE = ValuationModel(ModelKind.NEGATIVE)


@dataclass(frozen=True)
class ValuationMatrix:
    """Subjective values in [0,1] plus per-gift objective quality.

    ``values[i-1, j-1]`` is seat i's value for gift j.
    """

    values: np.ndarray
    quality: np.ndarray
    model: ValuationModel

    def value(self, player: int, gift: int) -> float:
        return float(self.values[player - 1, gift - 1])

    def to_jsonable(self) -> dict:
        return {
            "model": self.model.name,
            "values": self.values.round(9).tolist(),
            "quality": self.quality.round(9).tolist(),
        }


@dataclass(frozen=True)
class AppearanceVector:
    """Noisy per-gift quality signals, clipped to [0,1]."""

    signals: np.ndarray
    noise_sd: float

    def signal(self, gift: int) -> float:
        return float(self.signals[gift - 1])

    def to_jsonable(self) -> dict:
        return {"noise_sd": self.noise_sd, "signals": self.signals.round(9).tolist()}


def generate_valuations(
    model: ValuationModel, n: int, rng: np.random.Generator
) -> ValuationMatrix:
    """Draw an n x n valuation matrix under `model`."""
    if n < 1:
        raise ConfigurationError("need at least one player")
    if model.kind is ModelKind.INDEPENDENT:
        values = rng.random((n, n))
        quality = values.mean(axis=0)
    elif model.kind is ModelKind.CORRELATED:
        quality = rng.random(n)
        eps = rng.random((n, n))
        raw = model.rho * quality[None, :] + np.sqrt(1.0 - model.rho**2) * eps
        values = np.clip(raw, 0.0, 1.0)
    else:
        quality = rng.random(n)
        noise = rng.normal(0.0, model.sigma, (n, n))
        # Camp split by seat parity: even seats track quality, odd seats 1 - q.
        seats = np.arange(1, n + 1)
        base = np.where((seats % 2 == 0)[:, None], quality[None, :], 1.0 - quality[None, :])
        values = np.clip(base + noise, 0.0, 1.0)
    return ValuationMatrix(values=values, quality=quality, model=model)


def generate_appearance(
    quality: np.ndarray, noise_sd: float, rng: np.random.Generator
) -> AppearanceVector:
    """Draw clipped appearance signals ``a_j = clip(q_j + N(0, noise_sd^2))``."""
    if noise_sd <= 0.0:
        raise ConfigurationError(f"appearance noise must be positive, got {noise_sd}")
    signals = np.clip(quality + rng.normal(0.0, noise_sd, quality.shape), 0.0, 1.0)
    return AppearanceVector(signals=signals, noise_sd=noise_sd)
