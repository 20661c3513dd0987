"""Synthetic games standing in for model-derived value functions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .lattice import ValueFunction, popcount, zeta_transform

GameKind = Literal["random", "additive", "k-additive", "weighted-voting"]
KINDS = ("random", "additive", "k-additive", "weighted-voting")


@dataclass(frozen=True)
class GameSpec:
    kind: GameKind = "random"
    d: int = 8
    k: int = 2
    seed: int = 0
    scale: float = 1.0
    # explicit per-feature coefficients (additive) or weights (weighted-voting)
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.kind == "k-additive" and not 1 <= self.k <= self.d:
            raise ValueError(f"k must be in [1, {self.d}]")
        if self.weights is not None and len(self.weights) != self.d:
            raise ValueError(f"expected {self.d} weights, got {len(self.weights)}")


def _per_feature_sum(d: int, c: np.ndarray) -> np.ndarray:
    out = np.zeros(1 << d)
    for i in range(d):
        out.reshape(-1, 2, 1 << i)[:, 1, :] += c[i]
    return out


def planted_mobius(spec: GameSpec) -> np.ndarray:
    """Möbius coefficients of a k-additive game: uniform on ``1 <= |T| <= k``."""
    rng = np.random.default_rng(spec.seed)
    a = rng.uniform(-spec.scale, spec.scale, 1 << spec.d)
    sizes = popcount(np.arange(1 << spec.d))
    a[(sizes == 0) | (sizes > spec.k)] = 0.0
    return a


def generate(spec: GameSpec) -> ValueFunction:
    d = spec.d
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "random":
        values = rng.uniform(-spec.scale, spec.scale, 1 << d)
        values[0] = 0.0
    elif spec.kind == "additive":
        c = np.asarray(spec.weights, dtype=float) if spec.weights else rng.uniform(-spec.scale, spec.scale, d)
        values = _per_feature_sum(d, c)
    elif spec.kind == "k-additive":
        values = zeta_transform(planted_mobius(spec))
    else:
        w = np.asarray(spec.weights, dtype=float) if spec.weights else rng.integers(1, 11, d).astype(float)
        quota = w.sum() / 2
        values = (_per_feature_sum(d, w) >= quota).astype(float)
    return ValueFunction.from_array(values)
