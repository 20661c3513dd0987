"""Faithful Shapley Interaction scores.

Two independent routes produce the same numbers:

* :func:`fsi_tt` sweeps the precontracted correction operator over the raw
  value function and adds the Möbius coefficients;
* :func:`fsi_baseline` takes the Möbius coefficients and, for every scored
  subset, walks its supersets one by one (``O(d^ell 2^d)``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal

import numpy as np

from .correction import build_correction_mpo, correction_weight, precontract
from .lattice import ValueFunction, mobius_transform, subsets_up_to
from .sweep import apply_mpo_instrumented

__all__ = [
    "BASELINE_MAX_D",
    "FsiConfig",
    "InteractionScores",
    "ResidualError",
    "RunInfo",
    "VerificationReport",
    "compute",
    "fsi_baseline",
    "fsi_tt",
    "verify",
]

BASELINE_MAX_D = 16


class ResidualError(AssertionError):
    """The correction produced a non-negligible value outside ``|S| <= ell``."""


@dataclass(frozen=True)
class FsiConfig:
    method: Literal["tt", "baseline"] = "tt"
    ell: int = 2
    tolerance: float = 1e-10
    memory_cap_bytes: int | None = None

    def __post_init__(self):
        if self.method not in ("tt", "baseline"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class RunInfo:
    """Work and memory accounting for one FSI computation."""

    madds: int = 0
    peak_bytes: int = 0


@dataclass(frozen=True, eq=False)
class InteractionScores:
    d: int
    ell: int
    masks: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    offset: float = 0.0

    def __len__(self):
        return self.masks.size

    def __getitem__(self, mask: int) -> float:
        return float(self.values[self._index[int(mask)]])

    @cached_property
    def _index(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self.masks.tolist())}

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.masks.tolist(), self.values.tolist()))

    def top(self, k: int) -> list[tuple[int, float]]:
        """Largest ``|value|`` first; ties by (popcount, mask), which is storage order."""
        order = np.argsort(-np.abs(self.values), kind="stable")[:k]
        return [(int(self.masks[i]), float(self.values[i])) for i in order]


@dataclass(frozen=True)
class VerificationReport:
    d: int
    ell: int
    max_abs_diff: float
    tolerance: float
    n_scores: int

    @property
    def passed(self) -> bool:
        return self.max_abs_diff <= self.tolerance


def _as_value_function(v) -> ValueFunction:
    return v if isinstance(v, ValueFunction) else ValueFunction.from_array(v)


def _check_ell(d: int, ell: int):
    if not 1 <= ell <= d:
        raise ValueError(f"ell must be in [1, {d}], got {ell}")


@lru_cache(maxsize=32)
def _correction_operator(d: int, ell: int):
    return precontract(build_correction_mpo(d, ell))


def fsi_tt(v, ell: int, *, strict_zero: bool = __debug__, tolerance: float = 1e-10,
           memory_cap: int | None = None, info: RunInfo | None = None) -> InteractionScores:
    vf = _as_value_function(v)
    d = vf.d
    _check_ell(d, ell)
    corr, stats = apply_mpo_instrumented(_correction_operator(d, ell), vf.values, memory_cap=memory_cap)
    masks = subsets_up_to(d, ell)
    if strict_zero and ell < d:
        outside = np.ones(1 << d, dtype=bool)
        outside[masks] = False
        outside[0] = False
        resid = float(np.max(np.abs(corr[outside]), initial=0.0))
        if resid > tolerance:
            raise ResidualError(f"correction leaks {resid:.3g} into |S| > {ell}")
    scores = mobius_transform(vf.values)
    scores += corr
    if info is not None:
        info.madds = stats.madds + d * (1 << (d - 1))
        info.peak_bytes = stats.peak_workspace_bytes + 8 * (1 << d)
    return InteractionScores(d, ell, masks, scores[masks], vf.offset)


def fsi_baseline(v, ell: int, *, max_d: int = BASELINE_MAX_D,
                 info: RunInfo | None = None) -> InteractionScores:
    vf = _as_value_function(v)
    d = vf.d
    _check_ell(d, ell)
    if d > max_d:
        raise ValueError(f"baseline is limited to d <= {max_d}, got {d}")
    a = mobius_transform(vf.values).tolist()
    full = (1 << d) - 1
    masks = subsets_up_to(d, ell)
    out = np.empty(masks.size)
    # tables[s][t]: weight of a(T) in the score of S, |S| = s, |T| = t
    tables = {s: [correction_weight(s, t, ell).value for t in range(d + 1)] for s in range(1, ell + 1)}
    pairs = 0
    for j, mask in enumerate(masks.tolist()):
        w = tables[mask.bit_count()]
        comp = full ^ mask
        acc = 0.0
        sub = comp
        while True:
            sup = mask | sub
            size = sup.bit_count()
            if size > ell:
                acc += w[size] * a[sup]
                pairs += 1
            if not sub:
                break
            sub = (sub - 1) & comp
        out[j] = a[mask] + acc
    if info is not None:
        info.madds = pairs + d * (1 << (d - 1))
        info.peak_bytes = 8 * 2 * (1 << d)
    return InteractionScores(d, ell, masks, out, vf.offset)


def compute(v, config: FsiConfig, info: RunInfo | None = None) -> InteractionScores:
    if config.method == "tt":
        return fsi_tt(v, config.ell, tolerance=config.tolerance,
                      memory_cap=config.memory_cap_bytes, info=info)
    return fsi_baseline(v, config.ell, info=info)


def verify(v, ell: int, tolerance: float = 1e-10) -> VerificationReport:
    tt = fsi_tt(v, ell, strict_zero=False)
    base = fsi_baseline(v, ell)
    diff = float(np.max(np.abs(tt.values - base.values), initial=0.0))
    return VerificationReport(tt.d, ell, diff, tolerance, len(tt))
