"""Subset algebra on the Boolean lattice.

Coalitions are bitmasks: bit ``i - 1`` set means feature ``i`` is in the
coalition, and feature ``i`` is tensor site ``i`` (least significant bit
first). All transforms run in float64.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

__all__ = [
    "ValueFunction",
    "MoebiusVector",
    "popcount",
    "mobius_transform",
    "zeta_transform",
    "subsets_up_to",
    "mask_to_features",
    "features_to_mask",
]


def popcount(masks) -> np.ndarray:
    return np.bitwise_count(np.asarray(masks, dtype=np.uint64)).astype(np.int64)


def _check_length(n: int) -> int:
    d = n.bit_length() - 1
    if n < 1 or (1 << d) != n:
        raise ValueError(f"length {n} is not a power of two")
    return d


@dataclass(frozen=True)
class ValueFunction:
    """Coalition worths ``values[mask]``, normalized so that ``values[0] == 0``.

    ``offset`` records the raw worth of the empty coalition that was
    subtracted at construction.
    """

    d: int
    values: np.ndarray = field(repr=False)
    offset: float = 0.0

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size != 1 << self.d:
            raise ValueError(f"expected {1 << self.d} values for d={self.d}, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("value function has non-finite entries")
        if values[0] != 0.0:
            raise ValueError("value function must satisfy v(empty) = 0; use ValueFunction.from_array")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, values) -> "ValueFunction":
        values = np.array(values, dtype=np.float64)
        d = _check_length(values.size)
        offset = float(values[0])
        values -= offset
        values[0] = 0.0
        return cls(d, values, offset)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def mobius(self) -> "MoebiusVector":
        return MoebiusVector(self.d, mobius_transform(self.values))


@dataclass(frozen=True)
class MoebiusVector:
    d: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.ascontiguousarray(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.size != 1 << self.d:
            raise ValueError(f"expected {1 << self.d} coefficients for d={self.d}")
        object.__setattr__(self, "coeffs", coeffs)

    def __array__(self, dtype=None, copy=None):
        return self.coeffs if dtype is None else self.coeffs.astype(dtype)

    def zeta(self) -> ValueFunction:
        return ValueFunction.from_array(zeta_transform(self.coeffs))


def _subset_pass(values, sign: float) -> np.ndarray:
    x = np.array(values, dtype=np.float64)
    d = _check_length(x.size)
    for i in range(d):
        # blocks of (rest, bit i, lower bits); each element written once per pass
        view = x.reshape(-1, 2, 1 << i)
        if sign < 0:
            view[:, 1, :] -= view[:, 0, :]
        else:
            view[:, 1, :] += view[:, 0, :]
    return x


def mobius_transform(values) -> np.ndarray:
    """``a[S] = sum_{T subset S} (-1)^{|S|-|T|} v[T]`` in ``O(d 2^d)``."""
    return _subset_pass(values, -1.0)


def zeta_transform(coeffs) -> np.ndarray:
    """``v[S] = sum_{T subset S} a[T]``; inverse of :func:`mobius_transform`."""
    return _subset_pass(coeffs, +1.0)


def subsets_up_to(d: int, ell: int) -> np.ndarray:
    """All masks with ``1 <= popcount <= ell``, sorted by (popcount, mask)."""
    if not 1 <= ell <= d:
        raise ValueError(f"ell must be in [1, {d}], got {ell}")
    out = np.empty(sum(comb(d, s) for s in range(1, ell + 1)), dtype=np.int64)
    pos = 0
    for s in range(1, ell + 1):
        bucket = sorted(sum(1 << i for i in combo) for combo in combinations(range(d), s))
        out[pos:pos + len(bucket)] = bucket
        pos += len(bucket)
    return out


def mask_to_features(mask: int) -> list[int]:
    """1-based feature indices contained in ``mask``."""
    mask = int(mask)
    return [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]


def features_to_mask(features) -> int:
    return sum(1 << (int(f) - 1) for f in set(features))
