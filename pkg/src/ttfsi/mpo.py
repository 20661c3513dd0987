"""Sparse matrix product operator cores.

A core at site ``k`` is a coordinate list of transitions
``(src, sigma, tau, dst, weight)``: ``sigma`` is the output bit and ``tau``
the input bit at that site. Entries are kept sorted by
``(src, sigma, tau, dst)`` and exact zeros are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["MpoCore", "Mpo", "Run", "identity_mpo", "mobius_mpo", "to_dense", "kron_mobius"]


@dataclass(frozen=True)
class Run:
    """Transitions with fixed ``(sigma, tau)`` whose src and dst bond indices
    both advance by one; the sweep applies each run as one slice update."""

    sigma: int
    tau: int
    src: int
    dst: int
    weights: np.ndarray

    @property
    def length(self) -> int:
        return self.weights.size

    @cached_property
    def unit_sign(self) -> float:
        """+1 or -1 if every weight equals it, else 0."""
        w = self.weights
        if np.all(w == 1.0):
            return 1.0
        if np.all(w == -1.0):
            return -1.0
        return 0.0


@dataclass(frozen=True, eq=False)
class MpoCore:
    site: int
    in_dim: int
    out_dim: int
    src: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)

    @classmethod
    def from_transitions(cls, site: int, in_dim: int, out_dim: int, transitions) -> "MpoCore":
        """Build from ``(src, sigma, tau, dst, weight)`` tuples; duplicates are summed."""
        acc: dict[tuple[int, int, int, int], float] = {}
        for a, s, t, b, w in transitions:
            key = (int(a), int(s), int(t), int(b))
            acc[key] = acc.get(key, 0.0) + float(w)
        items = sorted((k, w) for k, w in acc.items() if w != 0.0)
        cols = np.array([k for k, _ in items], dtype=np.int64).reshape(-1, 4)
        weight = np.array([w for _, w in items], dtype=np.float64)
        core = cls(site, in_dim, out_dim, cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], weight)
        core._validate()
        return core

    def _validate(self):
        if self.src.size and (self.src.min() < 0 or self.src.max() >= self.in_dim):
            raise ValueError(f"site {self.site}: source index out of range")
        if self.dst.size and (self.dst.min() < 0 or self.dst.max() >= self.out_dim):
            raise ValueError(f"site {self.site}: target index out of range")
        for bits in (self.sigma, self.tau):
            if bits.size and not np.isin(bits, (0, 1)).all():
                raise ValueError(f"site {self.site}: physical indices must be bits")

    @property
    def nnz(self) -> int:
        return int(self.weight.size)

    def transitions(self):
        return zip(self.src.tolist(), self.sigma.tolist(), self.tau.tolist(),
                   self.dst.tolist(), self.weight.tolist())

    def to_dense(self) -> np.ndarray:
        """Dense core of shape ``(in_dim, 2, 2, out_dim)``."""
        g = np.zeros((self.in_dim, 2, 2, self.out_dim))
        np.add.at(g, (self.src, self.sigma, self.tau, self.dst), self.weight)
        return g

    @cached_property
    def runs(self) -> tuple[Run, ...]:
        """Transitions grouped by ``(sigma, tau)`` and chained into runs of
        consecutive ``(src, dst)`` pairs."""
        out = []
        for s in (0, 1):
            for t in (0, 1):
                sel = np.flatnonzero((self.sigma == s) & (self.tau == t))
                # extend whichever open run ends at (src - 1, dst - 1) with the same
                # weight class (+1, -1 or general)
                open_runs: dict[tuple[int, int, float], list] = {}
                runs = []
                for i in sel:
                    a, b, w = int(self.src[i]), int(self.dst[i]), float(self.weight[i])
                    cls = w if abs(w) == 1.0 else 0.0
                    run = open_runs.pop((a, b, cls), None)
                    if run is None:
                        run = [a, b, []]
                        runs.append(run)
                    run[2].append(w)
                    open_runs[(a + 1, b + 1, cls)] = run
                out.extend(Run(s, t, a, b, np.array(ws)) for a, b, ws in runs)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class Mpo:
    d: int
    cores: tuple[MpoCore, ...]

    def __post_init__(self):
        if len(self.cores) != self.d:
            raise ValueError(f"expected {self.d} cores, got {len(self.cores)}")
        if self.d and (self.cores[0].in_dim != 1 or self.cores[-1].out_dim != 1):
            raise ValueError("boundary bond dimensions must be 1")
        for left, right in zip(self.cores, self.cores[1:]):
            if left.out_dim != right.in_dim:
                raise ValueError(f"bond mismatch between sites {left.site} and {right.site}")

    @property
    def bond_dims(self) -> list[int]:
        return [1] + [c.out_dim for c in self.cores]

    @property
    def nnz(self) -> int:
        return sum(c.nnz for c in self.cores)


def _rank_one(d: int, table: dict[tuple[int, int], float]) -> Mpo:
    cores = tuple(
        MpoCore.from_transitions(k, 1, 1, [(0, s, t, 0, w) for (s, t), w in table.items()])
        for k in range(1, d + 1)
    )
    return Mpo(d, cores)


def identity_mpo(d: int) -> Mpo:
    return _rank_one(d, {(0, 0): 1.0, (1, 1): 1.0})


def mobius_mpo(d: int) -> Mpo:
    """Rank-1 Möbius operator, each core ``[[1, 0], [-1, 1]]`` indexed ``[sigma, tau]``."""
    return _rank_one(d, {(0, 0): 1.0, (1, 0): -1.0, (1, 1): 1.0})


def kron_mobius(d: int) -> np.ndarray:
    """Dense ``2^d x 2^d`` Möbius matrix as a Kronecker product (small ``d`` only)."""
    m = np.array([[1.0, 0.0], [-1.0, 1.0]])
    out = np.ones((1, 1))
    for _ in range(d):
        # site 1 is the least significant bit, so it is the rightmost factor
        out = np.kron(m, out)
    return out


def to_dense(mpo: Mpo) -> np.ndarray:
    """Materialize ``M[S, T]`` by contracting dense cores over every bit pattern.

    Exponential in ``d`` (``4^d`` entries); for verification at small ``d``.
    """
    d = mpo.d
    if d > 10:
        raise ValueError("dense materialization is limited to d <= 10")
    # row vectors over the bond, one per (out-prefix, in-prefix) pair
    partial = np.ones((1, 1, 1))
    for k, core in enumerate(mpo.cores):
        g = core.to_dense()
        n = 1 << k
        # new[sig_k*n + p, tau_k*n + q, beta] = sum_alpha partial[p, q, alpha] g[alpha, sig_k, tau_k, beta]
        new = np.einsum("pqa,astb->sptqb", partial, g)
        partial = new.reshape(2 * n, 2 * n, core.out_dim)
    return partial[:, :, 0]
