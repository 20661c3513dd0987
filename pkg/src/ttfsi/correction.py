"""Two-counter correction operator and its Möbius precontraction.

Bond states are ``(s, t)`` pairs: ``s`` counts output bits seen so far and
``t`` counts input bits. At boundary ``k`` the states are
``{(s, t) : 0 <= s <= min(k, ell), s <= t <= k}``, indexed in lexicographic
order.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, exp
from typing import Literal

from .mpo import Mpo, MpoCore

__all__ = [
    "MAX_D",
    "BondState",
    "CorrectionWeight",
    "CorrectionMpo",
    "enumerate_states",
    "state_count",
    "correction_weight",
    "build_correction_mpo",
    "precontract",
    "dump_transitions",
]

MAX_D = 26


@dataclass(frozen=True, order=True)
class BondState:
    s: int
    t: int


@dataclass(frozen=True)
class CorrectionWeight:
    sign: int
    log_magnitude: float

    @property
    def value(self) -> float:
        return 0.0 if self.sign == 0 else self.sign * exp(self.log_magnitude)

    def __float__(self) -> float:
        return self.value


ZERO_WEIGHT = CorrectionWeight(0, float("-inf"))


def enumerate_states(k: int, ell: int) -> list[BondState]:
    if k < 0 or ell < 1:
        raise ValueError(f"invalid boundary k={k}, ell={ell}")
    return [BondState(s, t) for s in range(min(k, ell) + 1) for t in range(s, k + 1)]


def state_count(k: int, ell: int) -> int:
    return sum(k - s + 1 for s in range(min(k, ell) + 1))


def _log_comb(n: int, r: int) -> float:
    return lgamma(n + 1) - lgamma(r + 1) - lgamma(n - r + 1)


def correction_weight(s: int, t: int, ell: int) -> CorrectionWeight:
    """Coefficient of ``a(v, T)`` in the correction for ``S`` with ``|S| = s``, ``|T| = t``.

    ``(-1)^(ell-s) * s/(ell+s) * C(ell, s) * C(t-1, ell) / C(t+ell-1, ell+s)``,
    with the magnitude accumulated in log space.
    """
    if s <= 0 or s > ell or t <= ell:
        return ZERO_WEIGHT
    sign = -1 if (ell - s) % 2 else 1
    log_mag = (log(s) - log(ell + s) + _log_comb(ell, s)
               + _log_comb(t - 1, ell) - _log_comb(t + ell - 1, ell + s))
    return CorrectionWeight(sign, log_mag)


@dataclass(frozen=True, eq=False)
class CorrectionMpo(Mpo):
    ell: int = 1
    state_tables: tuple[tuple[BondState, ...], ...] = ()
    kind: Literal["A_trunc", "B_corr"] = "A_trunc"


def _check_args(d: int, ell: int):
    if not 1 <= d <= MAX_D:
        raise ValueError(f"d must be in [1, {MAX_D}], got {d}")
    if not 1 <= ell <= d:
        raise ValueError(f"ell must be in [1, {d}], got {ell}")


def build_correction_mpo(d: int, ell: int) -> CorrectionMpo:
    """Correction operator with unit internal cores and weights on the last site."""
    _check_args(d, ell)
    tables = [tuple(enumerate_states(k, ell)) for k in range(d)]
    tables.append((BondState(0, 0),))  # boundary d collapses to a single bond
    cores = []
    for k in range(1, d + 1):
        prev = tables[k - 1]
        last = k == d
        index = None if last else {st: i for i, st in enumerate(tables[k])}
        cap = min(k, ell)
        trans = []
        for a, st in enumerate(prev):
            for sigma, tau in ((0, 0), (0, 1), (1, 1)):
                s, t = st.s + sigma, st.t + tau
                if s > cap:
                    continue
                if last:
                    w = correction_weight(s, t, ell)
                    if w.sign:
                        trans.append((a, sigma, tau, 0, w.value))
                else:
                    trans.append((a, sigma, tau, index[BondState(s, t)], 1.0))
        cores.append(MpoCore.from_transitions(k, len(prev), len(tables[k]), trans))
    return CorrectionMpo(d, tuple(cores), ell=ell, state_tables=tuple(tables), kind="A_trunc")


def precontract(a: CorrectionMpo) -> CorrectionMpo:
    """Fold the Möbius operator into every core: ``B = A . mu``.

    Per core ``B[., sigma, 0, .] = A[., sigma, 0, .] - A[., sigma, 1, .]`` and
    ``B[., sigma, 1, .] = A[., sigma, 1, .]``; bond dimensions are unchanged.
    """
    if a.kind != "A_trunc":
        raise ValueError(f"precontract expects an A_trunc operator, got {a.kind}")
    cores = []
    for core in a.cores:
        trans = []
        for src, sigma, tau, dst, w in core.transitions():
            trans.append((src, sigma, tau, dst, w))
            if tau == 1:
                trans.append((src, sigma, 0, dst, -w))
        cores.append(MpoCore.from_transitions(core.site, core.in_dim, core.out_dim, trans))
    return CorrectionMpo(a.d, tuple(cores), ell=a.ell, state_tables=a.state_tables, kind="B_corr")


def dump_transitions(mpo: CorrectionMpo) -> str:
    lines = ["site,from,sigma,tau,to,weight"]
    for core in mpo.cores:
        before, after = mpo.state_tables[core.site - 1], mpo.state_tables[core.site]
        for src, sigma, tau, dst, w in core.transitions():
            f = before[src]
            g = "end" if core.site == mpo.d else f"({after[dst].s},{after[dst].t})"
            lines.append(f"{core.site},({f.s},{f.t}),{sigma},{tau},{g},{w!r}")
    return "\n".join(lines) + "\n"
