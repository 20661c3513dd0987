"""Independent brute-force oracles shared by the test modules.

Everything here loops over subsets directly (or uses exact rationals) and
never calls the fast transforms or the MPO code it is used to check.
"""
from fractions import Fraction
from itertools import permutations
from math import comb, factorial

import numpy as np
import pytest

ACCEPTANCE_KEY = pytest.StashKey[list]()


def brute_mobius(v):
    n = len(v)
    out = np.zeros(n)
    for s in range(n):
        for t in range(n):
            if t & s == t:
                out[s] += (-1) ** (bin(s).count("1") - bin(t).count("1")) * v[t]
    return out


def exact_weight(s, t, ell):
    if s == 0 or t <= ell:
        return Fraction(0)
    return ((-1) ** (ell - s) * Fraction(s, ell + s) * comb(ell, s)
            * Fraction(comb(t - 1, ell), comb(t + ell - 1, ell + s)))


def brute_correction_matrix(d, ell):
    """``C[S, T]``: coefficient of ``a(v, T)`` in the correction for ``S``."""
    n = 1 << d
    c = np.zeros((n, n))
    for s in range(n):
        for t in range(n):
            ss, tt = bin(s).count("1"), bin(t).count("1")
            if t & s == s and t != s and tt > ell and ss <= ell:
                c[s, t] = float(exact_weight(ss, tt, ell))
    return c


def brute_fsi(v, ell):
    """Closed form by double loop over (S, T); dict mask -> score."""
    d = len(v).bit_length() - 1
    a = brute_mobius(v)
    c = brute_correction_matrix(d, ell) @ a
    return {s: a[s] + c[s] for s in range(1, 1 << d) if bin(s).count("1") <= ell}


def shapley_direct(v):
    """Shapley values from the subset-weighted marginal-contribution formula."""
    d = len(v).bit_length() - 1
    phi = np.zeros(d)
    for i in range(d):
        bit = 1 << i
        for s in range(1 << d):
            if s & bit:
                continue
            k = bin(s).count("1")
            phi[i] += factorial(k) * factorial(d - k - 1) / factorial(d) * (v[s | bit] - v[s])
    return phi


def shapley_permutations(v):
    """Average marginal contribution over all orderings (tiny d only)."""
    d = len(v).bit_length() - 1
    phi = np.zeros(d)
    orders = list(permutations(range(d)))
    for order in orders:
        s = 0
        for i in order:
            phi[i] += v[s | 1 << i] - v[s]
            s |= 1 << i
    return phi / len(orders)


def random_game(rng, d, scale=1.0):
    v = rng.uniform(-scale, scale, 1 << d)
    v[0] = 0.0
    return v


def permute_game(v, perm):
    """Relabel features: feature ``i`` of the new game is feature ``perm[i]`` of ``v``."""
    d = len(perm)
    out = np.empty_like(v)
    for m in range(1 << d):
        out[m] = v[permute_mask(m, perm)]
    return out


def permute_mask(m, perm):
    return sum(1 << perm[i] for i in range(len(perm)) if m >> i & 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    log = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number, name, passed, detail=""):
        log.append((number, name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE_KEY, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(log):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {name}: {detail}")
