"""End-to-end acceptance checks, one test per criterion.

Each test records a pass/fail line through the ``acceptance`` fixture; the
lines are printed in the terminal summary. Run with ``pytest tests/test_acceptance.py``.
"""
from fractions import Fraction
from math import isfinite

import numpy as np
import pytest

from conftest import (
    brute_correction_matrix,
    exact_weight,
    permute_game,
    permute_mask,
    random_game,
    shapley_direct,
)
from ttfsi.bench import run_cell
from ttfsi.correction import (
    build_correction_mpo,
    correction_weight,
    enumerate_states,
    precontract,
    state_count,
)
from ttfsi.fsi import RunInfo, fsi_baseline, fsi_tt
from ttfsi.games import GameSpec, generate, planted_mobius
from ttfsi.mpo import kron_mobius, to_dense


def test_oracle_equivalence(acceptance):
    worst = 0.0
    for d in (4, 6, 8, 10, 12):
        for ell in (1, 2, 3):
            for seed in range(20):
                v = random_game(np.random.default_rng([d, ell, seed]), d)
                tt, base = fsi_tt(v, ell), fsi_baseline(v, ell)
                assert np.array_equal(tt.masks, base.masks)
                worst = max(worst, np.abs(tt.values - base.values).max())
    ok = acceptance(1, "oracle equivalence", worst <= 1e-12, f"max abs diff {worst:.2e} (tol 1e-12)")
    assert ok


def test_dense_materialization(acceptance):
    worst_a = worst_b = 0.0
    for d in range(1, 7):
        for ell in range(1, d + 1):
            a = to_dense(build_correction_mpo(d, ell))
            b = to_dense(precontract(build_correction_mpo(d, ell)))
            worst_a = max(worst_a, np.abs(a - brute_correction_matrix(d, ell)).max())
            worst_b = max(worst_b, np.abs(b - a @ kron_mobius(d)).max())
    ok = acceptance(2, "dense materialization", max(worst_a, worst_b) <= 1e-13,
                    f"A vs brute {worst_a:.1e}, B vs A*mu {worst_b:.1e} (tol 1e-13)")
    assert ok


def test_state_counts(acceptance):
    counts = [len(enumerate_states(k, 2)) for k in range(4)]
    bound_ok = all(
        len(enumerate_states(k, ell)) == state_count(k, ell) <= (min(k, ell) + 1) * (k + 1)
        for d in range(1, 25) for ell in range(1, d + 1) for k in range(d + 1)
    )
    dims_ok = build_correction_mpo(3, 2).bond_dims[:3] == [1, 3, 6]
    ok = acceptance(3, "state counts", counts == [1, 3, 6, 9] and bound_ok and dims_ok,
                    f"d=3 ell=2 counts {counts}, bound holds for k <= d <= 24: {bound_ok}")
    assert ok


def test_faithfulness(acceptance):
    worst = 0.0
    for i in range(100):
        d, ell = 4 + i % 11, 1 + i % 3
        spec = GameSpec("k-additive", d=d, k=ell, seed=i)
        scores = fsi_tt(generate(spec), ell)
        worst = max(worst, np.abs(scores.values - planted_mobius(spec)[scores.masks]).max())
    ok = acceptance(4, "faithfulness", worst <= 1e-12, f"100 games, max abs err {worst:.2e} (tol 1e-12)")
    assert ok


def test_shapley_reduction(acceptance):
    worst = 0.0
    for seed in range(20):
        d = 2 + seed % 9
        v = random_game(np.random.default_rng([99, seed]), d)
        scores = fsi_tt(v, 1)
        phi = np.array([scores[1 << i] for i in range(d)])
        worst = max(worst, np.abs(phi - shapley_direct(v)).max())
    ok = acceptance(5, "ell=1 Shapley reduction", worst <= 1e-12, f"20 games d<=10, max abs err {worst:.2e}")
    assert ok


def _fit_exponent(xs, ys):
    return np.polyfit(np.log(xs), np.log(ys), 1)[0]


def test_sparse_storage(acceptance):
    nnz_ok = True
    for d in range(1, 21):
        for ell in range(1, d + 1):
            mpo = build_correction_mpo(d, ell)
            dims = mpo.bond_dims
            nnz_ok &= all(core.nnz <= 3 * dims[k] for k, core in enumerate(mpo.cores))
    ds = np.arange(8, 21)
    exps = {ell: _fit_exponent(ds, [build_correction_mpo(int(d), ell).nnz for d in ds]) for ell in (1, 2, 3)}
    worst = max(exps.values())
    ok = acceptance(6, "sparse storage", nnz_ok and worst <= 2.3,
                    f"nnz <= 3 D for d <= 20: {nnz_ok}; fit exponents "
                    + ", ".join(f"ell={e}: {x:.2f}" for e, x in exps.items()) + " (max 2.3)")
    assert ok


@pytest.mark.slow
def test_scaling_shape(acceptance):
    ell = 3
    work, peak = [], []
    for d in range(8, 17):
        info = RunInfo()
        fsi_tt(random_game(np.random.default_rng(d), d), ell, strict_zero=False, info=info)
        work.append(info.madds / (ell**2 * d**3 * 2**d))
        peak.append(info.peak_bytes / 8 / (ell * d * 2**d))
    work_band, peak_band = max(work) / min(work), max(peak) / min(peak)
    walls = {}
    for d in (10, 12, 14, 16):
        tt = run_cell(d, ell, "tt", 0, repeats=2)
        base = run_cell(d, ell, "baseline", 0, repeats=1)
        walls[d] = (tt.wall_ms, base.wall_ms)
    faster = all(tt < base for tt, base in walls.values())
    ok = acceptance(
        7, "scaling shape", work_band <= 2 and peak_band <= 2 and faster,
        f"madds band x{work_band:.2f}, peak band x{peak_band:.2f}; tt/baseline ms "
        + ", ".join(f"d={d}: {t:.0f}/{b:.0f}" for d, (t, b) in walls.items()))
    assert ok


@pytest.mark.slow
def test_scale_demonstration(acceptance):
    import time

    v = generate(GameSpec("random", d=20, seed=0))
    info = RunInfo()
    t0 = time.perf_counter()
    scores = fsi_tt(v, 3, strict_zero=False, info=info)
    wall = time.perf_counter() - t0
    ok = acceptance(8, "scale demonstration", wall < 120 and info.peak_bytes < 4 * 2**30 and len(scores) == 1350,
                    f"d=20 ell=3 in {wall:.1f} s, {info.peak_bytes / 2**30:.2f} GiB accounted")
    assert ok


def test_log_gamma_weights(acceptance):
    worst = 0.0
    for ell in range(1, 7):
        for s in range(1, ell + 1):
            for t in range(ell + 1, 65):
                exact = exact_weight(s, t, ell)
                got = correction_weight(s, t, ell).value
                worst = max(worst, float(abs(Fraction(got) - exact) / abs(exact)))
    finite = True
    for ell in range(1, 25):
        for s in range(ell + 1):
            for t in range(25):
                w = correction_weight(s, t, ell)
                finite &= isfinite(w.value) and (s == 0 or t <= ell or w.value != 0)
        mpo = precontract(build_correction_mpo(24, ell)) if ell in (1, 3, 6, 12, 24) else None
        if mpo is not None:
            finite &= all(np.isfinite(c.weight).all() for c in mpo.cores)
    ok = acceptance(9, "log-gamma weights", worst <= 1e-12 and finite,
                    f"max rel err {worst:.1e} (tol 1e-12); d=24 tables finite: {finite}")
    assert ok


def test_property_suites(acceptance):
    null_worst = perm_worst = 0.0
    for trial in range(50):
        rng = np.random.default_rng([7, trial])
        d = int(rng.integers(2, 11))
        ell = int(rng.integers(1, min(d, 4) + 1))
        # null feature: copy the game on one coordinate so adding it never changes v
        i = int(rng.integers(d))
        v = random_game(rng, d)
        masks = np.arange(1 << d)
        v = v[masks & ~(1 << i)]
        scores = fsi_tt(v, ell)
        hit = (scores.masks >> i) & 1 == 1
        null_worst = max(null_worst, np.abs(scores.values[hit]).max())

        u = random_game(rng, d)
        perm = [int(x) for x in rng.permutation(d)]
        a, b = fsi_tt(u, ell), fsi_tt(permute_game(u, perm), ell)
        perm_worst = max(perm_worst, max(abs(b[m] - a[permute_mask(m, perm)]) for m in b.masks))
    ok = acceptance(10, "null feature and permutation symmetry", max(null_worst, perm_worst) <= 1e-12,
                    f"50 trials each, null max {null_worst:.1e}, permutation max {perm_worst:.1e}")
    assert ok
