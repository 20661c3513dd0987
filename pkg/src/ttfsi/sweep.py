"""Left-to-right application of a sparse MPO to a dense ``2^d`` vector.

Logically the intermediate tensor at step ``k`` has shape
``(2^(k-1), D_(k-1), 2^(d-k+1))`` = (out-prefix, bond, in-suffix). Sites are
consumed LSB first. The input is stored bit-reversed so that ``tau_k`` is the
highest bit of the suffix index, and each new output bit ``sigma_k`` becomes
the highest bit of the prefix index, leaving the result in natural mask order.

Physically the buffer starts prefix-major ``[p, bond, r]`` and switches once,
halfway, to suffix-major ``[r, q, bond, p]`` (``p`` frozen, new output bits
collected in ``q``). Either way every slice update touches contiguous blocks
of at least ``2^(d//2 - 1)`` elements.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .mpo import Mpo

__all__ = [
    "DEFAULT_MEM_CAP_BYTES",
    "MemoryCapExceeded",
    "SweepStats",
    "apply_mpo",
    "apply_mpo_instrumented",
    "default_memory_cap",
    "predict_step_elements",
    "predict_workspace_bytes",
]

DEFAULT_MEM_CAP_BYTES = 8 << 30
ITEMSIZE = 8
# upper bound on the scratch buffer used for non-unit weighted runs
SCRATCH_ELEMENTS = 1 << 18


class MemoryCapExceeded(MemoryError):
    pass


def default_memory_cap() -> int:
    env = os.environ.get("TTFSI_MEM_CAP_BYTES")
    return int(env) if env else DEFAULT_MEM_CAP_BYTES


@dataclass
class SweepStats:
    d: int
    step_shapes: list[tuple[int, int, int]] = field(default_factory=list)
    step_elements: list[int] = field(default_factory=list)
    peak_elements: int = 0
    peak_workspace_bytes: int = 0
    madds: int = 0
    wall_s: float = 0.0


def bit_reversal(d: int) -> np.ndarray:
    """Permutation ``perm[r] = reverse_d_bits(r)``."""
    perm = np.zeros(1 << d, dtype=np.int64)
    for i in range(d):
        perm |= ((np.arange(1 << d) >> i) & 1) << (d - 1 - i)
    return perm


def predict_step_elements(mpo: Mpo) -> list[int]:
    """Element count of the intermediate tensor entering each step (and the result)."""
    n = 1 << mpo.d
    return [n * dim for dim in mpo.bond_dims]


def _scratch_elements(mpo: Mpo) -> int:
    n = 1 << mpo.d
    return min(SCRATCH_ELEMENTS, n // 2 * max(mpo.bond_dims))


def predict_workspace_bytes(mpo: Mpo) -> int:
    """Bytes held at the worst step: source and target tensors plus scratch."""
    elems = predict_step_elements(mpo)
    pair = max(a + b for a, b in zip(elems, elems[1:])) if mpo.d else elems[0]
    return ITEMSIZE * (pair + _scratch_elements(mpo))


def _run(mpo: Mpo, v, memory_cap: int | None, stats: SweepStats | None) -> np.ndarray:
    d = mpo.d
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.size != 1 << d:
        raise ValueError(f"operator acts on length {1 << d}, got input of shape {x.shape}")
    cap = default_memory_cap() if memory_cap is None else memory_cap
    need = predict_workspace_bytes(mpo)
    if need > cap:
        raise MemoryCapExceeded(f"sweep needs {need} bytes, cap is {cap}")

    scratch = np.empty(_scratch_elements(mpo))
    switch = d // 2
    x = x[bit_reversal(d)].reshape(1, 1, 1 << d)
    for k, core in enumerate(mpo.cores, start=1):
        if k <= switch:
            p, dim_in, r = x.shape
            q = 1
            half = r // 2
            src = x.reshape(1, p, dim_in, 2, half)
            out = np.zeros((2, 1, p, core.out_dim, half))
            dst = out.reshape(2 * p, core.out_dim, half)

            def read(tau, a, n):
                return src[:, :, a:a + n, tau, :]

            def write(sigma, b, n):
                return out[sigma, :, :, b:b + n, :]
        else:
            if k == switch + 1:
                p_, dim_, r_ = x.shape
                x = np.ascontiguousarray(x.transpose(2, 1, 0)).reshape(r_, 1, dim_, p_)
            r, q, dim_in, p = x.shape
            half = r // 2
            src = x.reshape(2, half, q, dim_in, p)
            out = np.zeros((half, 2, q, core.out_dim, p))
            dst = out.reshape(half, 2 * q, core.out_dim, p)

            def read(tau, a, n):
                return src[tau, :, :, a:a + n, :]

            def write(sigma, b, n):
                return out[:, sigma, :, b:b + n, :]

        if stats is not None:
            stats.step_shapes.append((p * q, dim_in, r))
            stats.step_elements.append(x.size)
        temp = 0
        if core.out_dim == 1:
            # every run has length one here; contract each (sigma, tau) slab as a matvec
            g = core.to_dense()
            for sigma in (0, 1):
                for tau in (0, 1):
                    w = g[:, sigma, tau, 0]
                    if not w.any():
                        continue
                    contrib = np.matmul(w, read(tau, 0, dim_in))
                    write(sigma, 0, 1)[:, :, 0, :] += contrib
                    temp = contrib.size
                    if stats is not None:
                        stats.madds += dim_in * p * q * half
        else:
            for run in core.runs:
                n = run.length
                xs = read(run.tau, run.src, n)
                ys = write(run.sigma, run.dst, n)
                if run.unit_sign > 0:
                    ys += xs
                elif run.unit_sign < 0:
                    ys -= xs
                else:
                    _weighted_add(ys, xs, run.weights, scratch)
            if stats is not None:
                stats.madds += core.nnz * p * q * half
        if stats is not None:
            stats.peak_workspace_bytes = max(
                stats.peak_workspace_bytes, ITEMSIZE * (x.size + out.size + scratch.size + temp))
        x = dst
    if stats is not None:
        stats.step_shapes.append((1 << d, 1, 1))
        stats.step_elements.append(x.size)
        stats.peak_elements = max(stats.step_elements)
    return x.reshape(-1)


def _weighted_add(ys: np.ndarray, xs: np.ndarray, w: np.ndarray, scratch: np.ndarray):
    """``ys += w[:, None] * xs`` over ``(outer, lead, run, inner)`` views, in
    chunks that fit ``scratch``."""
    _, lead, n, inner = xs.shape
    wb = w[:, None]
    for yo, xo in zip(ys, xs):
        if n * inner <= scratch.size:
            step = scratch.size // (n * inner)
            for lo in range(0, lead, step):
                hi = min(lead, lo + step)
                tmp = scratch[:(hi - lo) * n * inner].reshape(hi - lo, n, inner)
                np.multiply(xo[lo:hi], wb, out=tmp)
                yo[lo:hi] += tmp
        else:
            nb = min(n, scratch.size)
            step = max(1, scratch.size // nb)
            for i in range(lead):
                for j in range(0, n, nb):
                    jb = min(n, j + nb)
                    for lo in range(0, inner, step):
                        hi = min(inner, lo + step)
                        tmp = scratch[:(jb - j) * (hi - lo)].reshape(jb - j, hi - lo)
                        np.multiply(xo[i, j:jb, lo:hi], wb[j:jb], out=tmp)
                        yo[i, j:jb, lo:hi] += tmp


def apply_mpo(mpo: Mpo, v, *, memory_cap: int | None = None) -> np.ndarray:
    """Return ``M @ v`` without materializing ``M``."""
    return _run(mpo, v, memory_cap, None)


def apply_mpo_instrumented(mpo: Mpo, v, *, memory_cap: int | None = None):
    stats = SweepStats(mpo.d)
    t0 = time.perf_counter()
    out = _run(mpo, v, memory_cap, stats)
    stats.wall_s = time.perf_counter() - t0
    return out, stats
