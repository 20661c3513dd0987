"""Timing and workspace accounting over a grid of (d, ell, method, seed) cells.

Memory is counted logically from the numeric buffers each method allocates
(element counts x 8 bytes), not sampled from the OS.
"""
from __future__ import annotations

import csv
import io
import json
import time
from collections import defaultdict
from dataclasses import asdict, dataclass

from .fsi import BASELINE_MAX_D, RunInfo, fsi_baseline, fsi_tt
from .games import GameSpec, generate
from .sweep import MemoryCapExceeded

COLUMNS = ("d", "ell", "method", "seed", "wall_ms", "peak_bytes", "madds", "status")
METHODS = ("tt", "baseline")


@dataclass
class BenchRun:
    d: int
    ell: int
    method: str
    seed: int
    repeats: int
    wall_ms: float = 0.0
    peak_bytes: int = 0
    madds: int = 0
    status: str = "ok"

    @property
    def skipped(self) -> bool:
        return self.status != "ok"


def _once(method: str, v, ell: int, memory_cap: int | None, info: RunInfo):
    if method == "tt":
        return fsi_tt(v, ell, strict_zero=False, memory_cap=memory_cap, info=info)
    return fsi_baseline(v, ell, info=info)


def run_cell(d: int, ell: int, method: str, seed: int, repeats: int = 3, *,
             memory_cap: int | None = None, baseline_max_d: int = BASELINE_MAX_D,
             time_it: bool = True) -> BenchRun:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    run = BenchRun(d, ell, method, seed, repeats)
    if not 1 <= ell <= d or (method == "baseline" and d > baseline_max_d):
        run.status = "SKIPPED"
        return run
    v = generate(GameSpec("random", d, seed=seed))
    info = RunInfo()
    try:
        _once(method, v, ell, memory_cap, info)  # warm-up
        elapsed = 0.0
        for _ in range(repeats if time_it else 0):
            t0 = time.perf_counter()
            _once(method, v, ell, memory_cap, RunInfo())
            elapsed += time.perf_counter() - t0
    except MemoryCapExceeded:
        run.status = "SKIPPED"
        return run
    run.wall_ms = 1e3 * elapsed / repeats if time_it else 0.0
    run.peak_bytes = info.peak_bytes
    run.madds = info.madds
    return run


def run_matrix(d_list, ell_list, methods=METHODS, seeds=1, repeats: int = 3, **kwargs) -> list[BenchRun]:
    """One row per (d, ell, method, seed), run strictly in sequence.

    ``seeds`` is a count (seeds ``0..n-1``) or an explicit list.
    """
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    return [
        run_cell(d, ell, m, s, repeats, **kwargs)
        for d in d_list for ell in ell_list for m in methods for s in seed_list
    ]


def _row(run: BenchRun) -> dict:
    row = asdict(run)
    if run.skipped:
        row.update(wall_ms="", peak_bytes="", madds="")
    else:
        row["wall_ms"] = f"{run.wall_ms:.3f}"
    return {k: row[k] for k in COLUMNS}


def emit_report(runs: list[BenchRun], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for run in runs:
            w.writerow(_row(run))
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{k: getattr(r, k) for k in COLUMNS} for r in runs], indent=1) + "\n"
    if fmt in ("markdown", "md", "markdown-table"):
        return _markdown(runs)
    raise ValueError(f"unknown report format {fmt!r}")


def _markdown(runs: list[BenchRun]) -> str:
    cells: dict[tuple[int, int], dict[str, list[BenchRun]]] = defaultdict(lambda: defaultdict(list))
    methods = []
    for r in runs:
        cells[(r.d, r.ell)][r.method].append(r)
        if r.method not in methods:
            methods.append(r.method)
    both = all(m in methods for m in METHODS)
    head = ["d", "ell"] + [f"{m} ms" for m in methods] + [f"{m} peak MB" for m in methods]
    if both:
        head.append("speedup")
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]

    def mean_ms(rs):
        ok = [r.wall_ms for r in rs if not r.skipped]
        return sum(ok) / len(ok) if ok else None

    for (d, ell), by_method in sorted(cells.items()):
        ms = {m: mean_ms(by_method.get(m, [])) for m in methods}
        row = [str(d), str(ell)]
        row += ["SKIPPED" if ms[m] is None else f"{ms[m]:.3f}" for m in methods]
        for m in methods:
            ok = [r.peak_bytes for r in by_method.get(m, []) if not r.skipped]
            row.append(f"{max(ok) / 2**20:.2f}" if ok else "SKIPPED")
        if both:
            tt, base = ms["tt"], ms["baseline"]
            row.append(f"{base / tt:.1f}x" if tt and base is not None else "-")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
