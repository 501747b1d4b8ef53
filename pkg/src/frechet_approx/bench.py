"""Benchmark harness: timing and cell counts over doubling input sizes."""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional

from . import models
from .errors import UsageError
from .freespace import naive_decide
from .search import SearchStats, approx_frechet, approx_frechet_cascade

CSV_HEADER = ("n", "eps", "family", "value", "cells", "millis", "seed")
METHODS = ("approx", "cascade", "naive")
BENCH_FAMILIES = ("spiral", "zigzag", "random-walk")


def make_pair(family: str, n: int, seed: int):
    """Input pair with n vertices per curve for a benchmark family."""
    if family == "spiral":
        return models.spiral_pair(n, seed)
    if family == "zigzag":
        return models.zigzag_curve(n, 0.5), models.straight_curve(n)
    if family == "random-walk":
        return models.random_walk(n, 2, seed), models.random_walk(n, 2, seed + 1)
    raise UsageError(f"unknown bench family {family!r}; choose from {', '.join(BENCH_FAMILIES)}")


def run_once(family: str, n: int, eps: float, seed: int, method: str = "approx",
             delta: Optional[float] = None) -> dict:
    """One timed run.  The naive method decides at ``delta`` (default: the
    approximate distance, computed outside the timed region)."""
    A, B = make_pair(family, n, seed)
    if method == "naive":
        if delta is None:
            delta = approx_frechet(A, B, eps).value
        t0 = time.perf_counter()
        naive_decide(A, B, delta)
        ms = 1000.0 * (time.perf_counter() - t0)
        cells = A.n_edges * B.n_edges
        value = delta
    elif method in ("approx", "cascade"):
        fn = approx_frechet if method == "approx" else approx_frechet_cascade
        stats = SearchStats()
        t0 = time.perf_counter()
        value = fn(A, B, eps, stats=stats, exact_fallback=False).value
        ms = 1000.0 * (time.perf_counter() - t0)
        cells = stats.cells
    else:
        raise UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return {"n": n, "eps": eps, "family": family, "value": value, "cells": cells,
            "millis": ms, "seed": seed}


def _job(args):
    return run_once(*args)


def run_bench(family: str, sizes: Iterable[int], eps: float, seed: int = 0, repeats: int = 5,
              method: str = "approx", workers: int = 1) -> List[dict]:
    """One row per size: median time over ``repeats`` runs, value and cells of the first.

    With workers > 1 the runs execute in parallel processes, which makes the
    timings noisier; keep workers = 1 for scaling measurements.
    """
    sizes = [int(n) for n in sizes]
    if repeats < 1 or workers < 1 or any(n < 2 for n in sizes):
        raise UsageError("need repeats >= 1, workers >= 1 and sizes >= 2")
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    make_pair(family, 2, seed)  # validates the family name early
    jobs = [(family, n, eps, seed, method) for n in sizes for _ in range(repeats)]
    if workers == 1:
        results = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))
    rows = []
    for k, n in enumerate(sizes):
        runs = results[k * repeats:(k + 1) * repeats]
        row = dict(runs[0])
        row["millis"] = statistics.median(r["millis"] for r in runs)
        rows.append(row)
    return rows


def write_csv(rows: List[dict], path_or_file) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r["n"], repr(float(r["eps"])), r["family"], repr(float(r["value"])),
                        r["cells"], f"{r['millis']:.3f}", r["seed"]])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
