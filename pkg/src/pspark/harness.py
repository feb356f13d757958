"""Trial orchestration, parameter sweeps, and CSV/JSON output."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .coloring import PHASES, PhaseFailure, verify_coloring
from .decomposition import decompose, verify
from .dense import color_dense
from .graph import GeneratorSpec, Graph, generate, regularize
from .palette import RngStream, sample_lists
from .sparse import color_sparse

__all__ = [
    "TrialConfig",
    "TrialResult",
    "CellSummary",
    "ExperimentSummary",
    "verify_coloring",
    "run_trial",
    "run_experiment",
    "trial_seed",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("n", "D", "c", "ell", "eps", "trials", "successes", "fail_coverage",
               "fail_sparse", "fail_process", "fail_matching", "mean_ms")
_FAIL_COLUMN = {"coverage": "fail_coverage", "sparse": "fail_sparse",
                "dense-process": "fail_process", "dense-matching": "fail_matching"}
# exact neighbourhood non-edge counts cost about n * D^2 / 2 steps
_EXACT_REPORT_BUDGET = 5e8


@dataclass(frozen=True)
class TrialConfig:
    """One pipeline run.  List size is ``ceil(c ln n')`` over the coloured graph's ``n'``."""

    graph: GeneratorSpec
    c: float = 1.5
    D: int | None = None
    eps: float = 0.05
    seed: int = 0
    paper_faithful: bool = True
    adaptive_process: bool = False
    skip_regularize: bool = False
    retries: int = 20
    restarts: int = 3
    exact_report: bool | None = None

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        # the partition guarantees are proved for eps < 1/24, but larger values still run
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.D is not None and self.D < 0:
            raise ValueError("D must be non-negative")
        if self.retries < 0 or self.restarts < 0:
            raise ValueError("retries and restarts must be non-negative")

    @property
    def delta(self) -> float:
        return self.c - 1.0


@dataclass
class TrialResult:
    success: bool
    failure_phase: str | None
    n: int
    D: int
    c: float
    ell: int
    eps: float
    seed: int
    coloring: np.ndarray | None = None
    failure: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self, include_coloring: bool = False) -> dict:
        out = {k: getattr(self, k) for k in
               ("success", "failure_phase", "n", "D", "c", "ell", "eps", "seed",
                "failure", "diagnostics", "wall_time")}
        if include_coloring and self.coloring is not None:
            out["coloring"] = self.coloring.tolist()
        return out


@lru_cache(maxsize=8)
def _base_graph(spec: GeneratorSpec) -> Graph:
    return generate(spec)


@lru_cache(maxsize=8)
def _prepared(spec: GeneratorSpec, D: int | None, skip: bool) -> tuple[Graph, int]:
    g = _base_graph(spec)
    D = g.D_max if D is None else D
    if g.D_max > D:
        raise ValueError(f"graph has max degree {g.D_max} > D={D}")
    if not skip and g.n and D > 0:
        g = regularize(g, D)
    return g, D


def _decomposed(g: Graph, D: int, eps: float, exact: bool | None):
    dec = decompose(g, D, eps)
    if exact is None:
        exact = len(dec.sparse) * D * D / 2 <= _EXACT_REPORT_BUDGET
    return dec, verify(g, dec, D, eps, exact=exact).to_dict()


@lru_cache(maxsize=8)
def _prepared_decomposition(spec: GeneratorSpec, D: int | None, skip: bool, eps: float,
                            exact: bool | None):
    g, D = _prepared(spec, D, skip)
    return _decomposed(g, D, eps, exact)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def run_trial(cfg: TrialConfig, graph: Graph | None = None) -> TrialResult:
    """Sample lists, decompose, colour the sparse part, then each cluster, then verify.

    ``graph`` overrides generation (it is still regularized unless
    ``cfg.skip_regularize``).  The first failing phase is recorded and no
    later phase runs.  A returned success has passed :func:`verify_coloring`.
    """
    start = time.perf_counter()
    if graph is None:
        g, D = _prepared(cfg.graph, cfg.D, cfg.skip_regularize)
    else:
        D = graph.D_max if cfg.D is None else cfg.D
        if graph.D_max > D:
            raise ValueError(f"graph has max degree {graph.D_max} > D={D}")
        g = graph if cfg.skip_regularize or graph.n == 0 or D == 0 else regularize(graph, D)
    n = g.n
    ell = min(math.ceil(cfg.c * math.log(n) - 1e-9), D + 1) if n >= 2 else min(1, D + 1)
    ell = max(ell, 1)

    def result(success, phase=None, coloring=None, failure=None, diag=None):
        return TrialResult(success, phase, n, D, cfg.c, ell, cfg.eps, cfg.seed, coloring,
                           failure, _jsonable(diag or {}), time.perf_counter() - start)

    if n == 0:
        return result(True, coloring=np.zeros(0, dtype=np.int64))

    stream = RngStream(cfg.seed, 0)
    lists = sample_lists(n, D + 1, ell, stream)
    # the decomposition is a pure function of (graph, D, eps): reuse it across seeds
    if graph is None:
        dec, report = _prepared_decomposition(cfg.graph, cfg.D, cfg.skip_regularize, cfg.eps,
                                              cfg.exact_report)
    else:
        dec, report = _decomposed(g, D, cfg.eps, cfg.exact_report)
    diag: dict = {"regularized_n": n, "decomposition": report,
                  "dissolved_clusters": dec.dissolved}
    try:
        sigma, sdiag = color_sparse(g, dec, lists, stream, retries=cfg.retries,
                                    restarts=cfg.restarts, paper_faithful=cfg.paper_faithful,
                                    eps=cfg.eps)
        diag["sparse"] = sdiag.to_dict()
    except PhaseFailure as exc:
        if getattr(exc, "diagnostics", None) is not None:
            diag["sparse"] = exc.diagnostics.to_dict()
        return result(False, exc.phase, failure=exc.to_dict(), diag=diag)

    try:
        diag["clusters"] = color_dense(g, dec, lists, sigma, D, cfg.eps, cfg.delta,
                                       adaptive=cfg.adaptive_process)
    except PhaseFailure as exc:
        diag["clusters"] = getattr(exc, "clusters", [])
        return result(False, exc.phase, failure=exc.to_dict(), diag=diag)

    if not verify_coloring(g, lists, sigma):
        raise AssertionError("pipeline produced an invalid colouring")
    return result(True, coloring=sigma.colors, diag=diag)


# ---------------------------------------------------------------- experiments

def _cell_key(cfg: TrialConfig) -> str:
    """Everything that identifies a cell except c, so c-sweeps share seeds."""
    return "|".join(map(str, (cfg.graph.label(), cfg.graph.seed, cfg.D, cfg.eps,
                              cfg.paper_faithful, cfg.adaptive_process, cfg.skip_regularize)))


def trial_seed(master_seed: int, cfg: TrialConfig, trial: int) -> int:
    """64-bit seed for ``trial`` of the cell ``cfg`` belongs to; independent of c.

    Lists are prefix-stable, so every c of a sweep sees nested lists per seed.
    """
    h = hashlib.blake2b(f"{master_seed}|{_cell_key(cfg)}|{trial}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


@dataclass
class CellSummary:
    n: int
    D: int
    c: float
    ell: int
    eps: float
    trials: int = 0
    successes: int = 0
    failures: Counter = field(default_factory=Counter)
    total_ms: float = 0.0

    @property
    def mean_ms(self) -> float:
        return self.total_ms / self.trials if self.trials else 0.0

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    def add(self, r: TrialResult) -> None:
        self.trials += 1
        self.successes += int(r.success)
        if r.failure_phase:
            self.failures[r.failure_phase] += 1
        self.total_ms += 1000.0 * r.wall_time

    def row(self, timing: bool = True) -> dict:
        out = {"n": self.n, "D": self.D, "c": self.c, "ell": self.ell, "eps": self.eps,
               "trials": self.trials, "successes": self.successes}
        for phase in PHASES:
            out[_FAIL_COLUMN[phase]] = self.failures.get(phase, 0)
        out["mean_ms"] = round(self.mean_ms, 3) if timing else ""
        return out


@dataclass
class ExperimentSummary:
    cells: list[CellSummary]
    master_seed: int
    trials_per_cell: int

    def rows(self, timing: bool = True) -> list[dict]:
        return [c.row(timing) for c in self.cells]

    def write_csv(self, path, timing: bool = True) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(self.rows(timing))

    def to_csv_string(self, timing: bool = True) -> str:
        import io
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows(timing))
        return buf.getvalue()

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"master_seed": self.master_seed, "trials_per_cell": self.trials_per_cell,
                       "cells": [dict(c.row(), failures=dict(c.failures)) for c in self.cells]},
                      fh, indent=2)


def _run_chunk(jobs: Sequence[tuple[int, TrialConfig]]) -> list[tuple[int, TrialResult]]:
    out = []
    for idx, cfg in jobs:
        r = run_trial(cfg)
        r.coloring = None
        out.append((idx, r))
    return out


def run_experiment(grid: Iterable[TrialConfig], trials_per_cell: int, parallelism: int = 1,
                   master_seed: int = 0, keep_results: bool = False):
    """Run ``trials_per_cell`` seeded trials for every template in ``grid``.

    Trial seeds come from :func:`trial_seed`, so outputs depend only on
    ``(master_seed, grid)``; ``parallelism`` changes wall time only.  With
    ``keep_results`` the per-trial results are returned alongside the summary.
    """
    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be >= 1")
    grid = list(grid)
    jobs = []
    for ci, tmpl in enumerate(grid):
        for t in range(trials_per_cell):
            jobs.append((ci * trials_per_cell + t, replace(tmpl, seed=trial_seed(master_seed, tmpl, t))))

    results: list[TrialResult | None] = [None] * len(jobs)
    if parallelism <= 1:
        for idx, r in _run_chunk(jobs):
            results[idx] = r
    else:
        # contiguous chunks keep each worker on few distinct graphs
        size = max(1, math.ceil(len(jobs) / (parallelism * 4)))
        chunks = [jobs[i:i + size] for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for part in pool.map(_run_chunk, chunks):
                for idx, r in part:
                    results[idx] = r

    cells = []
    for ci, tmpl in enumerate(grid):
        chunk = results[ci * trials_per_cell:(ci + 1) * trials_per_cell]
        first = chunk[0]
        cell = CellSummary(first.n, first.D, tmpl.c, first.ell, tmpl.eps)
        for r in chunk:
            cell.add(r)
        cells.append(cell)
    summary = ExperimentSummary(cells, master_seed, trials_per_cell)
    return (summary, results) if keep_results else summary


def config_dict(cfg: TrialConfig) -> dict:
    d = asdict(cfg)
    d["graph"] = {"kind": cfg.graph.kind, "params": dict(cfg.graph.params), "seed": cfg.graph.seed}
    return d
