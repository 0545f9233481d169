"""Monte Carlo ensembles of random graphs and their index averages.

Replicate ``j`` of grid point ``i`` uses substream index ``i * replicates + j``,
so every (grid point, replicate) pair is reproducible on its own and results
do not depend on how replicates are split across workers. Per-replicate
values are reduced with :func:`math.fsum`, which is exactly rounded and hence
order independent.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graph import Graph, IndexKind, parse_index
from .random_models import SeededStream, generate, make_params, mean_degree

log = logging.getLogger(__name__)

REPLICATE_BUDGET = 10**7

# Target number of graphs per worker task; small enough to balance, large
# enough to amortize pickling.
_TASK_SIZE = 500


class EnsembleError(RuntimeError):
    pass


def default_replicates(n: int) -> int:
    return -(-REPLICATE_BUDGET // n)


@dataclass(frozen=True)
class EnsembleSpec:
    model: str
    n: int
    grid: tuple[float, ...]
    indices: tuple[IndexKind, ...]
    replicates: int | None = None
    master_seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "model", self.model.lower())
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(
            self,
            "indices",
            tuple(parse_index(k) if isinstance(k, str) else k for k in self.indices),
        )
        if self.replicates is None:
            object.__setattr__(self, "replicates", default_replicates(self.n))
        if self.replicates < 2:
            raise ValueError("at least 2 replicates are needed for a standard error")
        if not self.grid:
            raise ValueError("empty parameter grid")
        if not self.indices:
            raise ValueError("no indices requested")
        for v in self.grid:
            make_params(self.model, self.n, v)  # validates domain

    def params(self, i: int):
        return make_params(self.model, self.n, self.grid[i])


@dataclass(frozen=True)
class IndexStats:
    mean: float
    std_err: float


@dataclass(frozen=True)
class EnsembleStats:
    param: float
    mean_degree: float
    stats: dict[str, IndexStats]
    replicates: int
    # Per-replicate values, kept for downstream checks; not serialized.
    values: dict[str, np.ndarray] = field(default=None, repr=False, compare=False)

    def mean(self, index) -> float:
        return self.stats[_label(index)].mean

    def std_err(self, index) -> float:
        return self.stats[_label(index)].std_err


@dataclass(frozen=True)
class ScalingPoint:
    mean_degree: float
    normalized_mean: float
    prediction: float


def _label(index) -> str:
    return index if isinstance(index, str) else index.label


@lru_cache(maxsize=32)
def _degree_tables(labels: tuple[str, ...], n: int) -> np.ndarray:
    """Per-index lookup of the edge contribution for every degree pair.

    Shape ``(len(labels), n * n)``; entry ``[k, a * n + b]`` is the edge value
    of index ``k`` for endpoint degrees ``(a, b)``. Degree 0 never occurs on
    an edge and is filled with 0.
    """
    d = np.arange(n, dtype=np.float64)
    d[0] = 1.0
    x, y = np.meshgrid(d, d, indexing="ij")
    tables = np.empty((len(labels), n * n))
    with np.errstate(all="ignore"):
        for k, lab in enumerate(labels):
            t = np.asarray(parse_index(lab).edge_values(x, y), dtype=np.float64)
            t = np.array(np.broadcast_to(t, x.shape))
            t[0, :] = 0.0
            t[:, 0] = 0.0
            tables[k] = t.ravel()
    return tables


def evaluate_indices(g: Graph, labels: tuple[str, ...]) -> np.ndarray:
    """Values of every labelled index on ``g`` via cached degree tables."""
    if g.m == 0:
        return np.zeros(len(labels))
    tables = _degree_tables(labels, g.n)
    du, dv = g.endpoint_degrees()
    flat = du * g.n + dv
    return np.array([np.sum(t[flat]) for t in tables])


def _run_task(model, n, param, labels, master_seed, first, stop):
    """Worker entry point: values for substream indices ``first..stop-1``."""
    params = make_params(model, n, param)
    out = np.empty((stop - first, len(labels)))
    for row, idx in enumerate(range(first, stop)):
        g = generate(params, SeededStream(master_seed, idx))
        out[row] = evaluate_indices(g, labels)
    return out


def _reduce(values: np.ndarray) -> IndexStats:
    r = len(values)
    mean = math.fsum(values) / r
    var = math.fsum((values - mean) ** 2) / (r - 1)
    return IndexStats(mean, math.sqrt(var / r))


def run_ensemble(spec: EnsembleSpec, workers: int | None = 1) -> list[EnsembleStats]:
    """Average every requested index over ``spec.replicates`` graphs per grid point.

    ``workers=None`` uses ``os.cpu_count()``; results are identical for any
    worker count.
    """
    labels = tuple(k.label for k in spec.indices)
    R = spec.replicates
    tasks = []
    for i, param in enumerate(spec.grid):
        base = i * R
        for first in range(0, R, _TASK_SIZE):
            stop = min(R, first + _TASK_SIZE)
            tasks.append((i, first, (spec.model, spec.n, param, labels,
                                     spec.master_seed, base + first, base + stop)))

    values = np.empty((len(spec.grid), R, len(labels)))
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        for i, first, args in tasks:
            block = _run_task(*args)
            values[i, first:first + len(block)] = block
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(i, first, pool.submit(_run_task, *args)) for i, first, args in tasks]
            for i, first, fut in futures:
                block = fut.result()
                values[i, first:first + len(block)] = block

    results = []
    for i, param in enumerate(spec.grid):
        bad = ~np.isfinite(values[i])
        if bad.any():
            j, k = map(int, np.argwhere(bad)[0])
            raise EnsembleError(
                f"non-finite value for index {labels[k]} at param={param}, replicate {j}"
            )
        stats = {lab: _reduce(values[i, :, k]) for k, lab in enumerate(labels)}
        per_rep = {lab: values[i, :, k].copy() for k, lab in enumerate(labels)}
        results.append(
            EnsembleStats(param, mean_degree(spec.params(i)), stats, R, per_rep)
        )
        log.debug("%s n=%d param=%g done", spec.model, spec.n, param)
    return results


def scaling_transform(
    stats: Sequence[EnsembleStats], n: int, index
) -> list[ScalingPoint]:
    lab = _label(index)
    return [
        ScalingPoint(s.mean_degree, s.stats[lab].mean / n, 0.5 * s.mean_degree**2)
        for s in stats
    ]


def dense_prediction(params) -> float:
    """Dense-limit estimate ``n <d>^2 / 2`` of SP_alpha; the same for every alpha."""
    d = mean_degree(params)
    return 0.5 * params.n * d * d


def log_degree_grid(model: str, n: int, d_min: float, d_max: float, points: int) -> tuple[float, ...]:
    """Parameter grid whose analytic mean degrees are log-spaced in [d_min, d_max]."""
    from .random_models import r_for_g

    ds = np.geomspace(d_min, d_max, points)
    probs = np.clip(ds / (n - 1), 0.0, 1.0)
    if model.lower() == "er":
        return tuple(float(p) for p in probs)
    return tuple(r_for_g(float(p)) for p in probs)
