"""Seeded Erdos-Renyi and random geometric graph generators.

Reproducibility contract
------------------------
Replicate ``j`` of a run with master seed ``s`` draws from a numpy
``Generator(PCG64(k))`` where ``k = substream_seed(s, j)``::

    z = (s + (j + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    k = z ^ (z >> 31)

(the SplitMix64 step). The offset map is injective in ``j`` and the
finalizer is a bijection on 64-bit words, so distinct replicates never share
a substream.

ER graphs draw one uniform per unordered pair ``(i, j)``, ``i < j``, in
row-major order of the strict upper triangle; the pair is an edge iff the
draw is ``< p``. RG graphs draw ``n`` points as ``rng.random((n, 2))``
(x then y, vertex 0 first); ``u ~ v`` iff ``dx*dx + dy*dy <= r*r`` in
double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import Graph

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
SQRT2 = math.sqrt(2.0)

# Above this radius the cell grid degenerates to a handful of cells and the
# all-pairs scan is cheaper.
CELL_GRID_MAX_R = 0.25


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, replicate_index: int) -> int:
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    return splitmix64(master_seed + (replicate_index + 1) * GOLDEN_GAMMA)


@dataclass(frozen=True)
class SeededStream:
    master_seed: int
    replicate_index: int

    @property
    def seed(self) -> int:
        return substream_seed(self.master_seed, self.replicate_index)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass(frozen=True)
class ErParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    model = "er"

    @property
    def param(self) -> float:
        return self.p


@dataclass(frozen=True)
class RgParams:
    n: int
    r: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0.0 <= self.r <= SQRT2:
            raise ValueError(f"r must lie in [0, sqrt(2)], got {self.r}")

    model = "rg"

    @property
    def param(self) -> float:
        return self.r


def make_params(model: str, n: int, param: float):
    model = model.lower()
    if model == "er":
        return ErParams(n, param)
    if model == "rg":
        return RgParams(n, param)
    raise ValueError(f"unknown model {model!r}")


@lru_cache(maxsize=8)
def _upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, k=1)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def gen_er(params: ErParams, stream: SeededStream) -> Graph:
    n = params.n
    iu, ju = _upper_pairs(n)
    draws = stream.generator().random(iu.size)
    keep = draws < params.p
    edges = np.column_stack([iu[keep], ju[keep]])
    return Graph.from_edges(n, edges, validate=False)


def rg_points(n: int, stream: SeededStream) -> np.ndarray:
    return stream.generator().random((n, 2))


def _within(pts: np.ndarray, i: np.ndarray, j: np.ndarray, r: float) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    dx = x[i] - x[j]
    dy = y[i] - y[j]
    return dx * dx + dy * dy <= r * r


def rg_edges_bruteforce(pts: np.ndarray, r: float) -> np.ndarray:
    iu, ju = _upper_pairs(len(pts))
    keep = _within(pts, iu, ju, r)
    return np.column_stack([iu[keep], ju[keep]])


def rg_edges_cellgrid(pts: np.ndarray, r: float) -> np.ndarray:
    """Fixed-radius neighbor pairs via a uniform cell grid.

    Cells have side ``1/m`` with ``m = floor(1/r)``, so every neighbor lies in
    the same or one of the 8 adjacent cells (``r`` is padded slightly so that
    rounding in the cell assignment cannot push a neighbor two cells away).
    Output is sorted and identical to
    :func:`rg_edges_bruteforce`.
    """
    n = len(pts)
    if r <= 0.0 or n < 2:
        # r == 0 still links coincident points.
        return rg_edges_bruteforce(pts, r)
    m = max(1, int(math.floor(1.0 / (r * (1.0 + 1e-9)))))
    cxy = np.minimum((pts * m).astype(np.int64), m - 1)
    cell = cxy[:, 0] * m + cxy[:, 1]
    order = np.argsort(cell, kind="stable")
    counts = np.bincount(cell, minlength=m * m)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])

    ii, jj = [], []
    # Half stencil: each unordered cell pair is visited once.
    for ox, oy in ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1)):
        tx, ty = cxy[:, 0] + ox, cxy[:, 1] + oy
        ok = (tx >= 0) & (tx < m) & (ty >= 0) & (ty < m)
        src = np.nonzero(ok)[0]
        tcell = tx[src] * m + ty[src]
        cnt = counts[tcell]
        rep_src = np.repeat(src, cnt)
        # position within the target cell's slice of ``order``
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        dst = order[np.repeat(starts[tcell], cnt) + offs]
        if ox == 0 and oy == 0:
            sel = rep_src < dst
            rep_src, dst = rep_src[sel], dst[sel]
        ii.append(rep_src)
        jj.append(dst)
    i = np.concatenate(ii)
    j = np.concatenate(jj)
    keep = _within(pts, i, j, r)
    u = np.minimum(i[keep], j[keep])
    v = np.maximum(i[keep], j[keep])
    idx = np.lexsort((v, u))
    return np.column_stack([u[idx], v[idx]])


def gen_rg(params: RgParams, stream: SeededStream) -> Graph:
    pts = rg_points(params.n, stream)
    if params.r > CELL_GRID_MAX_R:
        edges = rg_edges_bruteforce(pts, params.r)
    else:
        edges = rg_edges_cellgrid(pts, params.r)
    return Graph.from_edges(params.n, edges, validate=False)


def generate(params, stream: SeededStream) -> Graph:
    if isinstance(params, ErParams):
        return gen_er(params, stream)
    return gen_rg(params, stream)


def _g_inner(r: float) -> float:
    return r * r * (math.pi - 8.0 / 3.0 * r + 0.5 * r * r)


def _g_outer(r: float) -> float:
    s = 1.0 / r
    return (
        1.0 / 3.0
        - 2.0 * r * r * (1.0 - math.asin(s) + math.acos(s))
        + 4.0 / 3.0 * (2.0 * r * r + 1.0) * math.sqrt(r * r - 1.0)
        - 0.5 * r**4
    )


def g_of_r(r: float) -> float:
    """Probability that two uniform points of the unit square are within ``r``."""
    if not 0.0 <= r <= SQRT2:
        raise ValueError(f"r must lie in [0, sqrt(2)], got {r}")
    return _g_inner(r) if r <= 1.0 else _g_outer(r)


def r_for_g(target: float) -> float:
    """Inverse of :func:`g_of_r` on [0, 1]."""
    from scipy.optimize import brentq

    if not 0.0 <= target <= 1.0:
        raise ValueError(f"target probability must lie in [0, 1], got {target}")
    if target == 0.0:
        return 0.0
    if target == 1.0:
        return SQRT2
    return brentq(lambda r: g_of_r(r) - target, 0.0, SQRT2, xtol=1e-15, rtol=1e-15)


def connection_probability(params) -> float:
    if isinstance(params, ErParams):
        return params.p
    return g_of_r(params.r)


def mean_degree(params) -> float:
    return (params.n - 1) * connection_probability(params)
