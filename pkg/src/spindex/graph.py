"""Simple undirected graphs and degree-based edge-sum indices."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, TextIO

import numpy as np

from .means import (
    LIM0,
    LIM1,
    AlphaParam,
    ParameterError,
    as_alpha,
    power_values,
    stolarsky_values,
)


class GraphError(ValueError):
    """Invalid graph structure."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` int array with ``u < v`` in every row;
    ``degrees`` is computed once at construction.
    """

    n: int
    edges: np.ndarray
    degrees: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges, validate: bool = True) -> "Graph":
        n = int(n)
        if n < 1:
            raise GraphError(f"vertex count must be positive, got {n}")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if validate:
            if e.size and (e.min() < 0 or e.max() >= n):
                raise GraphError(f"vertex id out of range for n={n}")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphError("self-loop")
            e = np.sort(e, axis=1)
            keys = e[:, 0] * n + e[:, 1]
            if np.unique(keys).size != keys.size:
                raise GraphError("duplicate edge")
        e = np.ascontiguousarray(e)
        e.setflags(write=False)
        deg = np.bincount(e.ravel(), minlength=n).astype(np.int64)
        deg.setflags(write=False)
        return cls(n, e, deg)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        iu, ju = np.triu_indices(n, k=1)
        return cls.from_edges(n, np.column_stack([iu, ju]), validate=False)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @property
    def m(self) -> int:
        return len(self.edges)

    def endpoint_degrees(self) -> tuple[np.ndarray, np.ndarray]:
        return self.degrees[self.edges[:, 0]], self.degrees[self.edges[:, 1]]

    def disjoint_union(self, other: "Graph") -> "Graph":
        return Graph.from_edges(
            self.n + other.n,
            np.concatenate([self.edges, other.edges + self.n]),
            validate=False,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    __hash__ = None


EdgeFunctional = Callable[[np.ndarray, np.ndarray], np.ndarray]


def edge_sum(g: Graph, f: EdgeFunctional) -> float:
    """Sum ``f(d_u, d_v)`` over the edges of ``g``.

    ``f`` receives the two endpoint-degree arrays (as floats) and must be
    vectorized.
    """
    if g.m == 0:
        return 0.0
    du, dv = g.endpoint_degrees()
    vals = np.broadcast_to(f(du.astype(np.float64), dv.astype(np.float64)), du.shape)
    return float(np.sum(vals))


def sp_index(g: Graph, alpha) -> float:
    return edge_sum(g, lambda x, y: stolarsky_values(x, y, alpha))


def mso_index(g: Graph, alpha) -> float:
    return edge_sum(g, lambda x, y: power_values(x, y, alpha))


def reciprocal_randic(g: Graph) -> float:
    return edge_sum(g, lambda x, y: np.sqrt(x * y))


def zagreb_m1(g: Graph) -> float:
    d = g.degrees.astype(np.float64)
    return float(np.sum(d * d))


def ka1_index(g: Graph, a: float, b: float) -> float:
    return edge_sum(g, lambda x, y: (x**a + y**a) ** b)


def logmean_index(g: Graph) -> float:
    return sp_index(g, LIM0)


def idlogmean_index(g: Graph) -> float:
    return sp_index(g, LIM1)


# --- index kinds --------------------------------------------------------------


@dataclass(frozen=True)
class IndexKind:
    """A named degree-based index.

    ``family`` is one of ``sp``, ``mso``, ``rr``, ``m1``, ``ka``, ``logmean``,
    ``idlogmean``. Labels follow ``family:alpha`` (``sp:-inf``, ``mso:1``,
    ``ka:0.5:2``); ``parse_index`` accepts exactly what ``label`` emits.
    """

    family: str
    alpha: AlphaParam | None = None
    a: float | None = None
    b: float | None = None

    @property
    def label(self) -> str:
        if self.family in ("sp", "mso"):
            return f"{self.family}:{self.alpha.label}"
        if self.family == "ka":
            return f"ka:{_num(self.a)}:{_num(self.b)}"
        return self.family

    def __str__(self) -> str:
        return self.label

    def edge_values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Per-edge contribution for endpoint degrees ``x``, ``y``."""
        fam = self.family
        if fam == "sp":
            return stolarsky_values(x, y, self.alpha)
        if fam == "mso":
            return power_values(x, y, self.alpha)
        if fam == "rr":
            return np.sqrt(x * y)
        if fam == "m1":
            # sum_v d_v^2 == sum_uv (d_u + d_v)
            return x + y
        if fam == "ka":
            return (x**self.a + y**self.a) ** self.b
        if fam == "logmean":
            return stolarsky_values(x, y, LIM0)
        if fam == "idlogmean":
            return stolarsky_values(x, y, LIM1)
        raise ParameterError(f"unknown index family {fam!r}")

    def evaluate(self, g: Graph) -> float:
        if self.family == "m1":
            return zagreb_m1(g)
        return edge_sum(g, self.edge_values)


def _num(v: float) -> str:
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def sp(alpha) -> IndexKind:
    return IndexKind("sp", as_alpha(alpha).require_stolarsky())


def mso(alpha) -> IndexKind:
    alpha = as_alpha(alpha)  # finite 1 is fine here (arithmetic mean)
    if alpha.kind == "lim1":
        raise ParameterError("mso has no lim1 variant")
    return IndexKind("mso", alpha)


def parse_index(label: str) -> IndexKind:
    parts = label.strip().lower().split(":")
    fam = parts[0]
    try:
        if fam in ("sp", "mso") and len(parts) == 2:
            return sp(parts[1]) if fam == "sp" else mso(parts[1])
        if fam == "ka" and len(parts) == 3:
            return IndexKind("ka", a=float(parts[1]), b=float(parts[2]))
        if fam in ("rr", "m1", "logmean", "idlogmean") and len(parts) == 1:
            return IndexKind(fam)
    except ValueError as exc:
        raise ParameterError(f"bad index label {label!r}: {exc}") from None
    raise ParameterError(f"bad index label {label!r}")


# --- edge-list I/O ---------------------------------------------------------------

_HEADER = re.compile(r"^n\s+(\S+)$")


def load_edge_list(stream: TextIO | Iterable[str]) -> Graph:
    """Parse the plain edge-list format.

    One ``u v`` pair of 0-based ids per line, ``#`` starts a comment, and an
    optional ``n <count>`` header fixes the vertex count (otherwise max id + 1).
    """
    n = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            if n is not None or edges:
                raise ParseError(lineno, "header must come first and only once")
            try:
                n = int(m.group(1))
            except ValueError:
                raise ParseError(lineno, f"bad vertex count {m.group(1)!r}") from None
            if n < 1:
                raise ParseError(lineno, "vertex count must be positive")
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(lineno, f"expected two vertex ids, got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex id in {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, "negative vertex id")
        if n is not None and max(u, v) >= n:
            raise ParseError(lineno, f"vertex id {max(u, v)} >= n={n}")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(lineno, f"duplicate edge {key[0]}-{key[1]}")
        seen.add(key)
        edges.append(key)
    if n is None:
        if not edges:
            raise GraphError("empty edge list without an 'n' header")
        n = max(max(e) for e in edges) + 1
    return Graph.from_edges(n, edges, validate=False)


def write_edge_list(g: Graph, stream: TextIO) -> None:
    stream.write(f"n {g.n}\n")
    for u, v in g.edges:
        stream.write(f"{u} {v}\n")
