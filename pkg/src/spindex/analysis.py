"""Inequality chains, limit checks and scaling-collapse diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .ensemble import EnsembleStats, ScalingPoint
from .graph import Graph, mso_index, sp_index, zagreb_m1
from .means import (
    LIM0,
    LIM1,
    NEG_INF,
    POS_INF,
    AlphaParam,
    identric_values,
    power_values,
    stolarsky_values,
)
from .random_models import SQRT2, g_of_r

REL_TOL = 1e-12

# Ensemble labels of the four terms of the average chain.
SP_M1 = "sp:-1"
SP_LIM0 = "sp:lim0"
MSO_THIRD = "mso:" + AlphaParam.finite(1 / 3).label
SP_2 = "sp:2"
AVERAGE_CHAIN = (SP_M1, SP_LIM0, MSO_THIRD, SP_2)
SP_LIM1 = "sp:lim1"


class UsageError(ValueError):
    pass


@dataclass
class InequalityReport:
    """A chain ``t_0 <= t_1 <= ...`` evaluated at one point.

    ``max_violation`` is the largest ``t_i - t_{i+1} - tol * |t_{i+1}|``;
    it is ``<= 0`` exactly when the chain holds.
    """

    chain_id: str
    terms: list[tuple[str, float]]
    holds: bool
    max_violation: float
    equal: bool
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "chain": self.chain_id,
            "context": self.context,
            "terms": [{"label": k, "value": v} for k, v in self.terms],
            "holds": self.holds,
            "equal": self.equal,
            "max_violation": self.max_violation,
        }


def make_report(chain_id: str, terms: Sequence[tuple[str, float]], **context) -> InequalityReport:
    vals = [float(v) for _, v in terms]
    viol = [a - b - REL_TOL * abs(b) for a, b in zip(vals, vals[1:])]
    max_violation = max(viol) if viol else -math.inf
    scale = max(abs(v) for v in vals) if vals else 0.0
    equal = all(abs(a - b) <= REL_TOL * scale for a, b in zip(vals, vals[1:]))
    return InequalityReport(
        chain_id,
        [(k, float(v)) for k, v in terms],
        max_violation <= 0.0,
        max_violation,
        equal,
        dict(context),
    )


# --- scalar chain ------------------------------------------------------------------

LogMeanFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _default_logmean(x, y):
    return stolarsky_values(x, y, LIM0)


def scalar_chain_terms(x, y, logmean: LogMeanFn | None = None) -> np.ndarray:
    """Rows sqrt(xy), LogMean, PM_{1/3}, (x+y)/2, vectorized over pairs."""
    logmean = logmean or _default_logmean
    return np.stack([
        power_values(x, y, LIM0),
        logmean(x, y),
        power_values(x, y, 1 / 3),
        power_values(x, y, 1),
    ])


_SCALAR_LABELS = ("sqrt(xy)", "LogMean", "PM_1/3", "(x+y)/2")


def check_scalar_chain(x: float, y: float, logmean: LogMeanFn | None = None) -> InequalityReport:
    t = scalar_chain_terms(np.float64(x), np.float64(y), logmean)
    return make_report("ineq", list(zip(_SCALAR_LABELS, t)), x=x, y=y)


def scalar_chain_grid(max_value: int = 1000, logmean: LogMeanFn | None = None) -> list[InequalityReport]:
    """Check the scalar chain on every integer pair 1 <= x < y <= max_value.

    Returns only the violating pairs (and any pair where equality appears
    although x != y), so an empty list means the grid passed.
    """
    x, y = np.triu_indices(max_value + 1, k=1)
    keep = x >= 1
    x = x[keep].astype(np.float64)
    y = y[keep].astype(np.float64)
    t = scalar_chain_terms(x, y, logmean)
    bad = np.zeros(x.shape, dtype=bool)
    for a, b in zip(t, t[1:]):
        bad |= a - b - REL_TOL * np.abs(b) > 0
    # Off the diagonal the outer terms must be strictly ordered.
    bad |= t[0] >= t[3]
    return [check_scalar_chain(x[i], y[i], logmean) for i in np.nonzero(bad)[0]]


# --- graph chains ------------------------------------------------------------------


def check_graph_chain(g: Graph, **context) -> InequalityReport:
    terms = [
        ("R^-1", sp_index(g, -1)),
        ("LogMean(G)", sp_index(g, LIM0)),
        ("mSO_1/3", mso_index(g, 1 / 3)),
        ("M1/2", zagreb_m1(g) / 2),
    ]
    return make_report("ineq22", terms, **context)


def _require(stats: EnsembleStats, labels: Iterable[str]) -> None:
    missing = [lab for lab in labels if lab not in stats.stats]
    if missing:
        raise UsageError(f"ensemble lacks indices {missing}")


def check_average_chain(stats: Sequence[EnsembleStats]) -> list[InequalityReport]:
    """Average chain <SP_-1> <= <LogMean> <= <mSO_1/3> <= <SP_2> per grid point."""
    reports = []
    for s in stats:
        _require(s, AVERAGE_CHAIN)
        terms = [(lab, s.mean(lab)) for lab in AVERAGE_CHAIN]
        reports.append(make_report("ineq21av", terms, param=s.param, mean_degree=s.mean_degree))
    return reports


def check_idlog_bound(stats: Sequence[EnsembleStats], alphas: Sequence[str]) -> list[InequalityReport]:
    """<idLogMean> <= <SP_alpha> per grid point, for each ``sp:<alpha>`` label."""
    reports = []
    for s in stats:
        _require(s, [SP_LIM1, *alphas])
        for lab in alphas:
            if lab == SP_LIM1:
                raise UsageError("the bound compares lim1 against other exponents")
            terms = [(SP_LIM1, s.mean(SP_LIM1)), (lab, s.mean(lab))]
            reports.append(make_report("ineq3", terms, param=s.param, mean_degree=s.mean_degree))
    return reports


# --- scaling collapse ------------------------------------------------------------


@dataclass
class CollapseReport:
    index: str
    threshold: float
    max_deviation: float
    max_spread: float
    points: int
    empty: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def collapse_metric(
    curves: Mapping[int, Sequence[ScalingPoint]] | Sequence[Sequence[ScalingPoint]],
    index: str,
    threshold: float = 10.0,
) -> CollapseReport:
    """Deviation from <d>^2/2 and cross-size spread above ``threshold``.

    ``max_deviation`` is the largest ``|y - <d>^2/2| / (<d>^2/2)`` over all
    points with ``<d> >= threshold``. ``max_spread`` compares the curves at
    each of those abscissae inside every curve's range: the ratio
    ``y / (<d>^2/2)`` is interpolated linearly in ``<d>`` and the spread is
    ``max - min`` of the ratios.
    """
    if isinstance(curves, Mapping):
        curves = list(curves.values())
    curves = [sorted(c, key=lambda p: p.mean_degree) for c in curves]
    if len(curves) < 2:
        raise UsageError("collapse needs curves for at least two network sizes")

    pts = [p for c in curves for p in c if p.mean_degree >= threshold]
    if not pts:
        return CollapseReport(index, threshold, math.nan, math.nan, 0, True)
    dev = max(abs(p.normalized_mean - p.prediction) / p.prediction for p in pts)

    lo = max(c[0].mean_degree for c in curves)
    hi = min(c[-1].mean_degree for c in curves)
    spread = 0.0
    for d in sorted({p.mean_degree for p in pts}):
        if not lo <= d <= hi:
            continue
        # interpolate y / (<d>^2/2) so the quadratic trend does not bias the chord
        ys = [np.interp(d, [p.mean_degree for p in c], [p.normalized_mean / p.prediction for p in c])
              for c in curves]
        spread = max(spread, float(max(ys) - min(ys)))
    return CollapseReport(index, threshold, dev, spread, len(pts), False)


# --- limits -----------------------------------------------------------------------


@dataclass
class LimitReport:
    checked: int
    failures: list[dict]

    @property
    def passed(self) -> bool:
        return not self.failures


def limit_consistency_suite(max_value: int = 1000, tol: float = 1e-3) -> LimitReport:
    """Finite exponents near the limit variants must approach them.

    Over integer pairs 1 <= x < y <= max_value: S_{+-1e6} against max/min,
    S_{-1e-5} <= LogMean <= S_{1e-5} with both within ``tol``, and S_{1 +- 1e-5}
    against the analytic identric mean.
    """
    x, y = np.triu_indices(max_value + 1, k=1)
    keep = x >= 1
    x = x[keep].astype(np.float64)
    y = y[keep].astype(np.float64)
    lm = stolarsky_values(x, y, LIM0)
    ident = identric_values(x, y)
    cases = [
        ("1e6->max", stolarsky_values(x, y, 1e6), stolarsky_values(x, y, POS_INF)),
        ("-1e6->min", stolarsky_values(x, y, -1e6), stolarsky_values(x, y, NEG_INF)),
        ("1e-5->lim0", stolarsky_values(x, y, 1e-5), lm),
        ("-1e-5->lim0", stolarsky_values(x, y, -1e-5), lm),
        ("1+1e-5->identric", stolarsky_values(x, y, 1 + 1e-5), ident),
        ("1-1e-5->identric", stolarsky_values(x, y, 1 - 1e-5), ident),
    ]
    failures = []
    for name, got, want in cases:
        bad = ~(np.abs(got - want) <= tol * want)
        for i in np.nonzero(bad)[0][:20]:
            failures.append({"case": name, "x": x[i], "y": y[i], "got": got[i], "want": want[i]})
    # Monotonicity in alpha brackets the log mean.
    below = stolarsky_values(x, y, -1e-5)
    above = stolarsky_values(x, y, 1e-5)
    bad = (below > lm * (1 + REL_TOL)) | (lm > above * (1 + REL_TOL))
    for i in np.nonzero(bad)[0][:20]:
        failures.append({"case": "bracket-lim0", "x": x[i], "y": y[i],
                         "got": [below[i], above[i]], "want": lm[i]})
    return LimitReport(len(x) * (len(cases) + 1), failures)


# --- g(r) oracle --------------------------------------------------------------------

ORACLE_RADII = (0.1, 0.3, 0.5, 0.9, 1.1, 1.3)


@dataclass
class OracleRow:
    r: float
    exact: float
    empirical: float
    sigma: float

    @property
    def z(self) -> float:
        return (self.empirical - self.exact) / self.sigma if self.sigma > 0 else 0.0

    @property
    def ok(self) -> bool:
        return abs(self.empirical - self.exact) <= 3 * self.sigma


def g_of_r_oracle(
    radii: Sequence[float] = ORACLE_RADII,
    pairs: int = 10**7,
    seed: int = 12345,
    chunk: int = 10**6,
) -> list[OracleRow]:
    """Brute-force check of g(r): fraction of uniform point pairs within r."""
    rng = np.random.default_rng(seed)
    radii = np.asarray(radii, dtype=np.float64)
    hits = np.zeros(len(radii), dtype=np.int64)
    done = 0
    while done < pairs:
        k = min(chunk, pairs - done)
        a = rng.random((k, 2))
        b = rng.random((k, 2))
        d = np.sort(np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1]))
        hits += np.searchsorted(d, radii, side="right")
        done += k
    rows = []
    for r, h in zip(radii, hits):
        g = g_of_r(float(r))
        rows.append(OracleRow(float(r), g, h / pairs, math.sqrt(g * (1 - g) / pairs)))
    return rows


def g_of_r_analytic_checks() -> dict[str, float]:
    """Branch continuity at r=1 and g(sqrt 2) - 1, both expected <= 1e-12."""
    from .random_models import _g_inner, _g_outer

    return {
        "branch_gap_at_1": abs(_g_inner(1.0) - _g_outer(1.0)),
        "g_sqrt2_minus_1": abs(g_of_r(SQRT2) - 1.0),
    }
