"""Two-argument means over positive reals.

Everything here is vectorized over numpy arrays; the scalar helpers are thin
wrappers that validate their arguments and call the array versions. Graph
degrees are integers, so the equal-argument branch uses exact equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Finite exponents closer than this to 0 or 1 are rejected; the generic
# formula is ill-conditioned there and the explicit limits must be used.
REJECTION_BAND = 1e-6
# 1 + 1e-6 - 1 rounds to slightly below 1e-6; the boundary itself is allowed.
_BAND_EDGE = REJECTION_BAND * (1.0 - 1e-9)


class ParameterError(ValueError):
    """Raised for an inadmissible exponent or unsupported table row."""


class DomainError(ValueError):
    """Raised when a mean is asked for a non-positive argument."""


_LIMIT_KINDS = ("-inf", "lim0", "lim1", "+inf")


@dataclass(frozen=True)
class AlphaParam:
    """Exponent of a Stolarsky or power mean.

    ``kind`` is one of ``"-inf"``, ``"lim0"``, ``"lim1"``, ``"+inf"`` or
    ``"finite"``; only the last one carries a ``value``. A finite value of 1
    is constructible (the power mean accepts it) but every Stolarsky
    evaluation rejects it, see :meth:`require_stolarsky`.
    """

    kind: str
    value: float = math.nan

    def __post_init__(self):
        if self.kind in _LIMIT_KINDS:
            return
        if self.kind != "finite":
            raise ParameterError(f"unknown alpha kind {self.kind!r}")
        v = float(self.value)
        if not math.isfinite(v):
            raise ParameterError(f"finite alpha must be a finite number, got {v}")
        if abs(v) < _BAND_EDGE:
            raise ParameterError(
                f"alpha={v!r} lies in the rejection band around 0; use lim0 instead"
            )
        object.__setattr__(self, "value", v)

    def require_stolarsky(self) -> "AlphaParam":
        """Reject finite exponents near 1, where only the power mean is defined."""
        if self.kind == "finite" and abs(self.value - 1.0) < _BAND_EDGE:
            raise ParameterError(
                f"alpha={self.value!r} lies in the rejection band around 1; use lim1 instead"
            )
        return self

    @classmethod
    def finite(cls, value: float) -> "AlphaParam":
        return cls("finite", value)

    @classmethod
    def parse(cls, text: str) -> "AlphaParam":
        """Parse a label such as ``-inf``, ``lim0``, ``2`` or ``0.5``."""
        t = text.strip().lower()
        if t in ("inf", "+inf"):
            return POS_INF
        if t in _LIMIT_KINDS:
            return cls(t)
        try:
            v = float(t)
        except ValueError:
            raise ParameterError(f"cannot parse alpha label {text!r}") from None
        if math.isinf(v):
            return POS_INF if v > 0 else NEG_INF
        return cls.finite(v)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def label(self) -> str:
        if self.kind != "finite":
            return self.kind
        text = repr(self.value)
        return text[:-2] if text.endswith(".0") else text

    def __str__(self) -> str:
        return self.label


NEG_INF = AlphaParam("-inf")
LIM0 = AlphaParam("lim0")
LIM1 = AlphaParam("lim1")
POS_INF = AlphaParam("+inf")


def as_alpha(alpha) -> AlphaParam:
    if isinstance(alpha, AlphaParam):
        return alpha
    if isinstance(alpha, str):
        return AlphaParam.parse(alpha)
    v = float(alpha)
    if math.isinf(v):
        return POS_INF if v > 0 else NEG_INF
    return AlphaParam.finite(v)


def _log1mexp(t: np.ndarray) -> np.ndarray:
    """log(1 - exp(t)) for t < 0, accurate for t near 0 and t very negative."""
    return np.where(t > -math.log(2.0), np.log(-np.expm1(t)), np.log1p(-np.exp(t)))


def _check_positive(x: float, y: float) -> None:
    if not (x > 0 and y > 0):
        raise DomainError(f"means are defined for positive arguments, got ({x}, {y})")


def stolarsky_values(x: ArrayLike, y: ArrayLike, alpha) -> np.ndarray:
    """Elementwise Stolarsky mean S_alpha(x, y) of positive arrays.

    Finite exponents go through a log-domain form that never materializes
    ``x**alpha``, so degrees up to ~1e3 and |alpha| up to ~1e6 are safe.
    """
    alpha = as_alpha(alpha).require_stolarsky()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x, y = np.broadcast_arrays(x, y)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    equal = x == y
    if alpha.kind == "-inf":
        return lo.copy()
    if alpha.kind == "+inf":
        return hi.copy()

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # ln(hi/lo) without the cancellation of ln(hi) - ln(lo) for close pairs
        log_ratio = np.log1p((hi - lo) / lo)
        if alpha.kind == "lim0":
            out = (hi - lo) / log_ratio
        elif alpha.kind == "lim1":
            # Printed limit formula for alpha -> 1; not the analytic identric mean.
            out = (x - y) / (x * np.log(x) - y * np.log(y))
        else:
            a = alpha.value
            if a > 0:
                inner = a * np.log(hi) + _log1mexp(-a * log_ratio) - math.log(a)
            else:
                inner = a * np.log(lo) + _log1mexp(a * log_ratio) - math.log(-a)
            out = np.exp((inner - np.log(hi - lo)) / (a - 1.0))
    return np.where(equal, x, out)


def stolarsky_mean(x: float, y: float, alpha) -> float:
    """Stolarsky mean of two positive reals.

    >>> stolarsky_mean(2, 4, 2)
    3.0
    """
    _check_positive(x, y)
    value = float(stolarsky_values(x, y, alpha))
    if not math.isfinite(value):
        raise DomainError(f"S_{alpha}({x}, {y}) is not finite")
    return value


def power_values(x: ArrayLike, y: ArrayLike, alpha) -> np.ndarray:
    """Elementwise power mean ((x^a + y^a)/2)^(1/a); ``lim0`` is the geometric mean."""
    alpha = as_alpha(alpha)
    if alpha.kind == "lim1":
        raise ParameterError("the power mean has no lim1 variant")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x, y = np.broadcast_arrays(x, y)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    if alpha.kind == "-inf":
        return lo.copy()
    if alpha.kind == "+inf":
        return hi.copy()
    if alpha.kind == "lim0":
        return np.sqrt(x * y)
    a = alpha.value
    # Factor out the dominant term so the power never overflows.
    if a > 0:
        out = hi * ((1.0 + (lo / hi) ** a) / 2.0) ** (1.0 / a)
    else:
        out = lo * ((1.0 + (hi / lo) ** a) / 2.0) ** (1.0 / a)
    return np.where(x == y, x, out)


def power_mean(x: float, y: float, alpha) -> float:
    _check_positive(x, y)
    return float(power_values(x, y, alpha))


def log_mean(x: float, y: float) -> float:
    return stolarsky_mean(x, y, LIM0)


def identric_values(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Analytic alpha -> 1 limit, exp(-1) * (x^x / y^y)^(1/(x - y))."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x, y = np.broadcast_arrays(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp((x * np.log(x) - y * np.log(y)) / (x - y) - 1.0)
    return np.where(x == y, x, out)


def identric_mean(x: float, y: float) -> float:
    _check_positive(x, y)
    return float(identric_values(x, y))


CLOSED_FORM_ROWS = (-4, -3, -2, -1, 0.5, 2, 3, 4)


def closed_form_stolarsky(x: ArrayLike, y: ArrayLike, row: float) -> np.ndarray:
    """Explicit polynomial forms of S_alpha for the tabulated integer/half rows.

    Written out term by term so it shares no code path with
    :func:`stolarsky_values`; used as an oracle against it.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x, y = np.broadcast_arrays(x, y)
    if row == -4:
        out = ((x**3 + x**2 * y + x * y**2 + y**3) / (4 * x**4 * y**4)) ** (-1 / 5)
    elif row == -3:
        out = ((x**2 + x * y + y**2) / (3 * x**3 * y**3)) ** (-1 / 4)
    elif row == -2:
        out = ((x + y) / (2 * x**2 * y**2)) ** (-1 / 3)
    elif row == -1:
        out = np.sqrt(x * y)
    elif row == 0.5:
        out = ((np.sqrt(x) + np.sqrt(y)) / 2) ** 2
    elif row == 2:
        out = (x + y) / 2
    elif row == 3:
        out = ((x**2 + x * y + y**2) / 3) ** 0.5
    elif row == 4:
        out = ((x**3 + x**2 * y + x * y**2 + y**3) / 4) ** (1 / 3)
    else:
        raise ParameterError(f"no closed form tabulated for alpha={row}")
    return out
