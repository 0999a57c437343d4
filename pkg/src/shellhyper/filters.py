"""Filter functions ``h`` with ``h = 1`` on [0, 1] and ``h = 0`` beyond a cap."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "Filter",
    "FilterPair",
    "exp_filter",
    "indicator_filter",
    "product_filter",
    "get_filter",
    "FILTERS",
]


def _check_nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("filter argument must be >= 0")
    return x


def _scalar_or_array(v):
    return float(v) if np.ndim(v) == 0 else v


def exp_filter(x):
    """C-infinity exponential filter supported on [0, 2].

    ``1`` on [0, 1], ``exp(-2 exp(2/(1-x)) / (2-x))`` on (1, 2), ``0`` from 2 on.
    """
    x = _check_nonneg(x)
    out = np.zeros_like(x)
    out[x <= 1.0] = 1.0
    mid = (x > 1.0) & (x < 2.0)
    xm = x[mid]
    # exp(2/(1-x)) underflows to 0 as x -> 1+, giving exactly 1; as x -> 2- the
    # quotient grows without bound and the outer exp underflows to 0.
    with np.errstate(over="ignore", under="ignore"):
        out[mid] = np.exp(-2.0 * np.exp(2.0 / (1.0 - xm)) / (2.0 - xm))
    return _scalar_or_array(out)


def indicator_filter(x):
    """``1`` for ``x <= 1`` and ``0`` otherwise (plain hyperinterpolation)."""
    x = _check_nonneg(x)
    return _scalar_or_array(np.where(x <= 1.0, 1.0, 0.0))


@dataclass(frozen=True)
class Filter:
    """A filter function together with its support cap.

    ``h`` vanishes for ``x > cap``.  Truncation degrees are derived from the
    cap alone; the indicator uses ``cap = 1`` so that its truncation degree
    collapses to the nominal degree.
    """

    name: str
    func: Callable
    cap: float
    smoothness: float = np.inf

    def __call__(self, x):
        return self.func(x)


FILTERS = {
    "exp": Filter("exp", exp_filter, 2.0),
    "indicator": Filter("indicator", indicator_filter, 1.0, smoothness=0),
}


def get_filter(name: str) -> Filter:
    try:
        return FILTERS[name]
    except KeyError:
        raise DomainError(f"unknown filter {name!r}; choose from {sorted(FILTERS)}") from None


@dataclass(frozen=True)
class FilterPair:
    """Radial and angular filters; ``h(s, t) = h_rad(s) * h_ang(t)``."""

    rad: Filter
    ang: Filter

    def __post_init__(self):
        for f in (self.rad, self.ang):
            if not (1.0 <= f.cap <= 2.0):
                raise DomainError(f"filter cap must lie in [1, 2], got {f.cap} for {f.name!r}")

    @classmethod
    def by_name(cls, rad: str = "exp", ang: str | None = None) -> "FilterPair":
        return cls(get_filter(rad), get_filter(ang if ang is not None else rad))

    @property
    def a(self) -> float:
        return self.rad.cap

    @property
    def b(self) -> float:
        return self.ang.cap

    def h_rad(self, s):
        return self.rad(s)

    def h_ang(self, t):
        return self.ang(t)

    def __call__(self, s, t):
        return product_filter(self, s, t)


def product_filter(pair: FilterPair, s, t):
    return pair.rad(s) * pair.ang(t)
