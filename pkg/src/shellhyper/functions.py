"""Test functions on the shell [1, 1.001] x S^2 used in the convergence experiments.

All functions follow the shell-function convention ``f(r, sigma)`` with
broadcasting ``r`` (shape ``S``) and unit vectors ``sigma`` (shape ``S + (3,)``).
Called with a single ``ShellPoint`` they return a float.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .errors import DomainError

__all__ = ["f1", "f2", "f3", "franke", "cone", "constant", "CONE_CENTER", "TEST_FUNCTIONS", "get_function"]

CONE_CENTER = np.array([-0.5, -0.5, 1.0 / math.sqrt(2.0)])


def _shell_function(func):
    @functools.wraps(func)
    def wrapper(r, sigma=None):
        if sigma is None:
            # a single ShellPoint
            return float(func(np.float64(r.r), r.sigma.to_cartesian()))
        return func(r, sigma)

    return wrapper


@_shell_function
def f1(r, sigma):
    """``|r - 1.0005|**8.5 / 0.0005**8.5 * cos(theta)**4``: C^8 in r, a degree-4 polynomial in angle."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(sigma, dtype=float)[..., 2]
    return np.abs(r - 1.0005) ** 8.5 / 0.0005 ** 8.5 * z ** 4


@_shell_function
def f2(r, sigma):
    """``(r - 1)**2 / 0.001**2 * |cos(theta)|**8.5``: quadratic in r, C^8 in angle."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(sigma, dtype=float)[..., 2]
    return (r - 1.0) ** 2 / 0.001 ** 2 * np.abs(z) ** 8.5


def franke(x):
    """Three-dimensional Franke function at Cartesian points ``x`` (shape ``(..., 3)``)."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = 9.0 * x[..., 0], 9.0 * x[..., 1], 9.0 * x[..., 2]
    return (
        0.75 * np.exp(-0.25 * ((x1 - 2) ** 2 + (x2 - 2) ** 2 + (x3 - 2) ** 2))
        # the second exponent is linear in (x2, x3), not squared
        + 0.75 * np.exp(-((x1 + 1) ** 2) / 49.0 - (x2 + 1 + x3 + 1) / 10.0)
        + 0.5 * np.exp(-0.25 * ((x1 - 7) ** 2 + (x2 - 3) ** 2 + (x3 - 5) ** 2))
        - 0.2 * np.exp(-((x1 - 4) ** 2) - (x2 - 7) ** 2 - (x3 - 5) ** 2)
    )


def cone(x):
    """Cone bump on the cap of angular radius 1/2 about ``CONE_CENTER``.

    ``1000 |‖x‖ - 1.0005| (1 - 2 arccos(s . x_c))`` inside the cap, 0 outside.
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    cosang = np.clip((x @ CONE_CENTER) / r, -1.0, 1.0)
    ang = np.arccos(cosang)
    val = 1000.0 * np.abs(r - 1.0005) * (1.0 - 2.0 * ang)
    return np.where(ang <= 0.5, val, 0.0)


@_shell_function
def f3(r, sigma):
    """Franke plus cone: smooth background with kinks at the cap rim, cap centre and mid-shell."""
    r = np.asarray(r, dtype=float)
    x = r[..., None] * np.asarray(sigma, dtype=float)
    return franke(x) + cone(x)


@_shell_function
def constant(r, sigma):
    r = np.asarray(r, dtype=float)
    return np.ones(np.broadcast_shapes(r.shape, np.shape(sigma)[:-1]))


TEST_FUNCTIONS = {"f1": f1, "f2": f2, "f3": f3, "const": constant}


def get_function(name: str):
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise DomainError(f"unknown function {name!r}; choose from {sorted(TEST_FUNCTIONS)}") from None
