"""Jacobi polynomials on [-1, 1] and on the radial interval [r_in, r_out].

Polynomials use the standard normalization ``P_k^{(a,b)}(1) = binom(k+a, k)``.
The squared norms ``gamma_k**2 = int P_k**2 (1-x)**a (1+x)**b dx`` absorb
that choice, so the shell operators only ever see ``J_k / gamma_k``.

The radial measure is the pull-back of the Jacobi weight under the affine
map ``x = (2r - (r_in + r_out)) / (r_out - r_in)`` including the Jacobian
``2 / (r_out - r_in)``; hence quadrature weights on the radial interval are
identical to the reference weights on [-1, 1].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import DomainError, QuadratureError

__all__ = [
    "JacobiBasis",
    "RadialRule",
    "jacobi_eval",
    "jacobi_table",
    "gamma_norm",
    "map_to_reference",
    "map_from_reference",
    "radial_basis_eval",
    "radial_table",
    "radial_series",
    "gauss_jacobi_rule",
]

_X_SLACK = 1e-12


@dataclass(frozen=True)
class JacobiBasis:
    """Jacobi polynomials ``J_k`` mapped onto ``[r_in, r_out]``.

    Parameters
    ----------
    alpha, beta : float
        Jacobi parameters, both > -1.  The uniform-boundedness theory for the
        radial operator needs ``alpha, beta >= -1/2``; other values are
        accepted but ``admissible`` is False.
    r_in, r_out : float
        Shell radii with ``0 < r_in <= 1 <= r_out`` and ``r_in < r_out``.
    """

    alpha: float = -0.5
    beta: float = -0.5
    r_in: float = 1.0
    r_out: float = 1.001

    def __post_init__(self):
        for name in ("alpha", "beta", "r_in", "r_out"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})")
        if not (0 < self.r_in <= 1 <= self.r_out and self.r_in < self.r_out):
            raise DomainError(
                f"need 0 < r_in <= 1 <= r_out and r_in < r_out, got [{self.r_in}, {self.r_out}]"
            )
        if not self.admissible:
            warnings.warn(
                f"Jacobi parameters ({self.alpha}, {self.beta}) are below -1/2; "
                "the filtered radial operator is not known to be uniformly bounded",
                stacklevel=3,
            )

    @property
    def admissible(self) -> bool:
        return self.alpha >= -0.5 and self.beta >= -0.5

    @property
    def is_chebyshev(self) -> bool:
        return self.alpha == -0.5 and self.beta == -0.5

    @property
    def width(self) -> float:
        return self.r_out - self.r_in

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.r_in + self.r_out)

    def gamma(self, k: int) -> float:
        return gamma_norm(self, k)

    def gammas(self, kmax: int) -> np.ndarray:
        """Array ``[gamma_0, ..., gamma_kmax]``."""
        return np.array([gamma_norm(self, k) for k in range(kmax + 1)])

    def measure_total(self) -> float:
        """Total mass ``mu_rad([r_in, r_out]) = gamma_0**2``."""
        return gamma_norm(self, 0) ** 2


@dataclass(frozen=True, eq=False)
class RadialRule:
    """Gauss-Jacobi rule on the radial interval.

    ``nodes`` are radii in ascending order, ``ref_nodes`` the matching points
    in [-1, 1]; the rule integrates polynomials of degree ``<= precision``
    against the radial measure exactly.
    """

    basis: JacobiBasis
    ref_nodes: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    precision: int
    certified: bool = False

    @property
    def n_points(self) -> int:
        return len(self.nodes)

    @property
    def kappa(self) -> int:
        """Highest node index (the rule has ``kappa + 1`` points)."""
        return len(self.nodes) - 1


def _check_degree(k):
    if int(k) != k or k < 0:
        raise DomainError(f"degree must be a non-negative integer, got {k}")
    return int(k)


def _as_reference(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + _X_SLACK) or np.any(np.isnan(x)):
        raise DomainError("x outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _jacobi_rows(alpha, beta, kmax, x):
    """Rows ``P_0(x), ..., P_kmax(x)`` by the three-term recurrence."""
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax == 0:
        return out
    ab = alpha + beta
    out[1] = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    for k in range(2, kmax + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        out[k] = ((a2 + a3 * x) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def jacobi_table(basis: JacobiBasis, kmax: int, x) -> np.ndarray:
    """Values ``P_k(x)`` for ``k = 0..kmax``; result has shape ``x.shape + (kmax+1,)``."""
    kmax = _check_degree(kmax)
    x = _as_reference(x)
    return np.moveaxis(_jacobi_rows(basis.alpha, basis.beta, kmax, x), 0, -1)


def jacobi_eval(basis: JacobiBasis, k: int, x):
    """Evaluate ``J*_k(x)`` on [-1, 1] (scalar or array ``x``)."""
    k = _check_degree(k)
    xa = _as_reference(x)
    val = _jacobi_rows(basis.alpha, basis.beta, k, xa)[k]
    return float(val) if val.ndim == 0 else val


@lru_cache(maxsize=None)
def _gamma_sq(alpha: float, beta: float, k: int) -> float:
    ab = alpha + beta
    if k == 0:
        # Beta-function form; avoids the 0/0 of the generic expression when a+b+1 = 0
        val = math.exp(
            (ab + 1) * math.log(2.0)
            + math.lgamma(alpha + 1) + math.lgamma(beta + 1) - math.lgamma(ab + 2)
        )
    elif k + ab + 1 > 0.5:
        val = math.exp(
            (ab + 1) * math.log(2.0) - math.log(2 * k + ab + 1)
            + math.lgamma(k + alpha + 1) + math.lgamma(k + beta + 1)
            - math.lgamma(k + ab + 1) - math.lgamma(k + 1)
        )
    else:
        val = float("nan")
    if not math.isfinite(val) or val <= 0:
        val = _gamma_sq_quadrature(alpha, beta, k)
    return val


def _gamma_sq_quadrature(alpha, beta, k):
    def integrand(x):
        return _jacobi_rows(alpha, beta, k, np.asarray(x, dtype=float))[k] ** 2

    val, _ = integrate.quad(integrand, -1, 1, weight="alg", wvar=(beta, alpha), limit=200)
    return val


def gamma_norm(basis: JacobiBasis, k: int) -> float:
    """Norm ``gamma_k`` of ``J*_k`` in the Jacobi-weighted L2 space."""
    k = _check_degree(k)
    return math.sqrt(_gamma_sq(float(basis.alpha), float(basis.beta), k))


def map_to_reference(basis: JacobiBasis, r):
    """Affine map ``[r_in, r_out] -> [-1, 1]`` (``r_in -> -1``)."""
    r = np.asarray(r, dtype=float)
    slack = _X_SLACK * max(abs(basis.r_in), abs(basis.r_out))
    if np.any(r < basis.r_in - slack) or np.any(r > basis.r_out + slack) or np.any(np.isnan(r)):
        raise DomainError(f"radius outside [{basis.r_in}, {basis.r_out}]")
    x = (2.0 * r - (basis.r_in + basis.r_out)) / (basis.r_out - basis.r_in)
    x = np.clip(x, -1.0, 1.0)
    return float(x) if x.ndim == 0 else x


def map_from_reference(basis: JacobiBasis, x):
    x = _as_reference(x)
    r = basis.midpoint + 0.5 * basis.width * x
    r = np.clip(r, basis.r_in, basis.r_out)
    return float(r) if r.ndim == 0 else r


def radial_basis_eval(basis: JacobiBasis, k: int, r):
    """``J_k(r) = J*_k(map_to_reference(r))``."""
    return jacobi_eval(basis, k, map_to_reference(basis, r))


def radial_table(basis: JacobiBasis, kmax: int, r) -> np.ndarray:
    """``J_k(r)`` for ``k = 0..kmax``; shape ``r.shape + (kmax+1,)``."""
    return jacobi_table(basis, kmax, map_to_reference(basis, r))


def radial_series(basis: JacobiBasis, coeffs, r):
    """Partial sum ``sum_k coeffs[k] J_k(r)`` accumulated along the recurrence."""
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(map_to_reference(basis, r), dtype=float)
    a, b = basis.alpha, basis.beta
    ab = a + b
    p_prev = np.ones_like(x)
    total = coeffs[0] * p_prev
    if len(coeffs) == 1:
        return total
    p = (a + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    total = total + coeffs[1] * p
    for k in range(2, len(coeffs)):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
        total = total + coeffs[k] * p
    return total


def _recurrence_coefficients(alpha, beta, n):
    """Monic Jacobi recurrence: diagonal ``a_0..a_{n-1}``, off-diagonal ``b_1..b_{n-1}``."""
    ab = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    for k in range(1, n):
        c = 2.0 * k + ab
        diag[k] = (beta * beta - alpha * alpha) / (c * (c + 2.0))
    off = np.empty(max(n - 1, 0))
    for k in range(1, n):
        c = 2.0 * k + ab
        if k == 1:
            off[0] = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        else:
            off[k - 1] = (
                4.0 * k * (k + alpha) * (k + beta) * (k + ab)
                / (c * c * (c + 1.0) * (c - 1.0))
            )
    return diag, np.sqrt(off)


def _golub_welsch(basis, n):
    diag, off = _recurrence_coefficients(basis.alpha, basis.beta, n)
    try:
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    except LinAlgError as exc:
        raise QuadratureError(f"tridiagonal eigen-solve failed for n={n}") from exc
    x = np.clip(np.sort(x), -1.0, 1.0)
    # Christoffel numbers from the orthonormal table are more accurate than
    # squared eigenvector components for small weights.
    p = _jacobi_rows(basis.alpha, basis.beta, n - 1, x)
    g2 = np.array([_gamma_sq(float(basis.alpha), float(basis.beta), k) for k in range(n)])
    w = 1.0 / np.sum(p * p / g2[:, None], axis=0)
    return x, w


def gauss_jacobi_rule(basis: JacobiBasis, n_points: int) -> RadialRule:
    """Gauss-Jacobi rule with ``n_points`` nodes, exact to degree ``2*n_points - 1``.

    The Chebyshev case uses the closed form ``x_j = cos((2j+1)pi/(2n))``,
    ``w_j = pi/n``; other parameters go through Golub-Welsch.
    """
    n = int(n_points)
    if n < 1:
        raise DomainError("n_points must be >= 1")
    if basis.is_chebyshev:
        j = np.arange(n)
        # sin form is exactly antisymmetric and ascending
        x = np.sin(np.pi * (2 * j + 1 - n) / (2 * n))
        w = np.full(n, np.pi / n)
    else:
        x, w = _golub_welsch(basis, n)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise QuadratureError("non-positive or non-finite Gauss-Jacobi weight")
    if np.any(np.diff(x) <= 0):
        raise QuadratureError("Gauss-Jacobi nodes are not strictly increasing")
    r = map_from_reference(basis, x)
    return RadialRule(basis=basis, ref_nodes=x, nodes=np.atleast_1d(r), weights=w, precision=2 * n - 1)
