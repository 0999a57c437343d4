"""Filtered hyperinterpolation on the shell and the non-filtered baseline.

A *shell function* is any callable ``f(r, sigma)`` that broadcasts: ``r`` has
shape ``S`` and ``sigma`` (unit vectors) has shape ``S + (3,)``; the result
has shape ``S``.

Coefficients of the filtered approximant are stored radial-major as a dense
``(Kbar + 1, (Lbar + 1)**2)`` array, the column of ``(l, m)`` being
``l*l + l + m``.  The filter factor ``h(k/K, l/L)`` is folded into the stored
coefficients, so evaluation is

    V f(r, s) = sum_k sum_{l,m} c[k, l*l+l+m] J_k(r) Y[l,m](s).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericalError, ParseError, PreconditionError
from .filters import Filter, FilterPair, get_filter
from .orthopoly import JacobiBasis, RadialRule, gauss_jacobi_rule, jacobi_table, radial_table
from .quadrature import (
    DegreeCaps,
    DesignLibrary,
    SphericalRule,
    angular_rule_for,
    radial_rule_for,
)
from .sphharm import SphPoint, degrees_of_packed, n_harmonics, sph_harm_table

__all__ = [
    "ShellPoint",
    "ShellApproximant",
    "BaselineApproximant",
    "fit",
    "evaluate",
    "radial_filtered",
    "angular_filtered",
    "kernel_G_K",
    "kernel_abs_integral",
    "kernel_norm",
    "baseline_nonfiltered",
    "chebyshev_interpolation_nodes",
]

FORMAT_TAG = "shellhyper-approximant/1"
_CHUNK = 2048


@dataclass(frozen=True)
class ShellPoint:
    r: float
    sigma: SphPoint

    def to_cartesian(self) -> np.ndarray:
        return self.r * self.sigma.to_cartesian()


def _prepare(r, sigma):
    r = np.asarray(r, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    shape = np.broadcast_shapes(r.shape, sigma.shape[:-1])
    r = np.broadcast_to(r, shape).reshape(-1)
    sigma = np.broadcast_to(sigma, shape + (3,)).reshape(-1, 3)
    return shape, r, sigma


def _check_on_shell(basis, r):
    slack = 1e-12 * basis.r_out
    if np.any(r < basis.r_in - slack) or np.any(r > basis.r_out + slack) or np.any(np.isnan(r)):
        raise DomainError(f"point off the shell [{basis.r_in}, {basis.r_out}]")


def _sample(f, r, sigma):
    """Evaluate ``f`` on the tensor product ``r x sigma``; shape ``(len(r), len(sigma))``."""
    vals = np.asarray(f(r[:, None], sigma[None, :, :]), dtype=float)
    # a fixed contiguous layout keeps the BLAS reduction order, and so the
    # coefficients, independent of how the caller laid out its samples
    vals = np.ascontiguousarray(np.broadcast_to(vals, (len(r), len(sigma))))
    if not np.all(np.isfinite(vals)):
        raise NumericalError("function returned non-finite samples")
    return vals


class _SeparableApproximant:
    """Shared evaluation for approximants of the form ``R(r) @ C @ Y(s)``."""

    basis: JacobiBasis
    max_ell: int

    def _radial_matrix(self, r) -> np.ndarray:
        raise NotImplementedError

    @property
    def _coeff_matrix(self) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, r, sigma):
        """Values at points ``(r, sigma)``; shapes broadcast as for shell functions."""
        shape, r, sigma = _prepare(r, sigma)
        _check_on_shell(self.basis, r)
        out = np.empty(len(r))
        C = self._coeff_matrix
        for start in range(0, len(r), _CHUNK):
            sl = slice(start, start + _CHUNK)
            radial = self._radial_matrix(r[sl]) @ C
            Y = sph_harm_table(self.max_ell, sigma[sl])
            out[sl] = np.einsum("ij,ij->i", radial, Y)
        return out.reshape(shape)

    __call__ = evaluate

    def evaluate_point(self, p: ShellPoint) -> float:
        return float(self.evaluate(p.r, p.sigma.to_cartesian()))

    def evaluate_cartesian(self, x):
        """Values at Cartesian points ``x`` of shape ``(..., 3)`` inside the shell."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return self.evaluate(r, x / r[..., None])

    def evaluate_grid(self, r, sigma):
        """Tensor-product evaluation; returns shape ``(len(r), len(sigma))``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        sigma = np.asarray(sigma, dtype=float).reshape(-1, 3)
        _check_on_shell(self.basis, r)
        radial = self._radial_matrix(r) @ self._coeff_matrix
        out = np.empty((len(r), len(sigma)))
        for start in range(0, len(sigma), _CHUNK):
            sl = slice(start, start + _CHUNK)
            out[:, sl] = radial @ sph_harm_table(self.max_ell, sigma[sl]).T
        return out


class ShellApproximant(_SeparableApproximant):
    """Filtered hyperinterpolant ``V_{K,L} f`` with the filter folded into ``coeffs``."""

    def __init__(self, coeffs, basis: JacobiBasis, caps: DegreeCaps, filters: FilterPair,
                 filter_folded: bool = True):
        coeffs = np.array(coeffs, dtype=float)
        expected = (caps.Kbar + 1, n_harmonics(caps.Lbar))
        if coeffs.shape != expected:
            raise DomainError(f"coefficient array has shape {coeffs.shape}, expected {expected}")
        if not filter_folded:
            coeffs = coeffs * _filter_weights(caps, filters)
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.basis = basis
        self.caps = caps
        self.filters = filters
        self.filter_folded = True
        self.max_ell = caps.Lbar

    def __repr__(self):
        return (
            f"ShellApproximant(K={self.caps.K}, L={self.caps.L}, Kbar={self.caps.Kbar}, "
            f"Lbar={self.caps.Lbar}, filters=({self.filters.rad.name}, {self.filters.ang.name}))"
        )

    def _radial_matrix(self, r):
        return radial_table(self.basis, self.caps.Kbar, r)

    @property
    def _coeff_matrix(self):
        return self.coeffs

    def coefficient(self, k: int, ell: int, m: int) -> float:
        return float(self.coeffs[k, ell * ell + ell + m])

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        b, c = self.basis, self.caps
        return {
            "format": FORMAT_TAG,
            "alpha": b.alpha.hex(),
            "beta": b.beta.hex(),
            "r_in": b.r_in.hex(),
            "r_out": b.r_out.hex(),
            "K": c.K,
            "L": c.L,
            "a": float(c.a).hex(),
            "b": float(c.b).hex(),
            "filter_rad": self.filters.rad.name,
            "filter_ang": self.filters.ang.name,
            "Kbar": c.Kbar,
            "Lbar": c.Lbar,
            "layout": "radial-major; row k = 0..Kbar; column l*l+l+m; filter folded",
            "coefficients": [[v.hex() for v in row] for row in self.coeffs.tolist()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def from_dict(cls, d: dict) -> "ShellApproximant":
        if d.get("format") != FORMAT_TAG:
            raise ParseError(f"unknown approximant format {d.get('format')!r}")
        try:
            basis = JacobiBasis(
                float.fromhex(d["alpha"]), float.fromhex(d["beta"]),
                float.fromhex(d["r_in"]), float.fromhex(d["r_out"]),
            )
            caps = DegreeCaps(int(d["K"]), int(d["L"]), float.fromhex(d["a"]), float.fromhex(d["b"]))
            filters = FilterPair(get_filter(d["filter_rad"]), get_filter(d["filter_ang"]))
            coeffs = np.array([[float.fromhex(v) for v in row] for row in d["coefficients"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed approximant document: {exc}") from exc
        if (caps.Kbar, caps.Lbar) != (d.get("Kbar"), d.get("Lbar")):
            raise ParseError("stored truncation degrees disagree with K, L, a, b")
        return cls(coeffs, basis, caps, filters)

    @classmethod
    def from_json(cls, text: str) -> "ShellApproximant":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ShellApproximant":
        return cls.from_json(Path(path).read_text())


def _filter_weights(caps: DegreeCaps, filters: FilterPair) -> np.ndarray:
    hk = np.asarray(filters.h_rad(np.arange(caps.Kbar + 1) / caps.K), dtype=float)
    hl = np.asarray(filters.h_ang(np.arange(caps.Lbar + 1) / caps.L), dtype=float)
    return hk[:, None] * hl[degrees_of_packed(caps.Lbar)][None, :]


def _check_rules(basis, caps, radial_rule, angular_rule):
    if radial_rule.basis != basis:
        raise PreconditionError("radial rule was built for a different Jacobi basis")
    if not radial_rule.certified or radial_rule.precision < caps.radial_precision:
        raise PreconditionError(
            f"radial rule (precision {radial_rule.precision}, certified={radial_rule.certified}) "
            f"must be certified with precision >= Kbar + K = {caps.radial_precision}"
        )
    if not angular_rule.certified or angular_rule.precision < caps.angular_precision:
        raise PreconditionError(
            f"angular rule (precision {angular_rule.precision}, certified={angular_rule.certified}) "
            f"must be certified with precision >= Lbar + L = {caps.angular_precision}"
        )


def fit(f, caps: DegreeCaps, basis: JacobiBasis, filters: FilterPair,
        radial_rule: RadialRule | None = None, angular_rule: SphericalRule | None = None,
        designs: DesignLibrary | None = None) -> ShellApproximant:
    """Filtered hyperinterpolation of the shell function ``f``.

    ``c[k, lm] = h(k/K, l/L) / gamma_k**2 * sum_j sum_n w_j w_n f(r_j, s_n) J_k(r_j) Y_lm(s_n)``,
    computed separably: angular sums first, then radial sums.  ``f`` is sampled
    once on the full node tensor.  Missing rules are built with
    :func:`radial_rule_for` and :func:`angular_rule_for`.
    """
    if (caps.a, caps.b) != (filters.a, filters.b):
        raise PreconditionError(
            f"degree caps (a={caps.a}, b={caps.b}) do not match filter supports "
            f"(a={filters.a}, b={filters.b})"
        )
    if radial_rule is None:
        radial_rule = radial_rule_for(basis, caps)
    if angular_rule is None:
        angular_rule = angular_rule_for(caps, designs)
    _check_rules(basis, caps, radial_rule, angular_rule)

    samples = _sample(f, radial_rule.nodes, angular_rule.points)
    Y = sph_harm_table(caps.Lbar, angular_rule.points)
    ang = samples @ (Y * angular_rule.weights[:, None])
    J = jacobi_table(basis, caps.Kbar, radial_rule.ref_nodes)
    g2 = basis.gammas(caps.Kbar) ** 2
    coeffs = ((J * radial_rule.weights[:, None]).T @ ang) / g2[:, None]
    coeffs *= _filter_weights(caps, filters)
    return ShellApproximant(coeffs, basis, caps, filters)


def evaluate(approx, p):
    """Evaluate an approximant at a :class:`ShellPoint` or at Cartesian point(s)."""
    if isinstance(p, ShellPoint):
        return approx.evaluate_point(p)
    return approx.evaluate_cartesian(p)


def _as_filter(filt, which: str) -> Filter:
    if isinstance(filt, FilterPair):
        return filt.rad if which == "rad" else filt.ang
    if isinstance(filt, str):
        return get_filter(filt)
    return filt


def radial_filtered(f, K: int, basis: JacobiBasis, filt, rule: RadialRule | None = None):
    """Radial operator ``R_K``: returns the shell function ``R_K f``.

    ``R_K f(r, s) = sum_{k <= Kbar} h_rad(k/K) <f(., s), J_k/g_k>_Q J_k(r)/g_k``.
    """
    h = _as_filter(filt, "rad")
    caps = DegreeCaps(K, 1, h.cap, 1.0)
    if rule is None:
        rule = radial_rule_for(basis, caps)
    if rule.basis != basis or rule.precision < caps.radial_precision:
        raise PreconditionError(f"radial rule precision must be >= {caps.radial_precision}")
    kbar = caps.Kbar
    hk = np.asarray(h(np.arange(kbar + 1) / K), dtype=float)
    g2 = basis.gammas(kbar) ** 2
    J_nodes = jacobi_table(basis, kbar, rule.ref_nodes) * rule.weights[:, None] * (hk / g2)

    def R_f(r, sigma):
        shape, r, sigma = _prepare(r, sigma)
        _check_on_shell(basis, r)
        vals = np.asarray(f(rule.nodes[None, :], sigma[:, None, :]), dtype=float)
        vals = np.broadcast_to(vals, (len(r), rule.n_points))
        coef = vals @ J_nodes
        return np.einsum("ij,ij->i", coef, radial_table(basis, kbar, r)).reshape(shape)

    return R_f


def angular_filtered(f, L: int, filt, rule: SphericalRule | None = None,
                     designs: DesignLibrary | None = None):
    """Angular operator ``A_L``: returns the shell function ``A_L f``.

    ``A_L f(r, s) = sum_{l <= Lbar} sum_m h_ang(l/L) <f(r, .), Y_lm>_Q Y_lm(s)``.
    """
    h = _as_filter(filt, "ang")
    caps = DegreeCaps(1, L, 1.0, h.cap)
    if rule is None:
        rule = angular_rule_for(caps, designs)
    if not rule.certified or rule.precision < caps.angular_precision:
        raise PreconditionError(f"angular rule must be certified with precision >= {caps.angular_precision}")
    lbar = caps.Lbar
    hl = np.asarray(h(np.arange(lbar + 1) / L), dtype=float)[degrees_of_packed(lbar)]
    Y_nodes = sph_harm_table(lbar, rule.points) * rule.weights[:, None] * hl

    def A_f(r, sigma):
        shape, r, sigma = _prepare(r, sigma)
        vals = np.asarray(f(r[:, None], rule.points[None, :, :]), dtype=float)
        vals = np.broadcast_to(vals, (len(r), rule.n_points))
        coef = vals @ Y_nodes
        return np.einsum("ij,ij->i", coef, sph_harm_table(lbar, sigma)).reshape(shape)

    return A_f


def kernel_G_K(basis: JacobiBasis, caps: DegreeCaps, filters, s, r):
    """``G_K(s, r) = sum_{k <= Kbar} h_rad(k/K) J_k(s) J_k(r) / gamma_k**2``."""
    h = _as_filter(filters, "rad")
    kbar = caps.Kbar
    hk = np.asarray(h(np.arange(kbar + 1) / caps.K), dtype=float)
    scale = hk / basis.gammas(kbar) ** 2
    Js = radial_table(basis, kbar, s)
    Jr = radial_table(basis, kbar, r)
    val = np.sum(Js * Jr * scale, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def kernel_abs_integral(basis: JacobiBasis, caps: DegreeCaps, filters, r, n_quad: int = 2048):
    """``int |G_K(s, r)| d mu_rad(s)`` estimated with an ``n_quad``-point Gauss-Jacobi rule."""
    rule = gauss_jacobi_rule(basis, n_quad)
    h = _as_filter(filters, "rad")
    kbar = caps.Kbar
    hk = np.asarray(h(np.arange(kbar + 1) / caps.K), dtype=float)
    scale = hk / basis.gammas(kbar) ** 2
    Js = jacobi_table(basis, kbar, rule.ref_nodes)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    G = (Js * scale) @ radial_table(basis, kbar, r).T
    out = rule.weights @ np.abs(G)
    return out if out.size > 1 else float(out[0])


def kernel_norm(basis: JacobiBasis, caps: DegreeCaps, filters, n_r: int = 257,
                n_quad: int = 2048) -> float:
    """Estimate ``sup_r int |G_K(s, r)| d mu_rad(s)`` over ``n_r`` Chebyshev-extrema radii."""
    x = np.cos(np.pi * np.arange(n_r) / (n_r - 1))[::-1]
    r = basis.midpoint + 0.5 * basis.width * x
    r = np.clip(r, basis.r_in, basis.r_out)
    return float(np.max(kernel_abs_integral(basis, caps, filters, r, n_quad)))


def chebyshev_interpolation_nodes(n: int):
    """Chebyshev zeros ``x_j`` (ascending) and barycentric weights for ``n`` points."""
    j = np.arange(n)
    x = np.sin(np.pi * (2 * j + 1 - n) / (2 * n))
    # standard weights (-1)^j sin((2j+1) pi / 2n), written for the ascending ordering
    w = (-1.0) ** j * np.sin((2 * j + 1) * np.pi / (2 * n))
    return x, w


class BaselineApproximant(_SeparableApproximant):
    """Radial Chebyshev interpolation x angular (unfiltered) hyperinterpolation."""

    def __init__(self, basis: JacobiBasis, K: int, L: int, ref_nodes, bary_weights, ang_coeffs):
        self.basis = basis
        self.K = K
        self.L = L
        self.max_ell = L
        self.ref_nodes = np.asarray(ref_nodes, dtype=float)
        self.bary_weights = np.asarray(bary_weights, dtype=float)
        self.nodes = basis.midpoint + 0.5 * basis.width * self.ref_nodes
        self.ang_coeffs = np.asarray(ang_coeffs, dtype=float)
        self.ang_coeffs.setflags(write=False)

    def __repr__(self):
        return f"BaselineApproximant(K={self.K}, L={self.L})"

    def _radial_matrix(self, r):
        x = (2.0 * np.asarray(r, dtype=float) - (self.basis.r_in + self.basis.r_out)) / self.basis.width
        x = np.clip(x, -1.0, 1.0)
        diff = x[:, None] - self.ref_nodes[None, :]
        hit = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.bary_weights / diff
            lag = terms / terms.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        lag[rows] = hit[rows].astype(float)
        return lag

    @property
    def _coeff_matrix(self):
        return self.ang_coeffs

    def radial_interpolate(self, values, r):
        """Barycentric interpolant through ``values`` at the radial nodes."""
        return self._radial_matrix(np.atleast_1d(r)) @ np.asarray(values, dtype=float)


def baseline_nonfiltered(f, K: int, L: int, basis: JacobiBasis,
                         angular_rule: SphericalRule | None = None,
                         designs: DesignLibrary | None = None) -> BaselineApproximant:
    """Non-filtered comparison scheme.

    Radial direction: degree-``K`` interpolation at the ``K + 1`` Chebyshev
    zeros mapped to the shell (barycentric form).  Angular direction:
    hyperinterpolation of degree ``L`` with a rule of precision ``>= 2L``.
    """
    caps = DegreeCaps(K, L, 1.0, 1.0)
    if angular_rule is None:
        angular_rule = angular_rule_for(caps, designs)
    if not angular_rule.certified or angular_rule.precision < 2 * L:
        raise PreconditionError(f"baseline angular rule must be certified with precision >= {2 * L}")
    x, w = chebyshev_interpolation_nodes(K + 1)
    r_nodes = np.clip(basis.midpoint + 0.5 * basis.width * x, basis.r_in, basis.r_out)
    samples = _sample(f, r_nodes, angular_rule.points)
    Y = sph_harm_table(L, angular_rule.points)
    ang = samples @ (Y * angular_rule.weights[:, None])
    return BaselineApproximant(basis, K, L, x, w, ang)
