"""Real spherical harmonics in the L2(S^2)-orthonormal convention used here.

The associated Legendre functions carry **no** Condon-Shortley phase:
``P_l^m(x) = (1 - x^2)^{m/2} d^m P_l / dx^m``.  Conventions that include the
phase (e.g. ``scipy.special.lpmv``) differ by a factor ``(-1)^m``.

With the normalized functions
``Pn(l, m, x) = sqrt((2l+1)/2 * (l-m)!/(l+m)!) * P_l^m(x)``
the harmonics are::

    Y[l, 0]  = Pn(l, 0, cos t) / sqrt(2 pi)
    Y[l, m]  = Pn(l, m, cos t) cos(m p) / sqrt(pi)      (m > 0)
    Y[l, -m] = Pn(l, m, cos t) sin(m p) / sqrt(pi)      (m > 0)

Tables are packed as ``index(l, m) = l*l + l + m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "SphPoint",
    "HarmonicIndex",
    "harmonic_index",
    "n_harmonics",
    "degrees_of_packed",
    "assoc_legendre_norm",
    "legendre_norm_table",
    "sph_harm_real",
    "sph_harm_batch",
    "sph_harm_table",
    "cartesian_to_spherical",
    "spherical_to_cartesian",
]

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SphPoint:
    """Point on S^2 in colatitude/longitude; poles have ``phi = 0``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not 0.0 <= theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {theta}")
        phi = math.fmod(phi, _TWO_PI)
        if phi < 0:
            phi += _TWO_PI
        if phi >= _TWO_PI:
            phi = 0.0
        if theta in (0.0, math.pi):
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_cartesian(cls, xyz) -> "SphPoint":
        theta, phi = cartesian_to_spherical(np.asarray(xyz, dtype=float))
        return cls(float(theta), float(phi))

    def to_cartesian(self) -> np.ndarray:
        return spherical_to_cartesian(self.theta, self.phi)


@dataclass(frozen=True)
class HarmonicIndex:
    ell: int
    m: int

    def __post_init__(self):
        if self.ell < 0 or abs(self.m) > self.ell:
            raise DomainError(f"invalid harmonic index (l={self.ell}, m={self.m})")

    @property
    def packed(self) -> int:
        return harmonic_index(self.ell, self.m)


def harmonic_index(ell: int, m: int) -> int:
    return ell * ell + ell + m


def n_harmonics(max_ell: int) -> int:
    return (max_ell + 1) ** 2


def degrees_of_packed(max_ell: int) -> np.ndarray:
    """Degree ``l`` of every packed slot ``0 .. (max_ell+1)**2 - 1``."""
    return np.repeat(np.arange(max_ell + 1), 2 * np.arange(max_ell + 1) + 1)


def cartesian_to_spherical(xyz):
    xyz = np.asarray(xyz, dtype=float)
    rho = np.hypot(xyz[..., 0], xyz[..., 1])
    theta = np.arctan2(rho, xyz[..., 2])
    phi = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), _TWO_PI)
    phi = np.where(rho == 0.0, 0.0, phi)
    return theta, phi


def spherical_to_cartesian(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _check_lm(ell, m):
    if ell < 0 or m < 0 or m > ell:
        raise DomainError(f"need 0 <= m <= l, got (l={ell}, m={m})")


def _legendre_column(m, max_ell, x, s, pmm):
    """Yield ``Pn(l, m, x)`` for ``l = m..max_ell`` given the seed ``Pn(m, m, x)``."""
    yield pmm
    if max_ell == m:
        return
    p_prev = pmm
    p = math.sqrt(2.0 * m + 3.0) * x * pmm
    yield p
    for ell in range(m + 2, max_ell + 1):
        a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
        a_prev = math.sqrt((4.0 * (ell - 1) ** 2 - 1.0) / ((ell - 1) ** 2 - m * m))
        p_prev, p = p, a * (x * p - p_prev / a_prev)
        yield p


def _legendre_single(ell, m, x, s):
    pmm = np.full_like(x, 1.0 / math.sqrt(2.0))
    for k in range(1, m + 1):
        pmm = math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * s * pmm
    for val in _legendre_column(m, ell, x, s, pmm):
        pass
    return val


def assoc_legendre_norm(ell: int, m: int, x):
    """Normalized associated Legendre function ``Pn(l, m, x)`` (``0 <= m <= l``)."""
    _check_lm(ell, m)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise DomainError("x outside [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, (1.0 - x) * (1.0 + x)))
    val = _legendre_single(ell, m, x, s)
    return float(val) if np.ndim(val) == 0 else val


def legendre_norm_table(max_ell: int, x) -> np.ndarray:
    """``Pn(l, m, x)`` for ``0 <= m <= l <= max_ell``; shape ``x.shape + (max_ell+1, max_ell+1)``.

    Entries with ``m > l`` are zero.
    """
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, (1.0 - x) * (1.0 + x)))
    out = np.zeros(x.shape + (max_ell + 1, max_ell + 1))
    pmm = np.full_like(x, 1.0 / math.sqrt(2.0))
    for m in range(max_ell + 1):
        if m > 0:
            pmm = math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        for ell, val in enumerate(_legendre_column(m, max_ell, x, s, pmm), start=m):
            out[..., ell, m] = val
    return out


def sph_harm_real(idx: HarmonicIndex, p: SphPoint) -> float:
    """Single real harmonic ``Y[l, m]`` at ``p``."""
    ell, m = idx.ell, idx.m
    x, s = np.float64(math.cos(p.theta)), np.float64(math.sin(p.theta))
    leg = float(_legendre_single(ell, abs(m), x, s))
    if m == 0:
        return leg * _INV_SQRT_2PI
    if m > 0:
        return leg * math.cos(m * p.phi) * _INV_SQRT_PI
    return leg * math.sin(-m * p.phi) * _INV_SQRT_PI


def sph_harm_table(max_ell: int, xyz) -> np.ndarray:
    """All harmonics up to ``max_ell`` at unit vectors ``xyz`` (shape ``(..., 3)``).

    Returns an array of shape ``(..., (max_ell+1)**2)`` in packed order.  One
    Legendre sweep per order; ``cos(m p)``, ``sin(m p)`` come from the
    angle-addition recurrence.
    """
    if max_ell < 0:
        raise DomainError("max_ell must be >= 0")
    xyz = np.asarray(xyz, dtype=float)
    norm = np.linalg.norm(xyz, axis=-1)
    z = np.clip(xyz[..., 2] / norm, -1.0, 1.0)
    rho = np.hypot(xyz[..., 0], xyz[..., 1])
    pole = rho == 0.0
    safe = np.where(pole, 1.0, rho)
    c1 = np.where(pole, 1.0, xyz[..., 0] / safe)
    s1 = np.where(pole, 0.0, xyz[..., 1] / safe)
    # rho/|x| is accurate near the poles where sqrt(1 - z^2) is not
    s = np.minimum(rho / norm, 1.0)

    out = np.empty(xyz.shape[:-1] + (n_harmonics(max_ell),))
    pmm = np.full_like(z, 1.0 / math.sqrt(2.0))
    cm, sm = np.ones_like(z), np.zeros_like(z)
    for m in range(max_ell + 1):
        if m > 0:
            pmm = math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
            cm, sm = cm * c1 - sm * s1, sm * c1 + cm * s1
        for ell, leg in enumerate(_legendre_column(m, max_ell, z, s, pmm), start=m):
            base = ell * ell + ell
            if m == 0:
                out[..., base] = leg * _INV_SQRT_2PI
            else:
                out[..., base + m] = leg * cm * _INV_SQRT_PI
                out[..., base - m] = leg * sm * _INV_SQRT_PI
    return out


def sph_harm_batch(max_ell: int, p: SphPoint) -> dict:
    """All ``(l, m) -> Y[l, m](p)`` for ``l <= max_ell`` at a single point."""
    vals = sph_harm_table(max_ell, p.to_cartesian())
    return {
        (ell, m): float(vals[harmonic_index(ell, m)])
        for ell in range(max_ell + 1)
        for m in range(-ell, ell + 1)
    }
