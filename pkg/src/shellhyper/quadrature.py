"""Radial and angular quadrature rules sized for the shell operators.

Spherical point sets are read in the plain "x y z per line" layout used by
published spherical t-design tables; weights are implicit and equal.  When no
design of sufficient strength is available a Gauss-Legendre x uniform-phi
product rule is used instead.  Every rule is certified before use: the
discrete integrals of all basis functions up to the claimed degree must match
their exact values to ``CERT_TOL``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import CertificationError, DomainError, GeometryError, ParseError
from .orthopoly import JacobiBasis, RadialRule, gauss_jacobi_rule, jacobi_table
from .sphharm import degrees_of_packed, sph_harm_table

__all__ = [
    "CERT_TOL",
    "DegreeCaps",
    "SphericalRule",
    "CertificationReport",
    "DesignLibrary",
    "default_design_library",
    "radial_rule_for",
    "load_design",
    "product_rule",
    "angular_rule_for",
    "discrete_inner_radial",
    "discrete_inner_angular",
    "certify",
]

CERT_TOL = 1e-9
_NORM_TOL = 1e-8
_FOUR_PI = 4.0 * math.pi
_SQRT_4PI = math.sqrt(_FOUR_PI)


def _degree_cap(n: int, c: float) -> int:
    # exact rational arithmetic: 1.1 * 10 must give ceil = 11, not 12
    return max(math.ceil(Fraction(str(c)) * n) - 1, n)


@dataclass(frozen=True)
class DegreeCaps:
    """Nominal degrees ``K, L``, filter caps ``a, b`` and truncation degrees.

    ``Kbar = max(ceil(a K) - 1, K)`` and ``Lbar = max(ceil(b L) - 1, L)``.
    A cap of exactly 1 (indicator filter) gives ``Kbar = K``.
    """

    K: int
    L: int
    a: float = 2.0
    b: float = 2.0

    def __post_init__(self):
        if int(self.K) != self.K or int(self.L) != self.L or self.K < 1 or self.L < 1:
            raise DomainError(f"K and L must be integers >= 1, got K={self.K}, L={self.L}")
        if not (1.0 <= self.a <= 2.0 and 1.0 <= self.b <= 2.0):
            raise DomainError(f"caps must lie in [1, 2], got a={self.a}, b={self.b}")

    @classmethod
    def for_filters(cls, K: int, L: int, filters) -> "DegreeCaps":
        return cls(K, L, filters.a, filters.b)

    @property
    def Kbar(self) -> int:
        return _degree_cap(self.K, self.a)

    @property
    def Lbar(self) -> int:
        return _degree_cap(self.L, self.b)

    @property
    def kappa(self) -> int:
        """Highest radial node index, ``ceil((Kbar + K - 1) / 2)``."""
        return -(-(self.Kbar + self.K - 1) // 2)

    @property
    def radial_precision(self) -> int:
        return self.Kbar + self.K

    @property
    def angular_precision(self) -> int:
        return self.Lbar + self.L


@dataclass(frozen=True, eq=False)
class SphericalRule:
    """Positive-weight rule on S^2 exact for spherical polynomials of degree ``<= precision``."""

    points: np.ndarray
    weights: np.ndarray
    precision: int
    source: str = ""
    certified: bool = False

    @property
    def n_points(self) -> int:
        return len(self.weights)

    # alias matching the usual "t-design" vocabulary
    @property
    def precision_t(self) -> int:
        return self.precision


@dataclass
class CertificationReport:
    """Worst exactness residual per degree for a quadrature rule."""

    kind: str
    max_degree: int
    residuals: list
    tol: float = CERT_TOL
    weight_sum_error: float = 0.0
    n_points: int = 0

    @property
    def failed_degrees(self) -> list:
        return [d for d, res in enumerate(self.residuals) if not res < self.tol]

    @property
    def passed(self) -> bool:
        return not self.failed_degrees and self.weight_sum_error < self.tol

    @property
    def worst(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def __bool__(self) -> bool:
        return self.passed

    def format(self) -> str:
        status = "PASS" if self.passed else f"FAIL at degree(s) {self.failed_degrees}"
        lines = [
            f"{self.kind} rule, {self.n_points} points, certified to degree {self.max_degree}: {status}",
            f"  weight-sum error {self.weight_sum_error:.3e}",
        ]
        lines += [f"  degree {d:3d}  residual {res:.3e}" for d, res in enumerate(self.residuals)]
        return "\n".join(lines)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def certify(rule, max_degree: int, tol: float = CERT_TOL) -> CertificationReport:
    """Check exactness of ``rule`` up to ``max_degree``.

    Spherical rules: ``sum_n w_n Y[l,m](s_n)`` must equal ``sqrt(4 pi)`` for
    ``l = 0`` and vanish otherwise.  Radial rules: the discrete Gram matrix of
    ``J_k / gamma_k`` must be the identity on all pairs ``j + k <= max_degree``.
    The residual reported for degree ``d`` is the worst entry of that degree.
    """
    max_degree = int(max_degree)
    if max_degree < 0:
        raise DomainError("max_degree must be >= 0")
    if isinstance(rule, SphericalRule):
        Y = sph_harm_table(max_degree, rule.points)
        integrals = rule.weights @ Y
        integrals[0] -= _SQRT_4PI
        deg = degrees_of_packed(max_degree)
        residuals = [float(np.max(np.abs(integrals[deg == d]))) for d in range(max_degree + 1)]
        ws_err = abs(math.fsum(rule.weights) - _FOUR_PI) / _FOUR_PI
        return CertificationReport("spherical", max_degree, residuals, tol, ws_err, rule.n_points)
    if isinstance(rule, RadialRule):
        basis = rule.basis
        # evaluate at the exact reference nodes, not at the rounded radii
        jn = jacobi_table(basis, max_degree, rule.ref_nodes) / basis.gammas(max_degree)
        gram = (jn * rule.weights[:, None]).T @ jn - np.eye(max_degree + 1)
        jj, kk = np.indices(gram.shape)
        residuals = [float(np.max(np.abs(gram[jj + kk == d]))) for d in range(max_degree + 1)]
        total = basis.measure_total()
        ws_err = abs(math.fsum(rule.weights) - total) / total
        return CertificationReport("radial", max_degree, residuals, tol, ws_err, rule.n_points)
    raise TypeError(f"cannot certify {type(rule).__name__}")


def radial_rule_for(basis: JacobiBasis, caps: DegreeCaps) -> RadialRule:
    """Gauss-Jacobi rule with ``kappa + 1`` points, precision ``2 kappa + 1 >= Kbar + K``."""
    rule = gauss_jacobi_rule(basis, caps.kappa + 1)
    report = certify(rule, caps.radial_precision)
    if not report.passed:
        raise CertificationError(report.format())
    _freeze(rule.nodes, rule.ref_nodes, rule.weights)
    return RadialRule(rule.basis, rule.ref_nodes, rule.nodes, rule.weights, rule.precision, certified=True)


def _read_text(source) -> tuple[str, str]:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8"), "<bytes>"
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        return path.read_text(), str(path)
    data = source.read()
    name = getattr(source, "name", "<stream>")
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data, str(name)


def parse_points(text: str, name: str = "<stream>") -> np.ndarray:
    """Parse "x y z" lines (blank lines and ``#`` comments ignored)."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ParseError(f"{name}:{lineno}: expected 3 coordinates, found {len(tokens)} tokens")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise ParseError(f"{name}:{lineno}: non-numeric token in {line!r}") from None
    if not rows:
        raise ParseError(f"{name}: no points found")
    return np.array(rows)


def load_design(source, declared_t: int) -> SphericalRule:
    """Read an equal-weight design and certify it at ``declared_t``."""
    text, name = _read_text(source)
    pts = parse_points(text, name)
    norms = np.linalg.norm(pts, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > _NORM_TOL)
    if bad.size:
        raise GeometryError(
            f"{name}: point {bad[0] + 1} has norm {norms[bad[0]]:.12g}; "
            f"{bad.size} point(s) deviate from the unit sphere by more than {_NORM_TOL}"
        )
    pts = pts / norms[:, None]
    w = np.full(len(pts), _FOUR_PI / len(pts))
    rule = SphericalRule(pts, w, int(declared_t), source=name)
    report = certify(rule, declared_t)
    if not report.passed:
        raise CertificationError(f"{name}: design fails certification at t={declared_t}\n{report.format()}")
    _freeze(pts, w)
    return SphericalRule(pts, w, int(declared_t), source=name, certified=True)


def _product_points(t: int):
    n_theta = -(-(t + 1) // 2)
    n_phi = t + 1
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    st = np.sqrt((1.0 - x) * (1.0 + x))
    pts = np.stack(
        [
            (st[:, None] * np.cos(phi)[None, :]).ravel(),
            (st[:, None] * np.sin(phi)[None, :]).ravel(),
            np.repeat(x, n_phi),
        ],
        axis=1,
    )
    w = np.repeat(wx, n_phi) * (2.0 * math.pi / n_phi)
    return pts, w


@lru_cache(maxsize=64)
def product_rule(t: int) -> SphericalRule:
    """Gauss-Legendre (in cos theta) x uniform-phi rule exact to degree ``t``.

    Uses ``ceil((t+1)/2)`` latitudes and ``t + 1`` longitudes.
    """
    t = int(t)
    if t < 0:
        raise DomainError("t must be >= 0")
    pts, w = _product_points(t)
    rule = SphericalRule(pts, w, t, source=f"product({t})")
    report = certify(rule, t)
    if not report.passed:
        raise CertificationError(report.format())
    _freeze(pts, w)
    return SphericalRule(pts, w, t, source=f"product({t})", certified=True)


@dataclass
class DesignLibrary:
    """Directory of design files indexed by a manifest of ``t N filename`` lines."""

    directory: Path
    manifest: str = "manifest.txt"
    entries: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.directory = Path(self.directory)
        if not self.entries:
            self.entries = self._read_manifest()

    def _read_manifest(self) -> dict:
        path = self.directory / self.manifest
        entries = {}
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 3:
                raise ParseError(f"{path}:{lineno}: expected 't N filename'")
            try:
                t, n = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: t and N must be integers") from None
            entries[t] = (n, tokens[2])
        return entries

    @property
    def available(self) -> list:
        return sorted(self.entries)

    def load(self, t: int) -> SphericalRule:
        if t not in self._cache:
            n, fname = self.entries[t]
            rule = load_design(self.directory / fname, t)
            if rule.n_points != n:
                raise ParseError(f"{fname}: manifest declares {n} points, file has {rule.n_points}")
            self._cache[t] = rule
        return self._cache[t]

    def lookup(self, t_min: int) -> SphericalRule | None:
        """Smallest available design with ``t >= t_min``, or None."""
        for t in self.available:
            if t >= t_min:
                return self.load(t)
        return None


def default_design_library() -> DesignLibrary:
    """The small set of classical designs (platonic solids) bundled with the package."""
    return DesignLibrary(Path(str(resources.files("shellhyper") / "data" / "designs")))


def angular_rule_for(caps: DegreeCaps, provider: DesignLibrary | None = None) -> SphericalRule:
    """Rule of precision ``>= Lbar + L``: smallest fitting design, else a product rule."""
    need = caps.angular_precision
    if provider is not None:
        rule = provider.lookup(need)
        if rule is not None:
            return rule
    return product_rule(need)


def discrete_inner_radial(rule: RadialRule, f, g) -> float:
    """``sum_j w_j f(r_j) g(r_j)`` with compensated summation."""
    r = rule.nodes
    vals = rule.weights * np.asarray(f(r), dtype=float) * np.asarray(g(r), dtype=float)
    return math.fsum(np.broadcast_to(vals, r.shape))


def discrete_inner_angular(rule: SphericalRule, f, g) -> float:
    """``sum_n w_n f(s_n) g(s_n)`` with compensated summation."""
    s = rule.points
    vals = rule.weights * np.asarray(f(s), dtype=float) * np.asarray(g(s), dtype=float)
    return math.fsum(np.broadcast_to(vals, rule.weights.shape))
