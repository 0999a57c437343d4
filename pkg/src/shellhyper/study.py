"""Sup-norm error grids, convergence studies and error-field extraction.

Outputs are plain text (CSV, whitespace matrices) so they can be plotted by
any tool.  Everything written here is a deterministic function of the
configuration and the design files, except the optional ``fit_seconds``
column, which is blanked when ``StudyConfig.timing`` is false.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError
from .filters import FilterPair
from .functions import get_function
from .operator import ShellPoint, baseline_nonfiltered, fit
from .orthopoly import JacobiBasis
from .quadrature import DegreeCaps, DesignLibrary, angular_rule_for, default_design_library
from .sphharm import SphPoint, spherical_to_cartesian

__all__ = [
    "EvalGrid",
    "GridSpec",
    "default_grid",
    "sup_error",
    "StudyConfig",
    "StudyRow",
    "StudyResult",
    "convergence_study",
    "loglog_slope",
    "layer_field",
    "radial_line",
    "random_shell_points",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 424242


@dataclass(frozen=True, eq=False)
class EvalGrid:
    """Finite point set on the shell.

    ``mode="tensor"`` means every radius is paired with every direction;
    ``mode="scattered"`` pairs ``radial_samples[i]`` with ``angular_samples[i]``.
    """

    radial_samples: np.ndarray
    angular_samples: np.ndarray
    mode: str = "tensor"

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.radial_samples, dtype=float))
        s = np.asarray(self.angular_samples, dtype=float).reshape(-1, 3)
        if self.mode not in ("tensor", "scattered"):
            raise DomainError(f"unknown grid mode {self.mode!r}")
        if self.mode == "scattered" and len(r) != len(s):
            raise DomainError("scattered grid needs as many radii as directions")
        if np.any(np.abs(np.linalg.norm(s, axis=1) - 1.0) > 1e-12):
            raise DomainError("angular samples must be unit vectors")
        object.__setattr__(self, "radial_samples", r)
        object.__setattr__(self, "angular_samples", s)

    @property
    def n_points(self) -> int:
        if self.mode == "tensor":
            return len(self.radial_samples) * len(self.angular_samples)
        return len(self.radial_samples)

    def check_on_shell(self, basis: JacobiBasis) -> None:
        r = self.radial_samples
        if np.any(r < basis.r_in) or np.any(r > basis.r_out):
            raise DomainError(f"grid radii leave the shell [{basis.r_in}, {basis.r_out}]")

    def values(self, f) -> np.ndarray:
        """``f`` on the grid: shape ``(n_r, n_s)`` (tensor) or ``(n,)`` (scattered)."""
        if hasattr(f, "evaluate_grid"):
            return self.approx_values(f)
        if self.mode == "tensor":
            v = f(self.radial_samples[:, None], self.angular_samples[None, :, :])
            return np.broadcast_to(np.asarray(v, dtype=float), (len(self.radial_samples), len(self.angular_samples)))
        return np.asarray(f(self.radial_samples, self.angular_samples), dtype=float)

    def approx_values(self, approx) -> np.ndarray:
        if self.mode == "tensor":
            return approx.evaluate_grid(self.radial_samples, self.angular_samples)
        return approx.evaluate(self.radial_samples, self.angular_samples)

    def point(self, flat_index: int) -> ShellPoint:
        if self.mode == "tensor":
            i, j = divmod(int(flat_index), len(self.angular_samples))
        else:
            i = j = int(flat_index)
        return ShellPoint(float(self.radial_samples[i]), SphPoint.from_cartesian(self.angular_samples[j]))


def random_shell_points(basis: JacobiBasis, n: int, seed: int = DEFAULT_SEED):
    """``n`` reproducible random shell points.

    Directions are normalized triples of independent standard normals and
    radii are uniform on ``[r_in, r_out]``, both drawn from
    ``numpy.random.default_rng(seed)`` in that order.
    """
    rng = np.random.default_rng(seed)
    s = rng.standard_normal((n, 3))
    s /= np.linalg.norm(s, axis=1)[:, None]
    r = rng.uniform(basis.r_in, basis.r_out, n)
    return r, s


def chebyshev_extrema(basis: JacobiBasis, n: int) -> np.ndarray:
    """``n`` Chebyshev extrema mapped to the shell, ascending, endpoints included."""
    if n == 1:
        return np.array([basis.midpoint])
    x = -np.cos(np.pi * np.arange(n) / (n - 1))
    r = basis.midpoint + 0.5 * basis.width * x
    r[0], r[-1] = basis.r_in, basis.r_out
    return r


def angular_product_grid(n_theta: int, n_phi: int) -> np.ndarray:
    """Gauss-Legendre nodes in ``cos(theta)`` times ``n_phi`` uniform longitudes."""
    z, _ = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta = np.arccos(z)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    return spherical_to_cartesian(T, P).reshape(-1, 3)


@dataclass(frozen=True)
class GridSpec:
    """Parameters of the default sup-norm grid."""

    n_radial: int = 33
    n_theta: int = 61
    n_phi: int = 122
    n_random: int = 10_000
    seed: int = DEFAULT_SEED

    def build(self, basis: JacobiBasis) -> tuple:
        grids = [
            EvalGrid(chebyshev_extrema(basis, self.n_radial), angular_product_grid(self.n_theta, self.n_phi))
        ]
        if self.n_random > 0:
            r, s = random_shell_points(basis, self.n_random, self.seed)
            grids.append(EvalGrid(r, s, mode="scattered"))
        return tuple(grids)


def default_grid(basis: JacobiBasis | None = None) -> tuple:
    """33 Chebyshev-extrema radii x 61 x 122 product directions, plus 10^4 random points."""
    return GridSpec().build(basis if basis is not None else JacobiBasis())


def sup_error(f, approx, grid) -> tuple:
    """``max |f - approx|`` over ``grid`` and the :class:`ShellPoint` attaining it.

    ``approx`` may be an approximant or any shell function; ``grid`` is an
    :class:`EvalGrid` or a sequence of them.
    """
    grids = (grid,) if isinstance(grid, EvalGrid) else tuple(grid)
    best, where = -1.0, None
    for g in grids:
        err = np.abs(g.values(f) - g.values(approx)).ravel()
        if np.any(np.isnan(err)):
            raise DomainError("non-finite values while estimating the sup error")
        i = int(np.argmax(err))
        if err[i] > best:
            best, where = float(err[i]), g.point(i)
    return best, where


def loglog_slope(degrees, errors) -> float:
    """Least-squares slope of ``log10(error)`` against ``log10(degree)``."""
    x = np.log10(np.asarray(degrees, dtype=float))
    y = np.log10(np.asarray(errors, dtype=float))
    if len(x) < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class StudyConfig:
    """Convergence-study settings.

    Exactly one of ``K`` and ``L`` is varied: a schedule of length one is held
    fixed.  ``rule_source`` is ``"product"`` (Gauss-Legendre x trapezoid
    rules) or ``"designs"`` (the design library at ``design_dir``, or the
    bundled one, with product rules as fallback).
    """

    function: str = "f1"
    K: list = field(default_factory=lambda: [2, 4, 8, 16, 32])
    L: list = field(default_factory=lambda: [4])
    filter_rad: str = "exp"
    filter_ang: str = "exp"
    alpha: float = -0.5
    beta: float = -0.5
    r_in: float = 1.0
    r_out: float = 1.001
    rule_source: str = "product"
    design_dir: str | None = None
    grid: dict = field(default_factory=dict)
    output: str | None = None
    timing: bool = False

    def __post_init__(self):
        self.K = [int(k) for k in np.atleast_1d(self.K)]
        self.L = [int(l) for l in np.atleast_1d(self.L)]
        if not self.K or not self.L:
            raise DomainError("K and L schedules must be non-empty")
        if min(self.K) < 1 or min(self.L) < 1:
            raise DomainError("K and L must be >= 1")
        if len(self.K) > 1 and len(self.L) > 1:
            raise DomainError("vary either K or L, not both")
        if self.rule_source not in ("product", "designs"):
            raise DomainError(f"unknown rule source {self.rule_source!r}")
        get_function(self.function)
        self.filters()
        self.grid_spec()

    @property
    def varied(self) -> str:
        return "L" if len(self.L) > 1 else "K"

    def schedule(self) -> list:
        if self.varied == "L":
            return [(self.K[0], l) for l in self.L]
        return [(k, self.L[0]) for k in self.K]

    def basis(self) -> JacobiBasis:
        return JacobiBasis(self.alpha, self.beta, self.r_in, self.r_out)

    def filters(self) -> FilterPair:
        return FilterPair.by_name(self.filter_rad, self.filter_ang)

    def grid_spec(self) -> GridSpec:
        try:
            return GridSpec(**self.grid)
        except TypeError as exc:
            raise DomainError(f"bad grid specification: {exc}") from None

    def designs(self) -> DesignLibrary | None:
        if self.rule_source != "designs":
            return None
        return DesignLibrary(Path(self.design_dir)) if self.design_dir else default_design_library()

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_text(cls, text: str) -> "StudyConfig":
        """Parse a JSON object, or flat ``key = value`` lines (values JSON-decoded when possible)."""
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                return cls.from_dict(json.loads(stripped))
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON config: {exc}") from None
        d = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                d[key] = json.loads(value)
            except json.JSONDecodeError:
                d[key] = value
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "StudyConfig":
        return cls.from_text(Path(path).read_text())

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StudyRow:
    degree: int
    n_radial_nodes: int
    n_angular_nodes: int
    sup_error_filtered: float
    sup_error_baseline: float
    fit_seconds: float | None = None


@dataclass
class StudyResult:
    config: StudyConfig
    rows: list
    slope_filtered: float | None
    slope_baseline: float | None

    def to_csv(self) -> str:
        buf = io.StringIO()
        _write_csv(buf, self.config, self.rows, self.slope_filtered, self.slope_baseline)
        return buf.getvalue()


_COLUMNS = ["degree", "n_radial_nodes", "n_angular_nodes", "sup_error_filtered",
            "sup_error_baseline", "fit_seconds"]


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _fmt_slope(x) -> str:
    return "n/a" if x is None or not math.isfinite(x) else f"{x:.6f}"


def _write_header(out, cfg: StudyConfig) -> None:
    out.write(f"# function={cfg.function} varied={cfg.varied} K={cfg.K} L={cfg.L}\n")
    out.write(f"# filters=({cfg.filter_rad},{cfg.filter_ang}) alpha={cfg.alpha} beta={cfg.beta} "
              f"shell=[{cfg.r_in},{cfg.r_out}] rules={cfg.rule_source}\n")
    g = cfg.grid_spec()
    out.write(f"# grid: {g.n_radial} Chebyshev-extrema radii x {g.n_theta}x{g.n_phi} product directions"
              f" + {g.n_random} random points (seed {g.seed})\n")
    out.write("# slope: least-squares log10(error) vs log10(degree), first schedule entry excluded\n")


def _write_row(writer, row: StudyRow) -> None:
    writer.writerow([row.degree, row.n_radial_nodes, row.n_angular_nodes, _fmt(row.sup_error_filtered),
                     _fmt(row.sup_error_baseline), _fmt(row.fit_seconds)])


def _write_csv(out, cfg, rows, slope_f, slope_b) -> None:
    _write_header(out, cfg)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for row in rows:
        _write_row(writer, row)
    out.write(f"# slope_filtered={_fmt_slope(slope_f)} slope_baseline={_fmt_slope(slope_b)}\n")


# errors below this are treated as exact reproduction, where a slope is meaningless
_ROUNDING_FLOOR = 1e-12


def _tail_slope(rows, attr):
    tail = rows[1:]
    errs = [getattr(r, attr) for r in tail]
    if len(tail) < 2 or max(errs) < _ROUNDING_FLOOR:
        return None
    return loglog_slope([r.degree for r in tail], errs)


def convergence_study(cfg: StudyConfig, output=None) -> StudyResult:
    """Fit filtered and baseline approximants along the schedule and tabulate sup errors.

    ``output`` (path or text stream; defaults to ``cfg.output``) receives the
    CSV.  Each row is flushed as soon as it is computed, so a failure part way
    leaves the completed rows on disk before the exception propagates.
    """
    f = get_function(cfg.function)
    basis = cfg.basis()
    filters = cfg.filters()
    designs = cfg.designs()
    grids = cfg.grid_spec().build(basis)
    output = output if output is not None else cfg.output

    close = False
    stream = None
    if isinstance(output, (str, Path)):
        stream = open(output, "w", newline="")
        close = True
    elif output is not None:
        stream = output

    rows = []
    try:
        writer = None
        if stream is not None:
            _write_header(stream, cfg)
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_COLUMNS)
            stream.flush()
        for K, L in cfg.schedule():
            caps = DegreeCaps.for_filters(K, L, filters)
            ang_rule = angular_rule_for(caps, designs)
            t0 = time.perf_counter()
            approx = fit(f, caps, basis, filters, angular_rule=ang_rule)
            seconds = time.perf_counter() - t0
            base_rule = angular_rule_for(DegreeCaps(K, L, 1.0, 1.0), designs)
            baseline = baseline_nonfiltered(f, K, L, basis, angular_rule=base_rule)
            row = StudyRow(
                degree=K if cfg.varied == "K" else L,
                n_radial_nodes=caps.kappa + 1,
                n_angular_nodes=ang_rule.n_points,
                sup_error_filtered=sup_error(f, approx, grids)[0],
                sup_error_baseline=sup_error(f, baseline, grids)[0],
                fit_seconds=seconds if cfg.timing else None,
            )
            rows.append(row)
            if writer is not None:
                _write_row(writer, row)
                stream.flush()
        slope_f = _tail_slope(rows, "sup_error_filtered")
        slope_b = _tail_slope(rows, "sup_error_baseline")
        if stream is not None:
            stream.write(f"# slope_filtered={_fmt_slope(slope_f)} slope_baseline={_fmt_slope(slope_b)}\n")
    finally:
        if close:
            stream.close()
    return StudyResult(cfg, rows, slope_f, slope_b)


def _level_radius(basis: JacobiBasis, level) -> float:
    if isinstance(level, str):
        named = {"inner": basis.r_in, "mid": basis.midpoint, "outer": basis.r_out}
        if level not in named:
            raise DomainError(f"unknown level {level!r}; use inner, mid, outer or a radius")
        return named[level]
    r = float(level)
    if not basis.r_in <= r <= basis.r_out:
        raise DomainError(f"level r={r} outside the shell")
    return r


def layer_field(approx, f, r, resolution=(91, 180), output=None):
    """``|f - approx|`` on a regular ``theta x phi`` lattice at fixed radius.

    ``theta_i = pi * i / (n_theta - 1)`` and ``phi_j = 2 pi j / n_phi``.
    ``r`` is a radius or one of ``"inner"``, ``"mid"``, ``"outer"``.  If
    ``output`` is a path stem, writes ``<stem>.txt`` (the matrix, one theta row
    per line), ``<stem>_theta.txt`` and ``<stem>_phi.txt``.
    Returns ``(theta, phi, field)``.
    """
    n_theta, n_phi = (int(n) for n in resolution)
    if n_theta < 2 or n_phi < 1:
        raise DomainError("resolution needs n_theta >= 2 and n_phi >= 1")
    radius = _level_radius(approx.basis, r)
    theta = np.pi * np.arange(n_theta) / (n_theta - 1)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    sigma = spherical_to_cartesian(T, P).reshape(-1, 3)
    grid = EvalGrid(np.array([radius]), sigma)
    err = np.abs(grid.values(f) - grid.values(approx)).reshape(n_theta, n_phi)
    if output is not None:
        stem = Path(output)
        np.savetxt(stem.with_name(stem.name + ".txt"), err, fmt="%.17e")
        np.savetxt(stem.with_name(stem.name + "_theta.txt"), theta, fmt="%.17e")
        np.savetxt(stem.with_name(stem.name + "_phi.txt"), phi, fmt="%.17e")
    return theta, phi, err


def radial_line(approx, f, sigma, n: int = 101, output=None):
    """``|f - approx|`` at ``n`` equispaced radii along direction ``sigma``.

    Returns an ``(n, 2)`` array of ``(r, error)``; writes it as a two-column
    table when ``output`` is given.
    """
    if n < 2:
        raise DomainError("need at least two radii")
    s = np.asarray(sigma, dtype=float)
    s = s / np.linalg.norm(s)
    basis = approx.basis
    r = np.linspace(basis.r_in, basis.r_out, n)
    grid = EvalGrid(r, s[None, :])
    err = np.abs(grid.values(f) - grid.values(approx))[:, 0]
    table = np.column_stack([r, err])
    if output is not None:
        np.savetxt(output, table, fmt="%.17e", header="r abs_error", comments="# ")
    return table
