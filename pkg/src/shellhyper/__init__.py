"""Filtered hyperinterpolation on a thin spherical shell ``[r_in, r_out] x S^2``.

Radial direction: Jacobi polynomials and Gauss-Jacobi quadrature.  Angular
direction: real spherical harmonics and spherical designs or product rules.
A smooth filter on the coefficients gives uniform convergence.
"""

from .errors import (
    CertificationError,
    DomainError,
    GeometryError,
    NumericalError,
    ParseError,
    PreconditionError,
    QuadratureError,
    ShellHyperError,
)
from .filters import FILTERS, Filter, FilterPair, exp_filter, get_filter, indicator_filter, product_filter
from .functions import f1, f2, f3, franke, cone
from .operator import (
    BaselineApproximant,
    ShellApproximant,
    ShellPoint,
    angular_filtered,
    baseline_nonfiltered,
    evaluate,
    fit,
    kernel_abs_integral,
    kernel_G_K,
    kernel_norm,
    radial_filtered,
)
from .orthopoly import (
    JacobiBasis,
    RadialRule,
    gamma_norm,
    gauss_jacobi_rule,
    jacobi_eval,
    jacobi_table,
    map_from_reference,
    map_to_reference,
    radial_basis_eval,
)
from .quadrature import (
    CertificationReport,
    DegreeCaps,
    DesignLibrary,
    SphericalRule,
    angular_rule_for,
    certify,
    default_design_library,
    load_design,
    product_rule,
    radial_rule_for,
)
from .sphharm import (
    HarmonicIndex,
    SphPoint,
    assoc_legendre_norm,
    harmonic_index,
    sph_harm_batch,
    sph_harm_real,
    sph_harm_table,
)
from .study import EvalGrid, StudyConfig, convergence_study, default_grid, layer_field, radial_line, sup_error

__version__ = "0.1.0"
