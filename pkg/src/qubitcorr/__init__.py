"""Correlation sets of qubit state families under two-outcome measurements."""
from .applications import (
    circulant_eigenvalues,
    degenerate_pair_constraint,
    mub_membership,
    polygon_family,
    pure_pair_ellipse_lhs,
    pure_pair_family,
)
from .correlation_set import (
    ComparisonVerdict,
    EllipsoidSpec,
    MembershipVerdict,
    Order,
    StateFamily,
    Tag,
    boundary_correlation,
    compare_families,
    ellipsoid_spec,
    ellipsoid_surface_point,
    extremal_test,
    gram_matrix,
    membership,
    sample_boundary,
    support_value,
)
from .errors import (
    DegenerateAlpha,
    DegenerateDirection,
    DimensionMismatch,
    InvalidState,
    InvalidTest,
    NonHermitianInput,
    QubitCorrError,
)
from .oracle import OracleReport, empirical_support, validate_inclusion
from .qubit_algebra import BinaryTest, HermitianOp, QubitState, born, decompose, overlap, positive_part_projector
from .spectral import ThinFactorization, factorize, pinv_quadratic_form, range_residual

__version__ = "0.1.0"
