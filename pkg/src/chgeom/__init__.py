"""Numerical laboratory for the geometry of complex hyperbolic space
modeled on a solvable Lie group, and for its ruled minimal submanifolds,
constant-principal-curvature hypersurfaces and focal-set analysis."""

from .construction import (
    DimensionTooLarge,
    KahlerAngleSubspace,
    OddDimensionNonReal,
    RigidityReport,
    SecondFundamentalForm,
    SubmanifoldSpec,
    build_submanifold,
    constant_kahler_angle_subspace,
    kahler_angle,
    maximal_holomorphic_subspace,
    orbit_second_fundamental_form,
    rigidity_form_check,
)
from .jacobi import (
    JacobiCoefficients,
    OutOfRangeEigenvalue,
    f_derivative,
    f_function,
    focal_collapse_matrix_closed,
    focal_collapse_matrix_numeric,
    focal_determinant_matrix,
    focal_determinant_matrix_derivative,
    focal_radius,
    g_derivative,
    g_function,
    jacobi_closed,
    jacobi_ode_oracle,
    sech,
    special_radius,
)
from .model import (
    CurvatureReport,
    MismatchedBasePoints,
    ModelParams,
    Point,
    SolvableModel,
    TangentVector,
    ambient_curvature,
    standard_complex_structure,
)
from .numlab import (
    ChartImmersion,
    GermField,
    NumericGeometry,
    convergence_order,
    frame_connection_residuals,
    gauss_codazzi_residuals,
    germ_field,
    graded_connection_residuals,
    graded_curvature_residuals,
    horosphere_chart,
    numeric_geometry,
    real_eigenspace_residual,
    tube_chart,
    unit_pair_gauss_residual,
)
from .spectral import (
    ClassificationResult,
    EigenStructure,
    HopfFrame,
    HypersurfaceGerm,
    NoRealSolution,
    PrincipalDecomposition,
    ScanReport,
    catalog_germ,
    catalog_quadratic,
    classify,
    constraint_residuals,
    eigen_structure_from_lambda3,
    frame_identity_residuals,
    hopf_frame_extract,
    hopf_projection_squares,
    horosphere_germ,
    nonexistence_scan,
    principal_decomposition,
    totally_real_check,
)
from .tubes import (
    FocalShapeReport,
    TubeResult,
    focal_rank,
    focal_shape_check,
    normal_direction,
    submanifold_shape_operator,
    tube_shape_operator,
    tube_spectrum_closed,
)

__version__ = "0.1.0"

__all__ = [
    "ChartImmersion",
    "ClassificationResult",
    "CurvatureReport",
    "DimensionTooLarge",
    "EigenStructure",
    "FocalShapeReport",
    "GermField",
    "HopfFrame",
    "HypersurfaceGerm",
    "JacobiCoefficients",
    "KahlerAngleSubspace",
    "MismatchedBasePoints",
    "ModelParams",
    "NoRealSolution",
    "NumericGeometry",
    "OddDimensionNonReal",
    "OutOfRangeEigenvalue",
    "Point",
    "PrincipalDecomposition",
    "RigidityReport",
    "ScanReport",
    "SecondFundamentalForm",
    "SolvableModel",
    "SubmanifoldSpec",
    "TangentVector",
    "TubeResult",
    "ambient_curvature",
    "build_submanifold",
    "catalog_germ",
    "catalog_quadratic",
    "classify",
    "constant_kahler_angle_subspace",
    "constraint_residuals",
    "convergence_order",
    "eigen_structure_from_lambda3",
    "f_derivative",
    "f_function",
    "focal_collapse_matrix_closed",
    "focal_collapse_matrix_numeric",
    "focal_determinant_matrix",
    "focal_determinant_matrix_derivative",
    "focal_radius",
    "focal_rank",
    "focal_shape_check",
    "frame_connection_residuals",
    "frame_identity_residuals",
    "g_derivative",
    "g_function",
    "gauss_codazzi_residuals",
    "germ_field",
    "graded_connection_residuals",
    "graded_curvature_residuals",
    "hopf_frame_extract",
    "hopf_projection_squares",
    "horosphere_chart",
    "horosphere_germ",
    "jacobi_closed",
    "jacobi_ode_oracle",
    "kahler_angle",
    "maximal_holomorphic_subspace",
    "nonexistence_scan",
    "normal_direction",
    "numeric_geometry",
    "orbit_second_fundamental_form",
    "principal_decomposition",
    "real_eigenspace_residual",
    "rigidity_form_check",
    "sech",
    "special_radius",
    "standard_complex_structure",
    "submanifold_shape_operator",
    "tube_chart",
    "tube_shape_operator",
    "tube_spectrum_closed",
    "totally_real_check",
    "unit_pair_gauss_residual",
]
