"""Information geometry of positive-definite matrices.

Monotone metrics, relative g-entropies and the connections they induce,
computed from divided-difference sums in the eigenbasis of the base point.
"""

from .alpha import (
    K_alpha_apply,
    L_alpha_apply,
    L_alpha_inverse,
    alpha_duality_residual,
    alpha_embed,
    alpha_geodesic,
    dual_torsion,
    nabla_alpha,
    nabla_alpha_dual,
)
from .divdiff import KernelTables, dd1, dd1_right, dd2, dd_mixed, divided_difference
from .frechet import apply_kernel, frechet1, frechet2, frechet3, matrix_function
from .gfunctions import (
    AlphaG,
    ExtremeG,
    GFunction,
    MeasureG,
    MixtureG,
    MonotoneF,
    alpha_of,
    g_from_spec,
    h_from_F,
    F_from_h,
    k_of,
    k_sym,
    kernel_c,
    kernel_cbar,
    kernel_cr,
    make_g_alpha,
    make_g_extreme,
    mix,
    transpose,
)
from .ggeometry import (
    ConnectionCoefficients,
    CurvatureTensor,
    Geometry,
    Q_tensor,
    SkewnessTensor,
    conjugate_ode_residual,
    conjugate_residual,
    connection_coefficients,
    curvature_p,
    duality_residual,
    entropy,
    entropy_direct,
    flat_ode_residual,
    metric_connection,
    metric_curvature,
    metric_derivative,
    metric_eval_g,
    nabla_g,
    skewness,
)
from .harness import (
    StochasticMap,
    TrialReport,
    check_entropy_axioms,
    check_metric_monotonicity,
    random_hermitian,
    random_positive,
    sample_cptp,
)
from .kernels import ScalarFunction, ScalarKernel
from .metrics import (
    MonotoneMetric,
    TangentBasis,
    gram_matrix,
    j_apply,
    j_inverse,
    metric_eval,
    metric_from_F,
    metric_from_g,
    named_metric,
    tangent_basis,
)
from .spectral import (
    NotPositiveDefiniteError,
    PositivePoint,
    SpectralDecomposition,
    as_point,
    as_tangent,
    spectral_decompose,
)

__version__ = "0.1.0"
