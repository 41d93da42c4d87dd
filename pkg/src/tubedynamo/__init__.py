"""tubedynamo: curvature, Ricci-flow and dynamo diagnostics for twisted flux tubes."""

__version__ = "0.1.0"

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    ConfigError,
    DegenerateMetricError,
    DegeneratePlaneError,
    DomainError,
    NumericalError,
    SingularityError,
)
from .geometry import (
    ChartPoint,
    ChristoffelSymbols,
    CurvatureBundle,
    MetricSpec,
    TangentVector,
    christoffel,
    commutator,
    covariant_derivative,
    curvature_bundle,
    euclidean_metric,
    gauss_curvature_2d,
    polar_metric,
    sectional_curvature,
    sphere_metric,
)
from .tube import (
    ConstantProfile,
    FlowField,
    FrenetFrame,
    TabulatedProfile,
    TubeParams,
    TwistState,
    analytic_gauss,
    analytic_r1212,
    analytic_sectional,
    as_profile,
    frenet_frame_helix,
    incompressibility_residual,
    negative_gauss_condition,
    riemann_xyy_tube,
    stretch_coefficient,
    surface_r1212,
    tube_metric_3d,
    tube_surface_metric,
    twist_angle,
    twist_state,
)
from .ricci import (
    DiagonalFlowSolution,
    FlowState,
    RicciEigenSpectrum,
    TubeEigenReport,
    closed_form_diagonal,
    diagonal_flow_solution,
    diagonal_ricci_fn,
    flow_eigenrate,
    generalized_eigh_jacobi,
    pointwise_ricci_fn,
    ricci_eigenproblem,
    ricci_flow_step,
    ricci_flow_trajectory,
    tube_eigen_matrix,
    tube_lyapunov_spectrum,
)
from .dynamo import (
    CLSpectrumInput,
    DynamoVerdict,
    FieldGrowth,
    LyapunovSpectrum,
    chicone_latushkin_lambda,
    dynamo_constraint,
    eps_from_reynolds,
    fast_dynamo_condition,
    field_growth,
    finite_time_lyapunov,
    ideal_lambda,
    infinite_lyapunov,
    metric_from_lyapunov,
    ricci_to_lyapunov,
)
