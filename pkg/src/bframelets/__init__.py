"""B-spline tight framelets: exact construction, evaluation and Gaussian asymptotics."""

__version__ = "0.1.0"

from ._rational import SqrtRational
from .errors import (
    FrameletError,
    InvalidInputError,
    InvalidOrderError,
    NumericalError,
    PerturbationError,
    QuadratureError,
    SmoothnessError,
    ToleranceError,
    UnsupportedCaseError,
)
from .framelets import (
    FrameletId,
    MaskSpec,
    calderon_sum,
    framelet_derivative_eval,
    framelet_eval,
    framelet_eval_fourier_inversion,
    framelet_eval_recurrence,
    framelet_fourier,
    framelet_piecewise,
    framelet_recurrence_piecewise,
    refinement_symbol,
    uep_residual,
    wavelet_mask,
)
from .gaussian import (
    PAPER_TABLE1,
    BesselEstimatorConfig,
    FrameBoundReport,
    GaussianFrameletId,
    bessel_bound,
    box_gaussian_deviation,
    gaussian_frame_bounds,
    gaussian_framelet_eval,
    gaussian_framelet_fourier,
    perturbed_frame_bounds,
    residual_fourier,
    sup_deviation,
)
from .piecewise import PiecewisePolynomial
from .quadrature import QuadratureConfig
from .splinecore import (
    DirectionSet,
    box_spline_eval,
    box_spline_eval_fourier_inversion,
    box_spline_fourier,
    box_spline_piecewise,
    bspline_derivative_eval,
    bspline_eval,
    piecewise_derivative,
)
from .transform import (
    IndexBox,
    TestFunction,
    coefficient_via_difference,
    difference_quarter,
    discretize_Tn,
    framelet_coefficient,
    get_test_function,
    parseval_ratio,
    parseval_ratio_gaussian,
    reconstruct_partial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
