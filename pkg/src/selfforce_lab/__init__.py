"""Averaged electromagnetic self-force of a uniformly charged spherical test body."""

__version__ = "0.1.0"

from .kernels import (  # noqa: E402
    DomainError,
    MeasurementWindow,
    TestBody,
    electrostatic_limit_force,
    geometric_factor_A_hat,
    kernel_f_hat,
    kernel_g_hat,
    rr_force_hat_BR,
)
from .quadrature import (  # noqa: E402
    OscillatorySpec,
    QuadratureError,
    QuadratureSpec,
    integrate,
    integrate_oscillatory_bessel,
    spherical_bessel_j1,
)
from .trajectories import (  # noqa: E402
    BRStepTrajectory,
    RampShape,
    Trajectory,
    evaluate_Q,
    shrink_sequence,
    validate_physicality,
)
from .study import (  # noqa: E402
    ForceReport,
    average_Q_force,
    average_self_force,
    convergence_study,
    decompose,
    no_neutralizing_body_force,
    uncertainty_curves,
)
