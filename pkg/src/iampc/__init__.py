"""Adaptive ARX model predictive control for nonlinear systems.

The package covers the full pipeline: nonlinear benchmark plants and their
fixed-step integration, finite-difference linearization, observer-based
state-space to ARX transformation, per-channel recursive parameter
estimation, a construction-free augmented-Lagrangian MPC solver for both
ARX and state-space models, and a closed-loop benchmark harness with a CLI.
"""

from .dynamics import (
    PlantModel,
    SimState,
    central_difference_jacobian,
    discrete_map,
    fd_jacobians,
    make_bilinear_motor,
    make_cstr,
    make_plant,
    make_two_tank,
    make_van_der_pol,
    plant_names,
    rk4_step,
)
from .errors import (
    ClosedLoopAbortError,
    CovarianceCorruptionError,
    EstimatorFailureError,
    IampcError,
    IntegrationFailureError,
    LinearizationFailureError,
    ObservabilityError,
    SolverFailureError,
    UnsupportedDimensionError,
)
from .estimation import (
    ArxEkfState,
    JointEkfState,
    arx_ekf_update,
    init_arx_ekf,
    init_joint_ekf,
    joint_ekf_step,
)
from .harness import (
    ClosedLoopLog,
    EkfConfig,
    Metrics,
    NoiseConfig,
    RampRef,
    RandomStepRef,
    ScenarioConfig,
    SquareRef,
    compute_metrics,
    csv_rows_match,
    default_scenario,
    inject_process_noise,
    make_reference,
    run_ia_mpc,
    run_sl_mpc,
    write_log_csv,
    write_metrics,
)
from .linearization import (
    ContinuousLinearization,
    LinearSsModel,
    euler_discretize,
    linearize_continuous,
    linearized_model,
    simulate_ss,
)
from .mpcsolver import (
    MpcConfig,
    MpcProblem,
    MpcSolution,
    WarmStart,
    objective_value,
    shift_warm_start,
    solve_arx_mpc,
    solve_ss_mpc,
)
from .ss2arx import (
    ArxModel,
    ObserverDesign,
    Regressor,
    arx_predict,
    build_regressor,
    flatten_theta,
    observability_matrix,
    place_observer_gain,
    simulate_arx,
    ss_to_arx,
    ss_to_arx_cayley,
    theta_matrix,
    unflatten_theta,
)

__version__ = "0.1.0"

__all__ = [
    "ArxEkfState",
    "ArxModel",
    "ClosedLoopAbortError",
    "ClosedLoopLog",
    "ContinuousLinearization",
    "CovarianceCorruptionError",
    "EkfConfig",
    "EstimatorFailureError",
    "IampcError",
    "IntegrationFailureError",
    "JointEkfState",
    "LinearSsModel",
    "LinearizationFailureError",
    "Metrics",
    "MpcConfig",
    "MpcProblem",
    "MpcSolution",
    "NoiseConfig",
    "ObservabilityError",
    "ObserverDesign",
    "PlantModel",
    "RampRef",
    "RandomStepRef",
    "Regressor",
    "ScenarioConfig",
    "SimState",
    "SolverFailureError",
    "SquareRef",
    "UnsupportedDimensionError",
    "WarmStart",
    "arx_ekf_update",
    "arx_predict",
    "build_regressor",
    "central_difference_jacobian",
    "compute_metrics",
    "csv_rows_match",
    "default_scenario",
    "discrete_map",
    "euler_discretize",
    "fd_jacobians",
    "flatten_theta",
    "init_arx_ekf",
    "init_joint_ekf",
    "inject_process_noise",
    "joint_ekf_step",
    "linearize_continuous",
    "linearized_model",
    "make_bilinear_motor",
    "make_cstr",
    "make_plant",
    "make_reference",
    "make_two_tank",
    "make_van_der_pol",
    "objective_value",
    "observability_matrix",
    "place_observer_gain",
    "plant_names",
    "rk4_step",
    "run_ia_mpc",
    "run_sl_mpc",
    "shift_warm_start",
    "simulate_arx",
    "simulate_ss",
    "solve_arx_mpc",
    "solve_ss_mpc",
    "ss_to_arx",
    "ss_to_arx_cayley",
    "theta_matrix",
    "unflatten_theta",
    "write_log_csv",
    "write_metrics",
]
