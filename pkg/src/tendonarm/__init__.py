"""Kinematics, statics, stiffness, and IMU-based tip-force estimation for
a single-segment, four-tendon, constant-curvature continuum arm.

All library computation is SI (m, N, Pa, rad). The CLI (`tendonarm`)
speaks degrees and millimetres where that helps an operator.
"""

__version__ = "0.1.0"

from .params import ArmParameters, Configuration, THETA_EST_MIN, wrap_angle
from .arm import (
    THETA_SMALL,
    JacobianSet,
    Transform,
    forward_kinematics,
    inverse_kinematics,
    jacobian_q_psi,
    jacobian_v_psi,
    jacobian_w_psi,
    jacobians,
)
from .statics import (
    SlackTensionWarning,
    elastic_energy,
    energy_hessian,
    generalized_force,
    grad_elastic_energy,
    pseudoinverse,
    solve_tendon_tensions,
    stiffness_config,
    stiffness_task,
    tendon_stiffness,
)
from .force_estimation import (
    ForceEstimate,
    OrientationMeasurement,
    estimate_force,
    load_calibration,
    parse_imu_log,
    project_to_configuration,
    world_to_base,
    write_imu_log,
)
from .loadsim import (
    LoadCase,
    SweepSpec,
    radial_direction,
    simulate_deflection,
    stiffness_sweep,
    synthesize_imu_log,
    write_sweep_csv,
)
from . import errors, kernels

__all__ = [
    "ArmParameters", "Configuration", "THETA_EST_MIN", "THETA_SMALL", "wrap_angle",
    "Transform", "JacobianSet",
    "forward_kinematics", "inverse_kinematics",
    "jacobian_q_psi", "jacobian_v_psi", "jacobian_w_psi", "jacobians",
    "elastic_energy", "grad_elastic_energy", "energy_hessian", "tendon_stiffness",
    "generalized_force", "solve_tendon_tensions", "SlackTensionWarning",
    "stiffness_config", "stiffness_task", "pseudoinverse",
    "OrientationMeasurement", "ForceEstimate", "estimate_force",
    "project_to_configuration", "world_to_base", "load_calibration",
    "parse_imu_log", "write_imu_log",
    "LoadCase", "SweepSpec", "simulate_deflection", "synthesize_imu_log",
    "stiffness_sweep", "radial_direction", "write_sweep_csv",
    "errors", "kernels",
]
