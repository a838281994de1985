"""Model-space experiment generator: linearized deflection under a tip
load, synthetic IMU logs with optional orientation noise, and
stiffness-sweep tables for inward/outward radial loading.

The deflection model is the exact linear inverse of the estimator
(single K_psi and J_v evaluation at the reference configuration), so
noise-free generate -> estimate round trips are exact for forces in the
column space of J_v.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arm import forward_kinematics, jacobian_v_psi
from .errors import NearStraightConfiguration, SingularStiffness
from .force_estimation import OrientationMeasurement
from .params import THETA_EST_MIN, ArmParameters, Configuration
from .statics import stiffness_config, stiffness_task

SAMPLE_RATE_HZ = 100.0

SWEEP_HEADER = "theta_rad,load_N,disp_m,kxx,kxz,kzx,kzz"


@dataclass(frozen=True)
class LoadCase:
    """One synthetic loading experiment.

    force is the tip force [N] in the base frame; noise_std is the
    per-axis standard deviation [rad] of the orientation noise.
    """

    psi_ref: Configuration
    force: np.ndarray
    tau: np.ndarray = None
    noise_std: float = 0.0
    seed: int = 0
    samples: int = 1

    def __post_init__(self):
        force = np.asarray(self.force, dtype=float)
        if force.shape != (3,):
            raise ValueError(f"force must be a 3-vector, got shape {force.shape}")
        tau = np.zeros(4) if self.tau is None else np.asarray(self.tau, dtype=float)
        if tau.shape != (4,):
            raise ValueError(f"tau must be a 4-vector, got shape {tau.shape}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.noise_std < 0.0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")
        object.__setattr__(self, "force", force)
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class SweepSpec:
    """Grid for a stiffness sweep: theta range [rad], one bending-plane
    angle, loading direction, and load range [N]."""

    theta_start: float
    theta_stop: float
    theta_step: float
    delta: float = 0.0
    direction: str = "inward"
    load_start: float = 0.0
    load_stop: float = 1.0
    load_step: float = 0.2

    def __post_init__(self):
        if self.theta_step <= 0.0 or self.load_step <= 0.0:
            raise ValueError("grid steps must be positive")
        if self.theta_stop < self.theta_start or self.load_stop < self.load_start:
            raise ValueError("grid stop must not precede start")
        if self.direction not in ("inward", "outward"):
            raise ValueError(f"direction must be 'inward' or 'outward', got {self.direction!r}")

    def theta_grid(self) -> np.ndarray:
        return _grid(self.theta_start, self.theta_stop, self.theta_step)

    def load_grid(self) -> np.ndarray:
        return _grid(self.load_start, self.load_stop, self.load_step)


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def simulate_deflection(params: ArmParameters, case: LoadCase,
                        theta_min: float = THETA_EST_MIN):
    """Linearized configuration deflection under the case's tip force.

    Returns (delta_psi, psi_loaded) with
    delta_psi = K_psi(psi_ref, tau)^-1 (J_v(psi_ref))^T force.
    """
    if case.psi_ref.theta < theta_min:
        raise NearStraightConfiguration(
            f"reference theta {case.psi_ref.theta:.4f} rad is below the validity floor {theta_min:g} rad")
    k_psi = stiffness_config(params, case.psi_ref, case.tau)
    if abs(np.linalg.det(k_psi)) <= 1e-14:
        raise SingularStiffness(
            f"|det K_psi| = {abs(np.linalg.det(k_psi)):.3e} is numerically singular")
    jv = jacobian_v_psi(params, case.psi_ref)
    delta_psi = np.linalg.solve(k_psi, jv.T @ case.force)
    psi_loaded = Configuration(case.psi_ref.theta + delta_psi[0],
                               case.psi_ref.delta + delta_psi[1])
    return delta_psi, psi_loaded


def synthesize_imu_log(params: ArmParameters, case: LoadCase,
                       theta_min: float = THETA_EST_MIN):
    """Orientation samples of the loaded arm at 100 Hz.

    Each sample is the forward-kinematics rotation at the deflected
    configuration, premultiplied by an independent small rotation with
    per-axis standard deviation noise_std. Deterministic under the seed.
    """
    _, psi_loaded = simulate_deflection(params, case, theta_min)
    r_true = forward_kinematics(params, psi_loaded).rotation
    times = np.arange(case.samples) / SAMPLE_RATE_HZ
    if case.noise_std == 0.0:
        rotations = np.broadcast_to(r_true, (case.samples, 3, 3))
    else:
        rng = np.random.default_rng(case.seed)
        noise = rng.normal(0.0, case.noise_std, size=(case.samples, 3))
        rotations = kernels.perturb_rotations(r_true, noise)
    return [OrientationMeasurement(timestamp=float(t), rotation=np.array(r))
            for t, r in zip(times, rotations)]


def radial_direction(psi: Configuration, direction: str) -> np.ndarray:
    """Unit in-plane radial load direction at a configuration.

    'inward' pushes the tip with the bend (toward the arc center),
    'outward' against it.
    """
    c, s = np.cos(psi.delta), np.sin(psi.delta)
    ct, st = np.cos(psi.theta), np.sin(psi.theta)
    unit = np.array([ct * c, ct * s, -st])
    if direction == "outward":
        return -unit
    if direction != "inward":
        raise ValueError(f"direction must be 'inward' or 'outward', got {direction!r}")
    return unit


def stiffness_sweep(params: ArmParameters, spec: SweepSpec,
                    theta_min: float = THETA_EST_MIN):
    """Rows (theta, load, |tip displacement|, in-plane K_X entries).

    For each grid point the load is applied along the spec's radial
    direction; K_X is evaluated with the generalized force of that load.
    The in-plane entries are K_X restricted to the bending plane
    (in-plane horizontal axis first, base z second).
    """
    rows = []
    for theta in spec.theta_grid():
        psi = Configuration(float(theta), spec.delta)
        unit = radial_direction(psi, spec.direction)
        jv = jacobian_v_psi(params, psi)
        k_psi = stiffness_config(params, psi)
        c, s = np.cos(psi.delta), np.sin(psi.delta)
        in_plane = np.array([[c, s, 0.0], [0.0, 0.0, 1.0]])
        for load in spec.load_grid():
            force = float(load) * unit
            delta_psi = np.linalg.solve(k_psi, jv.T @ force)
            disp = float(np.linalg.norm(jv @ delta_psi))
            k_x = stiffness_task(params, psi, f_ext=force, theta_min=theta_min)
            k2 = in_plane @ k_x @ in_plane.T
            rows.append((float(theta), float(load), disp,
                         k2[0, 0], k2[0, 1], k2[1, 0], k2[1, 1]))
    return rows


def write_sweep_csv(path, rows) -> None:
    """Write sweep rows as CSV under the published header."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(SWEEP_HEADER + "\n")
        for row in rows:
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
