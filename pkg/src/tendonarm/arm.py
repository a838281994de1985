"""Constant-curvature kinematics of the single-segment four-tendon arm.

Forward kinematics composes RotZ(delta) * [RotY(theta), arc chord] *
RotZ(-delta): the end disk twists back by delta so its first-tendon axis
stays aligned with the base one. The tip position and the linear-velocity
Jacobian divide by theta; below THETA_SMALL their analytic limits are
substituted (straight arm: tip at [0, 0, L], J_v columns (L/2) * plane
direction and zero).
"""

from dataclasses import dataclass

import numpy as np

from .params import ArmParameters, Configuration

# Below this bending angle the closed forms that divide by theta are
# replaced by their analytic limits (exact to O(theta^2) ~ 1e-12).
THETA_SMALL = 1e-6


@dataclass(frozen=True)
class Transform:
    """Rigid pose: 3x3 rotation plus position [m] of frame {G} in frame {B}."""

    rotation: np.ndarray
    position: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        p = np.asarray(self.position, dtype=float)
        if r.shape != (3, 3) or p.shape != (3,):
            raise ValueError("Transform needs a 3x3 rotation and a 3-vector position")
        if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-12:
            raise ValueError("rotation is not orthonormal within 1e-12")
        if abs(np.linalg.det(r) - 1.0) > 1e-12:
            raise ValueError("rotation determinant differs from +1 by more than 1e-12")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "position", p)


@dataclass(frozen=True)
class JacobianSet:
    """The three configuration-space Jacobians at one configuration.

    j_q_psi: 4x2, tendon displacement rates [m/rad]
    j_v_psi: 3x2, tip linear velocity [m/rad]
    j_w_psi: 3x2, tip angular velocity [rad/rad]
    """

    j_q_psi: np.ndarray
    j_v_psi: np.ndarray
    j_w_psi: np.ndarray

    @property
    def j_x_psi(self) -> np.ndarray:
        """6x2 geometric Jacobian, linear rows stacked over angular rows."""
        return np.vstack([self.j_v_psi, self.j_w_psi])


def _g1(theta: float) -> float:
    # (theta*sin(theta) + cos(theta) - 1) / theta^2 in a cancellation-free
    # product form; limit 1/2 at theta -> 0.
    h = 0.5 * theta
    return 2.0 * np.sin(h) * (theta * np.cos(h) - np.sin(h)) / theta ** 2


def _g2(theta: float) -> float:
    # (theta*cos(theta) - sin(theta)) / theta^2; limit 0 at theta -> 0.
    return (theta * np.cos(theta) - np.sin(theta)) / theta ** 2


def _g3(theta: float) -> float:
    # (1 - cos(theta)) / theta in half-angle form; limit 0 at theta -> 0.
    h = 0.5 * theta
    return 2.0 * np.sin(h) ** 2 / theta


def forward_kinematics(params: ArmParameters, psi: Configuration) -> Transform:
    """Tip pose of frame {G} expressed in the base frame {B}.

    Only the position divides by theta, so only it takes the sub-threshold
    limit branch; the rotation's closed form is regular everywhere (within
    sin(theta) < 1e-6 of identity below the threshold) and keeps the pose
    continuous across the switch for every delta. theta = 0 exactly maps
    to the identity so the straight pose is bitwise delta-independent.
    """
    length = params.backbone_length
    theta, delta = psi.theta, psi.delta
    if theta == 0.0:
        return Transform(rotation=np.eye(3), position=np.array([0.0, 0.0, length]))
    c, s = np.cos(delta), np.sin(delta)
    ct, st = np.cos(theta), np.sin(theta)
    # RotZ(delta) RotY(theta) RotZ(-delta), expanded
    rotation = np.array([
        [c * c * ct + s * s, c * s * (ct - 1.0), c * st],
        [c * s * (ct - 1.0), s * s * ct + c * c, s * st],
        [-c * st, -s * st, ct],
    ])
    if theta < THETA_SMALL:
        position = np.array([0.0, 0.0, length])
    else:
        chord = length * _g3(theta)
        position = np.array([c * chord, s * chord, length * st / theta])
    return Transform(rotation=rotation, position=position)


def inverse_kinematics(params: ArmParameters, psi: Configuration) -> np.ndarray:
    """Tendon displacements q [m] for a configuration.

    q[i] = r * cos(delta + i*beta) * theta; positive means the tendon is
    shortened on the arm side. Tendon 1 (index 0) lies on the base x axis.
    """
    angles = psi.delta + np.arange(4) * params.tendon_division
    return params.pitch_radius * np.cos(angles) * psi.theta


def jacobian_q_psi(params: ArmParameters, psi: Configuration) -> np.ndarray:
    """4x2 Jacobian of tendon displacements w.r.t. (theta, delta)."""
    angles = psi.delta + np.arange(4) * params.tendon_division
    r = params.pitch_radius
    return np.column_stack([r * np.cos(angles), -r * np.sin(angles) * psi.theta])


def jacobian_v_psi(params: ArmParameters, psi: Configuration) -> np.ndarray:
    """3x2 Jacobian of the tip position w.r.t. (theta, delta)."""
    length = params.backbone_length
    theta, delta = psi.theta, psi.delta
    c, s = np.cos(delta), np.sin(delta)
    if theta < THETA_SMALL:
        return np.array([[0.5 * length * c, 0.0],
                         [0.5 * length * s, 0.0],
                         [0.0, 0.0]])
    g1, g2, g3 = _g1(theta), _g2(theta), _g3(theta)
    return length * np.array([[c * g1, -s * g3],
                              [s * g1, c * g3],
                              [g2, 0.0]])


def jacobian_w_psi(psi: Configuration) -> np.ndarray:
    """3x2 Jacobian of the tip angular velocity w.r.t. (theta, delta).

    Singularity-free; at theta = 0 the second column vanishes exactly (the
    two delta rotations cancel on a straight arm).
    """
    c, s = np.cos(psi.delta), np.sin(psi.delta)
    ct, st = np.cos(psi.theta), np.sin(psi.theta)
    return np.array([[-s, -c * st],
                     [c, -s * st],
                     [0.0, 1.0 - ct]])


def jacobians(params: ArmParameters, psi: Configuration) -> JacobianSet:
    """All three Jacobians at one configuration."""
    return JacobianSet(j_q_psi=jacobian_q_psi(params, psi),
                       j_v_psi=jacobian_v_psi(params, psi),
                       j_w_psi=jacobian_w_psi(psi))
