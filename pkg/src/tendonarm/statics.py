"""Statics and stiffness of the arm.

Energy and equilibrium follow the virtual-work model: the bent NiTi
backbone stores E = theta^2 * E_p I_p / (2 L), and tendon tensions tau
balance an external wrench through (J_q)^T tau + (J_x)^T w = grad E.

The configuration-space stiffness is implemented exactly as printed:

    K_psi = H_psi - [d(J_q)^T/dpsi] tau - (J_q)^T K_q J_q

With the reference arm the tendon-coupling term dominates the backbone
term (~0.80 vs ~0.092 N m/rad) so K_psi(1,1) is negative; deflections
computed from it point against the applied generalized force. The sign is
kept as-is; estimation and simulation invert the same matrix, so round
trips are unaffected.
"""

import warnings

import numpy as np

from .arm import jacobian_q_psi, jacobian_v_psi, jacobians
from .errors import NearStraightConfiguration, RankDeficient, ResidualTooLarge
from .params import THETA_EST_MIN, ArmParameters, Configuration

# step for the finite-difference tensor term of the task-space stiffness
_PINV_FD_STEP = 1e-6


class SlackTensionWarning(UserWarning):
    """Solved tendon tensions contain negative (slack) entries."""


def elastic_energy(params: ArmParameters, psi: Configuration) -> float:
    """Stored bending energy [J]; quadratic in theta, independent of delta."""
    return psi.theta ** 2 * params.backbone_youngs * params.backbone_inertia / (
        2.0 * params.backbone_length)


def grad_elastic_energy(params: ArmParameters, psi: Configuration) -> np.ndarray:
    """(dE/dtheta, dE/ddelta) [N m]; the delta component is always zero."""
    return np.array([
        psi.theta * params.backbone_youngs * params.backbone_inertia / params.backbone_length,
        0.0,
    ])


def energy_hessian(params: ArmParameters) -> np.ndarray:
    """2x2 Hessian of the elastic energy; single nonzero entry E_p I_p / L."""
    h = np.zeros((2, 2))
    h[0, 0] = params.backbone_youngs * params.backbone_inertia / params.backbone_length
    return h


def tendon_stiffness(params: ArmParameters) -> np.ndarray:
    """4x4 diagonal tendon stiffness, each entry E_T A / L [N/m]."""
    k = params.tendon_youngs * params.tendon_area / params.backbone_length
    return np.eye(4) * k


def generalized_force(params: ArmParameters, psi: Configuration, tau=None) -> np.ndarray:
    """Configuration-space force grad E - (J_q)^T tau [N m]."""
    if tau is None:
        tau = np.zeros(4)
    tau = np.asarray(tau, dtype=float)
    return grad_elastic_energy(params, psi) - jacobian_q_psi(params, psi).T @ tau


def pseudoinverse(m, rcond: float = 1e-8) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below rcond * sigma_max are truncated.
    """
    return np.linalg.pinv(np.asarray(m, dtype=float), rcond=rcond)


def _min_norm_solve(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Minimum-norm solution of a x = b; raises if inconsistent beyond tol."""
    x = pseudoinverse(a) @ b
    residual = np.linalg.norm(a @ x - b)
    if residual > tol:
        raise ResidualTooLarge(
            f"equilibrium residual {residual:.3e} exceeds {tol:g}; "
            "the tendons cannot balance this wrench")
    return x


def solve_tendon_tensions(params: ArmParameters, psi: Configuration, w_ext) -> np.ndarray:
    """Minimum-norm tendon tensions [N] balancing an external wrench.

    Solves the 2-equation, 4-unknown equilibrium
    (J_q)^T tau = grad E - (J_x)^T w_ext. Negative entries are returned
    as-is with a SlackTensionWarning; clamping would break the residual.
    """
    w_ext = np.asarray(w_ext, dtype=float)
    if w_ext.shape != (6,):
        raise ValueError(f"w_ext must be a 6-vector (force, moment), got shape {w_ext.shape}")
    jac = jacobians(params, psi)
    rhs = grad_elastic_energy(params, psi) - jac.j_x_psi.T @ w_ext
    tau = _min_norm_solve(jac.j_q_psi.T, rhs)
    if np.any(tau < 0.0):
        warnings.warn("solved tendon tensions contain negative (slack) entries",
                      SlackTensionWarning, stacklevel=2)
    return tau


def _jq_transpose_partials(params: ArmParameters, psi: Configuration):
    """Analytic (d(J_q)^T/dtheta, d(J_q)^T/ddelta), each 2x4."""
    angles = psi.delta + np.arange(4) * params.tendon_division
    r = params.pitch_radius
    d_theta = np.vstack([np.zeros(4), -r * np.sin(angles)])
    d_delta = np.vstack([-r * np.sin(angles), -r * np.cos(angles) * psi.theta])
    return d_theta, d_delta


def stiffness_config(params: ArmParameters, psi: Configuration, tau=None) -> np.ndarray:
    """2x2 configuration-space stiffness K_psi [N m/rad].

    The tension-coupling (active) term uses analytic derivatives of J_q;
    it vanishes for tau = 0, leaving the symmetric passive part.
    """
    if tau is None:
        tau = np.zeros(4)
    tau = np.asarray(tau, dtype=float)
    jq = jacobian_q_psi(params, psi)
    d_theta, d_delta = _jq_transpose_partials(params, psi)
    active = np.column_stack([d_theta @ tau, d_delta @ tau])
    return energy_hessian(params) - active - jq.T @ tendon_stiffness(params) @ jq


def stiffness_task(params: ArmParameters, psi: Configuration, tau=None,
                   f_ext=None, theta_min: float = THETA_EST_MIN) -> np.ndarray:
    """3x3 task-space stiffness K_X [N/m].

        K_X = [d(J_v^T)+/dpsi] F* J_v+ + (J_v^T)+ K_psi J_v+

    The pseudoinverse-derivative tensor is evaluated by central finite
    differences (step 1e-6). F* is taken as (J_v)^T f_ext when a tip force
    is supplied, else zero.
    """
    if psi.theta < theta_min:
        raise NearStraightConfiguration(
            f"theta {psi.theta:.4f} rad is below the validity floor {theta_min:g} rad")
    jv = jacobian_v_psi(params, psi)
    sigma = np.linalg.svd(jv, compute_uv=False)
    if sigma[1] < 1e-8 * sigma[0]:
        raise RankDeficient(
            f"sigma2/sigma1 = {sigma[1] / sigma[0]:.3e}; too close to the straight configuration")
    f_star = np.zeros(2) if f_ext is None else jv.T @ np.asarray(f_ext, dtype=float)

    h = _PINV_FD_STEP
    cols = []
    for step in ((h, 0.0), (0.0, h)):
        plus = pseudoinverse(
            jacobian_v_psi(params, Configuration(psi.theta + step[0], psi.delta + step[1])).T)
        minus = pseudoinverse(
            jacobian_v_psi(params, Configuration(psi.theta - step[0], psi.delta - step[1])).T)
        cols.append((plus - minus) / (2.0 * h) @ f_star)
    tensor_term = np.column_stack(cols)

    jv_pinv = pseudoinverse(jv)
    k_psi = stiffness_config(params, psi, tau)
    return tensor_term @ jv_pinv + pseudoinverse(jv.T) @ k_psi @ jv_pinv
