"""Tip-force estimation from end-disk orientation measurements.

Pipeline: project each measured orientation onto the bending plane
(theta = acos(r33), delta = atan2(r23, r13)), average a window of
projected configurations, form the deformation against the commanded
reference configuration, then

    F*  = K_psi(psi_ref, tau) * dpsi
    F   = pinv(J_v(psi_ref)^T) * F*

The estimate necessarily lies in the 2-dof column space of J_v: only the
force component that does work on (theta, delta) is observable from
orientation alone.

The IMU is assumed to measure the twist-compensated end frame whose first
tendon axis tracks the base one; an IMU mounted on the raw end-disk frame
instead would see an extra -delta twist about the disk normal, which this
projection ignores by construction (it only reads the third column).
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyLog, MalformedRow, NearStraightConfiguration, \
    NonMonotonicTimestamps, UnsupportedVersion
from .params import THETA_EST_MIN, ArmParameters, Configuration, wrap_angle
from .rotations import nearest_rotation, matrix_to_quat, quat_to_matrix
from .statics import pseudoinverse, stiffness_config
from .arm import jacobian_v_psi

LOG_HEADER = "imu-log,v1"

# tolerance for |quaternion norm - 1| in the log format
_QUAT_NORM_TOL = 1e-3


@dataclass(frozen=True)
class OrientationMeasurement:
    """One timestamped end-disk orientation in the arm base frame."""

    timestamp: float
    rotation: np.ndarray


@dataclass(frozen=True)
class ForceEstimate:
    """Estimated tip force and the quantities it was computed from.

    f_star_hat:  2-vector [N m], generalized force K_psi * dpsi
    f_ext_hat:   3-vector [N], tip force in the base frame
    condition_sigma_ratio: sigma2/sigma1 of J_v at the reference
    delta_psi:   measured-minus-reference configuration [rad]
    psi_bar:     averaged measured configuration [rad]
    n_samples:   samples actually averaged
    """

    f_star_hat: np.ndarray
    f_ext_hat: np.ndarray
    condition_sigma_ratio: float
    delta_psi: np.ndarray
    psi_bar: np.ndarray
    n_samples: int


def load_calibration(path) -> np.ndarray:
    """Base-to-world rotation offset from a calibration JSON file.

    Schema: {"R_offset": [[...3x3...]]}. Hand-entered matrices are
    projected onto SO(3), tolerating up to 1e-3 of rounding.
    """
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if "R_offset" not in doc:
        raise ValueError(f"calibration file {path}: missing key 'R_offset'")
    return nearest_rotation(np.asarray(doc["R_offset"], dtype=float), tol=1e-3)


def world_to_base(r_world, r_offset) -> np.ndarray:
    """Re-express a world-frame orientation in the arm base frame.

    Applies the fixed base-to-world offset from the calibration config:
    returns R_offset^T @ R_world. Both inputs must be within 1e-6 of a
    proper rotation (NonOrthonormal otherwise).
    """
    r_world = nearest_rotation(r_world)
    r_offset = nearest_rotation(r_offset)
    return r_offset.T @ r_world


def project_to_configuration(r_bar):
    """(theta_bar, delta_bar, ambiguous) from one orientation matrix.

    theta_bar = acos(r33) in [0, pi]; delta_bar = atan2(r23, r13). When
    sin(theta_bar) < 1e-6 the bending plane is unobservable: delta_bar is
    reported as 0 with the ambiguity flag set.
    """
    r_bar = np.asarray(r_bar, dtype=float)
    theta_bar = math.acos(min(1.0, max(-1.0, r_bar[2, 2])))
    if abs(math.sin(theta_bar)) < 1e-6:
        return theta_bar, 0.0, True
    return theta_bar, math.atan2(r_bar[1, 2], r_bar[0, 2]), False


def estimate_force(params: ArmParameters, psi_ref: Configuration, samples,
                   tau=None, window=None, theta_min: float = THETA_EST_MIN) -> ForceEstimate:
    """Estimate the external tip force from orientation samples.

    Averages the last `window` projected configurations (all samples when
    window is None; clamped with a warning when it exceeds the log
    length). tau defaults to zero tendon tensions.
    """
    if psi_ref.theta < theta_min:
        raise NearStraightConfiguration(
            f"reference theta {psi_ref.theta:.4f} rad is below the validity floor {theta_min:g} rad")
    samples = list(samples)
    if not samples:
        raise EmptyLog("no orientation samples to estimate from")
    if window is None:
        window = len(samples)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(samples):
        warnings.warn(
            f"window {window} exceeds log length {len(samples)}; using all samples",
            UserWarning, stacklevel=2)
        window = len(samples)

    rotations = np.stack([s.rotation for s in samples[-window:]])
    theta_bar, delta_bar, _ = kernels.project_batch(rotations)
    # plain mean for theta; circular mean for delta so samples straddling
    # +-pi do not cancel
    psi_bar = np.array([
        float(np.mean(theta_bar)),
        math.atan2(float(np.mean(np.sin(delta_bar))), float(np.mean(np.cos(delta_bar)))),
    ])
    delta_psi = np.array([psi_bar[0] - psi_ref.theta,
                          wrap_angle(psi_bar[1] - psi_ref.delta)])

    k_psi = stiffness_config(params, psi_ref, tau)
    f_star = k_psi @ delta_psi
    jv = jacobian_v_psi(params, psi_ref)
    f_ext = pseudoinverse(jv.T) @ f_star
    sigma = np.linalg.svd(jv, compute_uv=False)
    return ForceEstimate(f_star_hat=f_star,
                         f_ext_hat=f_ext,
                         condition_sigma_ratio=float(sigma[1] / sigma[0]),
                         delta_psi=delta_psi,
                         psi_bar=psi_bar,
                         n_samples=window)


def _parse_row(line_number: int, line: str) -> OrientationMeasurement:
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != 5:
        raise MalformedRow(line_number, f"expected 5 fields t,qw,qx,qy,qz, got {len(fields)}")
    try:
        values = [float(f) for f in fields]
    except ValueError:
        raise MalformedRow(line_number, f"non-numeric field in {line!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise MalformedRow(line_number, "non-finite field")
    t, quat = values[0], np.array(values[1:])
    norm = float(np.linalg.norm(quat))
    if not abs(norm - 1.0) <= _QUAT_NORM_TOL:
        raise MalformedRow(line_number, f"quaternion norm {norm:.6f} outside 1 +- {_QUAT_NORM_TOL}")
    return OrientationMeasurement(timestamp=t, rotation=quat_to_matrix(quat))


def parse_imu_log(source):
    """Parse an IMU orientation log (path or iterable of lines).

    Format: first line exactly `imu-log,v1`, then `t,qw,qx,qy,qz` rows
    (seconds, scalar-first unit quaternion within 1e-3, re-normalized on
    load). Timestamps must not decrease. Blank lines are skipped.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            return _parse_lines(handle)
    return _parse_lines(source)


def _parse_lines(lines):
    samples = []
    header_seen = False
    last_t = None
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not header_seen:
            if line != LOG_HEADER:
                raise UnsupportedVersion(f"expected header {LOG_HEADER!r}, got {line!r}")
            header_seen = True
            continue
        if not line.strip():
            continue
        sample = _parse_row(line_number, line)
        if last_t is not None and sample.timestamp < last_t:
            raise NonMonotonicTimestamps(
                f"line {line_number}: timestamp {sample.timestamp!r} is before {last_t!r}")
        last_t = sample.timestamp
        samples.append(sample)
    if not header_seen:
        raise UnsupportedVersion("empty input: missing header line")
    return samples


def write_imu_log(path, samples) -> None:
    """Write samples in the log format (UTF-8, LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(LOG_HEADER + "\n")
        for sample in samples:
            w, x, y, z = (float(v) for v in matrix_to_quat(sample.rotation))
            handle.write(f"{float(sample.timestamp)!r},{w!r},{x!r},{y!r},{z!r}\n")
