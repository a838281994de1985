"""Small fixed-size rotation utilities: elementary rotations, quaternions,
Rodrigues exponential, and projection onto SO(3).

Quaternions are scalar-first (w, x, y, z) throughout.
"""

import numpy as np

from .errors import NonOrthonormal


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s],
                     [0.0, 1.0, 0.0],
                     [-s, 0.0, c]])


def skew(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


def rodrigues(v) -> np.ndarray:
    """Rotation matrix exp(skew(v)) for a rotation vector v [rad]."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    k = skew(v)
    if angle < 1e-8:
        # second-order series; exact to ~1e-24 at this scale
        return np.eye(3) + k + 0.5 * (k @ k)
    a = np.sin(angle) / angle
    b = (1.0 - np.cos(angle)) / angle ** 2
    return np.eye(3) + a * k + b * (k @ k)


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix of a scalar-first quaternion. Normalizes the input."""
    w, x, y, z = np.asarray(q, dtype=float) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def matrix_to_quat(r) -> np.ndarray:
    """Scalar-first unit quaternion of a rotation matrix (w >= 0 branch)."""
    r = np.asarray(r, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    if tr > 0.0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (r[2, 1] - r[1, 2]) / s,
                      (r[0, 2] - r[2, 0]) / s,
                      (r[1, 0] - r[0, 1]) / s])
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array([(r[2, 1] - r[1, 2]) / s,
                      0.25 * s,
                      (r[0, 1] + r[1, 0]) / s,
                      (r[0, 2] + r[2, 0]) / s])
    elif r[1, 1] >= r[2, 2]:
        s = np.sqrt(1.0 - r[0, 0] + r[1, 1] - r[2, 2]) * 2.0
        q = np.array([(r[0, 2] - r[2, 0]) / s,
                      (r[0, 1] + r[1, 0]) / s,
                      0.25 * s,
                      (r[1, 2] + r[2, 1]) / s])
    else:
        s = np.sqrt(1.0 - r[0, 0] - r[1, 1] + r[2, 2]) * 2.0
        q = np.array([(r[1, 0] - r[0, 1]) / s,
                      (r[0, 2] + r[2, 0]) / s,
                      (r[1, 2] + r[2, 1]) / s,
                      0.25 * s])
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def nearest_rotation(m, tol: float = 1e-6) -> np.ndarray:
    """Project a matrix onto SO(3) via SVD.

    Raises NonOrthonormal when the input deviates from its projection by
    more than tol (max-abs entry) or is not a proper rotation.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise NonOrthonormal(f"expected a 3x3 matrix, got shape {m.shape}")
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    if np.max(np.abs(r - m)) > tol:
        raise NonOrthonormal(
            f"matrix deviates from the nearest rotation by {np.max(np.abs(r - m)):.3e} (> {tol:g})")
    return r
