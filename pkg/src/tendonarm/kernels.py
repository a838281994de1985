"""Batch kernels for the hot per-sample loops: forward-kinematics poses,
orientation-to-configuration projection, and noise perturbation of a
rotation.

Each kernel has a pure-numpy implementation and a numba @njit twin. The
numba path is used when numba imports cleanly; set the environment
variable TENDONARM_NO_NUMBA=1 to force the numpy path. ACTIVE_IMPL names
the selected path. The two paths agree to ~1e-15 (floating-point
summation order differs), not bitwise; byte-level reproducibility holds
per path. benchmarks/bench_kernels.py compares their throughput.
"""

import os

import numpy as np

from .arm import THETA_SMALL

NUMBA_ENV = "TENDONARM_NO_NUMBA"

# delta is reported as 0 with the ambiguity flag set when |sin(theta)| is
# below this (projection onto the bending plane degenerates)
_PROJ_EPS = 1e-6


# --------------------- pure numpy ---------------------

def fk_pose_batch_numpy(theta, delta, length):
    """Tip rotations (n,3,3) and positions (n,3) for arrays of configurations."""
    theta = np.asarray(theta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    n = theta.shape[0]
    c, s = np.cos(delta), np.sin(delta)
    ct, st = np.cos(theta), np.sin(theta)

    rot = np.empty((n, 3, 3))
    rot[:, 0, 0] = c * c * ct + s * s
    rot[:, 0, 1] = c * s * (ct - 1.0)
    rot[:, 0, 2] = c * st
    rot[:, 1, 0] = rot[:, 0, 1]
    rot[:, 1, 1] = s * s * ct + c * c
    rot[:, 1, 2] = s * st
    rot[:, 2, 0] = -rot[:, 0, 2]
    rot[:, 2, 1] = -rot[:, 1, 2]
    rot[:, 2, 2] = ct

    # only the position needs the limit branch; the rotation is regular
    # everywhere with an exact identity at theta = 0
    small = theta < THETA_SMALL
    safe = np.where(small, 1.0, theta)
    half = 0.5 * safe
    chord = length * 2.0 * np.sin(half) ** 2 / safe
    pos = np.empty((n, 3))
    pos[:, 0] = c * chord
    pos[:, 1] = s * chord
    pos[:, 2] = length * st / safe
    if np.any(small):
        pos[small] = (0.0, 0.0, length)
        rot[theta == 0.0] = np.eye(3)
    return rot, pos


def project_batch_numpy(rotations):
    """(theta, delta, ambiguous) arrays from stacked rotations (n,3,3)."""
    rotations = np.asarray(rotations, dtype=float)
    theta = np.arccos(np.clip(rotations[:, 2, 2], -1.0, 1.0))
    delta = np.arctan2(rotations[:, 1, 2], rotations[:, 0, 2])
    ambiguous = np.abs(np.sin(theta)) < _PROJ_EPS
    delta = np.where(ambiguous, 0.0, delta)
    return theta, delta, ambiguous


def perturb_rotations_numpy(rotation, noise_vectors):
    """Premultiply one rotation by exp(skew(eps_i)) for each row of (n,3)."""
    rotation = np.asarray(rotation, dtype=float)
    eps = np.asarray(noise_vectors, dtype=float)
    n = eps.shape[0]
    angle = np.linalg.norm(eps, axis=1)
    small = angle < 1e-8
    safe = np.where(small, 1.0, angle)
    a = np.where(small, 1.0 - angle ** 2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - angle ** 2 / 24.0, (1.0 - np.cos(safe)) / safe ** 2)

    k = np.zeros((n, 3, 3))
    k[:, 0, 1] = -eps[:, 2]
    k[:, 0, 2] = eps[:, 1]
    k[:, 1, 0] = eps[:, 2]
    k[:, 1, 2] = -eps[:, 0]
    k[:, 2, 0] = -eps[:, 1]
    k[:, 2, 1] = eps[:, 0]
    kk = k @ k
    exp = np.eye(3)[None, :, :] + a[:, None, None] * k + b[:, None, None] * kk
    return exp @ rotation[None, :, :]


# --------------------- numba twins ---------------------

def _build_numba():
    from numba import njit

    theta_small = THETA_SMALL
    proj_eps = _PROJ_EPS

    @njit(cache=True)
    def fk_pose_batch_nb(theta, delta, length):
        n = theta.shape[0]
        rot = np.empty((n, 3, 3))
        pos = np.empty((n, 3))
        for i in range(n):
            th = theta[i]
            if th == 0.0:
                for a in range(3):
                    for b in range(3):
                        rot[i, a, b] = 1.0 if a == b else 0.0
                pos[i, 0] = 0.0
                pos[i, 1] = 0.0
                pos[i, 2] = length
                continue
            c = np.cos(delta[i])
            s = np.sin(delta[i])
            ct = np.cos(th)
            st = np.sin(th)
            rot[i, 0, 0] = c * c * ct + s * s
            rot[i, 0, 1] = c * s * (ct - 1.0)
            rot[i, 0, 2] = c * st
            rot[i, 1, 0] = rot[i, 0, 1]
            rot[i, 1, 1] = s * s * ct + c * c
            rot[i, 1, 2] = s * st
            rot[i, 2, 0] = -rot[i, 0, 2]
            rot[i, 2, 1] = -rot[i, 1, 2]
            rot[i, 2, 2] = ct
            if th < theta_small:
                pos[i, 0] = 0.0
                pos[i, 1] = 0.0
                pos[i, 2] = length
            else:
                half = 0.5 * th
                chord = length * 2.0 * np.sin(half) ** 2 / th
                pos[i, 0] = c * chord
                pos[i, 1] = s * chord
                pos[i, 2] = length * st / th
        return rot, pos

    @njit(cache=True)
    def project_batch_nb(rotations):
        n = rotations.shape[0]
        theta = np.empty(n)
        delta = np.empty(n)
        ambiguous = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            r33 = rotations[i, 2, 2]
            if r33 > 1.0:
                r33 = 1.0
            elif r33 < -1.0:
                r33 = -1.0
            th = np.arccos(r33)
            theta[i] = th
            if np.abs(np.sin(th)) < proj_eps:
                delta[i] = 0.0
                ambiguous[i] = True
            else:
                delta[i] = np.arctan2(rotations[i, 1, 2], rotations[i, 0, 2])
        return theta, delta, ambiguous

    @njit(cache=True)
    def perturb_rotations_nb(rotation, noise_vectors):
        n = noise_vectors.shape[0]
        out = np.empty((n, 3, 3))
        k = np.zeros((3, 3))
        kk = np.empty((3, 3))
        exp = np.empty((3, 3))
        for i in range(n):
            ex = noise_vectors[i, 0]
            ey = noise_vectors[i, 1]
            ez = noise_vectors[i, 2]
            angle = np.sqrt(ex * ex + ey * ey + ez * ez)
            if angle < 1e-8:
                a = 1.0 - angle * angle / 6.0
                b = 0.5 - angle * angle / 24.0
            else:
                a = np.sin(angle) / angle
                b = (1.0 - np.cos(angle)) / (angle * angle)
            k[0, 1] = -ez
            k[0, 2] = ey
            k[1, 0] = ez
            k[1, 2] = -ex
            k[2, 0] = -ey
            k[2, 1] = ex
            # 3x3 products unrolled by row to skip the matmul dispatch
            for r in range(3):
                for cidx in range(3):
                    kk[r, cidx] = (k[r, 0] * k[0, cidx] + k[r, 1] * k[1, cidx]
                                   + k[r, 2] * k[2, cidx])
            for r in range(3):
                for cidx in range(3):
                    exp[r, cidx] = a * k[r, cidx] + b * kk[r, cidx]
                exp[r, r] += 1.0
            for r in range(3):
                for cidx in range(3):
                    out[i, r, cidx] = (exp[r, 0] * rotation[0, cidx]
                                       + exp[r, 1] * rotation[1, cidx]
                                       + exp[r, 2] * rotation[2, cidx])
        return out

    return fk_pose_batch_nb, project_batch_nb, perturb_rotations_nb


def _select():
    if os.environ.get(NUMBA_ENV, "").strip() not in ("", "0"):
        return "numpy", (fk_pose_batch_numpy, project_batch_numpy, perturb_rotations_numpy)
    try:
        return "numba", _build_numba()
    except ImportError:
        return "numpy", (fk_pose_batch_numpy, project_batch_numpy, perturb_rotations_numpy)


ACTIVE_IMPL, (_fk, _project, _perturb) = _select()


def fk_pose_batch(theta, delta, length):
    """Batch tip poses; dispatches to the selected implementation."""
    theta = np.ascontiguousarray(theta, dtype=float)
    delta = np.ascontiguousarray(delta, dtype=float)
    return _fk(theta, delta, float(length))


def project_batch(rotations):
    """Batch bending-plane projection; dispatches to the selected implementation."""
    return _project(np.ascontiguousarray(rotations, dtype=float))


def perturb_rotations(rotation, noise_vectors):
    """Batch noise composition; dispatches to the selected implementation."""
    return _perturb(np.ascontiguousarray(rotation, dtype=float),
                    np.ascontiguousarray(noise_vectors, dtype=float))
