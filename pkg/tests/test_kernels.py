"""Parity between the numba and pure-numpy kernel paths, and the env-flag
selection contract."""

import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_configurations
from tendonarm import Configuration, forward_kinematics, project_to_configuration
from tendonarm import kernels
from tendonarm.kernels import (
    NUMBA_ENV,
    fk_pose_batch_numpy,
    perturb_rotations_numpy,
    project_batch_numpy,
)
from tendonarm.rotations import rodrigues

try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")


@needs_numba
def test_numba_path_is_default_when_available():
    if os.environ.get(NUMBA_ENV, "").strip() in ("", "0"):
        assert kernels.ACTIVE_IMPL == "numba"


def test_env_flag_forces_numpy_path():
    code = ("import tendonarm.kernels as k; print(k.ACTIVE_IMPL)")
    env = dict(os.environ, **{NUMBA_ENV: "1"})
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_fk_pose_batch_parity(rng):
    from tendonarm.kernels import _build_numba
    fk_nb, project_nb, perturb_nb = _build_numba()
    thetas, deltas = random_configurations(rng, 512, theta_lo=0.0, theta_hi=3.1)
    thetas[:5] = [0.0, 1e-9, 1e-7, 2e-6, 0.5]  # exercise the threshold branch
    rot_np, pos_np = fk_pose_batch_numpy(thetas, deltas, 0.222)
    rot_nb, pos_nb = fk_nb(thetas, deltas, 0.222)
    assert np.max(np.abs(rot_np - rot_nb)) <= 1e-15
    assert np.max(np.abs(pos_np - pos_nb)) <= 1e-15

    t_np, d_np, a_np = project_batch_numpy(rot_np)
    t_nb, d_nb, a_nb = project_nb(rot_np)
    assert np.max(np.abs(t_np - t_nb)) <= 1e-15
    assert np.max(np.abs(d_np - d_nb)) <= 1e-15
    np.testing.assert_array_equal(a_np, a_nb)

    base = rot_np[42]
    noise = rng.normal(0.0, 0.01, (256, 3))
    np.testing.assert_allclose(perturb_rotations_numpy(base, noise),
                               perturb_nb(base, noise), atol=1e-14)


def test_batch_fk_matches_scalar_path(params, rng):
    thetas, deltas = random_configurations(rng, 64, theta_lo=0.0, theta_hi=3.1)
    rot, pos = kernels.fk_pose_batch(thetas, deltas, params.backbone_length)
    for i in range(64):
        pose = forward_kinematics(params, Configuration(thetas[i], deltas[i]))
        assert np.max(np.abs(rot[i] - pose.rotation)) <= 1e-15
        assert np.max(np.abs(pos[i] - pose.position)) <= 1e-15


def test_batch_projection_matches_scalar_path(params, rng):
    # vectorized arctan2/arccos may differ from libm by an ulp, so the
    # scalar-vs-batch contract is near-equality, not bitwise
    thetas, deltas = random_configurations(rng, 64, theta_lo=0.02, theta_hi=3.0)
    rot, _ = kernels.fk_pose_batch(thetas, deltas, params.backbone_length)
    theta_b, delta_b, amb_b = kernels.project_batch(rot)
    for i in range(64):
        theta_s, delta_s, amb_s = project_to_configuration(rot[i])
        assert theta_b[i] == pytest.approx(theta_s, abs=1e-14)
        assert delta_b[i] == pytest.approx(delta_s, abs=1e-14)
        assert amb_b[i] == amb_s


def test_perturb_matches_rodrigues_oracle(rng):
    base = rodrigues(rng.uniform(-1, 1, 3))
    noise = rng.normal(0.0, 0.02, (32, 3))
    batch = kernels.perturb_rotations(base, noise)
    for i in range(32):
        np.testing.assert_allclose(batch[i], rodrigues(noise[i]) @ base, atol=1e-13)


def test_perturb_zero_noise_is_identity_composition(rng):
    base = rodrigues(rng.uniform(-1, 1, 3))
    batch = kernels.perturb_rotations(base, np.zeros((3, 3)))
    for i in range(3):
        np.testing.assert_array_equal(batch[i], base)
