"""Command-line surface.

Every subcommand prints a single JSON result envelope on stdout:

    {"tool_version", "command", "inputs_echo", "result", "warnings"}

Angles are taken in degrees on the command line and converted once;
results are SI (plus mm where flagged for readability). Exit codes:
0 success, 2 contract error (bad flags, invalid inputs, malformed
files), 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import traceback
import warnings

import numpy as np

from . import __version__
from .errors import ModelError
from .force_estimation import estimate_force, parse_imu_log, world_to_base, write_imu_log
from .loadsim import LoadCase, SweepSpec, simulate_deflection, \
    stiffness_sweep, synthesize_imu_log, write_sweep_csv
from .params import THETA_EST_MIN, ArmParameters, Configuration
from .arm import forward_kinematics, inverse_kinematics, jacobians
from .rotations import nearest_rotation
from .statics import stiffness_config, stiffness_task, energy_hessian, tendon_stiffness

# JSON parameter file keys (numbers unless noted):
#   required: L_mm, r_mm, Ep_GPa, ET_GPa, Ip_mm4, A_mm2
#   optional: R_offset (3x3 array), theta_est_min_deg
_REQUIRED_PARAM_KEYS = ("L_mm", "r_mm", "Ep_GPa", "ET_GPa", "Ip_mm4", "A_mm2")


class _CliSettings:
    def __init__(self, params, theta_min, r_offset):
        self.params = params
        self.theta_min = theta_min
        self.r_offset = r_offset


def load_parameters(path=None) -> _CliSettings:
    """Arm parameters (and optional calibration) from a JSON file.

    Omitting the file yields the reference-arm defaults. Units in the
    file are operator-friendly (mm, GPa, mm^4, mm^2, deg) and are
    converted to SI here, at the boundary.
    """
    if path is None:
        return _CliSettings(ArmParameters(), THETA_EST_MIN, None)
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    missing = [k for k in _REQUIRED_PARAM_KEYS if k not in doc]
    if missing:
        raise ValueError(f"parameter file {path}: missing keys {missing}")
    params = ArmParameters(
        backbone_length=float(doc["L_mm"]) * 1e-3,
        pitch_radius=float(doc["r_mm"]) * 1e-3,
        backbone_youngs=float(doc["Ep_GPa"]) * 1e9,
        tendon_youngs=float(doc["ET_GPa"]) * 1e9,
        backbone_inertia=float(doc["Ip_mm4"]) * 1e-12,
        tendon_area=float(doc["A_mm2"]) * 1e-6,
    )
    theta_min = THETA_EST_MIN
    if "theta_est_min_deg" in doc:
        theta_min = math.radians(float(doc["theta_est_min_deg"]))
        if theta_min <= 0.0:
            raise ValueError("theta_est_min_deg must be positive")
    r_offset = None
    if "R_offset" in doc:
        r_offset = nearest_rotation(np.asarray(doc["R_offset"], dtype=float), tol=1e-3)
    return _CliSettings(params, theta_min, r_offset)


def _configuration(theta_deg: float, delta_deg: float) -> Configuration:
    if not math.isfinite(theta_deg) or not math.isfinite(delta_deg):
        raise ValueError("angles must be finite")
    return Configuration(math.radians(theta_deg), math.radians(delta_deg))


def _vector(text: str, n: int, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != n:
        raise ValueError(f"{flag} needs {n} comma-separated numbers, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ValueError(f"{flag}: non-numeric component in {text!r}") from None


def _envelope(command: str, inputs: dict, result: dict, warn: list) -> dict:
    return {
        "tool_version": __version__,
        "command": command,
        "inputs_echo": inputs,
        "result": result,
        "warnings": warn,
    }


def _cmd_fk(args, settings, warn):
    pose = forward_kinematics(settings.params, _configuration(args.theta_deg, args.delta_deg))
    return {"rotation": pose.rotation.tolist(), "position_m": pose.position.tolist()}


def _cmd_ik(args, settings, warn):
    q = inverse_kinematics(settings.params, _configuration(args.theta_deg, args.delta_deg))
    return {"q_mm": (q * 1e3).tolist()}


def _cmd_jacobian(args, settings, warn):
    jac = jacobians(settings.params, _configuration(args.theta_deg, args.delta_deg))
    return {"J_q": jac.j_q_psi.tolist(),
            "J_v": jac.j_v_psi.tolist(),
            "J_w": jac.j_w_psi.tolist()}


def _cmd_stiffness(args, settings, warn):
    psi = _configuration(args.theta_deg, args.delta_deg)
    tau = _vector(args.tau, 4, "--tau") if args.tau else None
    k_psi = stiffness_config(settings.params, psi, tau)
    asym = np.max(np.abs(k_psi - k_psi.T))
    scale = max(np.max(np.abs(k_psi)), 1e-300)
    if asym / scale > 1e-10:
        warn.append(f"K_psi asymmetry {asym / scale:.3e} relative")
    k_x = stiffness_task(settings.params, psi, tau, theta_min=settings.theta_min)
    return {"H_psi": energy_hessian(settings.params).tolist(),
            "K_q": tendon_stiffness(settings.params).tolist(),
            "K_psi": k_psi.tolist(),
            "K_X": k_x.tolist()}


def _cmd_estimate_force(args, settings, warn):
    samples = parse_imu_log(args.log)
    if settings.r_offset is not None:
        samples = [type(s)(timestamp=s.timestamp,
                           rotation=world_to_base(s.rotation, settings.r_offset))
                   for s in samples]
    psi_ref = _configuration(args.ref_theta_deg, args.ref_delta_deg)
    tau = _vector(args.tau, 4, "--tau") if args.tau else None
    estimate = estimate_force(settings.params, psi_ref, samples, tau=tau,
                              window=args.window, theta_min=settings.theta_min)
    return {"F_ext_N": estimate.f_ext_hat.tolist(),
            "F_star": estimate.f_star_hat.tolist(),
            "delta_psi": estimate.delta_psi.tolist(),
            "condition": estimate.condition_sigma_ratio}


def _cmd_simulate(args, settings, warn):
    case = LoadCase(psi_ref=_configuration(args.theta_deg, args.delta_deg),
                    force=_vector(args.force, 3, "--force"),
                    tau=_vector(args.tau, 4, "--tau") if args.tau else None,
                    noise_std=math.radians(args.noise_deg),
                    seed=args.seed,
                    samples=args.samples)
    delta_psi, psi_loaded = simulate_deflection(settings.params, case, settings.theta_min)
    samples = synthesize_imu_log(settings.params, case, settings.theta_min)
    write_imu_log(args.out, samples)
    return {"delta_psi": delta_psi.tolist(),
            "psi_loaded": {"theta_rad": psi_loaded.theta, "delta_rad": psi_loaded.delta},
            "samples": len(samples),
            "out": args.out}


def _cmd_sweep(args, settings, warn):
    with open(args.spec, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    try:
        spec = SweepSpec(
            theta_start=math.radians(float(doc["theta_start_deg"])),
            theta_stop=math.radians(float(doc["theta_stop_deg"])),
            theta_step=math.radians(float(doc["theta_step_deg"])),
            delta=math.radians(float(doc.get("delta_deg", 0.0))),
            direction=doc.get("direction", "inward"),
            load_start=float(doc["load_start_N"]),
            load_stop=float(doc["load_stop_N"]),
            load_step=float(doc["load_step_N"]),
        )
    except KeyError as exc:
        raise ValueError(f"sweep spec {args.spec}: missing key {exc}") from None
    rows = stiffness_sweep(settings.params, spec, settings.theta_min)
    write_sweep_csv(args.out, rows)
    return {"rows": len(rows),
            "theta_points": len(spec.theta_grid()),
            "load_points": len(spec.load_grid()),
            "out": args.out}


def _add_config_flags(parser, prefix=""):
    name = "--ref-theta-deg" if prefix else "--theta-deg"
    dest = "ref_theta_deg" if prefix else "theta_deg"
    parser.add_argument(name, dest=dest, type=float, required=True,
                        help="bending angle [deg], 0 <= theta < 180")
    name = "--ref-delta-deg" if prefix else "--delta-deg"
    dest = "ref_delta_deg" if prefix else "delta_deg"
    parser.add_argument(name, dest=dest, type=float, default=0.0,
                        help="bending-plane angle [deg]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tendonarm",
        description="Kinematics, statics, stiffness and IMU-based tip-force "
                    "estimation for a four-tendon constant-curvature arm.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--params", metavar="FILE", default=None,
                       help="JSON parameter file (defaults to the reference arm)")

    p = sub.add_parser("fk", help="forward kinematics: tip pose")
    _add_config_flags(p)
    common(p)
    p.set_defaults(func=_cmd_fk)

    p = sub.add_parser("ik", help="inverse kinematics: tendon displacements [mm]")
    _add_config_flags(p)
    common(p)
    p.set_defaults(func=_cmd_ik)

    p = sub.add_parser("jacobian", help="configuration-space Jacobians")
    _add_config_flags(p)
    common(p)
    p.set_defaults(func=_cmd_jacobian)

    p = sub.add_parser("stiffness", help="stiffness matrices (SI units)")
    _add_config_flags(p)
    p.add_argument("--tau", metavar="N,N,N,N", default=None,
                   help="tendon tensions [N], default zeros")
    common(p)
    p.set_defaults(func=_cmd_stiffness)

    p = sub.add_parser("estimate-force", help="tip force from an IMU log")
    p.add_argument("--log", metavar="FILE", required=True, help="IMU orientation log")
    _add_config_flags(p, prefix="ref")
    p.add_argument("--window", type=int, default=None,
                   help="number of trailing samples to average (default: all)")
    p.add_argument("--tau", metavar="N,N,N,N", default=None,
                   help="tendon tensions [N], default zeros")
    common(p)
    p.set_defaults(func=_cmd_estimate_force)

    p = sub.add_parser("simulate", help="synthesize an IMU log under a tip load")
    _add_config_flags(p)
    p.add_argument("--force", metavar="Fx,Fy,Fz", required=True, help="tip force [N]")
    p.add_argument("--tau", metavar="N,N,N,N", default=None)
    p.add_argument("--noise-deg", type=float, default=0.0,
                   help="per-axis orientation noise std [deg]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--out", metavar="FILE", required=True)
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="stiffness sweep over a theta/load grid")
    p.add_argument("--spec", metavar="FILE", required=True, help="JSON sweep grid")
    p.add_argument("--out", metavar="FILE", required=True)
    common(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warn: list[str] = []
    try:
        settings = load_parameters(args.params)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = args.func(args, settings, warn)
        warn.extend(str(w.message) for w in caught)
    except (ModelError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    print(json.dumps(_envelope(args.command, inputs, result, warn)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
