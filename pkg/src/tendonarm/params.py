"""Arm parameters and configuration-space types.

All quantities are SI (m, N, Pa, rad). Unit conversion from the JSON
parameter file (mm, GPa, mm^4, mm^2) happens at the CLI boundary, never
here.
"""

import math
from dataclasses import dataclass

# Bending angle below which the tip-force estimation problem is treated as
# ill-posed (the delta direction degenerates). Roughly 5 degrees.
THETA_EST_MIN = 0.087


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class ArmParameters:
    """Geometric and material constants of the arm.

    Defaults are the reference prototype: 222 mm NiTi backbone, four
    tendons on a 12 mm pitch circle.

    backbone_length   L   [m]
    pitch_radius      r   [m]
    tendon_division   beta [rad], pi/2 for four equally spaced tendons
    backbone_youngs   E_p [Pa]
    backbone_inertia  I_p [m^4]
    tendon_youngs     E_T [Pa]
    tendon_area       A   [m^2]
    """

    backbone_length: float = 0.222
    pitch_radius: float = 0.012
    backbone_youngs: float = 82e9
    backbone_inertia: float = 0.2485e-12
    tendon_youngs: float = 2.34e9
    tendon_area: float = 0.2642e-6
    tendon_division: float = math.pi / 2
    tendon_count: int = 4

    def __post_init__(self):
        for name in ("backbone_length", "pitch_radius", "backbone_youngs",
                     "backbone_inertia", "tendon_youngs", "tendon_area"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.tendon_division != math.pi / 2:
            raise ValueError("tendon_division is fixed at pi/2 (four equally spaced tendons)")
        if self.tendon_count != 4:
            raise ValueError("tendon_count is fixed at 4")


@dataclass(frozen=True)
class Configuration:
    """Configuration-space point: bending angle theta, bending-plane angle delta.

    theta is validated to [0, pi); delta is wrapped to (-pi, pi] on
    construction. At theta = 0 the bending plane is undefined and all
    outputs are delta-independent.
    """

    theta: float
    delta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and 0.0 <= self.theta < math.pi):
            raise ValueError(f"theta must lie in [0, pi), got {self.theta!r}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")
        object.__setattr__(self, "delta", wrap_angle(self.delta))
