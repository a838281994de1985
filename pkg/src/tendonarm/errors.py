"""Exceptions raised on contract violations.

Everything here derives from ModelError so callers (and the CLI) can
distinguish bad inputs (exit code 2) from internal faults (exit code 1).
"""


class ModelError(Exception):
    """Base class for contract violations."""


class ResidualTooLarge(ModelError):
    """The tendon-tension system is inconsistent beyond tolerance."""


class RankDeficient(ModelError):
    """The linear-velocity Jacobian has numerical rank below 2."""


class NearStraightConfiguration(ModelError):
    """Bending angle below the estimation validity floor."""


class SingularStiffness(ModelError):
    """Configuration-space stiffness matrix is numerically singular."""


class EmptyLog(ModelError):
    """No orientation samples available."""


class MalformedRow(ModelError):
    """An IMU log row failed to parse.

    Carries the 1-based line number of the offending row.
    """

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NonMonotonicTimestamps(ModelError):
    """IMU log timestamps go backwards."""


class UnsupportedVersion(ModelError):
    """IMU log header does not match the supported format version."""


class NonOrthonormal(ModelError):
    """Matrix is too far from a proper rotation to be normalized."""
