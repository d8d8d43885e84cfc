"""Closed vocabularies as string enumerations for easy named access."""

from enum import Enum

__all__ = ["Signal", "ThresholdMode", "VarianceMode", "ParentMode", "Role"]


class StrEnum(str, Enum):
    """An enumeration over string values.

    Note: Python 3.11+ has StrEnum in the standard library, but we need
    to support 3.10 so we keep this simple implementation.
    """

    def __str__(self) -> str:
        return self.value


class Signal(StrEnum):
    """Built-in reproduction functions of the simulation studies."""

    signal1 = "signal1"
    signal2 = "signal2"
    signal3 = "signal3"


class ThresholdMode(StrEnum):
    """How the keep/kill level of each coefficient is formed.

    * practical: delta / sqrt(T) replaces the Delta term
    * theoretical: Delta = d_const * (j0^2 2^(j0/2) / n + j0 / sqrt(T) + sqrt(j0 n) / T)
    * none: every coefficient is kept
    """

    practical = "practical"
    theoretical = "theoretical"
    none = "none"


class VarianceMode(StrEnum):
    """Variance statistic entering the first threshold term."""

    v_hat = "v_hat"
    v_tilde = "v_tilde"


class ParentMode(StrEnum):
    """Fixed number of uniform parents or a homogeneous Poisson count."""

    fixed = "fixed"
    poisson = "poisson"


class Role(StrEnum):
    """Role of a position in a sample file."""

    parent = "parent"
    child = "child"
