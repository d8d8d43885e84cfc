"""Default parameters shared by the library and the command line."""

from typing import Final

__all__ = [
    "DEFAULT_J0",
    "DEFAULT_A",
    "DEFAULT_GAMMA",
    "DEFAULT_DELTA",
    "DEFAULT_D_CONST",
    "DEFAULT_NU",
    "DEFAULT_SPACER",
    "DEFAULT_REPS",
    "DEFAULT_SCALE",
    "MIN_VALIDATION_REPS",
    "THREADS_ENV",
]


# Estimation ---------------------------------------------------------

# Maximal resolution level and support half-width of the simulation
# studies. Cost grows as 2^j0.
DEFAULT_J0: Final[int] = 5
DEFAULT_A: Final[int] = 10

# Calibrated plateau value of the practical threshold.
DEFAULT_GAMMA: Final[float] = 0.18
DEFAULT_DELTA: Final[float] = 2.4

# Multiplier of the theoretical Delta term. Its exact value depends on
# concentration constants that are not available in closed form.
DEFAULT_D_CONST: Final[float] = 1.0


# Simulation ---------------------------------------------------------

DEFAULT_NU: Final[float] = 4.0
DEFAULT_REPS: Final[int] = 20
MIN_VALIDATION_REPS: Final[int] = 100


# Genomic data -------------------------------------------------------

# Artificial bases between a strand and its reverse complement, and
# bases per analysis unit (1:1000).
DEFAULT_SPACER: Final[int] = 10000
DEFAULT_SCALE: Final[float] = 1000.0


# Runtime ------------------------------------------------------------

THREADS_ENV: Final[str] = "POINTREP_THREADS"
