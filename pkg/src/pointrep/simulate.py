"""Simulate parents, their Poisson children and optional orphans."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pointrep.defaults import DEFAULT_NU
from pointrep.enums import ParentMode, Signal
from pointrep.estimator import ProcessSample
from pointrep.stepfn import StepFunction

__all__ = [
    "builtin_signal",
    "SignalSpec",
    "SimConfig",
    "make_rng",
    "gen_parents",
    "gen_children",
    "gen_orphans",
    "simulate",
]

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


# Signals ------------------------------------------------------------


def builtin_signal(name: Signal | str, nu: float = DEFAULT_NU) -> StepFunction:
    """The test reproduction functions, scaled by the children's intensity ν.

    * signal1: ν 1_[0, 1)
    * signal2: ν (8/3) (1_[0.5, 0.625) + 1_[1, 1.25))
    * signal3: ν (1/4) (1_[-0.75, -0.5) + 1_[4.25, 8))

    """
    if not nu >= 0:
        raise ValueError("nu must be nonnegative")
    try:
        signal = Signal(name)
    except ValueError:
        raise ValueError(f"unknown signal {name!r}") from None

    if signal is Signal.signal1:
        return StepFunction([0.0, 1.0], [nu])
    if signal is Signal.signal2:
        v = nu * 8.0 / 3.0
        return StepFunction([0.5, 0.625, 1.0, 1.25], [v, 0.0, v])
    v = nu / 4.0
    return StepFunction([-0.75, -0.5, 4.25, 8.0], [v, 0.0, v])


@dataclass(frozen=True)
class SignalSpec:
    """A built-in signal with its amplitude, or a custom step function."""

    name: Signal | None = Signal.signal1
    nu: float = DEFAULT_NU
    custom: StepFunction | None = None

    def __post_init__(self):
        if (self.name is None) == (self.custom is None):
            raise ValueError("give exactly one of a built-in name or a custom function")
        if self.name is not None:
            object.__setattr__(self, "name", Signal(self.name))

    def function(self) -> StepFunction:
        if self.custom is not None:
            return self.custom
        assert self.name is not None
        return builtin_signal(self.name, self.nu)

    def describe(self) -> str:
        if self.custom is not None:
            return "custom"
        return f"{self.name}(nu={self.nu:g})"


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup.

    Attributes:
        T: Horizon; parents live on ``[0, T]``.
        signal: Reproduction function of every parent.
        parent_mode: Exactly ``n`` uniforms, or a Poisson(μT) count of them.
        mu: Parent intensity (poisson mode).
        n: Parent count (fixed mode).
        orphan_intensity: Rate of parentless children on ``[0, T + 1]``.
        seed: Master seed; replication r draws from stream (seed, r).

    """

    T: float
    signal: SignalSpec = SignalSpec()
    parent_mode: ParentMode = ParentMode.poisson
    mu: float | None = None
    n: int | None = None
    orphan_intensity: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "parent_mode", ParentMode(self.parent_mode))
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError("T must be positive")
        if self.parent_mode is ParentMode.poisson:
            if self.mu is None or not self.mu > 0:
                raise ValueError("poisson parents need mu > 0")
        elif self.n is None or self.n < 0:
            raise ValueError("fixed parents need n >= 0")
        if not self.orphan_intensity >= 0:
            raise ValueError("orphan_intensity must be nonnegative")

    @property
    def horizon_window(self) -> tuple[float, float]:
        """Window receiving the orphans."""
        return 0.0, self.T + 1.0

    def metadata(self) -> dict[str, object]:
        return {
            "T": self.T,
            "parent_mode": str(self.parent_mode),
            "mu": self.mu,
            "n": self.n,
            "signal": self.signal.describe(),
            "orphan_intensity": self.orphan_intensity,
            "seed": self.seed,
        }


# Random streams -----------------------------------------------------


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for replication ``stream`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


# Generators ---------------------------------------------------------


def gen_parents(config: SimConfig, rng: np.random.Generator) -> FloatArray:
    """Sorted parent positions on ``[0, T]``."""
    if config.parent_mode is ParentMode.fixed:
        count = int(config.n or 0)
    else:
        count = int(rng.poisson(config.mu * config.T))
    return np.sort(rng.uniform(0.0, config.T, size=count))


def gen_children(
    parents: ArrayLike, h: StepFunction, rng: np.random.Generator
) -> FloatArray:
    """Sorted children of all parents for a nonnegative step function h.

    Every piece ``[a, b)`` of value c gives each parent U a Poisson(c (b - a))
    number of points, uniform on ``[U + a, U + b)``. The law is exact.

    """
    if np.any(h.values < 0):
        raise ValueError("the reproduction function must be nonnegative")
    u = np.asarray(parents, dtype=np.float64)
    children = []
    for a, b, c in h.pieces():
        if c == 0:
            continue
        counts = rng.poisson(c * (b - a), size=u.size)
        offsets = rng.uniform(a, b, size=int(counts.sum()))
        children.append(np.repeat(u, counts) + offsets)
    if not children:
        return np.empty(0)
    return np.sort(np.concatenate(children))


def gen_orphans(T: float, intensity: float, rng: np.random.Generator) -> FloatArray:
    """Homogeneous Poisson points on ``[0, T + 1]``."""
    if not intensity >= 0:
        raise ValueError("intensity must be nonnegative")
    if intensity == 0:
        return np.empty(0)
    count = int(rng.poisson(intensity * (T + 1.0)))
    return np.sort(rng.uniform(0.0, T + 1.0, size=count))


def simulate(config: SimConfig, stream: int = 0) -> ProcessSample:
    """One realization; identical for identical ``(config, stream)``."""
    rng = make_rng(config.seed, stream)
    parents = gen_parents(config, rng)
    children = gen_children(parents, config.signal.function(), rng)
    orphans = gen_orphans(config.T, config.orphan_intensity, rng)
    logger.debug(
        "stream %d: %d parents, %d children, %d orphans",
        stream,
        parents.size,
        children.size,
        orphans.size,
    )
    return ProcessSample(parents, np.concatenate([children, orphans]), config.T)
