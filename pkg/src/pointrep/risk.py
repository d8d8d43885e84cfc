"""Monte Carlo risk studies of the thresholding estimator.

* l2_risk: exact squared L2 error of one reconstruction
* risk_surface: mean risk over a (γ, δ) grid, statistics cached per replication
* oracle_risk: the ideal keep-or-kill benchmark when h is known
* mc_validate: unbiasedness and variance of chosen coefficients
* reconstruction_runs / SCENARIOS: the reconstruction experiments

"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import TypeVar

import numpy as np
from numpy.typing import NDArray

from pointrep.defaults import DEFAULT_GAMMA, MIN_VALIDATION_REPS
from pointrep.enums import ThresholdMode
from pointrep.estimator import (
    CoefficientTable,
    EstimatorConfig,
    ProcessSample,
    apply_threshold,
    coefficient_estimate,
    coefficient_stats,
    estimate,
    reconstruct,
    thresholds,
)
from pointrep.haar import HaarIndex, IndexGrid, true_coeffs, wavelet_fn
from pointrep.simulate import SignalSpec, SimConfig, simulate
from pointrep.stepfn import StepFunction, inner, l2_dist_sq

__all__ = [
    "l2_risk",
    "RiskSurface",
    "replicate_stats",
    "risk_surface",
    "oracle_risk",
    "ValidationRow",
    "mc_validate",
    "Scenario",
    "SCENARIOS",
    "reconstruction_runs",
]

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
_T = TypeVar("_T")


def l2_risk(h_tilde: StepFunction, h: StepFunction) -> float:
    """Exact ``||h̃ - h||^2``."""
    return l2_dist_sq(h_tilde, h)


def _replicate_map(fn: Callable[[int], _T], reps: int, threads: int) -> list[_T]:
    """``[fn(0), ..., fn(reps - 1)]``, possibly computed concurrently."""
    if reps < 1:
        raise ValueError("reps must be positive")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(reps)))
    return [fn(r) for r in range(reps)]


def _mean_stderr(samples: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Compensated mean and standard error along the first axis."""
    reps = samples.shape[0]
    flat = samples.reshape(reps, -1)
    mean = np.array([math.fsum(col) / reps for col in flat.T])
    if reps > 1:
        squares = [math.fsum((col - m) ** 2) for col, m in zip(flat.T, mean)]
        var = np.array(squares) / (reps - 1)
        stderr = np.sqrt(var / reps)
    else:
        stderr = np.zeros_like(mean)
    shape = samples.shape[1:]
    return mean.reshape(shape), stderr.reshape(shape)


def _has_parents(sample: ProcessSample, stream: int) -> bool:
    if sample.n == 0:
        logger.debug("replication %d has no parents; h̃ is zero", stream)
    return sample.n > 0


def replicate_stats(
    sim: SimConfig, grid: IndexGrid, gamma: float, stream: int, threads: int = 1
) -> CoefficientTable | None:
    """Coefficient statistics of replication ``stream``.

    None when the replication drew no parents. Every β̂ is then zero and
    so is h̃.

    """
    sample = simulate(sim, stream)
    if not _has_parents(sample, stream):
        return None
    return coefficient_stats(sample, grid, gamma, threads=threads)


# Risk surfaces ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RiskSurface:
    """Mean risk and its standard error on a (γ, δ) grid.

    In the theoretical threshold mode the second axis holds d_const.

    """

    gamma_grid: tuple[float, ...]
    delta_grid: tuple[float, ...]
    reps: int
    mean_risk: FloatArray
    stderr: FloatArray

    def cells(self) -> Iterator[tuple[float, float, float, float]]:
        """Yield ``(gamma, delta, mean_risk, stderr)`` γ-major."""
        for gi, gamma in enumerate(self.gamma_grid):
            for di, delta in enumerate(self.delta_grid):
                risk, err = self.mean_risk[gi, di], self.stderr[gi, di]
                yield gamma, delta, float(risk), float(err)

    def cell(self, gamma: float, delta: float) -> tuple[float, float]:
        gi = self.gamma_grid.index(gamma)
        di = self.delta_grid.index(delta)
        return float(self.mean_risk[gi, di]), float(self.stderr[gi, di])


def _cell_config(base: EstimatorConfig, gamma: float, second: float) -> EstimatorConfig:
    if base.threshold_mode is ThresholdMode.theoretical:
        return replace(base, gamma=gamma, d_const=second)
    return replace(base, gamma=gamma, delta=second)


def risk_surface(
    sim: SimConfig,
    est_base: EstimatorConfig,
    gamma_grid: Sequence[float],
    delta_grid: Sequence[float],
    reps: int,
    threads: int = 1,
) -> RiskSurface:
    """Average L2 risk of the estimator over a (γ, δ) grid.

    Each replication simulates one sample and computes its coefficient
    statistics once. Every cell then only recomputes thresholds, and
    cells that keep the same coefficients share one reconstruction.

    """
    gammas = tuple(float(g) for g in gamma_grid)
    deltas = tuple(float(d) for d in delta_grid)
    if not gammas or not deltas:
        raise ValueError("gamma and delta grids must be nonempty")

    h = sim.signal.function()
    configs = [[_cell_config(est_base, g, d) for d in deltas] for g in gammas]
    grid = est_base.grid

    def one(r: int) -> FloatArray:
        table = replicate_stats(sim, grid, gammas[0], r)
        risks = np.empty((len(gammas), len(deltas)))
        if table is None:
            risks.fill(l2_risk(StepFunction.zero(), h))
            return risks
        memo: dict[bytes, float] = {}
        for gi, gamma in enumerate(gammas):
            regamma = table.with_gamma(gamma)
            for di, config in enumerate(configs[gi]):
                kept = apply_threshold(regamma, thresholds(regamma, config))
                key = kept.kept.tobytes()  # type: ignore[union-attr]
                if key not in memo:
                    memo[key] = l2_risk(reconstruct(kept), h)
                risks[gi, di] = memo[key]
        logger.info("replication %d: %d distinct kept sets", r, len(memo))
        return risks

    mean, stderr = _mean_stderr(np.stack(_replicate_map(one, reps, threads)))
    return RiskSurface(gammas, deltas, reps, mean, stderr)


# Oracle -------------------------------------------------------------


def oracle_risk(sim: SimConfig, grid: IndexGrid, reps: int, threads: int = 1) -> float:
    """Monte Carlo oracle risk ``sum min(var(β̂_λ), β_λ^2) + leftover energy``."""
    if reps < 2:
        raise ValueError("the oracle variance needs at least 2 replications")
    betas, tail = true_coeffs(sim.signal.function(), grid)
    beta = grid.vector(betas)

    def one(r: int) -> FloatArray:
        table = replicate_stats(sim, grid, DEFAULT_GAMMA, r)
        return np.zeros(len(grid)) if table is None else table.beta_hat

    estimates = np.stack(_replicate_map(one, reps, threads))
    var = np.var(estimates, axis=0, ddof=1)
    return math.fsum(np.minimum(var, beta**2)) + tail


# Validation ---------------------------------------------------------


@dataclass(frozen=True)
class ValidationRow:
    """Monte Carlo summary of one coefficient estimator."""

    index: HaarIndex
    mean: float
    stderr: float
    true_beta: float
    variance: float
    reps: int

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == self.true_beta else math.inf
        return (self.mean - self.true_beta) / self.stderr


def mc_validate(
    sim: SimConfig, indices: Iterable[HaarIndex], reps: int, threads: int = 1
) -> list[ValidationRow]:
    """Empirical mean, standard error and variance of β̂ for each index."""
    lams = list(indices)
    if reps < MIN_VALIDATION_REPS:
        raise ValueError(f"validation needs reps >= {MIN_VALIDATION_REPS}")
    h = sim.signal.function()

    def one(r: int) -> FloatArray:
        sample = simulate(sim, r)
        if not _has_parents(sample, r):
            return np.zeros(len(lams))
        return np.array([coefficient_estimate(sample, lam)[0] for lam in lams])

    estimates = np.stack(_replicate_map(one, reps, threads))
    mean, stderr = _mean_stderr(estimates)
    var = np.var(estimates, axis=0, ddof=1)
    return [
        ValidationRow(
            index=lam,
            mean=float(mean[i]),
            stderr=float(stderr[i]),
            true_beta=inner(h, wavelet_fn(lam)),
            variance=float(var[i]),
            reps=reps,
        )
        for i, lam in enumerate(lams)
    ]


# Reconstruction experiments -----------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A named simulation setup with the estimator applied to it."""

    name: str
    sim: SimConfig
    est: EstimatorConfig
    description: str = ""


def _scenarios() -> dict[str, Scenario]:
    out: dict[str, Scenario] = {}
    for signal in ("signal1", "signal2"):
        for T, mu in ((10000.0, 0.1), (2000.0, 0.1), (2000.0, 0.5)):
            name = f"{signal}-T{T:g}-mu{mu:g}"
            sim = SimConfig(T=T, mu=mu, signal=SignalSpec(signal))
            est = EstimatorConfig()
            out[name] = Scenario(name, sim, est, "calibrated reconstruction")
    for A in (1, 5, 10):
        name = f"signal3-A{A}"
        sim = SimConfig(T=10000.0, mu=0.1, signal=SignalSpec("signal3"))
        out[name] = Scenario(name, sim, EstimatorConfig(A=A), "support robustness")
    for nu in (3.0, 1.0):
        name = f"orphans-nu{nu:g}"
        sim = SimConfig(
            T=10000.0,
            mu=0.1,
            signal=SignalSpec("signal1", nu),
            orphan_intensity=0.1 * (4 - nu),
        )
        out[name] = Scenario(name, sim, EstimatorConfig(), "orphan contamination")
    return out


SCENARIOS: dict[str, Scenario] = _scenarios()


def reconstruction_runs(
    sim: SimConfig, est: EstimatorConfig, reps: int, threads: int = 1
) -> list[tuple[StepFunction, float]]:
    """``(h̃, ||h̃ - h||^2)`` for each replication."""
    h = sim.signal.function()

    def one(r: int) -> tuple[StepFunction, float]:
        sample = simulate(sim, r)
        h_tilde = StepFunction.zero()
        if _has_parents(sample, r):
            _, h_tilde = estimate(sample, est)
        return h_tilde, l2_risk(h_tilde, h)

    return _replicate_map(one, reps, threads)
