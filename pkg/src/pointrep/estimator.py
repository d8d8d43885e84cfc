"""Coefficient estimates, data-driven thresholds and reconstruction.

* s_lambda: the centered field S(φ_λ) = S_r(φ_λ) - (n - 1) E(φ_λ(. - U))
* coefficient_stats: β̂, B, V̂ and Ṽ for every index of a grid
* thresholds / apply_threshold: keep/kill levels and the kept set
* reconstruct / estimate: the thresholded estimate of h

"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pointrep.defaults import (
    DEFAULT_A,
    DEFAULT_D_CONST,
    DEFAULT_DELTA,
    DEFAULT_GAMMA,
    DEFAULT_J0,
)
from pointrep.enums import ThresholdMode, VarianceMode
from pointrep.haar import (
    HaarIndex,
    IndexGrid,
    build_grid,
    cascade,
    mean_shift,
    translate_sum,
    wavelet_fn,
)
from pointrep.stepfn import (
    PiecewiseLinear,
    StepFunction,
    combine_linear,
    linear_combine,
    sup_abs,
)

__all__ = [
    "ProcessSample",
    "EstimatorConfig",
    "CoefficientTable",
    "s_lambda",
    "coefficient_stats",
    "coefficient_estimate",
    "thresholds",
    "apply_threshold",
    "reconstruct",
    "estimate",
]

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


# Samples and configuration ------------------------------------------


@dataclass(frozen=True, eq=False)
class ProcessSample:
    """Observed parents and children of one realization.

    Attributes:
        parents: Parent positions U_1 .. U_n, sorted, within ``[0, T]``.
        children: Points of the aggregated process, sorted. They may lie
            outside ``[0, T]``.
        T: Horizon of the parent window.

    """

    parents: FloatArray
    children: FloatArray
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError("T must be positive")
        for name in ("parents", "children"):
            arr = np.sort(np.asarray(getattr(self, name), dtype=np.float64).ravel())
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "T", float(self.T))
        if self.parents.size and (self.parents[0] < 0 or self.parents[-1] > self.T):
            raise ValueError("parents must lie in [0, T]")

    @property
    def n(self) -> int:
        return int(self.parents.size)

    @property
    def n_children(self) -> int:
        """N_R, every observed child including those outside [0, T]."""
        return int(self.children.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProcessSample):
            return NotImplemented
        return (
            self.T == other.T
            and np.array_equal(self.parents, other.parents)
            and np.array_equal(self.children, other.children)
        )


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters of the thresholding estimator.

    Attributes:
        j0: Maximal resolution level.
        A: Support half-width.
        mother_levels_through: Finest mother level, ``j0 - 1`` when None.
        gamma: Weight of the variance and sup-norm threshold terms.
        threshold_mode: Form of the last threshold term.
        delta: Constant of the practical term ``delta / sqrt(T)``.
        d_const: Constant of the theoretical Delta term.
        variance_mode: Variance statistic; None picks V̂ for the
            practical mode and Ṽ for the theoretical one.

    """

    j0: int = DEFAULT_J0
    A: int = DEFAULT_A
    mother_levels_through: int | None = None
    gamma: float = DEFAULT_GAMMA
    threshold_mode: ThresholdMode = ThresholdMode.practical
    delta: float = DEFAULT_DELTA
    d_const: float = DEFAULT_D_CONST
    variance_mode: VarianceMode | None = None
    grid: IndexGrid = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "threshold_mode", ThresholdMode(self.threshold_mode))
        if self.variance_mode is not None:
            object.__setattr__(self, "variance_mode", VarianceMode(self.variance_mode))
        for name in ("gamma", "delta", "d_const"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be nonnegative")
        object.__setattr__(
            self, "grid", build_grid(self.j0, self.A, self.mother_levels_through)
        )

    @property
    def variance(self) -> VarianceMode:
        if self.variance_mode is not None:
            return self.variance_mode
        if self.threshold_mode is ThresholdMode.theoretical:
            return VarianceMode.v_tilde
        return VarianceMode.v_hat


def _tilde_variance(
    v_hat: FloatArray, b_stat: FloatArray, gamma: float, j0: int
) -> FloatArray:
    """Ṽ/n^2 from the scaled V̂/n^2 and B/n."""
    a = gamma * j0
    return v_hat + np.sqrt(2 * a * v_hat * b_stat**2) + 3 * a * b_stat**2


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Per-index statistics of one sample, in grid order.

    The threshold columns stay None until :func:`apply_threshold` fills
    them.

    """

    grid: IndexGrid
    beta_hat: FloatArray
    b_stat: FloatArray
    v_hat: FloatArray
    v_tilde: FloatArray
    n: int
    n_children: int
    T: float
    gamma: float
    eta: FloatArray | None = None
    kept: NDArray[np.bool_] | None = None
    beta_tilde: FloatArray | None = None

    def with_gamma(self, gamma: float) -> CoefficientTable:
        """Recompute Ṽ for another γ from the stored statistics."""
        if gamma == self.gamma:
            return self
        v_tilde = _tilde_variance(self.v_hat, self.b_stat, gamma, self.grid.j0)
        return replace(
            self, v_tilde=v_tilde, gamma=gamma, eta=None, kept=None, beta_tilde=None
        )

    @property
    def is_thresholded(self) -> bool:
        return self.beta_tilde is not None

    def rows(self) -> Iterator[dict[str, Any]]:
        """One record per index, in grid order."""
        for i, lam in enumerate(self.grid):
            yield {
                "j": lam.j,
                "k": lam.k,
                "beta_hat": float(self.beta_hat[i]),
                "b_stat": float(self.b_stat[i]),
                "v_hat": float(self.v_hat[i]),
                "v_tilde": float(self.v_tilde[i]),
                "eta": None if self.eta is None else float(self.eta[i]),
                "kept": None if self.kept is None else bool(self.kept[i]),
                "beta_tilde": (
                    None if self.beta_tilde is None else float(self.beta_tilde[i])
                ),
            }


# Statistics ---------------------------------------------------------


def _centered(sr: StepFunction, lam: HaarIndex, n: int, T: float) -> PiecewiseLinear:
    return combine_linear(
        [(1.0, PiecewiseLinear.from_step(sr)), (-(n - 1), mean_shift(lam, T))]
    )


def s_lambda(sample: ProcessSample, lam: HaarIndex) -> PiecewiseLinear:
    """The field ``S(φ_λ) = sum_i [φ_λ(. - U_i) - (n - 1)/n E(φ_λ(. - U))]``."""
    if sample.n == 0:
        return PiecewiseLinear.zero()
    return _centered(translate_sum(sample.parents, lam), lam, sample.n, sample.T)


def _field_stats(
    s: PiecewiseLinear, children: FloatArray, n: int
) -> tuple[float, float, float]:
    at_children = s(children)
    beta_hat = math.fsum(at_children) / n
    v_hat = math.fsum(at_children**2) / n**2
    b_stat = sup_abs(s) / n
    return beta_hat, b_stat, v_hat


def _require_parents(sample: ProcessSample) -> None:
    if sample.n == 0:
        raise ValueError("estimation needs at least one parent")


def coefficient_estimate(
    sample: ProcessSample, lam: HaarIndex
) -> tuple[float, float, float]:
    """``(β̂, B/n, V̂/n^2)`` for one index, without running the cascade."""
    _require_parents(sample)
    return _field_stats(s_lambda(sample, lam), sample.children, sample.n)


def coefficient_stats(
    sample: ProcessSample,
    grid: IndexGrid,
    gamma: float = DEFAULT_GAMMA,
    threads: int = 1,
) -> CoefficientTable:
    """Estimate every coefficient of the grid with its threshold statistics.

    Args:
        sample:
            The observed parents and children; needs n >= 1.
        grid:
            The index grid Γ.
        gamma:
            γ entering Ṽ.
        threads:
            Number of worker threads across indices. The per-index work
            is independent, so results do not depend on this value.

    Returns:
        A CoefficientTable with β̂, B/n, V̂/n^2 and Ṽ/n^2 filled.

    """
    _require_parents(sample)
    if not gamma >= 0:
        raise ValueError("gamma must be nonnegative")

    n, T = sample.n, sample.T
    sums = cascade(sample.parents, grid)

    def work(lam: HaarIndex) -> tuple[float, float, float]:
        return _field_stats(_centered(sums[lam], lam, n, T), sample.children, n)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(work, grid.indices))
    else:
        stats = [work(lam) for lam in grid.indices]

    beta_hat, b_stat, v_hat = (np.array(col) for col in zip(*stats))
    logger.debug(
        "coefficient stats: n=%d, N=%d, %d indices", n, sample.n_children, len(grid)
    )
    return CoefficientTable(
        grid=grid,
        beta_hat=beta_hat,
        b_stat=b_stat,
        v_hat=v_hat,
        v_tilde=_tilde_variance(v_hat, b_stat, gamma, grid.j0),
        n=n,
        n_children=sample.n_children,
        T=T,
        gamma=gamma,
    )


# Thresholding -------------------------------------------------------


def thresholds(table: CoefficientTable, config: EstimatorConfig) -> FloatArray:
    """Keep/kill level η_λ for every index of the table."""
    j0 = table.grid.j0
    if config.j0 != j0:
        raise ValueError(f"table was computed with j0={j0}, config has j0={config.j0}")
    if config.threshold_mode is ThresholdMode.none:
        return np.zeros(len(table.grid))

    table = table.with_gamma(config.gamma)
    a = config.gamma * j0
    v = table.v_hat if config.variance is VarianceMode.v_hat else table.v_tilde
    ratio = table.n_children / table.n

    if config.threshold_mode is ThresholdMode.practical:
        last = config.delta / math.sqrt(table.T)
    else:
        n, T = table.n, table.T
        last = config.d_const * (
            j0**2 * 2 ** (j0 / 2) / n + j0 / math.sqrt(T) + math.sqrt(j0 * n) / T
        )
    return np.sqrt(2 * a * v) + a / 3 * table.b_stat + last * ratio


def apply_threshold(table: CoefficientTable, eta: ArrayLike) -> CoefficientTable:
    """Keep the coefficients with ``|β̂| >= η`` (ties are kept)."""
    levels = np.asarray(eta, dtype=np.float64)
    if levels.shape != table.beta_hat.shape:
        raise ValueError("one threshold per index is required")
    kept = np.abs(table.beta_hat) >= levels
    beta_tilde = np.where(kept, table.beta_hat, 0.0)
    return replace(table, eta=levels, kept=kept, beta_tilde=beta_tilde)


def reconstruct(table: CoefficientTable, grid: IndexGrid | None = None) -> StepFunction:
    """``h̃ = sum_λ β̃_λ φ_λ`` over the kept coefficients."""
    if table.beta_tilde is None:
        raise ValueError("threshold the table before reconstructing")
    grid = table.grid if grid is None else grid
    if len(grid) != table.beta_tilde.size:
        raise ValueError("grid does not match the table")
    return linear_combine(
        (float(b), wavelet_fn(lam)) for lam, b in zip(grid, table.beta_tilde) if b != 0
    )


def estimate(
    sample: ProcessSample, config: EstimatorConfig, threads: int = 1
) -> tuple[CoefficientTable, StepFunction]:
    """Run the full procedure: statistics, thresholds, keep/kill, rebuild."""
    table = coefficient_stats(sample, config.grid, config.gamma, threads=threads)
    table = apply_threshold(table, thresholds(table, config))
    h_tilde = reconstruct(table)
    logger.info(
        "kept %d of %d coefficients (n=%d, N=%d)",
        int(np.count_nonzero(table.kept)),
        len(table.grid),
        sample.n,
        sample.n_children,
    )
    return table, h_tilde
