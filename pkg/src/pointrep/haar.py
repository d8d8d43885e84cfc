"""Haar index grids, wavelets and the cascade for parent-shifted sums."""

from __future__ import annotations

import functools
import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pointrep.stepfn import (
    PiecewiseLinear,
    StepFunction,
    antiderivative,
    inner,
    l2_dist_sq,
    linear_combine,
)

__all__ = [
    "HaarIndex",
    "IndexGrid",
    "build_grid",
    "auto_j0",
    "wavelet_fn",
    "true_coeffs",
    "mean_shift",
    "translate_sum",
    "cascade",
]

logger = logging.getLogger(__name__)


# Indices and grids --------------------------------------------------


@dataclass(frozen=True, order=True)
class HaarIndex:
    """Wavelet index λ = (j, k); j = -1 denotes the father translate φ_k."""

    j: int
    k: int

    def __post_init__(self):
        if not isinstance(self.j, int) or not isinstance(self.k, int):
            raise TypeError("j and k must be integers")
        if self.j < -1:
            raise ValueError("j must be at least -1")

    @property
    def is_father(self) -> bool:
        return self.j == -1

    @property
    def width(self) -> float:
        """Length of the support."""
        return 1.0 if self.is_father else 2.0**-self.j

    @property
    def support(self) -> tuple[float, float]:
        w = self.width
        return self.k * w, (self.k + 1) * w

    @classmethod
    def parse(cls, text: str) -> HaarIndex:
        """Read ``"j,k"`` (parentheses optional)."""
        parts = text.strip().strip("()").split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'j,k', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self) -> str:
        return f"({self.j},{self.k})"


def _check_positive_int(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer")
    if value < 1:
        raise ValueError(f"{name} must be positive")
    return int(value)


@dataclass(frozen=True)
class IndexGrid:
    """The finite estimation grid Γ.

    Fathers come first, then mother levels in ascending order; within a
    level translates ascend.

    Attributes:
        j0: Maximal resolution level entering the thresholds.
        A: Support half-width; the grid covers ``[-A, A]``.
        mother_levels_through: Finest mother level, ``j0 - 1`` (as the
            cascade produces it) or ``j0``.
        indices: The ordered indices.

    """

    j0: int
    A: int
    mother_levels_through: int
    indices: tuple[HaarIndex, ...] = field(init=False, repr=False, compare=False)
    _positions: dict[HaarIndex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_positive_int("j0", self.j0)
        _check_positive_int("A", self.A)
        if self.mother_levels_through not in (self.j0 - 1, self.j0):
            raise ValueError("mother_levels_through must be j0 - 1 or j0")

        indices = [HaarIndex(-1, k) for k in range(-self.A, self.A)]
        for j in range(self.mother_levels_through + 1):
            half = 2**j * self.A
            indices.extend(HaarIndex(j, k) for k in range(-half, half))
        object.__setattr__(self, "indices", tuple(indices))
        positions = {lam: i for i, lam in enumerate(indices)}
        object.__setattr__(self, "_positions", positions)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[HaarIndex]:
        return iter(self.indices)

    def __contains__(self, lam: object) -> bool:
        return lam in self._positions

    def position(self, lam: HaarIndex) -> int:
        return self._positions[lam]

    @property
    def finest_level(self) -> int:
        """Level J of the fathers the cascade starts from."""
        return self.mother_levels_through + 1

    @property
    def resolution(self) -> float:
        """Width 2^-J of the finest dyadic cells spanned by the grid."""
        return 2.0**-self.finest_level

    def cell_edges(self) -> NDArray[np.float64]:
        """Edges of the finest dyadic cells covering ``[-A, A]``."""
        cells = self.A * 2**self.finest_level
        return np.arange(-cells, cells + 1) * self.resolution

    def vector(self, mapping: Mapping[HaarIndex, float]) -> NDArray[np.float64]:
        """Values of ``mapping`` in grid order (missing indices are 0)."""
        return np.array([mapping.get(lam, 0.0) for lam in self.indices])


@functools.lru_cache(maxsize=64, typed=True)
def build_grid(j0: int, A: int, mother_levels_through: int | None = None) -> IndexGrid:
    """Build Γ for ``(j0, A)``; mothers run through ``j0 - 1`` by default."""
    if mother_levels_through is None:
        mother_levels_through = _check_positive_int("j0", j0) - 1
    return IndexGrid(j0, A, mother_levels_through)


def auto_j0(n: int) -> int:
    """The level j0 with 2^j0 <= n < 2^(j0 + 1)."""
    if n < 2:
        raise ValueError("an automatic level needs at least 2 parents")
    return int(n).bit_length() - 1


# Wavelets -----------------------------------------------------------


def _father(j: int, k: int) -> StepFunction:
    """φ_{j,k} = 2^{j/2} 1_[k 2^-j, (k+1) 2^-j)."""
    w = 2.0**-j
    return StepFunction([k * w, (k + 1) * w], [2.0 ** (j / 2)])


@functools.lru_cache(maxsize=8192)
def wavelet_fn(lam: HaarIndex) -> StepFunction:
    """The analysis function φ_λ as an exact step function."""
    if lam.is_father:
        return _father(0, lam.k)
    w = lam.width
    s = 2.0 ** (lam.j / 2)
    return StepFunction([lam.k * w, (lam.k + 0.5) * w, (lam.k + 1) * w], [-s, s])


def true_coeffs(
    h: StepFunction, grid: IndexGrid
) -> tuple[dict[HaarIndex, float], float]:
    """Exact coefficients β_λ of h on the grid, and the energy left over.

    The leftover is ``||h - P h||^2`` with P the averaging over the
    finest dyadic cells of the grid, the space the grid spans.

    Raises:
        ValueError: If h is not supported in ``[-A, A]``.

    """
    support = h.support
    if support is not None and (support[0] < -grid.A or support[1] > grid.A):
        raise ValueError(f"h must be supported in [-{grid.A}, {grid.A}], got {support}")

    betas = {lam: inner(h, wavelet_fn(lam)) for lam in grid}

    edges = grid.cell_edges()
    F = antiderivative(h)
    averages = (F(edges[1:]) - F(edges[:-1])) / grid.resolution
    tail = l2_dist_sq(h, StepFunction(edges, averages))
    return betas, tail


@functools.lru_cache(maxsize=8192)
def mean_shift(lam: HaarIndex, T: float) -> PiecewiseLinear:
    """``t -> E(φ_λ(t - U))`` for U uniform on ``[0, T]``.

    Equals ``(F(t) - F(t - T)) / T`` with F the primitive of φ_λ; it is
    continuous and vanishes outside ``[k 2^-j, T + (k + 1) 2^-j]``.

    """
    if not T > 0:
        raise ValueError("T must be positive")
    f = wavelet_fn(lam)
    F = antiderivative(f)
    nodes = np.unique(np.concatenate([f.breakpoints, f.breakpoints + T]))
    left = nodes[:-1]
    values = (F(left) - F(left - T)) / T
    slopes = (f(left) - f(left - T)) / T
    return PiecewiseLinear(nodes, slopes, values, 0.0)


# Parent-shifted sums ------------------------------------------------


def _box_count(starts: NDArray[np.float64], ends: NDArray[np.float64]) -> StepFunction:
    """``t -> #{i : starts_i <= t < ends_i}``."""
    if starts.size == 0:
        return StepFunction.zero()
    positions = np.concatenate([starts, ends])
    jumps = np.concatenate([np.ones(starts.size), -np.ones(starts.size)])
    breaks, inverse = np.unique(positions, return_inverse=True)
    counts = np.cumsum(np.bincount(inverse, weights=jumps))
    return StepFunction(breaks, counts[:-1])


def _as_parents(parents: ArrayLike) -> NDArray[np.float64]:
    u = np.sort(np.asarray(parents, dtype=np.float64).ravel())
    if not np.all(np.isfinite(u)):
        raise ValueError("parent positions must be finite")
    return u


def translate_sum(parents: ArrayLike, lam: HaarIndex) -> StepFunction:
    """``S_r(φ_λ) = sum_i φ_λ(. - U_i)`` built directly for one index."""
    u = _as_parents(parents)
    f = wavelet_fn(lam)
    return linear_combine(
        (value, _box_count(u + left, u + right)) for left, right, value in f.pieces()
    )


def cascade(parents: ArrayLike, grid: IndexGrid) -> dict[HaarIndex, StepFunction]:
    """``S_r(φ_λ)`` for every λ of the grid by the downward cascade.

    Starting from the level-J fathers (J = mother_levels_through + 1),
    counted directly on ``[U + k 2^-J, U + (k + 1) 2^-J)``, each coarser
    level follows from

        ψ_{j,k} = (√2/2)(φ_{j+1,2k+1} - φ_{j+1,2k})
        φ_{j,k} = (√2/2)(φ_{j+1,2k} + φ_{j+1,2k+1})

    The recursion runs on the unnormalized parent counts, where the
    relations become exact integer sums and differences, and the
    factor 2^{j/2} is applied once per output.

    """
    u = _as_parents(parents)
    J = grid.finest_level
    res = grid.resolution

    # Boxes are built from u + m * res so neighbours share breakpoints exactly
    counts = {
        k: _box_count(u + k * res, u + (k + 1) * res)
        for k in range(-grid.A * 2**J, grid.A * 2**J)
    }
    out: dict[HaarIndex, StepFunction] = {}
    for j in range(J - 1, -1, -1):
        scale = 2.0 ** (j / 2)
        coarse: dict[int, StepFunction] = {}
        for k in range(-grid.A * 2**j, grid.A * 2**j):
            even, odd = counts[2 * k], counts[2 * k + 1]
            out[HaarIndex(j, k)] = linear_combine([(scale, odd), (-scale, even)])
            coarse[k] = linear_combine([(1.0, even), (1.0, odd)])
        counts = coarse
        logger.debug("cascade level %d: %d translates", j, len(coarse))

    for k in range(-grid.A, grid.A):
        out[HaarIndex(-1, k)] = counts[k]
    return {lam: out[lam] for lam in grid}
