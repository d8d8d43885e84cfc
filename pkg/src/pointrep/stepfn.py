"""Exact algebra on compactly supported piecewise functions.

* StepFunction: piecewise-constant, value v_i on [x_{i-1}, x_i), 0 outside
* PiecewiseLinear: piecewise-affine with jumps, 0 left of its first node
  and a constant tail right of its last node

Every value is immutable after construction. Breakpoints are merged by
exact floating comparison after sorting; nothing is snapped to a grid.

"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from typing import overload

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "StepFunction",
    "PiecewiseLinear",
    "evaluate",
    "linear_combine",
    "combine_linear",
    "antiderivative",
    "sup_abs",
    "inner",
    "l2_dist_sq",
]

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def _frozen(values: ArrayLike) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _check_nodes(nodes: FloatArray, pieces: int, name: str) -> None:
    if nodes.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if nodes.size == 0 and pieces == 0:
        return
    if nodes.size != pieces + 1:
        raise ValueError(f"{name} must have exactly one more entry than the pieces")
    if not np.all(np.isfinite(nodes)):
        raise ValueError(f"{name} must be finite")
    if np.any(np.diff(nodes) <= 0):
        raise ValueError(f"{name} must be strictly increasing")


def _locate(
    nodes: FloatArray, t: FloatArray
) -> tuple[NDArray[np.intp], NDArray[np.bool_]]:
    """Index of the half-open piece holding each t, and whether it exists."""
    idx = np.searchsorted(nodes, t, side="right") - 1
    inside = (idx >= 0) & (idx < nodes.size - 1)
    return np.clip(idx, 0, max(nodes.size - 2, 0)), inside


# Step functions -----------------------------------------------------


class StepFunction:
    """Compactly supported piecewise-constant function.

    The function equals ``values[i]`` on ``[breakpoints[i],
    breakpoints[i + 1])`` and 0 outside ``[breakpoints[0],
    breakpoints[-1])``. Construction canonicalizes: adjacent pieces with
    equal values are merged and zero pieces at either end are trimmed,
    so two equal functions always share one representation.

    Attributes:
        breakpoints: Strictly increasing positions x_0 < ... < x_m.
        values: Piece values v_1 .. v_m.

    """

    __slots__ = ("breakpoints", "values")

    breakpoints: FloatArray
    values: FloatArray

    def __init__(self, breakpoints: ArrayLike, values: ArrayLike):
        x = np.array(breakpoints, dtype=np.float64)
        v = np.array(values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        _check_nodes(x, v.size, "breakpoints")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        x, v = self._canonical(x, v)
        object.__setattr__(self, "breakpoints", _frozen(x))
        object.__setattr__(self, "values", _frozen(v))

    @staticmethod
    def _canonical(x: FloatArray, v: FloatArray) -> tuple[FloatArray, FloatArray]:
        if v.size == 0:
            return np.empty(0), np.empty(0)

        # Merge runs of equal values (-0.0 == 0.0 merges as well)
        starts = np.flatnonzero(np.r_[True, v[1:] != v[:-1]])
        x = np.append(x[starts], x[-1])
        v = v[starts]

        nonzero = np.flatnonzero(v != 0)
        if nonzero.size == 0:
            return np.empty(0), np.empty(0)
        lo, hi = nonzero[0], nonzero[-1]
        return x[lo : hi + 2], v[lo : hi + 1] + 0.0

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def zero(cls) -> StepFunction:
        return cls([], [])

    @classmethod
    def indicator(cls, left: float, right: float, value: float = 1.0) -> StepFunction:
        """``value`` on ``[left, right)``."""
        return cls([left, right], [value])

    # Evaluation

    @overload
    def __call__(self, t: float) -> float: ...

    @overload
    def __call__(self, t: NDArray) -> FloatArray: ...

    def __call__(self, t: float | ArrayLike) -> float | FloatArray:
        ts = np.asarray(t, dtype=np.float64)
        if self.values.size == 0:
            out = np.zeros(ts.shape)
        else:
            idx, inside = _locate(self.breakpoints, ts)
            out = np.where(inside, self.values[idx], 0.0)
        return float(out) if out.ndim == 0 else out

    # Structure

    @property
    def is_zero(self) -> bool:
        return self.values.size == 0

    @property
    def support(self) -> tuple[float, float] | None:
        if self.is_zero:
            return None
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def widths(self) -> FloatArray:
        return np.diff(self.breakpoints)

    def pieces(self) -> Iterator[tuple[float, float, float]]:
        """Yield ``(left, right, value)`` for every piece."""
        for left, right, value in zip(
            self.breakpoints[:-1], self.breakpoints[1:], self.values
        ):
            yield float(left), float(right), float(value)

    def shift(self, dx: float) -> StepFunction:
        """The function ``t -> f(t - dx)``."""
        return StepFunction(self.breakpoints + dx, self.values)

    def scale(self, c: float) -> StepFunction:
        return StepFunction(self.breakpoints, c * self.values)

    def integral(self) -> float:
        return math.fsum(self.values * self.widths)

    def l1_norm(self) -> float:
        return math.fsum(np.abs(self.values) * self.widths)

    def l2_norm_sq(self) -> float:
        return math.fsum(self.values**2 * self.widths)

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    # Comparison and display

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(
            self.values, other.values
        )

    def __hash__(self) -> int:
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        if self.is_zero:
            return "StepFunction.zero()"
        pieces = ", ".join(f"[{a:g},{b:g}):{v:g}" for a, b, v in self.pieces())
        return f"StepFunction({pieces})"


# Piecewise-affine functions -----------------------------------------


class PiecewiseLinear:
    """Piecewise-affine function with a constant right tail.

    On ``[nodes[i], nodes[i + 1])`` the function equals ``left_values[i]
    + slopes[i] * (t - nodes[i])``. It is 0 left of ``nodes[0]`` and
    equals ``tail`` from ``nodes[-1]`` on. Continuity is not required.

    """

    __slots__ = ("nodes", "slopes", "left_values", "tail")

    nodes: FloatArray
    slopes: FloatArray
    left_values: FloatArray
    tail: float

    def __init__(
        self,
        nodes: ArrayLike,
        slopes: ArrayLike,
        left_values: ArrayLike,
        tail: float = 0.0,
    ):
        x = np.array(nodes, dtype=np.float64)
        s = np.array(slopes, dtype=np.float64)
        c = np.array(left_values, dtype=np.float64)
        if s.ndim != 1 or s.shape != c.shape:
            raise ValueError("slopes and left_values must be matching 1D arrays")
        _check_nodes(x, s.size, "nodes")
        finite = np.all(np.isfinite(s)) and np.all(np.isfinite(c))
        if not (finite and math.isfinite(tail)):
            raise ValueError("slopes, left_values and tail must be finite")
        if x.size == 0 and tail != 0:
            raise ValueError("a function without nodes must have a zero tail")

        # Trim zero segments on the left and tail-valued segments on the right
        flat = s == 0
        lo = 0
        while lo < s.size and flat[lo] and c[lo] == 0:
            lo += 1
        hi = s.size
        while hi > lo and flat[hi - 1] and c[hi - 1] == tail:
            hi -= 1
        if lo == hi and tail == 0:
            x, s, c = np.empty(0), np.empty(0), np.empty(0)
        else:
            # A bare step to the tail keeps its single anchor node
            x, s, c = x[lo : hi + 1], s[lo:hi], c[lo:hi]

        object.__setattr__(self, "nodes", _frozen(x))
        object.__setattr__(self, "slopes", _frozen(s))
        object.__setattr__(self, "left_values", _frozen(c))
        object.__setattr__(self, "tail", float(tail) if x.size else 0.0)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PiecewiseLinear is immutable")

    @classmethod
    def zero(cls) -> PiecewiseLinear:
        return cls([], [], [])

    @classmethod
    def from_step(cls, f: StepFunction) -> PiecewiseLinear:
        return cls(f.breakpoints, np.zeros(f.values.size), f.values)

    @overload
    def __call__(self, t: float) -> float: ...

    @overload
    def __call__(self, t: NDArray) -> FloatArray: ...

    def __call__(self, t: float | ArrayLike) -> float | FloatArray:
        ts = np.asarray(t, dtype=np.float64)
        if self.nodes.size == 0:
            out = np.zeros(ts.shape)
        else:
            idx, inside = _locate(self.nodes, ts)
            if self.slopes.size:
                offset = ts - self.nodes[idx]
                affine = self.left_values[idx] + self.slopes[idx] * offset
            else:
                affine = np.zeros(ts.shape)
            outside = np.where(ts >= self.nodes[-1], self.tail, 0.0)
            out = np.where(inside, affine, outside)
        return float(out) if out.ndim == 0 else out

    def slope_at(self, t: ArrayLike) -> FloatArray:
        """Right derivative at each t (0 outside the node span)."""
        ts = np.asarray(t, dtype=np.float64)
        if self.slopes.size == 0:
            return np.zeros(ts.shape)
        idx, inside = _locate(self.nodes, ts)
        return np.where(inside, self.slopes[idx], 0.0)

    @property
    def right_limits(self) -> FloatArray:
        """Limit of each segment at its right node."""
        return self.left_values + self.slopes * np.diff(self.nodes)

    def integral(self) -> float:
        """Integral over the real line; requires a zero tail."""
        if self.tail != 0:
            raise ValueError("a function with a nonzero tail has no finite integral")
        widths = np.diff(self.nodes)
        return math.fsum(self.left_values * widths + 0.5 * self.slopes * widths**2)

    def __repr__(self) -> str:
        return (
            f"PiecewiseLinear(nodes={self.nodes.tolist()}, "
            f"slopes={self.slopes.tolist()}, "
            f"left_values={self.left_values.tolist()}, tail={self.tail})"
        )


# Operations ---------------------------------------------------------


def evaluate(f: StepFunction | PiecewiseLinear, t: float) -> float:
    """Value of f at t under the half-open convention."""
    return float(f(float(t)))


def linear_combine(terms: Iterable[tuple[float, StepFunction]]) -> StepFunction:
    """Exact pointwise linear combination ``sum(c * f)`` of step functions.

    Values on the merged partition are accumulated in term order, so the
    result only depends on the order of ``terms``.

    """
    active = [(float(c), f) for c, f in terms if c != 0 and not f.is_zero]
    if not active:
        return StepFunction.zero()
    if len(active) == 1:
        c, f = active[0]
        return f.scale(c)

    breaks = np.unique(np.concatenate([f.breakpoints for _, f in active]))
    left = breaks[:-1]
    values = np.zeros(left.size)
    for c, f in active:
        values += c * f(left)
    return StepFunction(breaks, values)


def combine_linear(terms: Iterable[tuple[float, PiecewiseLinear]]) -> PiecewiseLinear:
    """Exact pointwise linear combination of piecewise-affine functions."""
    active = [(float(c), g) for c, g in terms if c != 0 and g.nodes.size]
    if not active:
        return PiecewiseLinear.zero()

    nodes = np.unique(np.concatenate([g.nodes for _, g in active]))
    left = nodes[:-1]
    values = np.zeros(left.size)
    slopes = np.zeros(left.size)
    tail = 0.0
    for c, g in active:
        values += c * g(left)
        slopes += c * g.slope_at(left)
        tail += c * g.tail
    return PiecewiseLinear(nodes, slopes, values, tail)


def antiderivative(f: StepFunction) -> PiecewiseLinear:
    """The continuous primitive F with F = 0 left of the support.

    F has slope ``v_i`` on each piece and equals the total integral
    right of the support.

    """
    if f.is_zero:
        return PiecewiseLinear.zero()
    cumulative = np.concatenate([[0.0], np.cumsum(f.values * f.widths)])
    tail = float(cumulative[-1])
    return PiecewiseLinear(f.breakpoints, f.values, cumulative[:-1], tail)


def sup_abs(g: PiecewiseLinear | StepFunction) -> float:
    """Exact supremum of ``|g|`` over the real line.

    An affine segment attains its extremes at its endpoints, so the
    supremum is the largest of the left values, the one-sided right
    limits and the tail.

    """
    if isinstance(g, StepFunction):
        return g.sup_norm()
    if g.nodes.size == 0:
        return 0.0
    candidates = [abs(g.tail)]
    if g.slopes.size:
        candidates.append(float(np.abs(g.left_values).max()))
        candidates.append(float(np.abs(g.right_limits).max()))
    return max(candidates)


def inner(f: StepFunction, g: StepFunction) -> float:
    """Exact ``integral(f * g)`` over merged breakpoints."""
    if f.is_zero or g.is_zero:
        return 0.0
    breaks = np.unique(np.concatenate([f.breakpoints, g.breakpoints]))
    left = breaks[:-1]
    return math.fsum(f(left) * g(left) * np.diff(breaks))


def l2_dist_sq(f: StepFunction, g: StepFunction) -> float:
    """Exact squared L2 distance ``integral((f - g)^2)``."""
    return linear_combine([(1.0, f), (-1.0, g)]).l2_norm_sq()
