"""Tests for the stepfn module."""

import math

import numpy as np
import pytest

from pointrep.stepfn import (
    PiecewiseLinear,
    StepFunction,
    antiderivative,
    combine_linear,
    evaluate,
    inner,
    l2_dist_sq,
    linear_combine,
    sup_abs,
)

SIGNAL1 = StepFunction([0.0, 1.0], [4.0])
SIGNAL2 = StepFunction([0.5, 0.625, 1.0, 1.25], [32 / 3, 0.0, 32 / 3])


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def random_step(rng, pieces=6):
    breaks = np.sort(rng.uniform(-3, 3, size=pieces + 1))
    return StepFunction(breaks, rng.normal(size=pieces))


# Construction -------------------------------------------------------


def test_equal_neighbours_are_merged():
    """Test that adjacent pieces with equal values become one piece."""
    f = StepFunction([0, 1, 2], [3, 3])
    assert f.breakpoints.tolist() == [0.0, 2.0]
    assert f.values.tolist() == [3.0]
    assert f == StepFunction([0, 2], [3])


def test_zero_ends_are_trimmed():
    """Test that zero pieces at either end are dropped."""
    f = StepFunction([0, 1, 2, 3, 4], [0, 5, 0, 0])
    assert f.breakpoints.tolist() == [1.0, 2.0]
    assert f.support == (1.0, 2.0)


def test_all_zero_is_empty():
    """Test that a function with only zero pieces is the zero function."""
    f = StepFunction([0, 1, 2], [0, -0.0])
    assert f.is_zero
    assert f == StepFunction.zero()
    assert f.support is None


@pytest.mark.parametrize(
    "breakpoints, values",
    [
        ([0, 1], [1, 2]),
        ([1, 0], [1]),
        ([0, 0, 1], [1, 2]),
        ([0, math.nan], [1]),
        ([0, 1], [math.inf]),
    ],
)
def test_invalid_construction(breakpoints, values):
    """Test that malformed breakpoints or values are rejected."""
    with pytest.raises(ValueError):
        StepFunction(breakpoints, values)


def test_immutable():
    """Test that neither attributes nor arrays can be modified."""
    f = StepFunction([0, 1], [1])
    with pytest.raises(AttributeError):
        f.values = np.array([2.0])
    with pytest.raises(ValueError):
        f.values[0] = 2.0


# Evaluation ---------------------------------------------------------


@pytest.mark.parametrize(
    "t, expected", [(0.5, 4.0), (-0.1, 0.0), (1.0, 0.0), (0.0, 4.0)]
)
def test_evaluate_half_open(t, expected):
    """Test evaluation under the [left, right) convention."""
    assert evaluate(SIGNAL1, t) == expected


def test_evaluate_array():
    """Test vectorized evaluation returns an array of matching shape."""
    out = SIGNAL2(np.array([[0.5, 0.7], [1.1, 1.25]]))
    assert out.shape == (2, 2)
    assert out.tolist() == [[32 / 3, 0.0], [32 / 3, 0.0]]


def test_zero_function_evaluates_to_zero():
    """Test that the zero function is zero everywhere."""
    assert StepFunction.zero()(3.0) == 0.0
    assert StepFunction.zero()(np.arange(3.0)).tolist() == [0.0, 0.0, 0.0]


# Linear combinations ------------------------------------------------


def test_linear_combine_overlap():
    """Test the combination of two overlapping boxes."""
    f = linear_combine(
        [(2.0, StepFunction.indicator(0, 1)), (-1.0, StepFunction.indicator(0.5, 1.5))]
    )
    assert list(f.pieces()) == [(0.0, 0.5, 2.0), (0.5, 1.0, 1.0), (1.0, 1.5, -1.0)]


def test_linear_combine_cancellation():
    """Test that f - f is the zero function."""
    assert linear_combine([(1.0, SIGNAL2), (-1.0, SIGNAL2)]).is_zero


def test_linear_combine_haar_relation():
    """Test that two scaled fine fathers form a mother wavelet."""
    c = math.sqrt(2) / 2
    f = linear_combine(
        [(c, StepFunction.indicator(0.5, 1.0)), (-c, StepFunction.indicator(0.0, 0.5))]
    )
    assert list(f.pieces()) == [(0.0, 0.5, -c), (0.5, 1.0, c)]


def test_linear_combine_is_pointwise(rng):
    """Test that combinations agree with pointwise arithmetic."""
    f, g = random_step(rng), random_step(rng)
    a, b = 1.7, -0.3
    h = linear_combine([(a, f), (b, g)])
    t = rng.uniform(-4, 4, size=1000)
    np.testing.assert_allclose(h(t), a * f(t) + b * g(t), rtol=0, atol=1e-12)


def test_shift_and_scale():
    """Test translation and scalar multiplication."""
    f = SIGNAL1.shift(2.5).scale(0.5)
    assert list(f.pieces()) == [(2.5, 3.5, 2.0)]


# Integrals and norms ------------------------------------------------


def test_norms():
    """Test integral, L1 and squared L2 norms of known signals."""
    assert SIGNAL1.integral() == 4.0
    assert SIGNAL1.l2_norm_sq() == 16.0
    assert SIGNAL2.integral() == pytest.approx(4.0)
    assert SIGNAL2.l2_norm_sq() == pytest.approx(128 / 3)
    assert StepFunction([0, 1, 2], [-1, 2]).l1_norm() == 3.0


@pytest.mark.parametrize(
    "f, g, expected",
    [
        (SIGNAL1, StepFunction.zero(), 16.0),
        (SIGNAL2, SIGNAL2, 0.0),
        (SIGNAL2, StepFunction.zero(), 128 / 3),
    ],
)
def test_l2_dist_sq(f, g, expected):
    """Test exact squared distances."""
    assert l2_dist_sq(f, g) == pytest.approx(expected, abs=1e-12)


def test_l2_dist_sq_symmetric(rng):
    """Test that the squared distance is symmetric and zero on the diagonal."""
    f, g = random_step(rng), random_step(rng)
    assert l2_dist_sq(f, g) == pytest.approx(l2_dist_sq(g, f), rel=1e-14)
    assert l2_dist_sq(f, f) == 0.0


def test_inner():
    """Test the inner product of overlapping boxes."""
    assert inner(StepFunction.indicator(0, 1), StepFunction.indicator(0.5, 2)) == 0.5
    assert inner(SIGNAL1, StepFunction.zero()) == 0.0


# Antiderivatives ----------------------------------------------------


@pytest.mark.parametrize(
    "t, expected", [(0.5, 0.5), (2.0, 1.0), (-1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]
)
def test_antiderivative_unit_box(t, expected):
    """Test the primitive of the unit box."""
    assert evaluate(antiderivative(StepFunction.indicator(0, 1)), t) == expected


def test_antiderivative_total_mass():
    """Test that the primitive ends at the total integral."""
    assert evaluate(antiderivative(SIGNAL1), 1.0) == 4.0
    assert evaluate(antiderivative(SIGNAL2), 100.0) == pytest.approx(4.0)


def test_antiderivative_slope(rng):
    """Test that the primitive grows at the rate of the function."""
    f = random_step(rng)
    F = antiderivative(f)
    mids = 0.5 * (f.breakpoints[:-1] + f.breakpoints[1:])
    eps = 1e-7
    slopes = (F(mids + eps) - F(mids - eps)) / (2 * eps)
    np.testing.assert_allclose(slopes, f(mids), atol=1e-6)
    np.testing.assert_array_equal(F.slope_at(mids), f(mids))


# Piecewise-affine functions -----------------------------------------


def test_piecewise_linear_tail_anchor():
    """Test a bare step to a constant tail."""
    g = PiecewiseLinear([1.0], [], [], tail=3.0)
    assert g(0.0) == 0.0
    assert g(1.0) == 3.0
    assert g(50.0) == 3.0
    assert sup_abs(g) == 3.0


def test_piecewise_linear_rejects_tail_without_nodes():
    """Test that a nonzero tail needs an anchor node."""
    with pytest.raises(ValueError, match="tail"):
        PiecewiseLinear([], [], [], tail=1.0)


def test_piecewise_linear_integral():
    """Test the integral of a triangle."""
    g = PiecewiseLinear([0.0, 1.0, 2.0], [1.0, -1.0], [0.0, 1.0])
    assert g.integral() == 1.0
    assert g(1.5) == 0.5


def test_piecewise_linear_integral_needs_zero_tail():
    """Test that an infinite integral is refused."""
    with pytest.raises(ValueError):
        antiderivative(SIGNAL1).integral()


def test_combine_linear_cancels_tail():
    """Test that combining primitives of equal mass leaves no tail."""
    g = combine_linear(
        [
            (1.0, antiderivative(StepFunction.indicator(0, 1))),
            (-1.0, antiderivative(StepFunction.indicator(2, 3))),
        ]
    )
    assert g.tail == 0.0
    assert g(1.5) == 1.0
    assert g(2.5) == 0.5
    assert g.integral() == pytest.approx(2.0)


def test_from_step_matches():
    """Test that a step function read as piecewise-affine keeps its values."""
    g = PiecewiseLinear.from_step(SIGNAL2)
    t = np.linspace(0, 2, 81)
    np.testing.assert_array_equal(g(t), SIGNAL2(t))


# Supremum -----------------------------------------------------------


def test_sup_abs_right_limit():
    """Test that an open right end still attains the supremum."""
    assert sup_abs(PiecewiseLinear([0.0, 1.0], [4.0], [-1.0])) == 3.0


def test_sup_abs_zero():
    """Test the supremum of the zero function."""
    assert sup_abs(PiecewiseLinear.zero()) == 0.0
    assert sup_abs(StepFunction.zero()) == 0.0


def test_sup_abs_box_minus_ramp():
    """Test a box minus a quarter ramp, largest at the origin."""
    ramp = PiecewiseLinear([0.0, 4.0], [0.25], [0.0])
    g = combine_linear(
        [(1.0, PiecewiseLinear.from_step(StepFunction.indicator(0, 1))), (-0.25, ramp)]
    )
    assert sup_abs(g) == 1.0


def test_sup_abs_bounds_samples(rng):
    """Test that the exact supremum dominates every sampled value."""
    g = combine_linear(
        [
            (1.0, PiecewiseLinear.from_step(random_step(rng))),
            (-0.7, antiderivative(random_step(rng))),
        ]
    )
    t = np.linspace(-5, 5, 100001)
    sampled = float(np.abs(g(t)).max())
    assert sup_abs(g) >= sampled - 1e-12
    assert sup_abs(g) == pytest.approx(sampled, abs=1e-3)
