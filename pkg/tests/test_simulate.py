"""Tests for the simulate module."""

import numpy as np
import pytest

from pointrep.enums import ParentMode, Signal
from pointrep.simulate import (
    SignalSpec,
    SimConfig,
    builtin_signal,
    gen_children,
    gen_orphans,
    gen_parents,
    make_rng,
    simulate,
)
from pointrep.stepfn import StepFunction


@pytest.mark.parametrize(
    "name, pieces",
    [
        ("signal1", [(0.0, 1.0, 4.0)]),
        ("signal2", [(0.5, 0.625, 32 / 3), (0.625, 1.0, 0.0), (1.0, 1.25, 32 / 3)]),
        ("signal3", [(-0.75, -0.5, 1.0), (-0.5, 4.25, 0.0), (4.25, 8.0, 1.0)]),
    ],
)
def test_builtin_signals(name, pieces):
    """Test the three reproduction functions at ν = 4."""
    assert list(builtin_signal(name).pieces()) == pieces


def test_builtin_signal_scales_with_nu():
    """Test that ν multiplies the signal and zero gives nothing."""
    assert builtin_signal(Signal.signal1, 2.0)(0.5) == 2.0
    assert builtin_signal("signal2", 0.0).is_zero


def test_builtin_signal_rejects():
    """Test unknown names and negative amplitudes."""
    with pytest.raises(ValueError, match="unknown"):
        builtin_signal("signal4")
    with pytest.raises(ValueError):
        builtin_signal("signal1", -1.0)


def test_signal_spec():
    """Test built-in and custom signal descriptions."""
    assert SignalSpec().describe() == "signal1(nu=4)"
    box = StepFunction.indicator(0, 2, 0.5)
    custom = SignalSpec(name=None, custom=box)
    assert custom.function() is box
    assert custom.describe() == "custom"
    with pytest.raises(ValueError):
        SignalSpec(name="signal1", custom=box)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(T=0.0, mu=0.1),
        dict(T=10.0),
        dict(T=10.0, mu=-1.0),
        dict(T=10.0, parent_mode="fixed"),
        dict(T=10.0, mu=0.1, orphan_intensity=-0.5),
    ],
)
def test_config_rejects(kwargs):
    """Test invalid simulation setups."""
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_metadata():
    """Test the sidecar description of a setup."""
    config = SimConfig(T=100.0, parent_mode="fixed", n=7, seed=9)
    assert config.parent_mode is ParentMode.fixed
    meta = config.metadata()
    assert meta["parent_mode"] == "fixed"
    assert meta["n"] == 7 and meta["seed"] == 9
    assert meta["signal"] == "signal1(nu=4)"
    assert config.horizon_window == (0.0, 101.0)


# Random streams -----------------------------------------------------


def test_streams_are_reproducible():
    """Test that a seed and stream fix the draws."""
    a = make_rng(5, 2).uniform(size=4)
    b = make_rng(5, 2).uniform(size=4)
    c = make_rng(5, 3).uniform(size=4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_simulate_reproducible():
    """Test that identical (config, stream) give identical samples."""
    config = SimConfig(T=1000.0, mu=0.1, seed=42, orphan_intensity=0.05)
    assert simulate(config, 3) == simulate(config, 3)
    assert simulate(config, 3) != simulate(config, 4)


# Generators ---------------------------------------------------------


def test_fixed_parents():
    """Test that fixed mode draws exactly n sorted uniforms."""
    parents = gen_parents(SimConfig(T=50.0, parent_mode="fixed", n=200), make_rng(1))
    assert parents.size == 200
    assert np.all(np.diff(parents) >= 0)
    assert parents.min() >= 0 and parents.max() <= 50


def test_poisson_parent_count():
    """Test that the Poisson count averages μT."""
    config = SimConfig(T=1000.0, mu=0.1)
    counts = [gen_parents(config, make_rng(0, r)).size for r in range(400)]
    assert np.mean(counts) == pytest.approx(100, abs=2.5)


def test_children_follow_signal():
    """Test that children land where h is positive, at rate ∫h per parent."""
    h = builtin_signal("signal2")
    parents = np.arange(0.0, 100000.0, 20.0)
    children = gen_children(parents, h, make_rng(11))
    offsets = children - np.floor(children / 20.0) * 20.0
    assert np.all(h(offsets) > 0)
    assert children.size / parents.size == pytest.approx(4.0, abs=0.15)
    share = np.mean(offsets < 0.625)
    assert share == pytest.approx(1 / 3, abs=0.03)


def test_child_counts_are_poisson():
    """Test that each parent's child count has Poisson dispersion, mean ∫h."""
    parents = np.arange(0.0, 200000.0, 20.0)
    children = gen_children(parents, builtin_signal("signal1"), make_rng(29))
    counts = np.bincount((children // 20.0).astype(int), minlength=parents.size)
    assert counts.size == parents.size
    assert counts.mean() == pytest.approx(4.0, abs=0.1)
    assert counts.var(ddof=1) == pytest.approx(4.0, abs=0.3)
    assert np.mean(counts == 0) == pytest.approx(np.exp(-4.0), abs=0.006)


def test_children_of_zero_signal():
    """Test that the zero function has no children."""
    assert gen_children([1.0, 2.0], StepFunction.zero(), make_rng(0)).size == 0


def test_children_need_nonnegative_signal():
    """Test that negative reproduction functions are refused."""
    with pytest.raises(ValueError, match="nonnegative"):
        gen_children([1.0], StepFunction([0, 1], [-1]), make_rng(0))


def test_orphans():
    """Test the window and rate of orphans."""
    orphans = gen_orphans(999.0, 0.3, make_rng(4))
    assert orphans.min() >= 0 and orphans.max() <= 1000
    assert orphans.size == pytest.approx(300, abs=60)
    assert gen_orphans(999.0, 0.0, make_rng(4)).size == 0


def test_simulate_zero_signal():
    """Test that a zero signal gives parents without children."""
    zero = SignalSpec(name=None, custom=StepFunction.zero())
    config = SimConfig(T=100.0, mu=0.5, signal=zero)
    sample = simulate(config)
    assert sample.n > 0
    assert sample.n_children == 0
