"""Tests for the artifacts module."""

import json

import numpy as np
import pytest

from pointrep.artifacts import (
    atomic_write,
    csv_text,
    format_value,
    read_sample,
    read_step_function,
    sidecar_path,
    write_coefficients,
    write_positions,
    write_sample,
    write_step_function,
    write_surface,
    write_validation,
)
from pointrep.estimator import EstimatorConfig, ProcessSample, estimate
from pointrep.haar import HaarIndex
from pointrep.ingest import OccurrenceSet, read_positions, rescale
from pointrep.risk import RiskSurface, ValidationRow
from pointrep.simulate import SimConfig, simulate
from pointrep.stepfn import StepFunction


@pytest.fixture
def sample():
    return simulate(SimConfig(T=200.0, mu=0.2, seed=8))


# Atomic writes ------------------------------------------------------


def test_atomic_write(tmp_path):
    """Test that the file appears with its content and no leftovers."""
    path = atomic_write(tmp_path / "sub" / "out.txt", "hello\n")
    assert path.read_text() == "hello\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_atomic_write_replaces(tmp_path):
    """Test that an existing file is replaced whole."""
    path = tmp_path / "out.txt"
    path.write_text("old content that is longer\n")
    atomic_write(path, "new\n")
    assert path.read_text() == "new\n"


def test_atomic_write_failure_keeps_old_file(tmp_path, mocker):
    """Test that a failed rename leaves the old file and no temporary."""
    path = tmp_path / "out.txt"
    path.write_text("old\n")
    mocker.patch("pointrep.artifacts.os.replace", side_effect=OSError("disk full"))
    with pytest.raises(OSError, match="disk full"):
        atomic_write(path, "new\n")
    assert path.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


@pytest.mark.parametrize(
    "value, text",
    [
        (None, ""),
        (True, "1"),
        (np.bool_(False), "0"),
        (0.1, "0.1"),
        (np.float64(1 / 3), repr(1 / 3)),
        (-3, "-3"),
        ("parent", "parent"),
    ],
)
def test_format_value(value, text):
    """Test the text of every cell type."""
    assert format_value(value) == text


def test_csv_text():
    """Test header and rows with Unix line endings."""
    assert csv_text(("a", "b"), [(1, 2.5), (None, True)]) == "a,b\n1,2.5\n,1\n"


# Step functions -----------------------------------------------------


def test_step_function_file(tmp_path):
    """Test the left,right,value layout and reading it back."""
    f = StepFunction([0.5, 0.625, 1.0, 1.25], [32 / 3, 0.0, 32 / 3])
    path = write_step_function(tmp_path / "h.csv", f)
    lines = path.read_text().splitlines()
    assert lines[0] == "left,right,value"
    assert lines[1] == f"0.5,0.625,{32 / 3!r}"
    assert read_step_function(path) == f


def test_zero_step_function_file(tmp_path):
    """Test that the zero function is a bare header."""
    path = write_step_function(tmp_path / "h.csv", StepFunction.zero())
    assert path.read_text() == "left,right,value\n"
    assert read_step_function(path).is_zero


def test_read_step_function_fills_gaps(tmp_path):
    """Test that missing stretches between pieces read as zero."""
    path = tmp_path / "h.csv"
    path.write_text("left,right,value\n0,1,2\n3,4,5\n")
    f = read_step_function(path)
    assert list(f.pieces()) == [(0.0, 1.0, 2.0), (1.0, 3.0, 0.0), (3.0, 4.0, 5.0)]


def test_read_checks_header(tmp_path):
    """Test that a file with another layout is refused."""
    path = tmp_path / "h.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_step_function(path)


# Samples ------------------------------------------------------------


def test_sample_file(tmp_path, sample):
    """Test rows, sidecar and a bit-exact reread."""
    path = write_sample(tmp_path / "sample.csv", sample, {"seed": 8})
    lines = path.read_text().splitlines()
    assert lines[0] == "role,position"
    assert len(lines) == 1 + sample.n + sample.n_children
    assert lines[1].startswith("parent,")
    assert lines[-1].startswith("child,")

    meta = json.loads(sidecar_path(path).read_text())
    assert meta == {
        "T": 200.0,
        "n": sample.n,
        "n_children": sample.n_children,
        "seed": 8,
    }
    assert read_sample(path) == sample


def test_sample_horizon_override(tmp_path, sample):
    """Test that an explicit T wins over the sidecar."""
    path = write_sample(tmp_path / "sample.csv", sample)
    assert read_sample(path, T=500.0).T == 500.0


def test_sample_without_sidecar(tmp_path):
    """Test that a bare CSV needs an explicit horizon."""
    path = tmp_path / "sample.csv"
    path.write_text("role,position\nparent,1.0\nchild,1.5\n")
    with pytest.raises(ValueError, match="sample.json"):
        read_sample(path)
    assert read_sample(path, T=2.0) == ProcessSample([1.0], [1.5], T=2.0)


def test_sample_rejects_unknown_role(tmp_path):
    """Test that roles other than parent and child are refused."""
    path = tmp_path / "sample.csv"
    path.write_text("role,position\norphan,1.0\n")
    with pytest.raises(ValueError):
        read_sample(path, T=2.0)


def test_sidecar_path():
    """Test the name of the metadata file."""
    assert sidecar_path("out/rep001.csv").as_posix() == "out/rep001.json"


# Positions and reports ----------------------------------------------


def test_positions_file(tmp_path):
    """Test that written positions read back with their comment line."""
    occ = rescale(OccurrenceSet(np.array([1500.0, 250.0]), source="genes"), 1000)
    path = write_positions(tmp_path / "genes.txt", occ)
    assert path.read_text() == "# genes (kilobases)\n0.25\n1.5\n"
    assert read_positions(path.read_text()).positions.tolist() == [0.25, 1.5]


def test_coefficients_file(tmp_path, sample):
    """Test one row per index with thresholding columns."""
    table, _ = estimate(sample, EstimatorConfig(j0=2, A=2))
    path = write_coefficients(tmp_path / "coefficients.csv", table)
    lines = path.read_text().splitlines()
    assert lines[0] == "j,k,beta_hat,b_stat,v_hat,v_tilde,eta,kept,beta_tilde"
    assert len(lines) == 1 + len(table.grid)
    first = lines[1].split(",")
    assert first[:2] == ["-1", "-2"]
    assert first[7] in ("0", "1")


def test_surface_file(tmp_path):
    """Test the γ-major surface rows."""
    surface = RiskSurface(
        gamma_grid=(0.1, 0.2),
        delta_grid=(1.0,),
        reps=5,
        mean_risk=np.array([[0.5], [0.25]]),
        stderr=np.array([[0.1], [0.0]]),
    )
    path = write_surface(tmp_path / "risks.csv", surface)
    assert path.read_text() == (
        "gamma,delta,mean_risk,stderr,reps\n"
        "0.1,1.0,0.5,0.1,5\n"
        "0.2,1.0,0.25,0.0,5\n"
    )


def test_validation_file(tmp_path):
    """Test the validation columns including the z-score."""
    row = ValidationRow(
        index=HaarIndex(2, 3),
        mean=1.5,
        stderr=0.25,
        true_beta=1.0,
        variance=6.25,
        reps=100,
    )
    path = write_validation(tmp_path / "validation.csv", [row])
    assert path.read_text() == (
        "j,k,mean,stderr,true_beta,variance,z_score,reps\n"
        "2,3,1.5,0.25,1.0,6.25,2.0,100\n"
    )
