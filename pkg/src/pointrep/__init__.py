"""Wavelet thresholding estimates of parent/child reproduction functions.

* stepfn: exact algebra on step and piecewise-affine functions
* haar: Haar index grids, wavelets and the parent-shift cascade
* estimator: coefficient estimates, data-driven thresholds, reconstruction
* simulate: parents, Poisson children and orphans from seeded streams
* risk: L2 risk surfaces, oracle risk and Monte Carlo validation
* ingest: occurrence positions and motif scanning on both strands
* artifacts: atomic CSV and JSON output

"""

from importlib import metadata as _metadata

from pointrep import haar, risk, stepfn
from pointrep.enums import Signal, ThresholdMode, VarianceMode
from pointrep.estimator import (
    CoefficientTable,
    EstimatorConfig,
    ProcessSample,
    estimate,
)
from pointrep.ingest import scan_fasta, to_sample
from pointrep.simulate import SignalSpec, SimConfig, simulate
from pointrep.stepfn import StepFunction

__all__ = [
    "StepFunction",
    "ProcessSample",
    "EstimatorConfig",
    "CoefficientTable",
    "estimate",
    "SignalSpec",
    "SimConfig",
    "simulate",
    "scan_fasta",
    "to_sample",
    "Signal",
    "ThresholdMode",
    "VarianceMode",
    "haar",
    "risk",
    "stepfn",
]

# https://packaging.python.org/en/latest/guides/single-sourcing-package-version/
__version__ = _metadata.version("pointrep")
