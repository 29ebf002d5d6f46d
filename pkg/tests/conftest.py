"""Shared fixtures: kernel warm-up and the four-step-size jump table."""

from __future__ import annotations

import time

import numpy as np
import pytest

from gridscatter import (
    TrajectoryPoint,
    get_system,
    integrate,
    paver_integrate,
    resonant_setup,
)
from gridscatter import experiments


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jit kernels once so timed tests measure physics, not compilers."""
    system = get_system("test1", 0.001)
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)
    integrate(system, "euler", start, 0.001, 0.005)
    integrate(system, "rk4", start, 0.001, 0.005)
    setup = resonant_setup(system, 1, -2, 0.001)
    paver_integrate(system, setup, start, 0.0005, (0.0, 0.005))


@pytest.fixture(scope="session")
def table1_outcome(tmp_path_factory):
    """Run the kappa in {eps, eps/2, eps/5, eps/10} jump comparison once.

    Several tests share the result: the prediction/measurement checks, the
    reconstructed-phase check, the CSV determinism check, and the wall-time
    budget all read from here.
    """
    outdir = tmp_path_factory.mktemp("table1")
    started = time.perf_counter()
    rows, artifacts = experiments.table1(outdir=outdir)
    elapsed = time.perf_counter() - started
    return rows, artifacts, elapsed, outdir
