"""Trajectory container: wrapping, validation, and lossless CSV round trips.

Wrapping is the binary % against 2*pi, so the oracle is that the residue
lands in [0, 2*pi) and differs from the input by a whole number of turns.
Serialization uses repr(float), whose defining property is exact read-back.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from gridscatter import (
    Trajectory,
    TrajectoryPoint,
    TWO_PI,
    get_system,
    integrate,
    read_trajectory_csv,
    wrap_phase,
    write_trajectory_csv,
)

# ---------------------------------------------------------------------------
# phase wrapping


@given(st.floats(min_value=-1e9, max_value=1e9, allow_nan=False))
def test_wrap_phase_is_a_whole_number_of_turns(phi):
    """wrap_phase lands in [0, 2 pi) and (phi - wrapped) is an integer count
    of turns, up to the rounding of a single fused subtraction."""
    w = wrap_phase(phi)
    assert 0.0 <= w < TWO_PI, f"wrap({phi}) = {w} outside [0, 2*pi)"
    turns = (phi - w) / TWO_PI
    assert abs(turns - round(turns)) <= 1e-9 * max(1.0, abs(turns)), (
        f"wrap({phi}) shifted by {turns} turns, not an integer"
    )


def test_wrap_phase_identity_on_small_values():
    assert wrap_phase(0.0) == 0.0
    assert wrap_phase(1.25) == 1.25
    assert wrap_phase(-1.0) == TWO_PI - 1.0


# ---------------------------------------------------------------------------
# point and container validation


def test_point_make_wraps():
    p = TrajectoryPoint.make(2.0, np.array([0.5, 1.0]), 7.0)
    assert p.phi_unwrapped == 7.0
    assert p.phi_wrapped == 7.0 % TWO_PI
    p.validate()


def test_point_validate_rejects_inconsistent_phase():
    p = TrajectoryPoint(0.0, np.zeros(2), phi_wrapped=0.5, phi_unwrapped=1.5)
    with pytest.raises(ValueError):
        p.validate()


def _small_traj(n=5, kappa=0.25):
    t = kappa * np.arange(n)
    I = np.column_stack([t - 1.0, np.ones(n)])
    phi = 0.1 * t**2
    return Trajectory(
        system="test1",
        stepper="euler",
        kappa=kappa,
        stride=1,
        t=t,
        I=I,
        phi_wrapped=phi % TWO_PI,
        phi_unwrapped=phi,
    )


def test_validate_accepts_uniform_grid():
    _small_traj().validate()


def test_validate_rejects_wrong_gap():
    traj = _small_traj()
    t = traj.t.copy()
    t[2] += 0.01
    broken = Trajectory(
        traj.system, traj.stepper, traj.kappa, traj.stride,
        t, traj.I, traj.phi_wrapped, traj.phi_unwrapped,
    )
    with pytest.raises(ValueError, match="gap"):
        broken.validate()


def test_accessors_and_window():
    traj = _small_traj(n=9, kappa=0.5)
    assert len(traj) == 9
    assert traj.dim_slow == 2
    p = traj.point(3)
    assert p.t == traj.t[3] and p.phi_unwrapped == traj.phi_unwrapped[3]
    assert_allclose(traj.component(0), traj.t - 1.0)

    sub = traj.window(1.0, 3.0)
    assert sub.t[0] >= 1.0 and sub.t[-1] <= 3.0
    assert len(sub) == 5, f"window [1, 3] at gap 0.5 holds 5 samples, got {len(sub)}"
    sub.validate()
    with pytest.raises(ValueError, match="no recorded points"):
        traj.window(100.0, 101.0)


def test_integrator_output_validates():
    """Everything integrate() returns passes its own validator."""
    system = get_system("test1")
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)
    traj = integrate(system, "euler", start, 0.001, 0.1, stride=7)
    traj.validate()
    assert traj.stride == 7


# ---------------------------------------------------------------------------
# CSV round trip


def test_csv_round_trip_is_bitwise(tmp_path):
    """write -> read reproduces every double exactly (repr shortest form)."""
    system = get_system("testinf")
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.3)
    traj = integrate(system, "rk4", start, 0.001, 0.05)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    back = read_trajectory_csv(path, system=traj.system, stepper=traj.stepper,
                               kappa=traj.kappa, stride=traj.stride)
    assert np.array_equal(back.t, traj.t)
    assert np.array_equal(back.I, traj.I)
    assert np.array_equal(back.phi_wrapped, traj.phi_wrapped)
    assert np.array_equal(back.phi_unwrapped, traj.phi_unwrapped)
    back.validate()


def test_csv_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,I1,I2,phi_wrapped,phi_unwrapped\n0,0,0,0,0\n")
    with pytest.raises(ValueError, match="header"):
        read_trajectory_csv(path)


def test_csv_kappa_inferred_from_first_gap(tmp_path):
    traj = _small_traj(kappa=0.125)
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, path)
    back = read_trajectory_csv(path)
    assert back.kappa == 0.125
    back.validate()


def test_csv_single_row(tmp_path):
    """A one-point trajectory survives the trip (loadtxt ndmin guard)."""
    traj = _small_traj(n=1)
    path = tmp_path / "one.csv"
    write_trajectory_csv(traj, path)
    back = read_trajectory_csv(path, kappa=traj.kappa)
    assert len(back) == 1
    assert back.I.shape == (1, 2)
