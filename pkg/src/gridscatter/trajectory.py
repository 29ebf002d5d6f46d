"""Trajectory containers and their CSV form.

A trajectory stores grid-sampled states column-wise in numpy arrays; the
phase is kept both wrapped to [0, 2*pi) and unwrapped (accumulated), because
jump-phase reconstruction needs the unreduced value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .systems import FloatArray, TWO_PI

__all__ = ["TrajectoryPoint", "Trajectory", "write_csv", "read_csv"]

# Wrapped-vs-unwrapped agreement tolerance.  Reduction uses the double 2*pi,
# which differs from the real period by ~2.4e-16 rad; after ~1.3e6 turns
# (the largest phase in the shipped experiments, ~8e6 rad) the two
# reductions drift apart by up to ~5e-10 rad.
WRAP_TOL = 1e-9


def wrap_phase(phi: float) -> float:
    """Reduce an unwrapped phase into [0, 2*pi).

    The % operator can round a residue a hair below 2*pi up to 2*pi itself
    (e.g. for tiny negative phi), so the boundary is folded back to 0.
    """
    w = phi % TWO_PI
    return 0.0 if w == TWO_PI else w


@dataclass(frozen=True)
class TrajectoryPoint:
    """One grid sample: time, slow vector, wrapped and unwrapped phase."""

    t: float
    I: FloatArray
    phi_wrapped: float
    phi_unwrapped: float

    @classmethod
    def make(cls, t: float, I: FloatArray, phi_unwrapped: float) -> TrajectoryPoint:
        return cls(t, np.asarray(I, dtype=float), wrap_phase(phi_unwrapped), phi_unwrapped)

    def validate(self) -> None:
        if not (0.0 <= self.phi_wrapped < TWO_PI):
            raise ValueError(f"wrapped phase {self.phi_wrapped} outside [0, 2*pi)")
        gap = (self.phi_unwrapped - self.phi_wrapped) % TWO_PI
        if min(gap, TWO_PI - gap) > WRAP_TOL:
            raise ValueError("wrapped and unwrapped phase disagree mod 2*pi")


@dataclass(frozen=True)
class Trajectory:
    """Column-oriented recorded run.

    Recorded times are t0 + k*stride*kappa for k = 0, 1, ... plus always the
    final step, so the last gap may be shorter than stride*kappa.
    """

    system: str
    stepper: str
    kappa: float
    stride: int
    t: FloatArray
    I: FloatArray  # shape (n_points, dim_slow)
    phi_wrapped: FloatArray
    phi_unwrapped: FloatArray

    def __len__(self) -> int:
        return self.t.size

    @property
    def dim_slow(self) -> int:
        return self.I.shape[1]

    def point(self, i: int) -> TrajectoryPoint:
        return TrajectoryPoint(
            float(self.t[i]), self.I[i], float(self.phi_wrapped[i]), float(self.phi_unwrapped[i])
        )

    def component(self, j: int) -> FloatArray:
        return self.I[:, j]

    def window(self, t_lo: float, t_hi: float) -> Trajectory:
        """Sub-trajectory restricted to recorded times in [t_lo, t_hi]."""
        i = int(np.searchsorted(self.t, t_lo, "left"))
        j = int(np.searchsorted(self.t, t_hi, "right"))
        if j - i < 1:
            raise ValueError(f"no recorded points in [{t_lo}, {t_hi}]")
        return Trajectory(
            self.system, self.stepper, self.kappa, self.stride,
            self.t[i:j], self.I[i:j], self.phi_wrapped[i:j], self.phi_unwrapped[i:j],
        )

    def validate(self) -> None:
        """Check the container invariants; raises ValueError on violation.

        Gap equality is checked to 1e-12 relative to the time magnitude:
        differencing times of size |t| cannot be more accurate than that.
        """
        n = len(self)
        if n < 1:
            raise ValueError("trajectory must hold at least one point")
        if self.I.shape != (n, self.dim_slow):
            raise ValueError("column length mismatch")
        gaps = np.diff(self.t)
        if n > 1 and not np.all(gaps > 0.0):
            raise ValueError("times must be strictly increasing")
        step = self.stride * self.kappa
        tol = 1e-12 * max(1.0, float(np.max(np.abs(self.t)))) if n > 1 else 0.0
        if n > 2 and np.any(np.abs(gaps[:-1] - step) > tol):
            raise ValueError("interior gaps must equal stride*kappa")
        if n > 1 and gaps[-1] > step + tol:
            raise ValueError("final gap exceeds stride*kappa")
        offs = (self.phi_unwrapped - self.phi_wrapped) % TWO_PI
        offs = np.minimum(offs, TWO_PI - offs)
        if np.any(offs > WRAP_TOL):
            raise ValueError("wrapped/unwrapped phases disagree mod 2*pi")
        if np.any(self.phi_wrapped < 0.0) or np.any(self.phi_wrapped >= TWO_PI):
            raise ValueError("wrapped phase outside [0, 2*pi)")


def _header(dim_slow: int) -> str:
    cols = ["t"] + [f"I{j + 1}" for j in range(dim_slow)]
    return ",".join(cols + ["phi_wrapped", "phi_unwrapped"])


def write_csv(traj: Trajectory, path: str | Path) -> Path:
    """Serialize a trajectory; shortest round-trip decimal per value.

    repr(float) reads back to the identical double, which is what makes
    re-running an experiment byte-reproducible.
    """
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(_header(traj.dim_slow) + "\n")
        I_cols = [traj.I[:, j] for j in range(traj.dim_slow)]
        for i in range(len(traj)):
            parts = [repr(float(traj.t[i]))]
            parts += [repr(float(col[i])) for col in I_cols]
            parts.append(repr(float(traj.phi_wrapped[i])))
            parts.append(repr(float(traj.phi_unwrapped[i])))
            fh.write(",".join(parts) + "\n")
    return path


def read_csv(
    path: str | Path,
    system: str = "",
    stepper: str = "",
    kappa: float | None = None,
    stride: int = 1,
) -> Trajectory:
    """Parse a trajectory CSV back into a Trajectory.

    The CSV does not embed run metadata; pass it through when known,
    otherwise kappa is inferred from the first recorded gap (stride 1).
    """
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if header[0] != "t" or header[-2:] != ["phi_wrapped", "phi_unwrapped"]:
        raise ValueError(f"{path}: unrecognized trajectory header {header!r}")
    dim = len(header) - 3
    if dim < 1 or data.shape[1] != len(header):
        raise ValueError(f"{path}: column count mismatch")
    t = data[:, 0]
    if kappa is None:
        kappa = float(t[1] - t[0]) if t.size > 1 else math.nan
        stride = 1
    return Trajectory(
        system=system,
        stepper=stepper,
        kappa=kappa,
        stride=stride,
        t=t,
        I=data[:, 1 : 1 + dim],
        phi_wrapped=data[:, 1 + dim],
        phi_unwrapped=data[:, 2 + dim],
    )
