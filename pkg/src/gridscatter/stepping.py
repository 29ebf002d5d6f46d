"""Fixed-step integration of slow-fast systems.

Steppers: the explicit Euler map (the object under study), classical
four-stage RK4, the averaged flow, and the partially averaged ("paver")
flow that keeps one resonant phase combination.

The phase state is advanced unwrapped and reduced mod 2*pi at every f/g
evaluation.  Precision budget: the largest unwrapped phase in the shipped
experiments is ~8e6 rad, so a double carries it with ~1e-9 rad absolute
error - far below the ~0.05 rad sensitivity of the jump predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _fastpath
from .errors import IntegrationDivergedError, NoResonantHarmonicsError
from .systems import FloatArray, HarmonicSeries, SlowFastSystem, TWO_PI, averaged_field
from .trajectory import Trajectory, TrajectoryPoint

__all__ = [
    "PaverSetup",
    "euler_step",
    "rk4_step",
    "integrate",
    "averaged_integrate",
    "paver_integrate",
    "resonant_setup",
    "step_count",
]

# Public stepper ids; "reference" is RK4 under a dedicated label for
# high-resolution oracle runs.
_STEPPER_IMPL = {"euler": "euler", "rk4": "rk4", "reference": "rk4"}


def step_count(t_start: float, t_end: float, kappa: float) -> int:
    """ceil((t_end - t_start)/kappa), robust to exact-division roundoff."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    if t_end <= t_start:
        raise ValueError("t_end must exceed the start time")
    return max(1, math.ceil((t_end - t_start) / kappa - 1e-9))


# ---------------------------------------------------------------------------
# generic single-step advances (pure Python reference path)

def _advance_euler(
    system: SlowFastSystem, I: FloatArray, phi: float, kappa: float
) -> tuple[FloatArray, float]:
    phiw = phi % TWO_PI
    I_new = I + kappa * system.f(I, phiw, system.eps)
    phi_new = phi + kappa * (system.omega(I) / system.eps + system.g(I, phiw, system.eps))
    return I_new, phi_new


def _deriv(system: SlowFastSystem, I: FloatArray, phi: float) -> tuple[FloatArray, float]:
    phiw = phi % TWO_PI
    return (
        system.f(I, phiw, system.eps),
        system.omega(I) / system.eps + system.g(I, phiw, system.eps),
    )


def _advance_rk4(
    system: SlowFastSystem, I: FloatArray, phi: float, kappa: float
) -> tuple[FloatArray, float]:
    k1I, k1p = _deriv(system, I, phi)
    k2I, k2p = _deriv(system, I + 0.5 * kappa * k1I, phi + 0.5 * kappa * k1p)
    k3I, k3p = _deriv(system, I + 0.5 * kappa * k2I, phi + 0.5 * kappa * k2p)
    k4I, k4p = _deriv(system, I + kappa * k3I, phi + kappa * k3p)
    I_new = I + (kappa / 6.0) * (k1I + 2.0 * k2I + 2.0 * k3I + k4I)
    phi_new = phi + (kappa / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return I_new, phi_new


_ADVANCE = {"euler": _advance_euler, "rk4": _advance_rk4}


def _check_finite(stepper: str, I: FloatArray, phi: float, step_index: int, t: float) -> None:
    if not (np.all(np.isfinite(I)) and math.isfinite(phi)):
        raise IntegrationDivergedError(stepper, step_index, t)


def euler_step(system: SlowFastSystem, state: TrajectoryPoint, kappa: float) -> TrajectoryPoint:
    """One iteration of the Euler map I+ = I + kappa f, phi+ = phi + kappa(omega/eps + g)."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    I_new, phi_new = _advance_euler(system, state.I, state.phi_unwrapped, kappa)
    t_new = state.t + kappa
    _check_finite("euler", I_new, phi_new, 1, t_new)
    return TrajectoryPoint.make(t_new, I_new, phi_new)


def rk4_step(system: SlowFastSystem, state: TrajectoryPoint, kappa: float) -> TrajectoryPoint:
    """One classical RK4 step (1/6, 1/3, 1/3, 1/6 tableau) on (I, phi)."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    I_new, phi_new = _advance_rk4(system, state.I, state.phi_unwrapped, kappa)
    t_new = state.t + kappa
    _check_finite("rk4", I_new, phi_new, 1, t_new)
    return TrajectoryPoint.make(t_new, I_new, phi_new)


# ---------------------------------------------------------------------------
# whole-run integration

def _python_run(
    system: SlowFastSystem,
    impl: str,
    start: TrajectoryPoint,
    kappa: float,
    n_steps: int,
    stride: int,
) -> np.ndarray:
    advance = _ADVANCE[impl]
    n_rec = _fastpath.records_for(n_steps, stride)
    rows = np.empty((n_rec, 1 + system.dim_slow + 1))
    I = np.asarray(start.I, dtype=float)
    phi = start.phi_unwrapped
    t0 = start.t
    rows[0, 0] = t0
    rows[0, 1:-1] = I
    rows[0, -1] = phi
    r = 1
    for k in range(n_steps):
        I, phi = advance(system, I, phi, kappa)
        kk = k + 1
        if not (np.all(np.isfinite(I)) and math.isfinite(phi)):
            raise IntegrationDivergedError(impl, kk, t0 + kk * kappa)
        if kk % stride == 0 or kk == n_steps:
            rows[r, 0] = t0 + kk * kappa
            rows[r, 1:-1] = I
            rows[r, -1] = phi
            r += 1
    return rows


def _rows_to_trajectory(
    system_name: str, stepper: str, kappa: float, stride: int, rows: np.ndarray
) -> Trajectory:
    dim = rows.shape[1] - 2
    wrapped = rows[:, -1] % TWO_PI
    wrapped[wrapped == TWO_PI] = 0.0  # % can round the residue up to 2*pi itself
    return Trajectory(
        system=system_name,
        stepper=stepper,
        kappa=kappa,
        stride=stride,
        t=rows[:, 0],
        I=rows[:, 1 : 1 + dim],
        phi_wrapped=wrapped,
        phi_unwrapped=rows[:, -1],
    )


def integrate(
    system: SlowFastSystem,
    stepper: str,
    start: TrajectoryPoint,
    kappa: float,
    t_end: float,
    stride: int = 1,
    engine: str = "auto",
) -> Trajectory:
    """Iterate a stepper from `start` to t_end, recording every stride-th step.

    The final step is always recorded.  engine: "python" forces the generic
    path, "fast" the compiled kernels (built-in family only), "auto" picks
    the kernels when they apply.  Both engines execute the identical
    floating-point recurrence.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if stepper not in _STEPPER_IMPL:
        raise ValueError(f"unknown stepper {stepper!r}; choose from {sorted(_STEPPER_IMPL)}")
    impl = _STEPPER_IMPL[stepper]
    n_steps = step_count(start.t, t_end, kappa)

    fast_ok = _fastpath.available() and system.kernel is not None
    if engine == "fast" and not fast_ok:
        raise ValueError("fast engine unavailable for this system")
    use_fast = fast_ok if engine == "auto" else engine == "fast"
    if engine not in ("auto", "fast", "python"):
        raise ValueError(f"unknown engine {engine!r}")

    if use_fast:
        ms, amps = system.kernel.arrays()
        runner = _fastpath.run_euler if impl == "euler" else _fastpath.run_rk4
        state = (float(start.I[0]), float(start.I[1]), start.phi_unwrapped)
        diverged, rows = runner(
            system.eps, kappa, n_steps, stride, start.t, state, system.kernel.mode, ms, amps
        )
        if diverged:
            raise IntegrationDivergedError(impl, diverged, start.t + diverged * kappa)
    else:
        rows = _python_run(system, impl, start, kappa, n_steps, stride)
    return _rows_to_trajectory(system.name, stepper, kappa, stride, rows)


def averaged_integrate(
    system: SlowFastSystem,
    start_J: FloatArray,
    t_end: float,
    kappa: float,
    t_start: float = 0.0,
    phi_start: float = 0.0,
    stride: int = 1,
) -> Trajectory:
    """Integrate the averaged flow J' = F(J) (phase carried along for context).

    F is the phase average of f at eps = 0; for the built-ins F = (1, 0)
    exactly, so J(t) = J(0) + (t - t0, 0).
    """
    F = averaged_field(system)
    slow = SlowFastSystem(
        name=system.name,
        dim_slow=system.dim_slow,
        f=lambda I, phi, eps: F(I),
        g=lambda I, phi, eps: 0.0,
        omega=system.omega,
        omega_prime=system.omega_prime,
        eps=system.eps,
    )
    start = TrajectoryPoint.make(t_start, np.asarray(start_J, dtype=float), phi_start)
    traj = integrate(slow, "rk4", start, kappa, t_end, stride=stride, engine="python")
    return replace(traj, stepper="averaged")


@dataclass(frozen=True)
class PaverSetup:
    """Resonant combination kept by the partially averaged system.

    n1, n2 are the co-prime resonance indices, Omega = 2*pi/kappa the
    sampling frequency of the grid being modeled, and harmonics_used the
    sub-series of multiples of n1 that survive the averaging.
    """

    n1: int
    n2: int
    Omega: float
    harmonics_used: HarmonicSeries
    component: int = 1

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 == 0:
            raise ValueError("need n1 >= 1 and n2 != 0")
        if math.gcd(self.n1, abs(self.n2)) != 1:
            raise ValueError(f"(n1, n2) = ({self.n1}, {self.n2}) not co-prime")


def resonant_setup(
    system: SlowFastSystem, n1: int, n2: int, kappa: float, component: int = 1
) -> PaverSetup:
    """Collect the harmonics resonating at n1*omega/eps + n2*Omega = 0."""
    if system.harmonics is None or component not in system.harmonics:
        raise NoResonantHarmonicsError(
            f"system {system.name!r} has no harmonic data for component {component}"
        )
    sub = system.harmonics[component].multiples_of(n1)
    if sub is None:
        raise NoResonantHarmonicsError(
            f"no harmonic of {system.name!r} component {component} is a multiple of n1={n1}"
        )
    return PaverSetup(n1=n1, n2=n2, Omega=TWO_PI / kappa, harmonics_used=sub, component=component)


def paver_integrate(
    system: SlowFastSystem,
    setup: PaverSetup,
    start: TrajectoryPoint,
    kappa_int: float,
    t_span: tuple[float, float],
    stride: int = 1,
    engine: str = "auto",
) -> Trajectory:
    """Integrate the partially averaged system across one resonance.

    Field: I' = F(I) plus, on the resonant component,
    sum_q a_{q n1} cos(q (n1 phi + n2 Omega t)); phi' = omega(I)/eps.
    This is a genuine ODE - kappa_int is an ordinary RK4 step (default
    choice eps/50 in the pipelines), unrelated to the grid step kappa whose
    resonance is being modeled.
    """
    t0, t_end = t_span
    if abs(start.t - t0) > 1e-9:
        raise ValueError("start.t must match t_span[0]")
    n_steps = step_count(t0, t_end, kappa_int)
    qs = np.array([m // setup.n1 for m, _ in setup.harmonics_used.terms], dtype=np.float64)
    amps = np.array([a for _, a in setup.harmonics_used.terms], dtype=np.float64)
    w = setup.n2 * setup.Omega

    fast_ok = _fastpath.available() and system.kernel is not None and setup.component == 1
    if engine == "fast" and not fast_ok:
        raise ValueError("fast engine unavailable for this paver setup")
    use_fast = fast_ok if engine == "auto" else engine == "fast"

    if use_fast:
        state = (float(start.I[0]), float(start.I[1]), start.phi_unwrapped)
        diverged, rows = _fastpath.run_paver(
            system.eps, kappa_int, n_steps, stride, t0, state, setup.n1, w, qs, amps
        )
        if diverged:
            raise IntegrationDivergedError("paver", diverged, t0 + diverged * kappa_int)
        return _rows_to_trajectory(system.name, "paver", kappa_int, stride, rows)

    F = averaged_field(system)
    n1f = float(setup.n1)
    comp = setup.component
    eps = system.eps

    def deriv(t: float, I: FloatArray, phi: float) -> tuple[FloatArray, float]:
        dI = F(I)
        s = 0.0
        for q, a in zip(qs, amps):
            s += a * math.cos(q * (n1f * phi + w * t))
        dI[comp] = dI[comp] + s
        return dI, system.omega(I) / eps

    n_rec = _fastpath.records_for(n_steps, stride)
    rows = np.empty((n_rec, 1 + system.dim_slow + 1))
    I = np.asarray(start.I, dtype=float)
    phi = start.phi_unwrapped
    rows[0, 0] = t0
    rows[0, 1:-1] = I
    rows[0, -1] = phi
    r = 1
    for k in range(n_steps):
        t = t0 + k * kappa_int
        k1I, k1p = deriv(t, I, phi)
        k2I, k2p = deriv(t + 0.5 * kappa_int, I + 0.5 * kappa_int * k1I, phi + 0.5 * kappa_int * k1p)
        k3I, k3p = deriv(t + 0.5 * kappa_int, I + 0.5 * kappa_int * k2I, phi + 0.5 * kappa_int * k2p)
        k4I, k4p = deriv(t + kappa_int, I + kappa_int * k3I, phi + kappa_int * k3p)
        I = I + (kappa_int / 6.0) * (k1I + 2.0 * k2I + 2.0 * k3I + k4I)
        phi = phi + (kappa_int / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        kk = k + 1
        if not (np.all(np.isfinite(I)) and math.isfinite(phi)):
            raise IntegrationDivergedError("paver", kk, t0 + kk * kappa_int)
        if kk % stride == 0 or kk == n_steps:
            rows[r, 0] = t0 + kk * kappa_int
            rows[r, 1:-1] = I
            rows[r, -1] = phi
            r += 1
    return _rows_to_trajectory(system.name, "paver", kappa_int, stride, rows)
