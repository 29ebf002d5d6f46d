"""Resonances between the internal frequency and the step-size frequency.

A fixed step kappa injects the sampling frequency Omega = 2*pi/kappa.
Whenever n1*omega(I)/eps + n2*Omega = 0 for co-prime integers (n1, n2),
the slow variables pick up an O(sqrt(eps)) phase-dependent jump.  This
module enumerates the crossings, reconstructs the unwrapped phase at the
crossing, evaluates the stationary-phase jump formula, and measures jumps
directly from trajectories (both by windowed fits around a known crossing
and by a blind scan).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateCrossingError,
    NoResonantHarmonicsError,
    NonMonotoneFrequencyError,
    OverlappingResonanceError,
)
from .systems import FloatArray, SlowFastSystem, TWO_PI, averaged_field
from .trajectory import Trajectory

__all__ = [
    "JumpReport",
    "ResonanceEvent",
    "ScanHit",
    "default_windows",
    "drift_solution",
    "evaluate_jump",
    "exp_envelope",
    "locate_resonances",
    "measure_jump",
    "phase_at_resonance",
    "predict_jump",
    "read_jump_reports",
    "scan_jumps",
    "write_jump_reports",
]

_QUARTER_PI = math.pi / 4.0

# 20-node Gauss-Legendre rule, exact through polynomial degree 39; far more
# than the affine/smooth frequency paths here require.
_GL_NODES, _GL_WEIGHTS = (
    tuple(float(v) for v in arr) for arr in np.polynomial.legendre.leggauss(20)
)


@dataclass(frozen=True)
class ResonanceEvent:
    """One crossing n1*omega/eps + n2*Omega = 0.

    omega_prime_star is the time derivative of omega along the slow drift
    at the crossing (for the built-ins d(omega)/dI1 * dI1/dt = 1), and
    phi_star_unwrapped stays None until phase_at_resonance fills it.
    """

    n1: int
    n2: int
    t_star: float
    I_star: FloatArray
    Omega: float
    omega_prime_star: float
    phi_star_unwrapped: float | None = None
    source_harmonic: int = 0

    def __post_init__(self) -> None:
        if self.n1 < 1:
            raise ValueError("n1 must be a positive integer")
        if self.n2 == 0:
            raise ValueError("n2 must be nonzero")
        if math.gcd(self.n1, abs(self.n2)) != 1:
            raise ValueError(f"(n1, n2) = ({self.n1}, {self.n2}) not co-prime")
        if self.source_harmonic == 0:
            object.__setattr__(self, "source_harmonic", self.n1)

    def with_phase(self, phi_star_unwrapped: float) -> "ResonanceEvent":
        return replace(self, phi_star_unwrapped=phi_star_unwrapped)


@dataclass(frozen=True)
class JumpReport:
    """Predicted vs measured jump of one slow component at one crossing."""

    event: ResonanceEvent
    predicted: float
    measured: float
    window_pre: tuple[float, float]
    window_post: tuple[float, float]
    residual: float

    def __post_init__(self) -> None:
        if self.window_pre[1] > self.window_post[0]:
            raise ValueError("measurement windows overlap")


@dataclass(frozen=True)
class ScanHit:
    """Blind-scan detection: estimated jump at time t."""

    t: float
    jump: float


def drift_solution(
    system: SlowFastSystem, I_start: FloatArray, t_start: float = 0.0
) -> Callable[[float], FloatArray]:
    """Closed-form averaged drift I(t) = I(t_start) + F * (t - t_start).

    Exact whenever the averaged field is constant (all built-ins: F = (1, 0));
    otherwise a first-order model useful only over short spans.
    """
    I0 = np.array(I_start, dtype=float)
    rate = np.asarray(averaged_field(system)(I0.copy()), dtype=float).copy()

    def path(t: float) -> FloatArray:
        return I0 + rate * (t - t_start)

    return path


def _frequency_profile(
    system: SlowFastSystem,
    I_of_t: Callable[[float], FloatArray],
    t_span: tuple[float, float],
    samples: int = 513,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Sample omega along the slow path; reject non-monotone profiles."""
    t_lo, t_hi = t_span
    if not t_hi > t_lo:
        raise ValueError("t_span must satisfy t_span[0] < t_span[1]")
    ts = np.linspace(t_lo, t_hi, samples)
    ws = np.array([system.omega(np.atleast_1d(np.asarray(I_of_t(t), dtype=float))) for t in ts])
    d = np.diff(ws)
    if not (np.all(d > 0.0) or np.all(d < 0.0)):
        raise NonMonotoneFrequencyError(
            "omega is not strictly monotone over the span; crossings would not be simple"
        )
    scale = max(abs(ws[0]), abs(ws[-1]), 1e-300)
    second = np.diff(ws, 2)
    affine = bool(np.all(np.abs(second) <= 1e-9 * scale))
    return ts, ws, affine


def _solve_crossing(
    w_of_t: Callable[[float], float],
    ts: np.ndarray,
    ws: np.ndarray,
    target: float,
    affine: bool,
) -> float:
    if affine:
        slope = (ws[-1] - ws[0]) / (ts[-1] - ts[0])
        return ts[0] + (target - ws[0]) / slope
    # bisection inside the sampled bracket containing the sign change
    signs = np.sign(ws - target)
    flips = np.flatnonzero(signs[:-1] * signs[1:] <= 0.0)
    j = int(flips[0]) if flips.size else len(ts) - 2
    lo, hi = float(ts[j]), float(ts[j + 1])
    f_lo = w_of_t(lo) - target
    tol = 1e-12 * max(1.0, abs(hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (w_of_t(mid) - target) * f_lo > 0.0:
            lo = mid
            f_lo = w_of_t(mid) - target
        else:
            hi = mid
    return 0.5 * (lo + hi)


def locate_resonances(
    system: SlowFastSystem,
    kappa: float,
    t_span: tuple[float, float],
    I_of_t: Callable[[float], FloatArray] | None = None,
    n1_max: int = 11,
    n2_max: int = 40,
) -> list[ResonanceEvent]:
    """Enumerate crossings n1*omega/eps = -n2*Omega inside t_span.

    I_of_t is the closed-form slow solution (defaults to the averaged drift
    from the conventional start I(0) = (-1, 1) at t = 0).  n1 is restricted
    to values that divide some harmonic actually present in the system, so
    only crossings that can kick the slow variables are reported.  Events
    come back sorted by t_star with phi_star_unwrapped unset.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    if n1_max < 1 or n2_max < 1:
        raise ValueError("n1_max and n2_max must be >= 1")
    if I_of_t is None:
        I_of_t = drift_solution(system, np.array([-1.0, 1.0]))
    ts, ws, affine = _frequency_profile(system, I_of_t, t_span)

    def w_of_t(t: float) -> float:
        return float(system.omega(np.atleast_1d(np.asarray(I_of_t(t), dtype=float))))

    w_min, w_max = (min(ws[0], ws[-1]), max(ws[0], ws[-1]))
    Omega = TWO_PI / kappa
    eps = system.eps

    n1_candidates = []
    for n1 in range(1, n1_max + 1):
        if system.harmonics is None:
            n1_candidates.append(n1)
            continue
        if any(series.multiples_of(n1) is not None for series in system.harmonics.values()):
            n1_candidates.append(n1)

    events: list[ResonanceEvent] = []
    for n1 in n1_candidates:
        for n2 in range(-n2_max, n2_max + 1):
            if n2 == 0 or math.gcd(n1, abs(n2)) != 1:
                continue
            target = -n2 * Omega * eps / n1
            if not (w_min <= target <= w_max):
                continue
            t_star = _solve_crossing(w_of_t, ts, ws, target, affine)
            if not (t_span[0] <= t_star <= t_span[1]):
                continue
            I_star = np.atleast_1d(np.asarray(I_of_t(t_star), dtype=float)).copy()
            if affine:
                w_prime = (ws[-1] - ws[0]) / (ts[-1] - ts[0])
            else:
                h = 1e-6 * max(1.0, t_span[1] - t_span[0])
                w_prime = (w_of_t(t_star + h) - w_of_t(t_star - h)) / (2.0 * h)
            events.append(
                ResonanceEvent(
                    n1=n1,
                    n2=n2,
                    t_star=float(t_star),
                    I_star=I_star,
                    Omega=Omega,
                    omega_prime_star=float(w_prime),
                )
            )
    events.sort(key=lambda e: e.t_star)
    return events


def phase_at_resonance(
    traj: Trajectory, event: ResonanceEvent, system: SlowFastSystem
) -> float:
    """Reconstruct the unwrapped phase at t_star from the nearest grid point.

    phi* = phi(t1) + (1/eps) * integral_{t1}^{t*} omega(I(s)) ds with t1 the
    last recorded time <= t* and I(s) continued along the averaged drift
    from the recorded state.  For the built-ins the integrand is affine
    (omega = I1, dI1/dt = 1) and the quadrature is exact.
    """
    t_star = event.t_star
    if t_star < traj.t[0] or t_star > traj.t[-1]:
        raise ValueError(f"t_star = {t_star} outside the trajectory span")
    i1 = int(np.searchsorted(traj.t, t_star, side="right")) - 1
    t1 = float(traj.t[i1])
    phi1 = float(traj.phi_unwrapped[i1])
    if t1 == t_star:
        return phi1
    path = drift_solution(system, traj.I[i1], t_start=t1)
    half = 0.5 * (t_star - t1)
    mid = 0.5 * (t_star + t1)
    acc = 0.0
    for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
        s = mid + half * node
        acc += weight * float(system.omega(path(s)))
    return phi1 + (half * acc) / system.eps


def predict_jump(event: ResonanceEvent, system: SlowFastSystem, component: int = 1) -> float:
    """Stationary-phase jump of I_component across the crossing.

    Fundamental term (harmonic n1):
        a_{n1} * sqrt(2*pi*eps / (n1*|w'|)) * cos(n1*phi* + n2*Omega*t* + sgn(w')*pi/4)
    plus the same expression for every overtone q*n1 present in the
    harmonic data, with amplitude a_{q n1} * sqrt(2*pi*eps/(q*n1*|w'|)) and
    argument q*(n1*phi* + n2*Omega*t*) + sgn(w')*pi/4.  For n1 = 1 and a
    single harmonic this is the bare formula; everything beyond that is a
    stationary-phase extension validated against the partially averaged
    integrator, not against published numbers.
    """
    if event.phi_star_unwrapped is None:
        raise ValueError("event carries no reconstructed phase; run phase_at_resonance first")
    w_prime = event.omega_prime_star
    if w_prime == 0.0:
        raise DegenerateCrossingError(
            f"omega' vanishes at t* = {event.t_star}; the crossing is degenerate"
        )
    if system.harmonics is None or component not in system.harmonics:
        raise NoResonantHarmonicsError(
            f"system {system.name!r} has no harmonic data for component {component}"
        )
    series = system.harmonics[component].multiples_of(event.n1)
    if series is None:
        raise NoResonantHarmonicsError(
            f"no harmonic of component {component} is a multiple of n1={event.n1}"
        )
    shift = math.copysign(_QUARTER_PI, w_prime)
    # Reduce phi* first: the prediction depends on it only mod 2*pi, and the
    # exact fmod makes a 2*pi shift of phi* a true no-op.
    phi_w = event.phi_star_unwrapped % TWO_PI
    theta = event.n1 * phi_w + event.n2 * event.Omega * event.t_star
    total = 0.0
    for m, a in series.terms:
        q = m // event.n1
        amplitude = a * math.sqrt(TWO_PI * system.eps / (q * event.n1 * abs(w_prime)))
        total += amplitude * math.cos(q * theta + shift)
    return total


def default_windows(event: ResonanceEvent, eps: float) -> tuple[float, float]:
    """(delta_inner, delta_outer) fit windows scaled to the resonance-zone width.

    The zone width is O(sqrt(eps/|w'|)); stand off 8 of those and fit over
    the next 24.
    """
    delta = 8.0 * math.sqrt(eps / abs(event.omega_prime_star))
    return delta, 4.0 * delta


def _affine_intercept(t: np.ndarray, y: np.ndarray, center: float) -> float:
    coeffs = np.polyfit(t - center, y, 1)
    return float(coeffs[1])


def measure_jump(
    traj: Trajectory,
    event: ResonanceEvent,
    component: int = 1,
    delta_inner: float | None = None,
    delta_outer: float | None = None,
    *,
    eps: float | None = None,
    predicted: float = math.nan,
    others: Iterable[ResonanceEvent | float] = (),
) -> JumpReport:
    """Measure the jump of I_component across event.t_star by two affine fits.

    Fits y(t) on [t*-Delta, t*-delta] and [t*+delta, t*+Delta] by least
    squares and subtracts the two intercepts at t*; the linear trend removes
    the averaged drift while averaging suppresses the fast oscillation.
    Window defaults need eps (see default_windows).  `others` lists nearby
    events whose crossings must not contaminate the fit windows; `predicted`
    is carried into the report for the residual column.
    """
    if delta_inner is None or delta_outer is None:
        if eps is None:
            raise ValueError("pass explicit windows or eps for the defaults")
        d, D = default_windows(event, eps)
        delta_inner = d if delta_inner is None else delta_inner
        delta_outer = D if delta_outer is None else delta_outer
    if not 0.0 < delta_inner < delta_outer:
        raise ValueError("need 0 < delta_inner < delta_outer")
    t_star = event.t_star
    windows = (
        (t_star - delta_outer, t_star - delta_inner),
        (t_star + delta_inner, t_star + delta_outer),
    )
    gap = float(traj.t[1] - traj.t[0]) if len(traj) > 1 else 0.0
    if windows[0][0] < traj.t[0] - 0.5 * gap or windows[1][1] > traj.t[-1] + 0.5 * gap:
        raise ValueError("measurement windows extend outside the trajectory span")
    for other in others:
        t_other = float(getattr(other, "t_star", other))
        if t_other == t_star:
            continue
        for lo, hi in windows:
            if lo <= t_other <= hi:
                raise OverlappingResonanceError(
                    f"crossing at t = {t_other} contaminates the fit window [{lo}, {hi}]"
                )
    y = traj.component(component)
    intercepts = []
    for lo, hi in windows:
        i = int(np.searchsorted(traj.t, lo))
        j = int(np.searchsorted(traj.t, hi, side="right"))
        if j - i < 2:
            raise ValueError(f"fit window [{lo}, {hi}] holds fewer than two samples")
        intercepts.append(_affine_intercept(traj.t[i:j], y[i:j], t_star))
    measured = intercepts[1] - intercepts[0]
    return JumpReport(
        event=event,
        predicted=predicted,
        measured=measured,
        window_pre=windows[0],
        window_post=windows[1],
        residual=abs(predicted - measured),
    )


def evaluate_jump(
    system: SlowFastSystem,
    traj: Trajectory,
    event: ResonanceEvent,
    component: int = 1,
    delta_inner: float | None = None,
    delta_outer: float | None = None,
    others: Iterable[ResonanceEvent | float] = (),
) -> JumpReport:
    """Fill the phase, predict, and measure in one call."""
    if event.phi_star_unwrapped is None:
        event = event.with_phase(phase_at_resonance(traj, event, system))
    predicted = predict_jump(event, system, component)
    return measure_jump(
        traj,
        event,
        component,
        delta_inner,
        delta_outer,
        eps=system.eps,
        predicted=predicted,
        others=others,
    )


def exp_envelope(eps: float, kappa: float, omega_at_resonance: float, sigma: float) -> float:
    """Order-of-magnitude bound sqrt(eps)*exp(-sigma*2*pi*eps/(omega*kappa)).

    sigma is the analyticity strip half-width of the forcing in phi; it is
    a user-supplied parameter (sigma = 0 collapses the bound to sqrt(eps)).
    An envelope for |n2| = 1 crossings, not a prediction.
    """
    if eps <= 0.0 or kappa <= 0.0 or omega_at_resonance <= 0.0:
        raise ValueError("eps, kappa and omega_at_resonance must be positive")
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    return math.sqrt(eps) * math.exp(-sigma * TWO_PI * eps / (omega_at_resonance * kappa))


def scan_jumps(
    traj: Trajectory,
    component: int = 1,
    threshold: float = 1e-3,
    delta_inner: float = 0.1,
    delta_outer: float = 0.45,
    grid: float = 0.01,
    prune_radius: float | None = None,
) -> list[ScanHit]:
    """Blind scan for step discontinuities in one slow component.

    Slides the two-affine-fit statistic of measure_jump over a uniform grid
    of candidate centers and keeps local maxima above the threshold.
    Overlapping detections are pruned greedily by |jump| within
    prune_radius, default 1.3*(delta_inner + delta_outer): the oscillation
    tails flanking a strong crossing stay measurable out to roughly one
    window length from its center, while the closest same-size crossings
    worth resolving in the built-ins sit >= 1 apart.  Hits come back
    sorted by time.
    """
    if not 0.0 < delta_inner < delta_outer:
        raise ValueError("need 0 < delta_inner < delta_outer")
    if grid <= 0.0 or threshold <= 0.0:
        raise ValueError("grid and threshold must be positive")
    if prune_radius is None:
        prune_radius = 1.3 * (delta_inner + delta_outer)
    t = traj.t
    y = traj.component(component)
    lo = t[0] + delta_outer
    hi = t[-1] - delta_outer
    centers = np.arange(math.ceil(lo / grid - 1e-9), math.floor(hi / grid + 1e-9) + 1) * grid
    if centers.size == 0:
        return []

    zero = np.zeros(1)
    c0 = np.concatenate((zero, np.cumsum(np.ones_like(t))))
    ct = np.concatenate((zero, np.cumsum(t)))
    cy = np.concatenate((zero, np.cumsum(y)))
    ctt = np.concatenate((zero, np.cumsum(t * t)))
    cty = np.concatenate((zero, np.cumsum(t * y)))

    def intercepts(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        i = np.searchsorted(t, a)
        j = np.searchsorted(t, b, side="right")
        n = c0[j] - c0[i]
        St = ct[j] - ct[i]
        Sy = cy[j] - cy[i]
        Stt = ctt[j] - ctt[i]
        Sty = cty[j] - cty[i]
        Sx = St - n * centers
        Sxx = Stt - 2.0 * centers * St + n * centers * centers
        Sxy = Sty - centers * Sy
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = (n * Sxy - Sx * Sy) / (n * Sxx - Sx * Sx)
            intercept = (Sy - slope * Sx) / n
        return intercept, n

    pre, n_pre = intercepts(centers - delta_outer, centers - delta_inner)
    post, n_post = intercepts(centers + delta_inner, centers + delta_outer)
    with np.errstate(invalid="ignore"):
        stat = post - pre
    valid = (n_pre >= 2) & (n_post >= 2) & np.isfinite(stat)
    candidates = np.flatnonzero(valid & (np.abs(stat) >= threshold))
    if candidates.size == 0:
        return []

    order = candidates[np.argsort(-np.abs(stat[candidates]), kind="stable")]
    kept: list[int] = []
    for idx in order:
        if all(abs(centers[idx] - centers[k]) > prune_radius for k in kept):
            kept.append(int(idx))
    kept.sort(key=lambda k: centers[k])
    return [ScanHit(t=float(centers[k]), jump=float(stat[k])) for k in kept]


_REPORT_HEADER = "n1,n2,t_star,phi_star,predicted,measured,residual"


def write_jump_reports(path, reports: Sequence[JumpReport]) -> None:
    """Serialize reports as CSV; floats use repr for lossless round-trips."""
    lines = [_REPORT_HEADER]
    for r in reports:
        e = r.event
        phi = math.nan if e.phi_star_unwrapped is None else e.phi_star_unwrapped
        cells = [str(e.n1), str(e.n2)] + [
            repr(float(v)) for v in (e.t_star, phi, r.predicted, r.measured, r.residual)
        ]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_jump_reports(path) -> np.ndarray:
    """Read a jump-report CSV back as an (n, 7) float array."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != _REPORT_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != 7:
        raise ValueError("jump-report CSV must have 7 columns")
    return data
