"""Slow-fast systems with one fast rotating phase.

A system pairs slowly drifting variables I with a phase phi advancing at
rate omega(I)/eps.  The three built-ins share I1' = 1, omega = I1, g = 0 and
differ only in the phase dependence of I2': a single cosine, an 11-term
cosine sum, and a geometric cosine series with a rational closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

TWO_PI = 2.0 * math.pi

__all__ = [
    "FloatArray",
    "HarmonicSeries",
    "KernelSpec",
    "SlowFastSystem",
    "builtin_test1",
    "builtin_test11",
    "builtin_testinf",
    "eval_harmonics",
    "geometric_series",
    "get_system",
    "averaged_field",
    "SYSTEM_BUILDERS",
]


@dataclass(frozen=True)
class HarmonicSeries:
    """Real cosine series sum_m a_m cos(m*phi) stored as (m, a_m) pairs.

    Indices must be >= 1 and strictly increasing; there is no constant term,
    so the phase average of any series is exactly zero.
    """

    terms: tuple[tuple[int, float], ...]
    closed_form: str | None = None

    def __post_init__(self) -> None:
        terms = tuple((int(m), float(a)) for m, a in self.terms)
        ms = [m for m, _ in terms]
        if not ms:
            raise ValueError("harmonic series needs at least one term")
        if ms[0] < 1:
            raise ValueError("harmonic indices must be >= 1")
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("harmonic indices must be strictly increasing")
        object.__setattr__(self, "terms", terms)

    def coefficient(self, m: int) -> float:
        """Coefficient a_m, zero when the index is absent."""
        for mm, a in self.terms:
            if mm == m:
                return a
        return 0.0

    def multiples_of(self, n1: int) -> HarmonicSeries | None:
        """Sub-series keeping only indices divisible by n1 (None if empty)."""
        sub = tuple((m, a) for m, a in self.terms if m % n1 == 0 and a != 0.0)
        return HarmonicSeries(sub, closed_form=None) if sub else None

    def indices(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.terms)


def eval_harmonics(series: HarmonicSeries, phi: float) -> float:
    """Evaluate sum a_m cos(m*phi)."""
    s = 0.0
    for m, a in series.terms:
        s += a * math.cos(m * phi)
    return s


def geometric_series(m_max: int) -> HarmonicSeries:
    """First m_max terms of sum 2^(1-m) cos(m*phi), any truncation order."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    return HarmonicSeries(
        tuple((m, 2.0 ** (1 - m)) for m in range(1, m_max + 1)),
        closed_form="geometric",
    )


@dataclass(frozen=True)
class KernelSpec:
    """Marks a system as a member of the compiled fast-path family.

    The family is I' = (1, S(phi)), phase rate I1/eps, g = 0, with S either a
    cosine series (mode 0, given by ms/amps) or the geometric closed form
    (4cos(phi) - 2)/(5 - 4cos(phi)) (mode 1).  Metadata only: every system
    also works through the generic pure-Python steppers.
    """

    mode: int
    ms: tuple[int, ...]
    amps: tuple[float, ...]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.asarray(self.ms, dtype=np.int64),
            np.asarray(self.amps, dtype=np.float64),
        )


@dataclass(frozen=True)
class SlowFastSystem:
    """Right-hand sides of a system with one fast rotating phase.

    f(I, phi, eps) is the slow drift, g(I, phi, eps) the O(1) phase-rate
    correction, omega(I) the fast frequency scaled by 1/eps.  f and g must be
    2*pi-periodic in phi.  harmonics optionally maps a zero-based slow
    component index to the exact cosine data of that component of f.
    """

    name: str
    dim_slow: int
    f: Callable[[FloatArray, float, float], FloatArray]
    g: Callable[[FloatArray, float, float], float]
    omega: Callable[[FloatArray], float]
    omega_prime: Callable[[FloatArray], FloatArray]
    eps: float
    harmonics: Mapping[int, HarmonicSeries] | None = None
    kernel: KernelSpec | None = None

    def __post_init__(self) -> None:
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if self.dim_slow < 1:
            raise ValueError("dim_slow must be >= 1")


def _family_system(
    name: str,
    eps: float,
    f2: Callable[[float], float],
    series: HarmonicSeries,
    kernel: KernelSpec,
) -> SlowFastSystem:
    """Assemble a built-in: I' = (1, f2(phi)), omega = I1, g = 0."""

    def f(I: FloatArray, phi: float, eps_: float) -> FloatArray:
        return np.array([1.0, f2(phi)])

    def g(I: FloatArray, phi: float, eps_: float) -> float:
        return 0.0

    def omega(I: FloatArray) -> float:
        return float(I[0])

    def omega_prime(I: FloatArray) -> FloatArray:
        return np.array([1.0, 0.0])

    return SlowFastSystem(
        name=name,
        dim_slow=2,
        f=f,
        g=g,
        omega=omega,
        omega_prime=omega_prime,
        eps=eps,
        harmonics={1: series},
        kernel=kernel,
    )


def builtin_test1(eps: float = 0.001) -> SlowFastSystem:
    """I2' = cos(phi): the single-harmonic system behind the jump table.

    omega = I1 vanishes at I1 = 0 (the actual resonance every run crosses);
    that zero is deliberate and not guarded against.
    """
    series = HarmonicSeries(((1, 1.0),))

    def f2(phi: float) -> float:
        return math.cos(phi)

    return _family_system(
        "test1", eps, f2, series, KernelSpec(mode=0, ms=(1,), amps=(1.0,))
    )


def builtin_test11(eps: float = 0.001) -> SlowFastSystem:
    """I2' = cos(phi) + cos(2 phi)/2 + ... + cos(11 phi)/2**10."""
    series = HarmonicSeries(tuple((m, 2.0 ** (1 - m)) for m in range(1, 12)))

    def f2(phi: float) -> float:
        return eval_harmonics(series, phi)

    return _family_system(
        "test11",
        eps,
        f2,
        series,
        KernelSpec(mode=0, ms=series.indices(), amps=tuple(a for _, a in series.terms)),
    )


# Truncation order for the stored testinf series: 2^(1-64) ~ 1e-19 is below
# double roundoff, so every coefficient a numerical experiment can resolve is
# present.  geometric_series() builds longer truncations on request.
_TESTINF_TERMS = 64


def builtin_testinf(eps: float = 0.001) -> SlowFastSystem:
    """I2' = (4cos(phi) - 2)/(5 - 4cos(phi)), the full geometric series.

    The closed form equals sum_{m>=1} 2^(1-m) cos(m*phi); evaluation uses the
    closed form, harmonic metadata carries the series coefficients.
    """
    series = geometric_series(_TESTINF_TERMS)

    def f2(phi: float) -> float:
        c = math.cos(phi)
        return (4.0 * c - 2.0) / (5.0 - 4.0 * c)

    return _family_system(
        "testinf", eps, f2, series, KernelSpec(mode=1, ms=(), amps=())
    )


SYSTEM_BUILDERS: dict[str, Callable[[float], SlowFastSystem]] = {
    "test1": builtin_test1,
    "test11": builtin_test11,
    "testinf": builtin_testinf,
}


def get_system(name: str, eps: float = 0.001) -> SlowFastSystem:
    """Look up a built-in system by id (test1 | test11 | testinf)."""
    try:
        builder = SYSTEM_BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown system {name!r}; choose from {sorted(SYSTEM_BUILDERS)}"
        ) from None
    return builder(eps)


_QUADRATURE_NODES = 64


def averaged_field(system: SlowFastSystem) -> Callable[[FloatArray], FloatArray]:
    """Phase average F(J) of f(J, phi, 0), the drift of the averaged system.

    Components with harmonic metadata average to exactly zero (a cosine
    series has no constant term).  Remaining components use a periodic
    trapezoid rule, which is spectrally accurate for smooth 2*pi-periodic
    integrands and exact for phase-independent ones.
    """
    harmonic_components = frozenset(system.harmonics or ())

    if system.kernel is not None:
        # Fast-path family: I' = (1, S(phi)) with S a pure cosine series.
        const = np.zeros(system.dim_slow)
        const[0] = 1.0
        for j in harmonic_components:
            const[j] = 0.0
        return lambda J: const.copy()

    nodes = [TWO_PI * k / _QUADRATURE_NODES for k in range(_QUADRATURE_NODES)]

    def F(J: FloatArray) -> FloatArray:
        total = np.zeros(system.dim_slow)
        for phi in nodes:
            total += system.f(J, phi, 0.0)
        total /= _QUADRATURE_NODES
        for j in harmonic_components:
            total[j] = 0.0
        return total

    return F
