"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "GridscatterError",
    "IntegrationDivergedError",
    "NoResonantHarmonicsError",
    "DegenerateCrossingError",
    "OverlappingResonanceError",
    "NonMonotoneFrequencyError",
]


class GridscatterError(Exception):
    """Base class for all package-specific failures."""


class IntegrationDivergedError(GridscatterError):
    """A stepper produced a non-finite state component."""

    def __init__(self, stepper: str, step_index: int, t: float):
        self.stepper = stepper
        self.step_index = step_index
        self.t = t
        super().__init__(
            f"{stepper} stepper diverged at step {step_index} (t = {t!r})"
        )


class NoResonantHarmonicsError(GridscatterError):
    """The harmonic data contains no multiple of the requested n1."""


class DegenerateCrossingError(GridscatterError):
    """omega' vanishes at the crossing; the stationary-phase formula fails."""


class OverlappingResonanceError(GridscatterError):
    """Another resonance event sits inside a measurement window."""


class NonMonotoneFrequencyError(GridscatterError):
    """omega is not monotone along the slow solution over the span."""
