"""Measure the slow-variable scattering a fixed integration step creates.

Integrating a system with one fast rotating phase by a fixed-step method
injects the sampling frequency Omega = 2*pi/step.  Each crossing of a
resonance n1*omega/eps + n2*Omega = 0 kicks the slow variables by an
O(sqrt(eps)) amount with a deterministic, phase-dependent sign.  This
package provides the maps, the resonance bookkeeping, the stationary-phase
prediction, measurement utilities, and batch experiment pipelines.
"""

from __future__ import annotations

from .errors import (
    DegenerateCrossingError,
    GridscatterError,
    IntegrationDivergedError,
    NonMonotoneFrequencyError,
    NoResonantHarmonicsError,
    OverlappingResonanceError,
)
from .experiments import (
    FIGURES,
    ExperimentConfig,
    FigureSpec,
    Table1Row,
    default_stride,
    figure_data,
    parse_config_file,
    resolve_kappa,
    run_experiment,
    table1,
    write_manifest,
)
from .resonance import (
    JumpReport,
    ResonanceEvent,
    ScanHit,
    default_windows,
    drift_solution,
    evaluate_jump,
    exp_envelope,
    locate_resonances,
    measure_jump,
    phase_at_resonance,
    predict_jump,
    read_jump_reports,
    scan_jumps,
    write_jump_reports,
)
from .stepping import (
    PaverSetup,
    averaged_integrate,
    euler_step,
    integrate,
    paver_integrate,
    resonant_setup,
    rk4_step,
    step_count,
)
from .systems import (
    HarmonicSeries,
    SlowFastSystem,
    SYSTEM_BUILDERS,
    TWO_PI,
    averaged_field,
    eval_harmonics,
    geometric_series,
    get_system,
)
from .trajectory import Trajectory, TrajectoryPoint, wrap_phase
from .trajectory import read_csv as read_trajectory_csv
from .trajectory import write_csv as write_trajectory_csv

__version__ = "0.1.0"

__all__ = [
    "DegenerateCrossingError",
    "ExperimentConfig",
    "FIGURES",
    "FigureSpec",
    "GridscatterError",
    "HarmonicSeries",
    "IntegrationDivergedError",
    "JumpReport",
    "NoResonantHarmonicsError",
    "NonMonotoneFrequencyError",
    "OverlappingResonanceError",
    "PaverSetup",
    "ResonanceEvent",
    "SYSTEM_BUILDERS",
    "ScanHit",
    "SlowFastSystem",
    "TWO_PI",
    "Table1Row",
    "Trajectory",
    "TrajectoryPoint",
    "averaged_field",
    "averaged_integrate",
    "default_stride",
    "default_windows",
    "drift_solution",
    "euler_step",
    "eval_harmonics",
    "evaluate_jump",
    "exp_envelope",
    "figure_data",
    "geometric_series",
    "get_system",
    "integrate",
    "locate_resonances",
    "measure_jump",
    "parse_config_file",
    "paver_integrate",
    "phase_at_resonance",
    "predict_jump",
    "read_jump_reports",
    "read_trajectory_csv",
    "resolve_kappa",
    "resonant_setup",
    "rk4_step",
    "run_experiment",
    "scan_jumps",
    "step_count",
    "table1",
    "wrap_phase",
    "write_jump_reports",
    "write_manifest",
    "write_trajectory_csv",
    "__version__",
]
