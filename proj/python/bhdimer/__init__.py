from ._core import (
    BifKind,
    BifurcationPoint,
    BranchPoint,
    BranchRecord,
    EnsembleResult,
    Histogram2D,
    JumpEvent,
    LimitCycle,
    ModeTruncation,
    PhysicalParams,
    PowerSpectrum,
    RampSchedule,
    SampleRow,
    ScaledParams,
    SemiState,
    Stability,
    SweepResult,
    TrajectoryConfig,
    TrajectoryRecord,
    __version__,
    apply_mu_scaling,
    count_switches,
    dominant_frequency,
    drive_for_f,
    f_for_drive,
    histogram2d,
    make_truncation,
    pitchfork_test,
    power_spectrum,
    run_ensemble,
    run_sweep,
    run_trajectory,
    scaled_params,
    suggest_n_max,
    symmetric_equilibria,
    symmetrize_points,
)

__all__ = [
    "BifKind",
    "BifurcationPoint",
    "BranchPoint",
    "BranchRecord",
    "EnsembleResult",
    "Histogram2D",
    "JumpEvent",
    "LimitCycle",
    "ModeTruncation",
    "PhysicalParams",
    "PowerSpectrum",
    "RampSchedule",
    "SampleRow",
    "ScaledParams",
    "SemiState",
    "Stability",
    "SweepResult",
    "TrajectoryConfig",
    "TrajectoryRecord",
    "__version__",
    "apply_mu_scaling",
    "count_switches",
    "dominant_frequency",
    "drive_for_f",
    "f_for_drive",
    "histogram2d",
    "make_truncation",
    "pitchfork_test",
    "power_spectrum",
    "run_ensemble",
    "run_sweep",
    "run_trajectory",
    "scaled_params",
    "suggest_n_max",
    "symmetric_equilibria",
    "symmetrize_points",
]
