from .dynamics import (
    BasinReport,
    ExtinctionReport,
    IntegratorOptions,
    InvarianceReport,
    Method,
    MixingEntry,
    Terminal,
    TerminalKind,
    Trajectory,
    basin_sample,
    integrate,
    perfect_mixing_experiment,
    rk4_step,
    verify_global_extinction,
    verify_invariance,
)

__all__ = [
    "BasinReport",
    "ExtinctionReport",
    "IntegratorOptions",
    "InvarianceReport",
    "Method",
    "MixingEntry",
    "Terminal",
    "TerminalKind",
    "Trajectory",
    "basin_sample",
    "integrate",
    "perfect_mixing_experiment",
    "rk4_step",
    "verify_global_extinction",
    "verify_invariance",
]
