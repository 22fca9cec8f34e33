from .commands import (
    CERTIFICATE_FAILS,
    ERROR,
    OK,
    cmd_basins,
    cmd_check,
    cmd_equilibria,
    cmd_extinction,
    cmd_mixing,
    cmd_simulate,
    cmd_sweep,
    create_basins,
    create_check,
    create_equilibria,
    create_extinction,
    create_help,
    create_mixing,
    create_sawtooth,
    create_simulate,
    create_sweep,
    default_overlays,
    sweep_spec,
    write_verdict,
)

__all__ = [
    "CERTIFICATE_FAILS",
    "ERROR",
    "OK",
    "cmd_basins",
    "cmd_check",
    "cmd_equilibria",
    "cmd_extinction",
    "cmd_mixing",
    "cmd_simulate",
    "cmd_sweep",
    "create_basins",
    "create_check",
    "create_equilibria",
    "create_extinction",
    "create_help",
    "create_mixing",
    "create_sawtooth",
    "create_simulate",
    "create_sweep",
    "default_overlays",
    "sweep_spec",
    "write_verdict",
]
