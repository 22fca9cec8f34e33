from .cli import CliParser, PatchCli, apply_overrides, resolve_config

__all__ = [
    "CliParser",
    "PatchCli",
    "apply_overrides",
    "resolve_config",
]
