from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, NoReturn, Optional, Sequence

from two_patch_allee.models.commands import (
    ERROR,
    create_basins,
    create_check,
    create_equilibria,
    create_extinction,
    create_help,
    create_mixing,
    create_sawtooth,
    create_simulate,
    create_sweep,
)
from two_patch_allee.models.config import RunConfig, load_config
from two_patch_allee.models.logger import Logger, print
from two_patch_allee.models.patches import Coupling, PatchParams, ReactionTag, denormalize
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import AlleeError, UsageError

PHYSICAL_FLAGS = ("D", "lambda1", "lambda2", "k1", "k2")
NORMALIZED_FLAGS = ("alpha", "beta", "gamma")


class CliParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on usage errors."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _common_parser() -> CliParser:
    """Options every subcommand accepts; flags override the configuration file."""
    common = CliParser(add_help=False)
    common.add_argument("--config", help="YAML configuration; defaults to $ALLEE_CONFIG_PATH")
    common.add_argument("--seed", type=int, help="seed of every sampling command")
    common.add_argument("--threads", type=int, default=constants.THREADS, help="worker count")
    common.add_argument("--out", help="write the command's data here instead of stdout")
    common.add_argument("--reaction", choices=[t.value for t in ReactionTag])
    common.add_argument("--a", type=float, help="viability of the cubic reaction")
    common.add_argument("--coupling", choices=[c.value for c in Coupling])
    for name in PHYSICAL_FLAGS + NORMALIZED_FLAGS:
        common.add_argument(f"--{name}", type=float, dest=name)
    return common


def _configured_model(p: PatchParams) -> Dict[str, Any]:
    """Model block in the patch order of the configuration, before any canonical swap."""
    model = p.to_dict()
    if p.swapped:
        for first, second in (("lambda1", "lambda2"), ("k1", "k2"), ("a1", "a2")):
            model[first], model[second] = model[second], model[first]
    return model


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """
    Apply command line parameter flags on top of a configuration.

    Normalized flags on a physical model (or the reverse) convert the model first, reading
    normalized parameters with D = k1 = 1. Physical flags name the patches as configured,
    so a model given with k2 > k1 keeps its canonical swap record.

    :param config: configuration from file or defaults
    :param args: parsed command line
    :return: revalidated RunConfig
    """
    physical = {n: getattr(args, n) for n in PHYSICAL_FLAGS if getattr(args, n) is not None}
    normalized = {n: getattr(args, n) for n in NORMALIZED_FLAGS if getattr(args, n) is not None}
    if physical and normalized:
        raise UsageError("physical and normalized parameter flags cannot be mixed")
    document: Dict[str, Any] = config.to_dict()
    model = _configured_model(config.model) if config.physical else document["model"]
    if normalized and isinstance(config.model, PatchParams):
        model = config.normalized.to_dict()
    elif physical and not isinstance(config.model, PatchParams):
        a = config.reaction.a if config.reaction.tag is ReactionTag.CUBIC else 0.5
        model = denormalize(config.model, 1.0, 1.0, a, a).to_dict()
    model.update(physical or normalized)
    if args.reaction is not None and args.reaction != config.reaction.tag.value:
        document["reaction"] = {"kind": args.reaction}
    if args.a is not None:
        document["reaction"] = {"kind": document["reaction"]["kind"], "a": args.a}
        if model["form"] == "physical":
            model["a1"] = model["a2"] = args.a
    if args.coupling is not None:
        document["coupling"] = args.coupling
    if args.seed is not None:
        document["seed"] = args.seed
    document["model"] = model
    return RunConfig.from_config(document)


def resolve_config(args: argparse.Namespace, default_path: str = "") -> RunConfig:
    """
    Load the configuration named on the command line, in the environment or the defaults.

    :param args: parsed command line
    :param default_path: configuration used when --config is absent
    :return: RunConfig with flag overrides applied
    """
    path = args.config or default_path
    if path:
        config = load_config(path)
    else:
        config = RunConfig.from_config({"model": dict(constants.DEFAULT_MODEL)})
    config = apply_overrides(config, args)
    if isinstance(config.model, PatchParams) and config.model.swapped:
        Logger.warning(
            "k2 > k1: patches exchanged so that patch 1 has the larger capacity "
            f"(k1={config.model.k1:g}, k2={config.model.k2:g})"
        )
    return config


class PatchCli:

    # top level argument parser
    parser: CliParser

    # options shared by every command
    common: CliParser

    # parsers of the commands
    subparsers: argparse._SubParsersAction

    # list of cli's commands
    commands: List[Dict[str, Any]]

    def __init__(self, default_config_path: Optional[str] = None) -> None:
        self.default_config_path = (
            constants.CONFIG_PATH if default_config_path is None else default_config_path
        )
        self.commands = []
        self.common = _common_parser()
        self.parser = CliParser(
            prog="two-patch-allee",
            description="Equilibria, certificates and region maps of the two-patch Allee model.",
        )
        self.subparsers = self.parser.add_subparsers(dest="command", metavar="COMMAND")
        self.command_setup()

    def add_parser(self, name: str, description: str) -> CliParser:
        """
        Create the parser of a command with the shared options.

        :param name: command name
        :param description: one line description
        :return: parser to add the command's own arguments to
        """
        return self.subparsers.add_parser(
            name, help=description, description=description, parents=[self.common]
        )

    def create_commands(self) -> None:
        """Create all commands."""
        create_help(self)
        create_equilibria(self)
        create_sawtooth(self)
        create_check(self)
        create_sweep(self)
        create_simulate(self)
        create_mixing(self)
        create_extinction(self)
        create_basins(self)

    def add_command(self, name: str, description: str) -> None:
        """
        Add a command to the list of commands.

        :param name: name of command to add
        :param description: description of command to add
        """
        # check if the command has a parser
        parser = self.subparsers.choices.get(name)
        if parser is not None:
            self.commands.append(
                {
                    "name": name,
                    "description": description,
                    "callback": parser.get_default("callback"),
                }
            )

    def command_setup(self) -> None:
        """Set up commands."""
        self.commands.clear()
        self.create_commands()

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Parse the command line and run the command.

        :param argv: arguments without the program name; defaults to sys.argv
        :return: exit code, 0 on success, 2 for a failing certificate, 1 on any error
        """
        try:
            args = self.parser.parse_args(argv)
            if args.command is None:
                raise UsageError("a command is required; run 'two-patch-allee help'")
            if args.threads < 1:
                raise UsageError(f"--threads must be at least 1, got {args.threads}")
            config = resolve_config(args, self.default_config_path)
            if args.out:
                print(f"Writing {args.command} output to {args.out}")
                with open(args.out, "w", newline="", encoding="utf-8") as out:
                    return args.callback(config, args, out)
            return args.callback(config, args, sys.stdout)
        except (AlleeError, OSError) as e:
            Logger.error(str(e))
            return ERROR
