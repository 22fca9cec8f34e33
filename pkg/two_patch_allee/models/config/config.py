from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Union

import yaml

from two_patch_allee.models.dynamics import IntegratorOptions
from two_patch_allee.models.equilibria import SolverOptions
from two_patch_allee.models.logger import print
from two_patch_allee.models.patches import (
    Coupling,
    NormalizedParams,
    PatchParams,
    ReactionKind,
    Reactions,
    ReactionTag,
    normalize,
    patch_reactions,
)
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import ConfigError, DomainError

Params = Union[PatchParams, NormalizedParams]

SECTIONS = ("model", "reaction", "coupling", "integrator", "solver", "seed")
PHYSICAL_FIELDS = ("D", "lambda1", "lambda2", "k1", "k2")
NORMALIZED_FIELDS = ("alpha", "beta", "gamma")
INTEGER_FIELDS = ("bracket_grid", "save_stride")


def _number(value: Any, path: str) -> float:
    """Read a number; YAML 1.1 leaves forms like 1e-9 as strings."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"expected a number, got {value!r}", path)


def _integer(value: Any, path: str) -> int:
    number = _number(value, path)
    if not number.is_integer():
        raise ConfigError(f"expected an integer, got {value!r}", path)
    return int(number)


def _mapping(value: Any, path: str, allowed: tuple) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(f"expected a mapping, got {type(value).__name__}", path)
    for key in value:
        if key not in allowed:
            raise ConfigError("unknown key", f"{path}.{key}" if path else str(key))
    return value


def _domain_path(error: DomainError, block: str, fields: tuple) -> ConfigError:
    # DomainError messages open with the offending field name
    name = str(error).split()[0]
    return ConfigError(str(error), f"{block}.{name}" if name in fields else block)


def _parse_reaction(value: Any) -> ReactionKind:
    if isinstance(value, str):
        value = {"kind": value}
    block = _mapping(value, "reaction", ("kind", "a"))
    if "kind" not in block:
        raise ConfigError("missing required field", "reaction.kind")
    try:
        tag = ReactionTag(block["kind"])
    except ValueError:
        kinds = ", ".join(t.value for t in ReactionTag)
        raise ConfigError(f"must be one of {kinds}, got {block['kind']!r}", "reaction.kind")
    if tag is not ReactionTag.CUBIC:
        if "a" in block:
            raise ConfigError("only the cubic reaction takes a viability", "reaction.a")
        return ReactionKind(tag)
    a = _number(block.get("a", constants.DEFAULT_VIABILITY), "reaction.a")
    try:
        return ReactionKind.cubic(a)
    except DomainError as e:
        raise ConfigError(str(e), "reaction.a") from e


def _parse_model(value: Any, reaction: ReactionKind) -> Params:
    if not isinstance(value, Mapping):
        raise ConfigError("expected a mapping", "model")
    form = value.get("form")
    match form:
        case "physical":
            fields = PHYSICAL_FIELDS + ("a1", "a2")
        case "normalized":
            fields = NORMALIZED_FIELDS
        case _:
            raise ConfigError(f"must be 'physical' or 'normalized', got {form!r}", "model.form")
    block = _mapping(value, "model", ("form",) + fields)
    required = PHYSICAL_FIELDS if form == "physical" else NORMALIZED_FIELDS
    for name in required:
        if name not in block:
            raise ConfigError("missing required field", f"model.{name}")
    numbers = {name: _number(block[name], f"model.{name}") for name in fields if name in block}
    if form == "physical":
        viability = reaction.a if reaction.tag is ReactionTag.CUBIC else constants.DEFAULT_VIABILITY
        numbers.setdefault("a1", viability)
        numbers.setdefault("a2", viability)
    try:
        if form == "physical":
            return PatchParams(**numbers)
        return NormalizedParams(**numbers)
    except DomainError as e:
        raise _domain_path(e, "model", fields) from e


def _parse_options(value: Any, block_name: str, options_type: type) -> Any:
    names = tuple(f.name for f in dataclasses.fields(options_type))
    block = _mapping(value, block_name, names)
    kwargs: Dict[str, Any] = {}
    for name, raw in block.items():
        path = f"{block_name}.{name}"
        if name == "method":
            kwargs[name] = str(raw)
        elif name == "x_window":
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise ConfigError("expected a list of two numbers", path)
            kwargs[name] = (_number(raw[0], f"{path}[0]"), _number(raw[1], f"{path}[1]"))
        elif name in INTEGER_FIELDS:
            kwargs[name] = _integer(raw, path)
        else:
            kwargs[name] = _number(raw, path)
    try:
        return options_type(**kwargs)
    except ValueError as e:
        if not isinstance(e, DomainError):
            raise ConfigError(str(e), f"{block_name}.method") from e
        raise _domain_path(e, block_name, names) from e


@dataclass(frozen=True)
class RunConfig:

    # physical or normalized parameters
    model: Params

    # reaction family; the physical cubic takes a1, a2 from the model
    reaction: ReactionKind = ReactionKind.cubic()

    # dispersal form; balanced needs physical parameters
    coupling: Coupling = Coupling.STANDARD

    # time integration settings
    integrator: IntegratorOptions = IntegratorOptions()

    # equilibrium solver settings
    solver: SolverOptions = SolverOptions()

    # seed of every sampling command
    seed: int = 0

    @property
    def physical(self) -> bool:
        return isinstance(self.model, PatchParams)

    @property
    def normalized(self) -> NormalizedParams:
        """
        Normalized parameters of the model.

        :return: NormalizedParams
        """
        return normalize(self.model) if self.physical else self.model

    @property
    def reactions(self) -> Reactions:
        """
        Reactions for the normalized system.

        :return: per-patch reactions for physical models, the reaction otherwise
        """
        return patch_reactions(self.model, self.reaction) if self.physical else self.reaction

    def replace(self, **changes: Any) -> RunConfig:
        """
        Copy with some fields changed.

        :return: new RunConfig
        """
        return dataclasses.replace(self, **changes)

    @staticmethod
    def from_config(config: Mapping[str, Any]) -> RunConfig:
        """
        Create a RunConfig from a configuration document.

        :param config: parsed YAML document
        :return: validated RunConfig
        """
        block = _mapping(config, "", SECTIONS)
        if "model" not in block:
            raise ConfigError("missing required section", "model")
        reaction = _parse_reaction(block.get("reaction", {"kind": "cubic"}))
        model = _parse_model(block["model"], reaction)
        try:
            coupling = Coupling(block.get("coupling", Coupling.STANDARD.value))
        except ValueError:
            raise ConfigError(
                f"must be 'standard' or 'balanced', got {block['coupling']!r}", "coupling"
            )
        if coupling is Coupling.BALANCED and not isinstance(model, PatchParams):
            raise ConfigError("balanced coupling needs the physical form", "coupling")
        integrator = _parse_options(block.get("integrator", {}), "integrator", IntegratorOptions)
        solver = _parse_options(block.get("solver", {}), "solver", SolverOptions)
        seed = _integer(block.get("seed", 0), "seed")
        if seed < 0:
            raise ConfigError(f"must be nonnegative, got {seed}", "seed")
        return RunConfig(model, reaction, coupling, integrator, solver, seed)

    def to_dict(self) -> Dict[str, Any]:
        """
        Create a dictionary representation of this RunConfig.

        :return: dictionary representation
        """
        return {
            "model": self.model.to_dict(),
            "reaction": self.reaction.to_dict(),
            "coupling": self.coupling.value,
            "integrator": self.integrator.to_dict(),
            "solver": self.solver.to_dict(),
            "seed": self.seed,
        }


def parse_config(text: str) -> RunConfig:
    """
    Parse a YAML configuration document.

    :param text: document text
    :return: validated RunConfig
    """
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from e
    if not isinstance(document, Mapping):
        raise ConfigError("the document must be a mapping")
    return RunConfig.from_config(document)


def load_config(path: str) -> RunConfig:
    """
    Read and parse a configuration file.

    :param path: YAML file
    :return: validated RunConfig
    """
    print(f"Loading configuration from {path}...")
    try:
        with open(path, encoding="utf-8") as conf_file:
            text = conf_file.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    return parse_config(text)
