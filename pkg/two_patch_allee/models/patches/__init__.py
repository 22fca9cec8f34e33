from .patches import (
    Coupling,
    NormalizedParams,
    PatchParams,
    ReactionKind,
    Reactions,
    ReactionTag,
    State,
    as_pair,
    denormalize,
    jacobian,
    normalize,
    patch_reactions,
    physical_field_array,
    reaction_deriv,
    reaction_eval,
    reaction_max_unit_interval,
    reaction_slope,
    vector_field,
    vector_field_array,
    vector_field_physical,
)

__all__ = [
    "Coupling",
    "NormalizedParams",
    "PatchParams",
    "ReactionKind",
    "Reactions",
    "ReactionTag",
    "State",
    "as_pair",
    "denormalize",
    "jacobian",
    "normalize",
    "patch_reactions",
    "physical_field_array",
    "reaction_deriv",
    "reaction_eval",
    "reaction_max_unit_interval",
    "reaction_slope",
    "vector_field",
    "vector_field_array",
    "vector_field_physical",
]
