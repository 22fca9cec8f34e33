from .sawtooth import (
    Piece,
    PieceCell,
    check_sawtooth_predicate,
    piece_cells,
    sawtooth_equilibria_exact,
    sawtooth_region_counts,
    thm_sawtooth_predicate,
)

__all__ = [
    "Piece",
    "PieceCell",
    "check_sawtooth_predicate",
    "piece_cells",
    "sawtooth_equilibria_exact",
    "sawtooth_region_counts",
    "thm_sawtooth_predicate",
]
