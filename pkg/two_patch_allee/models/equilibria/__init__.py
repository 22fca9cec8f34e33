from .equilibria import (
    Equilibrium,
    EquilibriumSet,
    Linearization,
    Region,
    SolverOptions,
    Stability,
    brute_force_equilibria,
    classify_stability,
    find_equilibria,
    locate_region,
    make_equilibrium,
    nullcline_x,
    nullcline_y_residual,
    polynomial_equilibria_x,
    residual,
)

__all__ = [
    "Equilibrium",
    "EquilibriumSet",
    "Linearization",
    "Region",
    "SolverOptions",
    "Stability",
    "brute_force_equilibria",
    "classify_stability",
    "find_equilibria",
    "locate_region",
    "make_equilibrium",
    "nullcline_x",
    "nullcline_y_residual",
    "polynomial_equilibria_x",
    "residual",
]
