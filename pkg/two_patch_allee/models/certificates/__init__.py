from .certificates import (
    BoundBranch,
    CertificateId,
    CertificateVerdict,
    Condition,
    Eq2Bounds,
    GeneralABounds,
    check_corollary,
    check_thm_general_a,
    check_thm_main,
    eq2_bounds,
    general_a_bounds,
    guaranteed_equilibrium_count,
    lemma_omega1_lower_bound,
    lemma_omega2_upper_bound,
    perfect_mixing_capacity,
    upper_bound_consistent_at_half,
)

__all__ = [
    "BoundBranch",
    "CertificateId",
    "CertificateVerdict",
    "Condition",
    "Eq2Bounds",
    "GeneralABounds",
    "check_corollary",
    "check_thm_general_a",
    "check_thm_main",
    "eq2_bounds",
    "general_a_bounds",
    "guaranteed_equilibrium_count",
    "lemma_omega1_lower_bound",
    "lemma_omega2_upper_bound",
    "perfect_mixing_capacity",
    "upper_bound_consistent_at_half",
]
