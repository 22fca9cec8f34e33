from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from two_patch_allee.models.equilibria import SolverOptions, find_equilibria
from two_patch_allee.models.logger import Logger
from two_patch_allee.models.patches import (
    NormalizedParams,
    PatchParams,
    ReactionKind,
    normalize,
    patch_reactions,
)
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError, UnsupportedError

SQRT3 = math.sqrt(3)


class CertificateId(str, Enum):
    THM_MAIN = "thm-main"
    COROLLARY = "corollary"
    THM_GENERAL_A = "thm-general-a"
    SAWTOOTH_PREDICATE = "sawtooth-predicate"


class BoundBranch(str, Enum):
    FIRST = "first"
    SECOND = "second"
    TIE = "tie"


class Condition(NamedTuple):

    # human readable inequality
    name: str

    # whether the inequality holds
    holds: bool

    # evaluated left-hand side
    left: float

    # evaluated right-hand side
    right: float


class Eq2Bounds(NamedTuple):
    lower: float
    upper: float


class GeneralABounds(NamedTuple):
    L: float
    U: float


@dataclass
class CertificateVerdict:

    # certificate evaluated
    certificate_id: CertificateId

    # every hypothesis with its evaluated sides
    conditions: List[Condition]

    # named bound values computed along the way
    bounds: Dict[str, float] = field(default_factory=dict)

    # diagnostics that do not take part in the verdict
    flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        """
        Conjunction of all conditions.

        :return: True if every hypothesis holds
        """
        return all(c.holds for c in self.conditions)

    def failing(self) -> List[Condition]:
        """
        Get the conditions that do not hold.

        :return: list of failing conditions
        """
        return [c for c in self.conditions if not c.holds]

    def to_dict(self) -> Dict[str, Union[str, bool, list, dict]]:
        """
        Create a dictionary representation of this verdict.

        :return: dictionary representation
        """
        return {
            "certificate_id": CertificateId(self.certificate_id).value,
            "holds": self.holds,
            "conditions": [
                {"name": c.name, "holds": c.holds, "left": c.left, "right": c.right}
                for c in self.conditions
            ],
            "bounds": dict(self.bounds),
            "flags": dict(self.flags),
        }


def _less(name: str, left: float, right: float) -> Condition:
    # nan on either side never holds
    return Condition(name, bool(left < right), float(left), float(right))


def eq2_bounds(k1: float, k2: float) -> Eq2Bounds:
    """
    Ratio window for lambda1/lambda2 under which only the origin is stationary (a = 1/2).

    :param k1: larger capacity
    :param k2: smaller capacity
    :return: (lower, upper); both nan unless 2 k2 < k1
    """
    if not 0 < 2 * k2 < k1:
        return Eq2Bounds(math.nan, math.nan)
    lower = max(
        2 * SQRT3 * k1**2 / (9 * (k1 - k2) * (2 * k1 - k2)),
        SQRT3 * k1**2 / (18 * (k1 - 2 * k2) * (k1 - k2)),
    )
    upper = 9 * (k1 - 2 * k2) * (k1 - k2) / (2 * SQRT3 * k2**2)
    return Eq2Bounds(lower, upper)


def check_thm_main(p: PatchParams) -> CertificateVerdict:
    """
    Evaluate the extinction certificate for the a = 1/2 cubic reaction.

    :param p: physical parameters with a1 = a2 = 1/2
    :return: verdict with the ratio window in ``bounds``
    """
    if p.a1 != 0.5 or p.a2 != 0.5:
        raise UnsupportedError(
            f"thm-main needs a1 = a2 = 1/2 (got a1={p.a1}, a2={p.a2}); "
            "use check_thm_general_a for other viabilities"
        )
    lower, upper = eq2_bounds(p.k1, p.k2)
    ratio = p.lambda1 / p.lambda2
    conditions = [
        _less("max(lambda1, lambda2) < 4 D", max(p.lambda1, p.lambda2), 4 * p.D),
        _less("2 k2 < k1", 2 * p.k2, p.k1),
        _less("lower < lambda1 / lambda2", lower, ratio),
        _less("lambda1 / lambda2 < upper", ratio, upper),
    ]
    return CertificateVerdict(
        CertificateId.THM_MAIN, conditions, {"lower": lower, "upper": upper, "ratio": ratio}
    )


def _lemma_gamma(gamma: float) -> None:
    if not 0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0,1/2), got {gamma}")


def lemma_omega1_lower_bound(gamma: float) -> Tuple[float, BoundBranch]:
    """
    Lower bound on alpha/beta excluding equilibria from Omega1.

    :param gamma: capacity ratio in (0, 1/2)
    :return: (bound, branch attaining the max); the branches tie at gamma = 2/7
    """
    _lemma_gamma(gamma)
    first = 2 * SQRT3 / (9 * (1 - gamma) * (2 - gamma))
    second = SQRT3 / (18 * (1 - 2 * gamma) * (1 - gamma))
    if math.isclose(first, second, rel_tol=constants.TIE_RTOL):
        return max(first, second), BoundBranch.TIE
    if first > second:
        return first, BoundBranch.FIRST
    return second, BoundBranch.SECOND


def lemma_omega2_upper_bound(gamma: float) -> float:
    """
    Upper bound on alpha/beta excluding equilibria from Omega2.

    :param gamma: capacity ratio in (0, 1/2)
    :return: 9 (1 - 2 gamma)(1 - gamma) / (2 sqrt(3) gamma^2)
    """
    _lemma_gamma(gamma)
    return 9 * (1 - 2 * gamma) * (1 - gamma) / (2 * SQRT3 * gamma**2)


def check_corollary(n: NormalizedParams) -> CertificateVerdict:
    """
    Evaluate the normalized uniqueness certificate. Never raises: failing hypotheses are
    listed in the verdict.

    :param n: normalized parameters
    :return: verdict
    """
    ratio = n.alpha / n.beta
    if 0 < n.gamma < 0.5:
        lower, branch = lemma_omega1_lower_bound(n.gamma)
        upper = lemma_omega2_upper_bound(n.gamma)
    else:
        lower, branch, upper = math.nan, None, math.nan
    conditions = [
        _less("alpha < 4", n.alpha, 4.0),
        _less("beta < 4", n.beta, 4.0),
        _less("gamma < 1/2", n.gamma, 0.5),
        _less("lower < alpha / beta", lower, ratio),
        _less("alpha / beta < upper", ratio, upper),
    ]
    flags = {} if branch is None else {"lower_branch_tie": branch is BoundBranch.TIE}
    return CertificateVerdict(
        CertificateId.COROLLARY, conditions, {"lower": lower, "upper": upper, "ratio": ratio}, flags
    )


def general_a_bounds(a: float, k1: float, k2: float) -> GeneralABounds:
    """
    Ratio bounds for a general viability threshold.

    U evaluates negative for every admissible a, so the upper condition alone never holds; see
    the consistency flag of check_thm_general_a.

    :param a: viability threshold in (0, 1)
    :param k1: larger capacity
    :param k2: smaller capacity, k2 < a k1
    :return: (L, U)
    """
    if not 0 < a < 1:
        raise DomainError(f"viability a must lie in (0,1), got {a}")
    if not (k1 > 0 and k2 > 0):
        raise DomainError(f"capacities must be positive, got k1={k1}, k2={k2}")
    if not k2 < a * k1:
        raise DomainError(f"bounds need k2 < a k1, got k2={k2}, a k1={a * k1}")
    spread = (a + 1) * (a - 0.5) * (a - 2)
    peak = (1 + a * (a - 1)) ** 1.5
    L = (
        2
        * k1**2
        * (spread + peak)
        / (27 * (k1 - k2))
        * max(1 / (a**2 * (k1 - a * k2)), 1 / (a * k1 - k2))
    )
    U = 2 * (a * k1 - k2) * (k1 - k2) * (spread - (1 - a * (1 - a)) ** 1.5) / ((1 - a) * k2**2)
    return GeneralABounds(L, U)


def upper_bound_consistent_at_half(k1: float, k2: float) -> bool:
    """
    Compare U(1/2, k1, k2) with the a = 1/2 upper bound.

    :param k1: larger capacity
    :param k2: smaller capacity, 2 k2 < k1
    :return: True if both agree to relative 1e-9
    """
    return math.isclose(
        general_a_bounds(0.5, k1, k2).U, eq2_bounds(k1, k2).upper, rel_tol=1e-9
    )


def check_thm_general_a(
    p: PatchParams, oracle: bool = False, solver: Optional[SolverOptions] = None
) -> CertificateVerdict:
    """
    Evaluate the extinction certificate for a common viability threshold a.

    With ``oracle`` set and the closed-form upper bound flagged inconsistent, the upper ratio
    condition is replaced by a numeric check that no stationary point has x > a.

    :param p: physical parameters with a1 = a2
    :param oracle: allow the numeric replacement of the upper condition
    :param solver: options for the numeric replacement
    :return: verdict
    """
    a = p.viability
    threshold = 3 * p.D / (a * a - a + 1)
    ratio = p.lambda1 / p.lambda2
    if p.k2 < a * p.k1:
        L, U = general_a_bounds(a, p.k1, p.k2)
    else:
        L, U = math.nan, math.nan
    # consistency does not depend on the capacities; fall back to (1, 1/3) when 2 k2 >= k1
    k1, k2 = (p.k1, p.k2) if 2 * p.k2 < p.k1 else (1.0, 1 / 3)
    consistent = upper_bound_consistent_at_half(k1, k2)
    conditions = [
        _less("max(lambda1, lambda2) < 3 D / (a^2 - a + 1)", max(p.lambda1, p.lambda2), threshold),
        _less("k2 < a k1", p.k2, a * p.k1),
        _less("L < lambda1 / lambda2", L, ratio),
    ]
    use_oracle = oracle and not consistent
    if use_oracle:
        found = find_equilibria(
            normalize(p), patch_reactions(p, ReactionKind.cubic(a)), solver or SolverOptions()
        )
        beyond = [e for e in found if e.x > a]
        Logger.debug(f"{len(beyond)} stationary points with x > {a} replace the U condition")
        conditions.append(
            Condition("no stationary point with x > a", not beyond, float(len(beyond)), 0.0)
        )
    else:
        conditions.append(_less("lambda1 / lambda2 < U", ratio, U))
    return CertificateVerdict(
        CertificateId.THM_GENERAL_A,
        conditions,
        {"L": L, "U": U, "ratio": ratio, "rate_threshold": threshold},
        {"upper_bound_consistent_at_half": consistent, "oracle_upper_condition": use_oracle},
    )


def perfect_mixing_capacity(k1: float, k2: float, lambda1: float, lambda2: float) -> float:
    """
    Total population of two logistic patches in the limit of perfect mixing.

    :param k1: capacity of patch 1
    :param k2: capacity of patch 2
    :param lambda1: growth rate of patch 1
    :param lambda2: growth rate of patch 2
    :return: k1 + k2 + (k1 - k2)(lambda1 k2 - lambda2 k1) / (lambda1 k2 + lambda2 k1)
    """
    for name, value in (("k1", k1), ("k2", k2), ("lambda1", lambda1), ("lambda2", lambda2)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    return k1 + k2 + (k1 - k2) * (lambda1 * k2 - lambda2 * k1) / (lambda1 * k2 + lambda2 * k1)


def guaranteed_equilibrium_count(n: NormalizedParams) -> int:
    """
    Lower bound on the number of nonnegative equilibria for the a = 1/2 cubic reaction.

    :param n: normalized parameters
    :return: 3 for gamma in (1/2, 1], 2 for gamma = 1/2, 1 otherwise
    """
    if n.gamma > 0.5:
        return 3
    if n.gamma == 0.5:
        return 2
    return 1
