"""
Two-patch bistable metapopulation model.

The physical system for densities x1, x2 with capacities k1 >= k2 reads

    x1' = D (x2 - x1) + lambda1 k1 f(x1 / k1)
    x2' = D (x1 - x2) + lambda2 k2 f(x2 / k2)

and the substitution x = x1/k1, y = x2/k2, tau = D t turns it into the normalized system

    x' = gamma y - x + alpha f(x)
    y' = x / gamma - y + beta f(y)

with alpha = lambda1/D, beta = lambda2/D, gamma = k2/k1. Equilibria are preserved by the
substitution (scaled by k1, k2); trajectories are rescaled in time by D.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, NamedTuple, Tuple, Union

import numpy as np

from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError, KinkError, UnsupportedError

ArrayLike = Union[float, np.ndarray]


class ReactionTag(str, Enum):
    CUBIC = "cubic"
    SAWTOOTH = "sawtooth"
    LOGISTIC = "logistic"


class Coupling(str, Enum):
    # D (x2 - x1)
    STANDARD = "standard"
    # D (x2 / k2 - x1 / k1)
    BALANCED = "balanced"


@dataclass(frozen=True)
class ReactionKind:

    # reaction family
    tag: ReactionTag

    # viability threshold; only the cubic uses it
    a: float = constants.DEFAULT_VIABILITY

    def __post_init__(self) -> None:
        object.__setattr__(self, "tag", ReactionTag(self.tag))
        if self.tag is ReactionTag.CUBIC and not 0 < self.a < 1:
            raise DomainError(f"viability a must lie in (0,1), got {self.a}")

    @staticmethod
    def cubic(a: float = constants.DEFAULT_VIABILITY) -> ReactionKind:
        """
        Cubic Allee reaction s(1-s)(s-a).

        :param a: viability threshold in (0,1)
        :return: ReactionKind
        """
        return ReactionKind(ReactionTag.CUBIC, a)

    @staticmethod
    def sawtooth() -> ReactionKind:
        """Piecewise-linear caricature with breakpoints 1/4 and 3/4."""
        return ReactionKind(ReactionTag.SAWTOOTH)

    @staticmethod
    def logistic() -> ReactionKind:
        """Logistic reaction s(1-s)."""
        return ReactionKind(ReactionTag.LOGISTIC)

    def to_dict(self) -> Dict[str, Union[str, float]]:
        """
        Create a dictionary representation of this ReactionKind.

        :return: dictionary representation
        """
        if self.tag is ReactionTag.CUBIC:
            return {"kind": self.tag.value, "a": self.a}
        return {"kind": self.tag.value}

    def __repr__(self) -> str:
        if self.tag is ReactionTag.CUBIC:
            return f"CubicAllee(a={self.a})"
        return self.tag.value.capitalize()


# a single reaction, or one reaction per patch (x-patch, y-patch)
Reactions = Union[ReactionKind, Tuple[ReactionKind, ReactionKind]]


def as_pair(r: Reactions) -> Tuple[ReactionKind, ReactionKind]:
    """
    Expand a reaction selector into per-patch reactions.

    :param r: a ReactionKind or a pair of them
    :return: (x-patch reaction, y-patch reaction)
    """
    if isinstance(r, ReactionKind):
        return r, r
    return r[0], r[1]


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class PatchParams:
    """
    Physical parameters. Patches are reordered on construction so that k2 <= k1;
    ``swapped`` records whether that happened.
    """

    # diffusion rate
    D: float

    # reaction strengths
    lambda1: float
    lambda2: float

    # carrying capacities
    k1: float
    k2: float

    # viability thresholds as fractions of capacity
    a1: float = constants.DEFAULT_VIABILITY
    a2: float = constants.DEFAULT_VIABILITY

    # True when the patches were given with k2 > k1 and have been exchanged
    swapped: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("D", "lambda1", "lambda2", "k1", "k2"):
            _positive(name, getattr(self, name))
        for name in ("a1", "a2"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise DomainError(f"{name} must lie in (0,1), got {value}")
        if self.k2 > self.k1:
            for first, second in (("lambda1", "lambda2"), ("k1", "k2"), ("a1", "a2")):
                value1, value2 = getattr(self, first), getattr(self, second)
                object.__setattr__(self, first, value2)
                object.__setattr__(self, second, value1)
            object.__setattr__(self, "swapped", not self.swapped)

    @property
    def viability(self) -> float:
        """
        Common viability threshold.

        :return: a when a1 == a2
        """
        if self.a1 != self.a2:
            raise UnsupportedError(
                f"patches have different viability thresholds a1={self.a1}, a2={self.a2}"
            )
        return self.a1

    def to_dict(self) -> Dict[str, float]:
        """
        Create a dictionary representation of these parameters.

        :return: dictionary representation
        """
        return {
            "form": "physical",
            "D": self.D,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "k1": self.k1,
            "k2": self.k2,
            "a1": self.a1,
            "a2": self.a2,
        }


@dataclass(frozen=True)
class NormalizedParams:

    # lambda1 / D
    alpha: float

    # lambda2 / D
    beta: float

    # k2 / k1
    gamma: float

    def __post_init__(self) -> None:
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        if not 0 < self.gamma <= 1:
            raise DomainError(f"gamma must lie in (0,1], got {self.gamma}")

    def to_dict(self) -> Dict[str, float]:
        """
        Create a dictionary representation of these parameters.

        :return: dictionary representation
        """
        return {"form": "normalized", "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


class State(NamedTuple):

    # patch-1 density
    x: float

    # patch-2 density
    y: float


def normalize(p: PatchParams) -> NormalizedParams:
    """
    Reduce physical parameters to (alpha, beta, gamma).

    Time is rescaled by tau = D t: equilibria map to equilibria (divided by k1, k2) and
    trajectories are traversed D times faster.

    :param p: physical parameters
    :return: normalized parameters
    """
    return NormalizedParams(p.lambda1 / p.D, p.lambda2 / p.D, p.k2 / p.k1)


def denormalize(
    n: NormalizedParams,
    D: float,
    k1: float,
    a1: float = constants.DEFAULT_VIABILITY,
    a2: float = constants.DEFAULT_VIABILITY,
) -> PatchParams:
    """
    Recover physical parameters from normalized ones, a diffusion rate and a capacity.

    :param n: normalized parameters
    :param D: diffusion rate
    :param k1: capacity of the larger patch
    :return: physical parameters
    """
    _positive("D", D)
    _positive("k1", k1)
    return PatchParams(D, n.alpha * D, n.beta * D, k1, n.gamma * k1, a1, a2)


def patch_reactions(p: PatchParams, r: ReactionKind) -> Tuple[ReactionKind, ReactionKind]:
    """
    Per-patch reactions of the physical system; the cubic takes a1, a2 from the parameters.

    :param p: physical parameters
    :param r: reaction family
    :return: (patch-1 reaction, patch-2 reaction)
    """
    if r.tag is ReactionTag.CUBIC:
        return ReactionKind.cubic(p.a1), ReactionKind.cubic(p.a2)
    return r, r


def reaction_eval(r: ReactionKind, s: ArrayLike) -> ArrayLike:
    """
    Evaluate the growth function.

    :param r: reaction
    :param s: density, scalar or array
    :return: growth value(s)
    """
    match r.tag:
        case ReactionTag.CUBIC:
            return s * (1 - s) * (s - r.a)
        case ReactionTag.SAWTOOTH:
            if np.ndim(s) == 0:
                s = float(s)
                if s < constants.SAWTOOTH_LOW:
                    return -s
                if s <= constants.SAWTOOTH_HIGH:
                    return s - 0.5
                return 1 - s
            s = np.asarray(s, dtype=float)
            return np.where(
                s < constants.SAWTOOTH_LOW,
                -s,
                np.where(s <= constants.SAWTOOTH_HIGH, s - 0.5, 1 - s),
            )
        case ReactionTag.LOGISTIC:
            return s * (1 - s)


def reaction_deriv(r: ReactionKind, s: float) -> float:
    """
    Exact derivative of the growth function.

    :param r: reaction
    :param s: density
    :return: slope at s
    """
    if r.tag is ReactionTag.SAWTOOTH and s in (constants.SAWTOOTH_LOW, constants.SAWTOOTH_HIGH):
        raise KinkError(s)
    return reaction_slope(r, s)


def reaction_slope(r: ReactionKind, s: ArrayLike) -> ArrayLike:
    """
    Derivative of the growth function, taken from the right at sawtooth kinks.

    :param r: reaction
    :param s: density, scalar or array
    :return: slope(s)
    """
    match r.tag:
        case ReactionTag.CUBIC:
            return -3 * s * s + 2 * (1 + r.a) * s - r.a
        case ReactionTag.SAWTOOTH:
            inside = (np.asarray(s) >= constants.SAWTOOTH_LOW) & (
                np.asarray(s) < constants.SAWTOOTH_HIGH
            )
            slope = np.where(inside, 1.0, -1.0)
            return float(slope) if np.ndim(s) == 0 else slope
        case ReactionTag.LOGISTIC:
            return 1 - 2 * s


def reaction_max_unit_interval(r: ReactionKind) -> Tuple[float, float]:
    """
    Closed-form maximum of the growth function on (0,1).

    :param r: cubic or sawtooth reaction
    :return: (argmax, max value)
    """
    match r.tag:
        case ReactionTag.CUBIC:
            s_plus = ((1 + r.a) + math.sqrt(r.a * r.a - r.a + 1)) / 3
            return s_plus, float(reaction_eval(r, s_plus))
        case ReactionTag.SAWTOOTH:
            return constants.SAWTOOTH_HIGH, constants.SAWTOOTH_HIGH - 0.5
        case _:
            raise UnsupportedError(f"no maximum is provided for the {r!r} reaction")


def vector_field(n: NormalizedParams, r: Reactions, st: State) -> State:
    """
    Right-hand side of the normalized system.

    :param n: normalized parameters
    :param r: reaction, or one reaction per patch
    :param st: state (x, y); components may be arrays
    :return: (x', y')
    """
    rx, ry = as_pair(r)
    x, y = st
    return State(
        n.gamma * y - x + n.alpha * reaction_eval(rx, x),
        x / n.gamma - y + n.beta * reaction_eval(ry, y),
    )


def vector_field_physical(
    p: PatchParams,
    r: ReactionKind,
    st: State,
    coupling: Coupling = Coupling.STANDARD,
) -> State:
    """
    Right-hand side of the physical system.

    :param p: physical parameters
    :param r: reaction family; cubic viabilities come from p
    :param st: state (x1, x2)
    :param coupling: standard D(x2 - x1) or balanced D(x2/k2 - x1/k1) dispersal
    :return: (x1', x2')
    """
    r1, r2 = patch_reactions(p, r)
    x1, x2 = st
    if Coupling(coupling) is Coupling.BALANCED:
        flow = p.D * (x2 / p.k2 - x1 / p.k1)
    else:
        flow = p.D * (x2 - x1)
    return State(
        flow + p.lambda1 * p.k1 * reaction_eval(r1, x1 / p.k1),
        -flow + p.lambda2 * p.k2 * reaction_eval(r2, x2 / p.k2),
    )


def vector_field_array(
    n: NormalizedParams, r: Reactions
) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Normalized right-hand side in the (t, u) -> du/dt form integrators expect.

    :param n: normalized parameters
    :param r: reaction(s)
    :return: autonomous right-hand side
    """

    def fun(t: float, u: np.ndarray) -> np.ndarray:
        return np.array(vector_field(n, r, State(u[0], u[1])), dtype=float)

    return fun


def physical_field_array(
    p: PatchParams, r: ReactionKind, coupling: Coupling = Coupling.STANDARD
) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Physical right-hand side in the (t, u) -> du/dt form integrators expect.

    :param p: physical parameters
    :param r: reaction family
    :param coupling: dispersal form
    :return: autonomous right-hand side
    """

    def fun(t: float, u: np.ndarray) -> np.ndarray:
        return np.array(vector_field_physical(p, r, State(u[0], u[1]), coupling), dtype=float)

    return fun


def jacobian(n: NormalizedParams, r: Reactions, st: State, one_sided: bool = False) -> np.ndarray:
    """
    Jacobian of the normalized system.

    :param n: normalized parameters
    :param r: reaction(s)
    :param st: state
    :param one_sided: use right derivatives at sawtooth kinks instead of raising
    :return: 2x2 matrix [[-1 + alpha f'(x), gamma], [1/gamma, -1 + beta f'(y)]]
    """
    rx, ry = as_pair(r)
    deriv = reaction_slope if one_sided else reaction_deriv
    return np.array(
        [
            [-1 + n.alpha * deriv(rx, float(st[0])), n.gamma],
            [1 / n.gamma, -1 + n.beta * deriv(ry, float(st[1]))],
        ]
    )
