"""
Exact equilibria of the sawtooth caricature.

On each of the 3 x 3 piece cells the sawtooth is affine, f(s) = m s + c, so stationarity is
the linear system

    (alpha m_x - 1) x + gamma y           = -alpha c_x
    x / gamma           + (beta m_y - 1) y = -beta c_y

solved in closed form and kept when the solution lies in its own cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from two_patch_allee.models.certificates import CertificateId, CertificateVerdict, Condition
from two_patch_allee.models.equilibria import EquilibriumSet, make_equilibrium
from two_patch_allee.models.logger import Logger
from two_patch_allee.models.patches import NormalizedParams, ReactionKind, State
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError

SAWTOOTH = ReactionKind.sawtooth()

BREAKPOINTS = (constants.SAWTOOTH_LOW, constants.SAWTOOTH_HIGH)


class Piece(Enum):
    # (slope, intercept, lower end, upper end)
    LOW = (-1.0, 0.0, 0.0, constants.SAWTOOTH_LOW)
    MID = (1.0, -0.5, constants.SAWTOOTH_LOW, constants.SAWTOOTH_HIGH)
    HIGH = (-1.0, 1.0, constants.SAWTOOTH_HIGH, math.inf)

    @property
    def slope(self) -> float:
        return self.value[0]

    @property
    def intercept(self) -> float:
        return self.value[1]

    @property
    def interval(self) -> Tuple[float, float]:
        return self.value[2], self.value[3]

    def contains(self, s: float, tol: float = constants.BREAKPOINT_TOL) -> bool:
        """
        Check whether s lies in this piece's closed interval, up to tol.

        :param s: density
        :param tol: slack at the ends
        :return: True if inside
        """
        low, high = self.interval
        return low - tol <= s <= high + tol


@dataclass(frozen=True)
class PieceCell:

    # piece of the x density
    px: Piece

    # piece of the y density
    py: Piece

    @property
    def rectangle(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """
        Open box covered by this cell.

        :return: ((x low, x high), (y low, y high))
        """
        return self.px.interval, self.py.interval

    @property
    def name(self) -> str:
        return f"{self.px.name}/{self.py.name}"


def piece_cells() -> List[PieceCell]:
    """
    All piece cells, x piece major.

    :return: the 9 cells tiling the nonnegative quadrant
    """
    return [PieceCell(px, py) for px in Piece for py in Piece]


def _snap(s: float) -> Tuple[float, bool]:
    for breakpoint in BREAKPOINTS:
        if abs(s - breakpoint) <= constants.BREAKPOINT_TOL:
            return breakpoint, True
    return s, False


def _family_meets_cell(n: NormalizedParams, cell: PieceCell, a11: float, b1: float) -> bool:
    """Check whether the line a11 x + gamma y = b1 crosses the cell inside the search box."""
    (x_low, x_high), (y_low, y_high) = cell.rectangle
    x_high = min(x_high, 1 + constants.ORACLE_MARGIN)
    y_high = min(y_high, 1 / n.gamma + constants.ORACLE_MARGIN)
    if x_low > x_high or y_low > y_high:
        return False
    ends = [(b1 - a11 * x) / n.gamma for x in (x_low, x_high)]
    return min(ends) <= y_high and max(ends) >= y_low


def _solve_cell(
    n: NormalizedParams, cell: PieceCell, warnings: List[str]
) -> Optional[Tuple[State, bool]]:
    a11 = n.alpha * cell.px.slope - 1
    a22 = n.beta * cell.py.slope - 1
    b1 = -n.alpha * cell.px.intercept
    b2 = -n.beta * cell.py.intercept
    det = a11 * a22 - 1
    if abs(det) < constants.SINGULAR_TOL:
        consistent = (
            abs(a11 * b2 - b1 / n.gamma) < constants.SINGULAR_TOL
            and abs(n.gamma * b2 - a22 * b1) < constants.SINGULAR_TOL
        )
        if consistent and _family_meets_cell(n, cell, a11, b1):
            warnings.append(f"degenerate family of equilibria in cell {cell.name} ({n})")
            Logger.debug(f"Singular consistent system in cell {cell.name} for {n}")
        return None
    x = (b1 * a22 - n.gamma * b2) / det
    y = (a11 * b2 - b1 / n.gamma) / det
    if x < -constants.BREAKPOINT_TOL or y < -constants.BREAKPOINT_TOL:
        return None
    if not (cell.px.contains(x) and cell.py.contains(y)):
        return None
    x, on_x = _snap(max(x, 0.0))
    y, on_y = _snap(max(y, 0.0))
    return State(x, y), on_x or on_y


def sawtooth_equilibria_exact(n: NormalizedParams) -> EquilibriumSet:
    """
    Enumerate the nonnegative equilibria of the sawtooth system exactly.

    Solutions within 1e-12 of a breakpoint line are snapped onto it and flagged; both adjacent
    cells produce them, so results are deduplicated at 1e-9.

    :param n: normalized parameters
    :return: equilibria sorted by x then y; degenerate families as warnings
    """
    warnings: List[str] = []
    found: List[Tuple[State, bool]] = []
    for cell in piece_cells():
        solution = _solve_cell(n, cell, warnings)
        if solution is None:
            continue
        point, on_breakpoint = solution
        duplicate = next(
            (
                i
                for i, (other, _) in enumerate(found)
                if math.hypot(point.x - other.x, point.y - other.y)
                < constants.SAWTOOTH_DEDUP_TOL
            ),
            None,
        )
        if duplicate is None:
            found.append((point, on_breakpoint))
        elif on_breakpoint:
            found[duplicate] = (point, True)
    equilibria = [make_equilibrium(n, SAWTOOTH, point, on_bp) for point, on_bp in found]
    return EquilibriumSet(equilibria, warnings)


def check_sawtooth_predicate(n: NormalizedParams) -> CertificateVerdict:
    """
    Evaluate the closed-form condition under which the origin is the only sawtooth equilibrium.

    :param n: normalized parameters with gamma in (0, 1/2)
    :return: verdict; ``holds`` is necessary and sufficient for uniqueness
    """
    alpha, beta, gamma = n.alpha, n.beta, n.gamma
    if not 0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0,1/2), got {gamma}")
    first = alpha * (beta + 1) + beta * (4 * gamma - 3)
    upper_branch = alpha >= 3 * gamma - 1
    conditions = [
        Condition("alpha (beta + 1) + beta (4 gamma - 3) < 0", first < 0, first, 0.0),
    ]
    if upper_branch:
        second = alpha * beta - 3 * alpha + beta
        conditions.append(Condition("alpha beta - 3 alpha + beta < 0", second < 0, second, 0.0))
    else:
        second = alpha * (2 - 3 * gamma) + beta * gamma * (alpha - 1)
        conditions.append(
            Condition("0 < alpha (2 - 3 gamma) + beta gamma (alpha - 1)", second > 0, 0.0, second)
        )
    return CertificateVerdict(
        CertificateId.SAWTOOTH_PREDICATE,
        conditions,
        {"first": first, "second": second, "branch_point": 3 * gamma - 1},
        {"alpha_at_least_branch_point": upper_branch},
    )


def thm_sawtooth_predicate(n: NormalizedParams) -> bool:
    """
    Uniqueness predicate of the sawtooth system.

    :param n: normalized parameters with gamma in (0, 1/2)
    :return: True iff the origin is the only nonnegative equilibrium
    """
    return check_sawtooth_predicate(n).holds


def sawtooth_region_counts(
    gamma: float,
    alpha_axis: Tuple[float, float, int] = (*constants.SWEEP_RANGE, 50),
    beta_axis: Tuple[float, float, int] = (*constants.SWEEP_RANGE, 50),
    threads: int = 1,
):
    """
    Exact equilibrium counts over an (alpha, beta) grid at fixed gamma.

    :param gamma: capacity ratio in (0, 1/2)
    :param alpha_axis: (min, max, steps) of alpha
    :param beta_axis: (min, max, steps) of beta
    :param threads: worker count
    :return: RegionMap with the uniqueness predicate overlaid
    """
    # cartography classifies cells with this module
    from two_patch_allee.models.cartography import Axis, Classifier, Plane, SweepSpec, run_sweep

    if not 0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0,1/2), got {gamma}")
    spec = SweepSpec(
        plane=Plane.ALPHA_BETA,
        x_axis=Axis(*alpha_axis),
        y_axis=Axis(*beta_axis),
        reaction=SAWTOOTH,
        classifier=Classifier.SAWTOOTH_EXACT,
        overlays=(CertificateId.SAWTOOTH_PREDICATE,),
        gamma=gamma,
    )
    return run_sweep(spec, threads=threads)
