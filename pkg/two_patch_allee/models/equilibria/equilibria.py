from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy import ndimage
from scipy.optimize import brentq, minimize_scalar

from two_patch_allee.models.logger import Logger
from two_patch_allee.models.patches import (
    NormalizedParams,
    Reactions,
    ReactionTag,
    State,
    as_pair,
    jacobian,
    reaction_eval,
    vector_field,
)
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError, KinkError, UnsupportedError


class Stability(str, Enum):
    STABLE_NODE = "stable-node"
    STABLE_FOCUS = "stable-focus"
    SADDLE = "saddle"
    UNSTABLE_NODE = "unstable-node"
    UNSTABLE_FOCUS = "unstable-focus"
    NONHYPERBOLIC = "nonhyperbolic"

    @property
    def is_stable(self) -> bool:
        return self in (Stability.STABLE_NODE, Stability.STABLE_FOCUS)


class Region(str, Enum):
    ORIGIN = "origin"
    OMEGA1 = "Omega1"
    OMEGA2 = "Omega2"
    OMEGA_HAT1 = "OmegaHat1"
    OMEGA_HAT2 = "OmegaHat2"
    OMEGA_HAT3 = "OmegaHat3"
    OTHER = "other"


@dataclass(frozen=True)
class SolverOptions:

    # number of subintervals scanned for sign changes
    bracket_grid: int = constants.BRACKET_GRID

    # absolute tolerance of the bracketing refinement
    root_tol: float = constants.ROOT_TOL

    # roots closer than this are merged
    dedup_tol: float = constants.DEDUP_TOL

    # x interval searched; nonnegative equilibria always have x in [0, 1]
    x_window: Tuple[float, float] = constants.X_WINDOW

    # |g| at a refined extremum below this is reported as a near tangency
    tangency_tol: float = constants.TANGENCY_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_window", tuple(float(v) for v in self.x_window))
        if self.bracket_grid < constants.MIN_BRACKET_GRID:
            raise DomainError(
                f"bracket_grid must be at least {constants.MIN_BRACKET_GRID}, "
                f"got {self.bracket_grid}"
            )
        if not 0 < self.root_tol < self.dedup_tol:
            raise DomainError("tolerances must satisfy 0 < root_tol < dedup_tol")
        if len(self.x_window) != 2 or not self.x_window[0] < self.x_window[1]:
            raise DomainError(f"x_window must be an increasing pair, got {self.x_window}")
        if self.tangency_tol < 0:
            raise DomainError("tangency_tol must be nonnegative")

    def to_dict(self) -> Dict[str, Union[int, float, List[float]]]:
        """
        Create a dictionary representation of these options.

        :return: dictionary representation
        """
        return {
            "bracket_grid": self.bracket_grid,
            "root_tol": self.root_tol,
            "dedup_tol": self.dedup_tol,
            "x_window": list(self.x_window),
            "tangency_tol": self.tangency_tol,
        }


class Linearization(NamedTuple):

    # Jacobian eigenvalues ordered by real part
    eigenvalues: Tuple[complex, complex]

    # classification by the signs of the real parts
    stability: Stability

    # True when the point sits on a sawtooth kink (one-sided eigenvalues)
    at_kink: bool = False


@dataclass(frozen=True)
class Equilibrium:

    # stationary point of the normalized system
    point: State

    # Jacobian eigenvalues
    eigenvalues: Tuple[complex, complex]

    # stability class
    stability: Stability

    # a priori region the point falls in
    region: Region

    # point on a sawtooth kink
    at_kink: bool = False

    # point on a sawtooth breakpoint line, found by continuity
    breakpoint: bool = False

    @property
    def x(self) -> float:
        return self.point.x

    @property
    def y(self) -> float:
        return self.point.y

    def to_dict(self) -> Dict[str, Union[float, str, bool, List[float]]]:
        """
        Create a dictionary representation of this Equilibrium.

        :return: dictionary representation
        """
        return {
            "x": self.x,
            "y": self.y,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "stability": self.stability.value,
            "region": self.region.value,
            "at_kink": self.at_kink,
            "breakpoint": self.breakpoint,
        }

    def __repr__(self) -> str:
        return (
            f"Equilibrium(x={self.x:.12g},y={self.y:.12g},"
            f"stability={self.stability.value},region={self.region.value})"
        )


class EquilibriumSet:

    # equilibria sorted by x then y
    equilibria: List[Equilibrium]

    # solver diagnostics: degenerate roots, near tangencies, residual excess
    warnings: List[str]

    def __init__(self, equilibria: Sequence[Equilibrium], warnings: Sequence[str] = ()) -> None:
        self.equilibria = sorted(equilibria, key=lambda e: (e.x, e.y))
        self.warnings = list(warnings)

    @property
    def points(self) -> List[State]:
        """
        Get the equilibrium locations.

        :return: list of states
        """
        return [e.point for e in self.equilibria]

    @property
    def degenerate(self) -> bool:
        """
        Check whether the solver reported a degeneracy.

        :return: True if any warning was attached
        """
        return len(self.warnings) > 0

    def nontrivial(self) -> List[Equilibrium]:
        """
        Get all equilibria except the origin.

        :return: list of equilibria
        """
        return [e for e in self.equilibria if e.region is not Region.ORIGIN]

    def __len__(self) -> int:
        return len(self.equilibria)

    def __iter__(self) -> Iterator[Equilibrium]:
        return iter(self.equilibria)

    def __getitem__(self, index: int) -> Equilibrium:
        return self.equilibria[index]

    def __repr__(self) -> str:
        return f"EquilibriumSet(equilibria={self.equilibria},warnings={self.warnings})"


def nullcline_x(n: NormalizedParams, r: Reactions, x: np.ndarray) -> np.ndarray:
    """
    Nullcline of the x equation solved for y.

    :param n: normalized parameters
    :param r: reaction(s)
    :param x: density, scalar or array
    :return: (x - alpha f(x)) / gamma
    """
    rx, _ = as_pair(r)
    return (x - n.alpha * reaction_eval(rx, x)) / n.gamma


def nullcline_y_residual(n: NormalizedParams, r: Reactions, st: State) -> np.ndarray:
    """
    Signed distance-like residual of the y nullcline.

    :param n: normalized parameters
    :param r: reaction(s)
    :param st: state; components may be arrays
    :return: gamma y - x - gamma beta f(y), zero exactly on the nullcline
    """
    _, ry = as_pair(r)
    x, y = st
    return n.gamma * y - x - n.gamma * n.beta * reaction_eval(ry, y)


def residual(n: NormalizedParams, r: Reactions, st: State) -> float:
    """
    Max-norm of the normalized vector field.

    :param n: normalized parameters
    :param r: reaction(s)
    :param st: state
    :return: max(|x'|, |y'|)
    """
    return float(np.max(np.abs(vector_field(n, r, st))))


def _newton(
    n: NormalizedParams, r: Reactions, start: State, max_drift: Optional[float] = None
) -> Tuple[State, float]:
    """Damped Newton on the full system; returns the start point if it drifts too far."""
    u0 = np.array(start, dtype=float)
    u = u0.copy()

    def field_at(v: np.ndarray) -> np.ndarray:
        return np.array(vector_field(n, r, State(v[0], v[1])), dtype=float)

    fu = field_at(u)
    norm = float(np.max(np.abs(fu)))
    for _ in range(constants.NEWTON_MAX_ITER):
        if norm == 0.0:
            break
        try:
            step = np.linalg.solve(jacobian(n, r, State(u[0], u[1]), one_sided=True), -fu)
        except np.linalg.LinAlgError:
            break
        damping = 1.0
        while True:
            trial = u + damping * step
            f_trial = field_at(trial)
            n_trial = float(np.max(np.abs(f_trial)))
            if n_trial < norm or damping < 1e-4:
                break
            damping /= 2
        if not n_trial < norm:
            break
        u, fu, norm = trial, f_trial, n_trial
    if max_drift is not None and float(np.hypot(*(u - u0))) > max_drift:
        Logger.debug(f"Newton polish left the neighbourhood of {tuple(start)}; keeping it")
        return State(float(u0[0]), float(u0[1])), residual(n, r, start)
    return State(float(u[0]), float(u[1])), norm


def classify_stability(n: NormalizedParams, r: Reactions, e: State) -> Linearization:
    """
    Linearize at an equilibrium and classify it.

    :param n: normalized parameters
    :param r: reaction(s)
    :param e: equilibrium point
    :return: eigenvalues, stability class and kink flag
    """
    if residual(n, r, e) >= 1e-8:
        raise DomainError(f"{tuple(e)} is not an equilibrium (residual {residual(n, r, e):.3g})")
    return _linearize(n, r, e)


def _linearize(n: NormalizedParams, r: Reactions, e: State) -> Linearization:
    at_kink = False
    try:
        matrix = jacobian(n, r, e)
    except KinkError:
        at_kink = True
        matrix = jacobian(n, r, e, one_sided=True)
    eigenvalues = tuple(
        complex(z) for z in sorted(np.linalg.eigvals(matrix), key=lambda z: (z.real, z.imag))
    )
    if at_kink:
        return Linearization(eigenvalues, Stability.NONHYPERBOLIC, True)
    real = np.array([z.real for z in eigenvalues])
    oscillating = any(abs(z.imag) > 0 for z in eigenvalues)
    if np.any(np.abs(real) < constants.NONHYPERBOLIC_TOL):
        stability = Stability.NONHYPERBOLIC
    elif np.all(real < 0):
        stability = Stability.STABLE_FOCUS if oscillating else Stability.STABLE_NODE
    elif np.all(real > 0):
        stability = Stability.UNSTABLE_FOCUS if oscillating else Stability.UNSTABLE_NODE
    else:
        stability = Stability.SADDLE
    return Linearization(eigenvalues, stability, False)


def locate_region(e: State, gamma: float) -> Region:
    """
    Locate a point among the a priori regions of nontrivial equilibria.

    The regions are only meaningful for gamma in (0, 1/2); the origin is labelled for every
    gamma. Subsets Omega_i of OmegaHat_i are reported first.

    :param e: point (x, y)
    :param gamma: capacity ratio
    :return: region label
    """
    x, y = float(e[0]), float(e[1])
    if abs(x) <= constants.ORIGIN_TOL and abs(y) <= constants.ORIGIN_TOL:
        return Region.ORIGIN
    if not 0 < gamma < 0.5:
        return Region.OTHER
    if gamma / 2 < x < gamma and x / gamma < y < 1:
        return Region.OMEGA1
    if 0.5 < x < 1 and 1 / (2 * gamma) < y < x / gamma:
        return Region.OMEGA2
    if 0 < x < gamma and 0.5 < y < 1 and y > x / gamma:
        return Region.OMEGA_HAT1
    if 0.5 < x < 1 and 1 < y < x / gamma:
        return Region.OMEGA_HAT2
    if 0.5 < x < 1 and 0 < y < 0.5:
        return Region.OMEGA_HAT3
    return Region.OTHER


def make_equilibrium(
    n: NormalizedParams, r: Reactions, point: State, breakpoint: bool = False
) -> Equilibrium:
    """
    Build an Equilibrium record for a stationary point.

    :param n: normalized parameters
    :param r: reaction(s)
    :param point: stationary point
    :param breakpoint: the point lies on a sawtooth breakpoint line
    :return: Equilibrium
    """
    linearization = _linearize(n, r, point)
    return Equilibrium(
        point=State(float(point[0]), float(point[1])),
        eigenvalues=linearization.eigenvalues,
        stability=linearization.stability,
        region=locate_region(point, n.gamma),
        at_kink=linearization.at_kink,
        breakpoint=breakpoint,
    )


def _reduced(n: NormalizedParams, r: Reactions) -> Callable[[np.ndarray], np.ndarray]:
    """y-nullcline residual along the x-nullcline, g(x)."""

    def g(x: np.ndarray) -> np.ndarray:
        return nullcline_y_residual(n, r, State(x, nullcline_x(n, r, x)))

    return g


def _scan_roots(
    g: Callable[[np.ndarray], np.ndarray], opts: SolverOptions, warnings: List[str]
) -> List[float]:
    """Bracket and refine the zeros of g over the search window."""

    def g_scalar(x: float) -> float:
        return float(g(x))

    xs = np.linspace(opts.x_window[0], opts.x_window[1], opts.bracket_grid + 1)
    gs = np.asarray(g(xs), dtype=float)
    signs = np.sign(gs)
    roots = [float(xs[i]) for i in np.flatnonzero(signs == 0)]
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(brentq(g_scalar, xs[i], xs[i + 1], xtol=opts.root_tol))

    # a pair of roots inside one subinterval shows up as a local minimum of |g|
    size = np.abs(gs)
    candidates = (
        (size[1:-1] < size[:-2])
        & (size[1:-1] <= size[2:])
        & (signs[:-2] == signs[1:-1])
        & (signs[1:-1] == signs[2:])
        & (signs[1:-1] != 0)
    )
    for i in np.flatnonzero(candidates) + 1:
        sign = signs[i]
        found = minimize_scalar(
            lambda x: sign * g_scalar(x),
            bounds=(xs[i - 1], xs[i + 1]),
            method="bounded",
            options={"xatol": opts.root_tol},
        )
        x_ext = float(found.x)
        value = sign * g_scalar(x_ext)
        if value < 0:
            Logger.debug(f"Resolved two roots inside one grid cell near x={x_ext:.17g}")
            roots.append(brentq(g_scalar, xs[i - 1], x_ext, xtol=opts.root_tol))
            roots.append(brentq(g_scalar, x_ext, xs[i + 1], xtol=opts.root_tol))
        elif value < opts.tangency_tol:
            warnings.append(f"near-tangent nullclines at x={x_ext:.17g} (|g|={value:.3g})")

    roots.sort()
    merged: List[float] = []
    for root in roots:
        if merged and root - merged[-1] < opts.dedup_tol:
            warnings.append(
                f"degenerate root: x={merged[-1]:.17g} and x={root:.17g} "
                f"are closer than {opts.dedup_tol:g}"
            )
            continue
        merged.append(root)
    return merged


def _dedup_points(points: List[State], tol: float) -> List[State]:
    kept: List[State] = []
    for point in sorted(points):
        if all(np.hypot(point.x - other.x, point.y - other.y) >= tol for other in kept):
            kept.append(point)
    return kept


def find_equilibria(
    n: NormalizedParams, r: Reactions, opts: SolverOptions = SolverOptions()
) -> EquilibriumSet:
    """
    Find every nonnegative equilibrium of the normalized system.

    Substitutes the x-nullcline y = nu_x(x) into the y-nullcline residual, scans the x window
    for sign changes, refines each bracket, merges roots closer than dedup_tol and polishes
    every point with damped Newton on the full system.

    :param n: normalized parameters
    :param r: reaction, or one reaction per patch
    :param opts: solver options
    :return: equilibria sorted by x then y, with solver warnings attached
    """
    warnings: List[str] = []
    g = _reduced(n, r)
    points = [State(0.0, 0.0)]
    for root in _scan_roots(g, opts, warnings):
        if abs(root) < opts.dedup_tol:
            continue
        start = State(root, float(nullcline_x(n, r, root)))
        point, norm = _newton(n, r, start, max_drift=constants.NEWTON_MAX_DRIFT)
        if point.x < -constants.NONNEGATIVE_TOL or point.y < -constants.NONNEGATIVE_TOL:
            continue
        if norm >= constants.RESIDUAL_TOL:
            warnings.append(f"residual {norm:.3g} at {tuple(point)} exceeds tolerance")
        points.append(point)
    points = _dedup_points(points, opts.dedup_tol)
    for warning in warnings:
        Logger.warning(f"{n}: {warning}")
    return EquilibriumSet([make_equilibrium(n, r, point) for point in points], warnings)


def brute_force_equilibria(
    n: NormalizedParams,
    r: Reactions,
    grid: int = constants.ORACLE_GRID,
    dedup_tol: float = constants.DEDUP_TOL,
) -> EquilibriumSet:
    """
    Independent oracle: flag grid cells where both residuals change sign, then Newton-polish
    seeds from every flagged cluster.

    :param n: normalized parameters
    :param r: reaction(s)
    :param grid: cells per axis over [0, 1] x [0, 1/gamma] (plus a small margin)
    :param dedup_tol: minimum separation of distinct equilibria
    :return: equilibria found
    """
    margin = constants.ORACLE_MARGIN
    xs = np.linspace(-margin, 1 + margin, grid + 1)
    ys = np.linspace(-margin, 1 / n.gamma + margin, grid + 1)
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    field_x, field_y = vector_field(n, r, State(grid_x, grid_y))

    def changes_sign(values: np.ndarray) -> np.ndarray:
        corners = (values[:-1, :-1], values[1:, :-1], values[:-1, 1:], values[1:, 1:])
        low = np.minimum(np.minimum(corners[0], corners[1]), np.minimum(corners[2], corners[3]))
        high = np.maximum(np.maximum(corners[0], corners[1]), np.maximum(corners[2], corners[3]))
        return (low <= 0) & (high >= 0)

    flagged = changes_sign(field_x) & changes_sign(field_y)
    labels, clusters = ndimage.label(flagged, structure=np.ones((3, 3), dtype=int))
    cells = np.argwhere(flagged)
    cell_labels = labels[flagged]

    points = [State(0.0, 0.0)]
    for label in range(1, clusters + 1):
        members = cells[cell_labels == label]
        picks = np.unique(
            np.linspace(0, len(members) - 1, min(len(members), constants.ORACLE_SEEDS_PER_CLUSTER))
            .round()
            .astype(int)
        )
        for i, j in members[picks]:
            seed = State((xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2)
            point, norm = _newton(n, r, seed)
            if norm >= constants.RESIDUAL_TOL:
                continue
            if point.x < -constants.NONNEGATIVE_TOL or point.y < -constants.NONNEGATIVE_TOL:
                continue
            points.append(point)
    points = _dedup_points(points, dedup_tol)
    return EquilibriumSet([make_equilibrium(n, r, point) for point in points])


def polynomial_equilibria_x(
    n: NormalizedParams, r: Reactions, x_window: Tuple[float, float] = constants.X_WINDOW
) -> List[float]:
    """
    Cross-check for the cubic reaction: real roots of the degree-9 polynomial g(x).

    :param n: normalized parameters
    :param r: cubic reaction(s)
    :param x_window: interval of interest
    :return: sorted real roots inside x_window
    """
    rx, ry = as_pair(r)
    if rx.tag is not ReactionTag.CUBIC or ry.tag is not ReactionTag.CUBIC:
        raise UnsupportedError("the polynomial cross-check needs the cubic reaction")
    s = Polynomial([0.0, 1.0])
    f_x = s * (1 - s) * (s - rx.a)
    nu = (s - n.alpha * f_x) / n.gamma
    f_nu = nu * (1 - nu) * (nu - ry.a)
    g = n.gamma * nu - s - n.gamma * n.beta * f_nu
    roots = g.roots()
    real = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
    return [float(x) for x in real if x_window[0] <= x <= x_window[1]]
