from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import RK45, Radau

from two_patch_allee.models.certificates import check_thm_main, perfect_mixing_capacity
from two_patch_allee.models.equilibria import find_equilibria
from two_patch_allee.models.logger import Logger, print
from two_patch_allee.models.patches import (
    Coupling,
    NormalizedParams,
    PatchParams,
    ReactionKind,
    Reactions,
    State,
    normalize,
    patch_reactions,
    physical_field_array,
    vector_field_array,
)
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError, UnsupportedError
from two_patch_allee.utils.utils import ordered_map

Params = Union[PatchParams, NormalizedParams]
Field = Callable[[float, np.ndarray], np.ndarray]


class Method(str, Enum):
    RK4 = "rk4"
    RK45 = "rk45"
    RADAU = "radau"


@dataclass(frozen=True)
class IntegratorOptions:

    # fixed-step rk4, adaptive rk45 or implicit radau for stiff runs
    method: Method = Method.RK45

    # step of the fixed-step method
    step: float = constants.RK4_STEP

    # local error tolerances of the adaptive methods
    rel_tol: float = constants.REL_TOL
    abs_tol: float = constants.ABS_TOL

    # integration horizon
    t_max: float = constants.T_MAX

    # motion below this over stall_window counts as stalled
    convergence_radius: float = constants.CONVERGENCE_RADIUS
    stall_window: float = constants.STALL_WINDOW

    # vector field norm required on top of stalling
    residual_tol: float = constants.CONVERGENCE_RESIDUAL

    # terminal states this close to an equilibrium are attributed to it
    attraction_radius: float = constants.ATTRACTION_RADIUS

    # largest step the adaptive methods may take
    max_step: float = constants.MAX_STEP

    # keep every n-th step in the trajectory
    save_stride: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        for name in (
            "step",
            "rel_tol",
            "abs_tol",
            "t_max",
            "convergence_radius",
            "stall_window",
            "residual_tol",
            "attraction_radius",
            "max_step",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value}")
        if self.save_stride < 1:
            raise DomainError(f"save_stride must be at least 1, got {self.save_stride}")

    def to_dict(self) -> Dict[str, Union[str, float, int]]:
        """
        Create a dictionary representation of these options.

        :return: dictionary representation
        """
        return {
            "method": self.method.value,
            "step": self.step,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "t_max": self.t_max,
            "convergence_radius": self.convergence_radius,
            "stall_window": self.stall_window,
            "residual_tol": self.residual_tol,
            "attraction_radius": self.attraction_radius,
            "max_step": self.max_step,
            "save_stride": self.save_stride,
        }


class TerminalKind(str, Enum):
    CONVERGED = "converged"
    T_MAX = "t-max"
    DIVERGED = "diverged"


class Terminal(NamedTuple):

    # how the integration ended
    kind: TerminalKind

    # last finite state
    point: State

    # diagnostics
    message: str = ""


@dataclass
class Trajectory:

    # strictly increasing sample times
    times: np.ndarray

    # states at those times, shape (len(times), 2)
    states: np.ndarray

    # how the integration ended
    terminal: Terminal

    # smallest component seen over every step, saved or not
    min_component: float

    @property
    def converged(self) -> bool:
        return self.terminal.kind is TerminalKind.CONVERGED

    @property
    def final(self) -> State:
        return State(float(self.states[-1, 0]), float(self.states[-1, 1]))

    @property
    def duration(self) -> float:
        return float(self.times[-1])


def rk4_step(fun: Field, t: float, u: np.ndarray, h: float) -> np.ndarray:
    """
    One classical fourth-order Runge-Kutta step.

    :param fun: right-hand side fun(t, u)
    :param t: current time
    :param u: current state
    :param h: step
    :return: state at t + h
    """
    k1 = fun(t, u)
    k2 = fun(t + h / 2, u + h / 2 * k1)
    k3 = fun(t + h / 2, u + h / 2 * k2)
    k4 = fun(t + h, u + h * k3)
    return u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _field(params: Params, r: Reactions, coupling: Coupling) -> Field:
    if isinstance(params, PatchParams):
        if not isinstance(r, ReactionKind):
            raise DomainError("the physical system takes one reaction family; a1, a2 come from p")
        return physical_field_array(params, r, coupling)
    if Coupling(coupling) is Coupling.BALANCED:
        raise UnsupportedError("balanced coupling is only defined for physical parameters")
    return vector_field_array(params, r)


def integrate(
    params: Params,
    r: Reactions,
    coupling: Coupling,
    s0: State,
    opts: IntegratorOptions = IntegratorOptions(),
) -> Trajectory:
    """
    Integrate the physical or normalized system from s0.

    The run stops as converged once the state has stayed within convergence_radius of an
    anchor for stall_window time units and the vector field norm is below residual_tol; it
    stops as diverged when a state is not finite, exceeds the divergence bound or the
    adaptive step underflows.

    :param params: physical or normalized parameters
    :param r: reaction; normalized parameters also accept a per-patch pair
    :param coupling: dispersal form; balanced needs physical parameters
    :param s0: nonnegative initial state
    :param opts: integrator options
    :return: Trajectory
    """
    fun = _field(params, r, coupling)
    u = np.array(s0, dtype=float)
    if u.shape != (2,) or not np.all(np.isfinite(u)):
        raise DomainError(f"initial state must be two finite numbers, got {s0}")
    if np.any(u < 0):
        raise DomainError(f"initial state must be nonnegative, got {tuple(s0)}")

    times: List[float] = [0.0]
    states: List[np.ndarray] = [u.copy()]
    t = 0.0
    anchor_u, anchor_t = u.copy(), 0.0
    min_component = float(u.min())
    steps = 0
    terminal: Optional[Terminal] = None
    solver = None
    if opts.method is not Method.RK4:
        solver = (RK45 if opts.method is Method.RK45 else Radau)(
            fun,
            0.0,
            u,
            t_bound=opts.t_max,
            rtol=opts.rel_tol,
            atol=opts.abs_tol,
            max_step=opts.max_step,
        )

    while t < opts.t_max:
        if solver is None:
            h = min(opts.step, opts.t_max - t)
            u_next = rk4_step(fun, t, u, h)
            t_next = t + h
        else:
            message = solver.step()
            if solver.status == "failed":
                terminal = Terminal(TerminalKind.DIVERGED, State(*u), f"t={t:.17g}: {message}")
                break
            u_next, t_next = solver.y.copy(), float(solver.t)
            if solver.status == "running" and solver.step_size < constants.MIN_STEP:
                terminal = Terminal(
                    TerminalKind.DIVERGED,
                    State(*u),
                    f"t={t:.17g}: step {solver.step_size:.3g} fell below {constants.MIN_STEP:g}",
                )
                break
        if not np.all(np.isfinite(u_next)) or np.max(np.abs(u_next)) > constants.DIVERGENCE_BOUND:
            terminal = Terminal(
                TerminalKind.DIVERGED, State(*u), f"t={t_next:.17g}: state left every bound"
            )
            break
        u, t = u_next, t_next
        steps += 1
        min_component = min(min_component, float(u.min()))
        if steps % opts.save_stride == 0:
            times.append(t)
            states.append(u.copy())
        if np.hypot(*(u - anchor_u)) >= opts.convergence_radius:
            anchor_u, anchor_t = u.copy(), t
        elif t - anchor_t >= opts.stall_window and np.max(np.abs(fun(t, u))) < opts.residual_tol:
            terminal = Terminal(TerminalKind.CONVERGED, State(*u))
            break

    if times[-1] != t:
        times.append(t)
        states.append(u.copy())
    if terminal is None:
        terminal = Terminal(TerminalKind.T_MAX, State(*u), f"no convergence by t={opts.t_max:g}")
    terminal = terminal._replace(point=State(float(u[0]), float(u[1])))
    return Trajectory(np.array(times), np.array(states), terminal, min_component)


@dataclass
class InvarianceReport:

    # side of the box [0, k]^2
    k: float

    # number of boundary starts
    n_samples: int

    # allowed overshoot, 10 x the integrator tolerance at scale k
    tolerance: float

    # largest overshoot beyond the box (negative when strictly inside)
    max_excess: float

    # (sample index, start, worst state) of every violating trajectory
    violations: List[Tuple[int, State, State]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return len(self.violations) == 0

    def to_dict(self) -> Dict[str, Union[float, int, bool, list]]:
        """
        Create a dictionary representation of this report.

        :return: dictionary representation
        """
        return {
            "k": self.k,
            "n_samples": self.n_samples,
            "tolerance": self.tolerance,
            "max_excess": self.max_excess,
            "holds": self.holds,
            "violations": [[i, list(start), list(worst)] for i, start, worst in self.violations],
        }


def _perimeter(k: float, n_samples: int) -> List[State]:
    starts = []
    for i in range(n_samples):
        s = 4 * k * i / n_samples
        edge, offset = divmod(s, k)
        match int(edge):
            case 0:
                starts.append(State(offset, 0.0))
            case 1:
                starts.append(State(k, offset))
            case 2:
                starts.append(State(k - offset, k))
            case _:
                starts.append(State(0.0, k - offset))
    return starts


def verify_invariance(
    p: PatchParams,
    r: ReactionKind,
    k: float,
    n_samples: int = 100,
    opts: IntegratorOptions = IntegratorOptions(),
    threads: int = 1,
) -> InvarianceReport:
    """
    Check that trajectories started on the boundary of [0, k]^2 stay in the box.

    :param p: physical parameters
    :param r: reaction family
    :param k: box side, at least k1
    :param n_samples: starts evenly spaced along the perimeter
    :param opts: integrator options
    :param threads: worker count
    :return: InvarianceReport
    """
    if not k >= p.k1:
        raise DomainError(f"invariance needs k >= k1 = {p.k1}, got {k}")
    tolerance = 10 * (opts.abs_tol + opts.rel_tol * k)
    starts = _perimeter(k, n_samples)
    trajectories = ordered_map(
        lambda s0: integrate(p, r, Coupling.STANDARD, s0, opts), starts, threads
    )
    report = InvarianceReport(k, n_samples, tolerance, -math.inf)
    for i, (start, trajectory) in enumerate(zip(starts, trajectories)):
        above = trajectory.states - k
        below = -trajectory.states
        excess = np.maximum(above, below).max(axis=1)
        worst = int(np.argmax(excess))
        excess_max = max(float(excess[worst]), -trajectory.min_component)
        report.max_excess = max(report.max_excess, excess_max)
        if excess_max > tolerance:
            report.violations.append((i, start, State(*trajectory.states[worst])))
    if not report.holds:
        Logger.warning(f"{len(report.violations)} trajectories left [0, {k}]^2")
    return report


@dataclass
class ExtinctionReport:

    # seed of the initial-condition sampler
    seed: int

    # number of sampled starts
    n_samples: int

    # share of starts ending at the origin; None without samples
    fraction: Optional[float]

    # largest vector field norm at a terminal state
    worst_residual: float

    # longest integration time used
    max_time: float

    # extinction certificate verdict for p, when one applies
    certificate_holds: Optional[bool] = None

    # starts that did not end at the origin
    survivors: List[State] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Union[int, float, bool, None, list]]:
        """
        Create a dictionary representation of this report.

        :return: dictionary representation
        """
        return {
            "seed": self.seed,
            "n_samples": self.n_samples,
            "fraction": self.fraction,
            "worst_residual": self.worst_residual,
            "max_time": self.max_time,
            "certificate_holds": self.certificate_holds,
            "survivors": [list(s) for s in self.survivors],
        }


def verify_global_extinction(
    p: PatchParams,
    n_samples: int,
    opts: IntegratorOptions = IntegratorOptions(),
    seed: int = 0,
    threads: int = 1,
) -> ExtinctionReport:
    """
    Sample starts uniformly in [0, k1]^2 under the cubic reaction and count how many die out.

    :param p: physical parameters; a1, a2 are the cubic viabilities
    :param n_samples: number of starts
    :param opts: integrator options
    :param seed: sampler seed
    :param threads: worker count
    :return: ExtinctionReport
    """
    try:
        certificate_holds: Optional[bool] = check_thm_main(p).holds
    except UnsupportedError:
        certificate_holds = None
    if n_samples == 0:
        return ExtinctionReport(seed, 0, None, 0.0, 0.0, certificate_holds)
    rng = np.random.default_rng(seed)
    starts = [State(*row) for row in rng.uniform(0.0, p.k1, size=(n_samples, 2))]
    r = ReactionKind.cubic(p.a1)
    fun = physical_field_array(p, r)
    trajectories = ordered_map(
        lambda s0: integrate(p, r, Coupling.STANDARD, s0, opts), starts, threads
    )
    survivors = []
    worst_residual, max_time = 0.0, 0.0
    for start, trajectory in zip(starts, trajectories):
        end = trajectory.terminal.point
        worst_residual = max(worst_residual, float(np.max(np.abs(fun(0.0, np.array(end))))))
        max_time = max(max_time, trajectory.duration)
        if not (trajectory.converged and math.hypot(*end) < opts.attraction_radius):
            survivors.append(start)
    fraction = 1 - len(survivors) / n_samples
    print(f"{n_samples - len(survivors)}/{n_samples} starts went extinct (seed {seed})")
    return ExtinctionReport(
        seed, n_samples, fraction, worst_residual, max_time, certificate_holds, survivors
    )


@dataclass
class BasinReport:

    # seed of the initial-condition sampler
    seed: int

    # number of sampled starts
    n_samples: int

    # equilibria samples are attributed to
    equilibria: List[State]

    # share of samples per equilibrium, aligned with equilibria
    fractions: List[float]

    # share of samples not attributed to any equilibrium
    unresolved: float

    def to_dict(self) -> Dict[str, Union[int, float, list]]:
        """
        Create a dictionary representation of this report.

        :return: dictionary representation
        """
        return {
            "seed": self.seed,
            "n_samples": self.n_samples,
            "basins": [
                {"x": e.x, "y": e.y, "fraction": f} for e, f in zip(self.equilibria, self.fractions)
            ],
            "unresolved": self.unresolved,
        }


def _equilibria_of(params: Params, r: Reactions) -> List[State]:
    if isinstance(params, PatchParams):
        found = find_equilibria(normalize(params), patch_reactions(params, r))
        return [State(e.x * params.k1, e.y * params.k2) for e in found]
    return find_equilibria(params, r).points


def basin_sample(
    params: Params,
    r: Reactions,
    n_samples: int,
    domain: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None,
    opts: IntegratorOptions = IntegratorOptions(),
    seed: int = 0,
    equilibria: Optional[Sequence[State]] = None,
    threads: int = 1,
) -> BasinReport:
    """
    Estimate basin shares by integrating uniformly sampled starts.

    :param params: physical or normalized parameters
    :param r: reaction
    :param n_samples: number of starts
    :param domain: ((x min, x max), (y min, y max)); defaults to the box up to the capacities
    :param opts: integrator options
    :param seed: sampler seed
    :param equilibria: attractor candidates; computed with find_equilibria when omitted
    :param threads: worker count
    :return: BasinReport whose fractions and unresolved share sum to 1
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be positive, got {n_samples}")
    if domain is None:
        if isinstance(params, PatchParams):
            domain = ((0.0, params.k1), (0.0, params.k2))
        else:
            domain = ((0.0, 1.0), (0.0, 1 / params.gamma))
    (x_low, x_high), (y_low, y_high) = domain
    if x_low < 0 or y_low < 0 or not (x_low < x_high and y_low < y_high):
        raise DomainError(f"domain must be a nonnegative box, got {domain}")
    points = list(equilibria) if equilibria is not None else _equilibria_of(params, r)

    rng = np.random.default_rng(seed)
    starts = [
        State(x, y)
        for x, y in zip(
            rng.uniform(x_low, x_high, size=n_samples), rng.uniform(y_low, y_high, size=n_samples)
        )
    ]
    trajectories = ordered_map(
        lambda s0: integrate(params, r, Coupling.STANDARD, s0, opts), starts, threads
    )
    counts = [0] * len(points)
    unresolved = 0
    for trajectory in trajectories:
        end = trajectory.terminal.point
        distances = [math.hypot(end.x - e[0], end.y - e[1]) for e in points]
        nearest = int(np.argmin(distances)) if distances else -1
        if trajectory.converged and nearest >= 0 and distances[nearest] < opts.attraction_radius:
            counts[nearest] += 1
        else:
            unresolved += 1
    return BasinReport(
        seed,
        n_samples,
        [State(float(e[0]), float(e[1])) for e in points],
        [c / n_samples for c in counts],
        unresolved / n_samples,
    )


class MixingEntry(NamedTuple):

    # diffusion rate
    D: float

    # x1* + x2* at the end of the run
    total: float

    # large-diffusion total capacity
    capacity: float

    # |total - capacity| / capacity
    relative_gap: float

    # False when the run did not converge
    converged: bool


def perfect_mixing_experiment(
    k1: float,
    k2: float,
    lambda1: float,
    lambda2: float,
    D_list: Sequence[float],
    opts: IntegratorOptions = IntegratorOptions(),
) -> List[MixingEntry]:
    """
    Integrate two logistic patches from their capacities for increasing diffusion rates.

    Diffusion stiffens the system as D grows; adaptive runs at D >= STIFF_DIFFUSION switch
    from rk45 to the implicit radau method.

    :param k1: capacity of patch 1
    :param k2: capacity of patch 2
    :param lambda1: growth rate of patch 1
    :param lambda2: growth rate of patch 2
    :param D_list: strictly increasing diffusion rates
    :param opts: integrator options
    :return: one entry per diffusion rate
    """
    if any(b <= a for a, b in zip(D_list, D_list[1:])):
        raise DomainError(f"D_list must be strictly increasing, got {list(D_list)}")
    capacity = perfect_mixing_capacity(k1, k2, lambda1, lambda2)
    logistic = ReactionKind.logistic()
    entries = []
    for D in D_list:
        p = PatchParams(D, lambda1, lambda2, k1, k2)
        run_opts = opts
        if opts.method is Method.RK45 and D >= constants.STIFF_DIFFUSION:
            Logger.info(f"D={D}: integrating with {Method.RADAU.value}")
            run_opts = replace(opts, method=Method.RADAU)
        trajectory = integrate(p, logistic, Coupling.STANDARD, State(p.k1, p.k2), run_opts)
        total = trajectory.final.x + trajectory.final.y
        if not trajectory.converged:
            Logger.warning(f"D={D}: {trajectory.terminal.message}")
        entries.append(
            MixingEntry(
                D, total, capacity, abs(total - capacity) / capacity, trajectory.converged
            )
        )
    return entries
