import math
from typing import Final
import unittest

import numpy as np
from scipy.linalg import expm

from two_patch_allee.models.dynamics import dynamics
from two_patch_allee.models.dynamics.dynamics import IntegratorOptions, Method, TerminalKind
from two_patch_allee.models.patches import (
    Coupling,
    NormalizedParams,
    PatchParams,
    ReactionKind,
    State,
    jacobian,
    normalize,
)
from two_patch_allee.utils.errors import DomainError, UnsupportedError

cubic: Final = ReactionKind.cubic()
symmetric: Final = NormalizedParams(1.0, 1.0, 1.0)
extinct: Final = PatchParams(1.0, 1.0, 1.0, 1.0, 1 / 3)


class Test_Options(unittest.TestCase):
    def test_defaults(self):
        opts = IntegratorOptions()
        self.assertEqual(opts.method, Method.RK45)
        self.assertEqual(opts.to_dict()["method"], "rk45")
        self.assertEqual(IntegratorOptions(method="rk4").method, Method.RK4)
        self.assertEqual(IntegratorOptions(method="radau").method, Method.RADAU)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            IntegratorOptions(method="euler")
        with self.assertRaises(DomainError):
            IntegratorOptions(step=0.0)
        with self.assertRaises(DomainError):
            IntegratorOptions(t_max=math.inf)
        with self.assertRaises(DomainError):
            IntegratorOptions(save_stride=0)


class Test_Rk4(unittest.TestCase):
    def test_linear_system(self):
        A = np.array([[-2.0, 0.4], [2.5, -2.5]])
        u = np.array([0.3, 0.7])
        h = 0.01
        stepped = dynamics.rk4_step(lambda t, v: A @ v, 0.0, u, h)
        np.testing.assert_allclose(stepped, expm(A * h) @ u, atol=1e-10)

    def test_order(self):
        # linearization at the origin: eigenvalues near -0.72 and -2.78
        A = np.array(jacobian(NormalizedParams(1.0, 2.0, 1 / 3), cubic, State(0.0, 0.0)))
        u0 = np.array([0.01, 0.02])
        exact = expm(A) @ u0
        errors = []
        for steps in (10, 20):
            u, h = u0.copy(), 1.0 / steps
            for i in range(steps):
                u = dynamics.rk4_step(lambda t, v: A @ v, i * h, u, h)
            errors.append(np.linalg.norm(u - exact))
        assert 12 < errors[0] / errors[1] < 20


class Test_Integrate(unittest.TestCase):
    def test_converges_to_capacity(self):
        trajectory = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(0.9, 0.9))
        assert trajectory.converged
        self.assertAlmostEqual(trajectory.final.x, 1.0, places=6)
        self.assertAlmostEqual(trajectory.final.y, 1.0, places=6)
        assert np.all(np.diff(trajectory.times) > 0)
        self.assertEqual(trajectory.states.shape, (len(trajectory.times), 2))

    def test_converges_to_origin(self):
        trajectory = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(0.2, 0.3))
        assert trajectory.converged
        assert math.hypot(*trajectory.terminal.point) < 1e-6
        assert trajectory.min_component >= -1e-12

    def test_rk4_matches_rk45(self):
        adaptive = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(0.9, 0.7))
        fixed = dynamics.integrate(
            symmetric, cubic, Coupling.STANDARD, State(0.9, 0.7), IntegratorOptions(method="rk4")
        )
        assert adaptive.converged and fixed.converged
        assert math.hypot(adaptive.final.x - fixed.final.x, adaptive.final.y - fixed.final.y) < 1e-6

    def test_t_max(self):
        opts = IntegratorOptions(t_max=1.0)
        trajectory = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(0.9, 0.9), opts)
        self.assertEqual(trajectory.terminal.kind, TerminalKind.T_MAX)
        self.assertEqual(trajectory.duration, 1.0)

    def test_save_stride(self):
        dense = IntegratorOptions(method="rk4", step=0.125, t_max=1.0)
        sparse = IntegratorOptions(method="rk4", step=0.125, t_max=1.0, save_stride=2)
        start = State(0.9, 0.9)
        full = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, start, dense)
        thinned = dynamics.integrate(symmetric, cubic, Coupling.STANDARD, start, sparse)
        self.assertEqual(len(full.times), 9)
        self.assertEqual(len(thinned.times), 5)
        np.testing.assert_allclose(full.states[-1], thinned.states[-1])

    def test_physical_logistic(self):
        p = PatchParams(1.0, 1.0, 1.0, 2.0, 2.0)
        trajectory = dynamics.integrate(
            p, ReactionKind.logistic(), Coupling.STANDARD, State(0.5, 1.5)
        )
        assert trajectory.converged
        self.assertAlmostEqual(trajectory.final.x, 2.0, places=6)
        self.assertAlmostEqual(trajectory.final.y, 2.0, places=6)

    def test_radau_stiff(self):
        p = PatchParams(1000.0, 2.0, 1.0, 2.0, 1.0)
        opts = IntegratorOptions(method="radau")
        trajectory = dynamics.integrate(
            p, ReactionKind.logistic(), Coupling.STANDARD, State(2.0, 1.0), opts
        )
        assert trajectory.converged
        assert trajectory.duration < 1000
        assert len(trajectory.times) < 2000
        self.assertAlmostEqual(trajectory.final.x + trajectory.final.y, 3.0, delta=0.01)

    def test_time_rescaling(self):
        p = PatchParams(2.0, 3.0, 1.0, 2.0, 0.5)
        physical = dynamics.integrate(
            p,
            cubic,
            Coupling.STANDARD,
            State(1.5, 0.3),
            IntegratorOptions(method="rk4", step=0.01, t_max=1.0),
        )
        normalized = dynamics.integrate(
            normalize(p),
            cubic,
            Coupling.STANDARD,
            State(0.75, 0.6),
            IntegratorOptions(method="rk4", step=0.02, t_max=2.0),
        )
        self.assertEqual(physical.states.shape, normalized.states.shape)
        np.testing.assert_allclose(physical.times * p.D, normalized.times, rtol=1e-12)
        np.testing.assert_allclose(
            physical.states / [p.k1, p.k2], normalized.states, rtol=1e-9, atol=1e-12
        )

    def test_invalid(self):
        with self.assertRaises(DomainError):
            dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(-0.1, 0.5))
        with self.assertRaises(DomainError):
            dynamics.integrate(symmetric, cubic, Coupling.STANDARD, State(math.nan, 0.5))
        with self.assertRaises(UnsupportedError):
            dynamics.integrate(symmetric, cubic, Coupling.BALANCED, State(0.1, 0.5))
        with self.assertRaises(DomainError):
            dynamics.integrate(extinct, (cubic, cubic), Coupling.STANDARD, State(0.1, 0.5))


class Test_Invariance(unittest.TestCase):
    def test_box(self):
        report = dynamics.verify_invariance(extinct, cubic, 1.0, n_samples=8)
        assert report.holds
        assert report.max_excess <= report.tolerance
        self.assertEqual(report.to_dict()["n_samples"], 8)

    def test_small_box(self):
        with self.assertRaises(DomainError):
            dynamics.verify_invariance(extinct, cubic, 0.5)


class Test_Extinction(unittest.TestCase):
    def test_certified_parameters(self):
        report = dynamics.verify_global_extinction(extinct, 8, seed=11)
        assert report.certificate_holds
        self.assertEqual(report.fraction, 1.0)
        self.assertEqual(report.survivors, [])
        assert report.worst_residual < 1e-6

    def test_survivors(self):
        survivable = PatchParams(1.0, 1.0, 1.0, 1.0, 1.0)
        report = dynamics.verify_global_extinction(survivable, 20, seed=11)
        assert not report.certificate_holds
        assert report.fraction < 1.0
        self.assertEqual(len(report.survivors), round((1 - report.fraction) * 20))

    def test_no_samples(self):
        report = dynamics.verify_global_extinction(extinct, 0)
        assert report.fraction is None
        self.assertEqual(report.to_dict()["n_samples"], 0)

    def test_threads(self):
        serial = dynamics.verify_global_extinction(extinct, 6, seed=2, threads=1)
        parallel = dynamics.verify_global_extinction(extinct, 6, seed=2, threads=3)
        self.assertEqual(serial.to_dict(), parallel.to_dict())


class Test_Basins(unittest.TestCase):
    def test_shares(self):
        report = dynamics.basin_sample(symmetric, cubic, 20, seed=3)
        self.assertEqual(len(report.equilibria), 3)
        self.assertAlmostEqual(sum(report.fractions) + report.unresolved, 1.0)
        self.assertEqual(report.fractions[1], 0.0)
        assert report.fractions[0] > 0 and report.fractions[2] > 0

    def test_reproducible(self):
        first = dynamics.basin_sample(symmetric, cubic, 10, seed=5)
        second = dynamics.basin_sample(symmetric, cubic, 10, seed=5, threads=2)
        self.assertEqual(first.to_dict(), second.to_dict())

    def test_explicit_equilibria(self):
        report = dynamics.basin_sample(
            symmetric, cubic, 10, domain=((0.0, 0.3), (0.0, 0.3)), equilibria=[State(0.0, 0.0)]
        )
        self.assertEqual(report.fractions, [1.0])

    def test_invalid(self):
        with self.assertRaises(DomainError):
            dynamics.basin_sample(symmetric, cubic, 0)
        with self.assertRaises(DomainError):
            dynamics.basin_sample(symmetric, cubic, 5, domain=((1.0, 0.0), (0.0, 1.0)))


class Test_PerfectMixing(unittest.TestCase):
    def test_gap_closes(self):
        entries = dynamics.perfect_mixing_experiment(2.0, 1.0, 2.0, 1.0, [1.0, 10.0, 100.0])
        self.assertEqual([e.D for e in entries], [1.0, 10.0, 100.0])
        assert all(e.converged for e in entries)
        assert all(e.capacity == 3.0 for e in entries)
        gaps = [e.relative_gap for e in entries]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01

    def test_order(self):
        with self.assertRaises(DomainError):
            dynamics.perfect_mixing_experiment(2.0, 1.0, 2.0, 1.0, [10.0, 1.0])

    def test_large_diffusion(self):
        (entry,) = dynamics.perfect_mixing_experiment(2.0, 1.0, 2.0, 1.0, [1000.0])
        assert entry.converged
        self.assertEqual(entry.capacity, 3.0)
        assert entry.relative_gap < 0.01
        (control,) = dynamics.perfect_mixing_experiment(2.0, 2.0, 2.0, 1.0, [1000.0])
        assert control.converged
        self.assertAlmostEqual(control.total, 4.0, delta=4e-3)
