from types import SimpleNamespace
from unittest.mock import patch

import numpy as np
import pytest
from scipy.optimize import linprog


def reference_lp(A, y, weights, eps=0.0, dantzig=False):
    """Weighted l1 in (x, u) form with -u <= x <= u, coded separately"""
    n, N = A.shape
    c = np.concatenate([np.zeros(N), weights])
    eye = np.eye(N)
    A_ub = [np.hstack([eye, -eye]), np.hstack([-eye, -eye])]
    b_ub = [np.zeros(N), np.zeros(N)]
    A_eq = b_eq = None
    if dantzig:
        G = A.T @ A
        A_ub += [np.hstack([G, np.zeros((N, N))]), np.hstack([-G, np.zeros((N, N))])]
        b_ub += [A.T @ y + eps, eps - A.T @ y]
    else:
        A_eq = np.hstack([A, np.zeros((n, N))])
        b_eq = y
    bounds = [(None, None)] * N + [(0, None)] * N
    result = linprog(c, A_ub=np.vstack(A_ub), b_ub=np.concatenate(b_ub), A_eq=A_eq,
                     b_eq=b_eq, bounds=bounds, method="highs")
    assert result.status == 0
    return result.x[:N], result.fun


def sparse_instance(rng, n, N, k):
    A = rng.standard_normal((n, N)) / np.sqrt(n)
    x = np.zeros(N)
    support = np.sort(rng.choice(N, size=k, replace=False))
    x[support] = rng.choice([-1.0, 1.0], size=k)
    return A, x, tuple(int(i) for i in support)


def assert_certified(report, opts):
    """Optimal reports meet the feasibility and gap contract"""
    from wl1.services.solver import SolveStatus

    assert report.status is SolveStatus.OPTIMAL
    assert report.feas_violation <= opts.feas_tol
    assert report.gap <= opts.opt_tol * (1.0 + report.objective)


class TestSolverOptions:

    def test_defaults(self):
        """1e-8 tolerances and 50 000 iterations"""
        from wl1.services.solver import SolverOptions

        opts = SolverOptions()

        assert (opts.feas_tol, opts.opt_tol, opts.max_iters) == (1e-8, 1e-8, 50_000)

    def test_tolerance_range(self):
        """Tolerances must lie in (0, 1e-2]"""
        from wl1.services.solver import SolverOptions
        from wl1.utils.errors import ParameterError

        with pytest.raises(ParameterError):
            SolverOptions(feas_tol=0.1)
        with pytest.raises(ParameterError):
            SolverOptions(opt_tol=0.0)
        with pytest.raises(ParameterError):
            SolverOptions(max_iters=0)

    def test_from_config_overrides(self):
        """Config values with explicit overrides; None keeps the default"""
        from wl1.config import TestingConfig
        from wl1.services.solver import SolverOptions

        opts = SolverOptions.from_config(TestingConfig, opt_tol=1e-6, max_iters=None)

        assert opts.opt_tol == 1e-6
        assert opts.max_iters == TestingConfig.MAX_ITERS


class TestWeightedBasisPursuit:

    def test_identity_recovers_signal(self):
        """A = I, eps = 0: the feasible set is a point"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_bp

        x = np.array([0.0, 1.5, 0.0, -2.0, 0.25])
        inst = ProblemInstance(A=np.eye(5), y=x, noise_set=NoiseSet.L2_BALL, radius=0.0)
        opts = SolverOptions()
        report = solve_weighted_bp(inst, build_weights([], 1.0, 5), opts)

        assert np.allclose(report.x_hat.entries, x, atol=1e-8)
        assert report.gap <= 1e-10
        assert_certified(report, opts)

    def test_matches_reference_program(self, rng):
        """All-ones weights: same optimum as an independently coded LP"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_bp

        A, x, _ = sparse_instance(rng, 12, 30, 5)
        y = A @ x
        inst = ProblemInstance(A=A, y=y)
        opts = SolverOptions()
        report = solve_weighted_bp(inst, build_weights([], 1.0, 30), opts)
        x_ref, objective_ref = reference_lp(A, y, np.ones(30))

        assert report.objective == pytest.approx(objective_ref, rel=1e-7)
        assert np.allclose(report.x_hat.entries, x_ref, atol=1e-6)
        assert_certified(report, opts)

    def test_weighted_recovery(self, rng):
        """Gaussian instance with an accurate estimate is recovered exactly"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_bp

        A, x, support = sparse_instance(rng, 40, 80, 6)
        inst = ProblemInstance(A=A, y=A @ x)
        wrong = next(i for i in range(80) if i not in support)
        w = build_weights(support[:5] + (wrong,), 0.5, 80)
        opts = SolverOptions()
        report = solve_weighted_bp(inst, w, opts)

        assert np.linalg.norm(report.x_hat.entries - x) <= 1e-6
        assert_certified(report, opts)

    def test_zero_weights_on_true_support(self, rng):
        """omega = 0 on supp(x): optimum 0, attained at x"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_bp

        A, x, support = sparse_instance(rng, 12, 24, 3)
        inst = ProblemInstance(A=A, y=A @ x)
        opts = SolverOptions()
        report = solve_weighted_bp(inst, build_weights(support, 0.0, 24), opts)

        assert report.objective == pytest.approx(0.0, abs=1e-9)
        assert np.linalg.norm(report.x_hat.entries - x) <= 1e-6
        assert_certified(report, opts)

    def test_noisy_cone_program(self, rng):
        """eps > 0 goes through the cone solver and is certified"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_bp

        A, x, support = sparse_instance(rng, 20, 40, 3)
        z = rng.standard_normal(20)
        z *= 0.5e-2 / np.linalg.norm(z)
        inst = ProblemInstance(A=A, y=A @ x + z, radius=1e-2)
        opts = SolverOptions()
        report = solve_weighted_bp(inst, build_weights(support, 0.3, 40), opts)

        assert_certified(report, opts)
        assert report.certificate.source != "zero"
        assert np.linalg.norm(report.x_hat.entries - x) <= 0.1

    def test_noisy_instances_are_optimal(self):
        """Random eps > 0 instances come back Optimal with a near-zero gap"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, SolveStatus, solve_weighted_bp

        opts = SolverOptions()
        for seed in range(20):
            rng = np.random.default_rng(seed)
            A, x, support = sparse_instance(rng, 15, 30, 3)
            z = rng.standard_normal(15)
            z *= 0.005 / np.linalg.norm(z)
            inst = ProblemInstance(A=A, y=A @ x + z, radius=0.01)
            wrong = next(i for i in range(30) if i not in support)
            w = build_weights(support[:2] + (wrong,), 0.4, 30)

            report = solve_weighted_bp(inst, w, opts)

            assert report.status is SolveStatus.OPTIMAL, (seed, report.certificate.to_dict())
            assert_certified(report, opts)

    def test_polished_point_has_zero_gap(self, rng):
        """The active-set KKT point and its dual meet with no gap"""
        from wl1.models.signal import ProblemInstance, build_weights, weighted_l1_norm
        from wl1.services.solver import _polish_ball

        A, x, support = sparse_instance(rng, 20, 40, 3)
        inst = ProblemInstance(A=A, y=A @ x, radius=0.05)
        weights = build_weights(support[:1], 0.5, 40).weights

        x_polished, dual = _polish_ball(inst, weights, x, 1e-6)

        assert np.linalg.norm(inst.y - A @ x_polished) == pytest.approx(0.05, rel=1e-10)
        lower = float(inst.y @ dual) - 0.05 * float(np.linalg.norm(dual))
        assert lower == pytest.approx(weighted_l1_norm(x_polished, weights), rel=1e-10)

    def test_scaling_equivariance(self, rng):
        """(cA, cy, c eps) gives the same x_hat as (A, y, eps)"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, SolveStatus, solve_weighted_bp

        A, x, support = sparse_instance(rng, 15, 30, 3)
        z = rng.standard_normal(15)
        z *= 0.005 / np.linalg.norm(z)
        y = A @ x + z
        w = build_weights(support[:2], 0.4, 30)
        opts = SolverOptions()

        for eps in (0.0, 0.01):
            base = solve_weighted_bp(ProblemInstance(A=A, y=A @ x if eps == 0.0 else y,
                                                     radius=eps), w, opts)
            for c in (3.0, 0.2):
                scaled = solve_weighted_bp(
                    ProblemInstance(A=c * A, y=c * (A @ x if eps == 0.0 else y),
                                    radius=c * eps), w, opts)

                assert scaled.status is base.status is SolveStatus.OPTIMAL
                assert np.allclose(scaled.x_hat.entries, base.x_hat.entries, atol=1e-6)

    def test_infeasible_equality(self):
        """y outside the range of A with eps = 0"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolveStatus, solve_weighted_bp

        inst = ProblemInstance(A=[[1.0, 0.0], [1.0, 0.0]], y=[1.0, 2.0])
        report = solve_weighted_bp(inst, build_weights([], 1.0, 2))

        assert report.status is SolveStatus.INFEASIBLE
        assert report.feas_violation > 0.0

    def test_rejects_dantzig_instance(self):
        """The l2 entry point only takes l2 instances"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import solve_weighted_bp
        from wl1.utils.errors import ParameterError

        inst = ProblemInstance(A=np.eye(2), y=[1.0, 0.0], noise_set=NoiseSet.DANTZIG_BOX)
        with pytest.raises(ParameterError):
            solve_weighted_bp(inst, build_weights([], 1.0, 2))

    def test_weight_length_mismatch(self):
        """Weights must have length N"""
        from wl1.models.signal import ProblemInstance
        from wl1.services.solver import solve_weighted_bp
        from wl1.utils.errors import ParameterError

        inst = ProblemInstance(A=np.eye(3), y=[1.0, 0.0, 0.0])
        with pytest.raises(ParameterError):
            solve_weighted_bp(inst, np.ones(2))


class TestWeightedDantzig:

    def test_identity_recovers_signal(self):
        """A = I, eps = 0"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_ds

        x = np.array([2.0, 0.0, -1.0])
        inst = ProblemInstance(A=np.eye(3), y=x, noise_set=NoiseSet.DANTZIG_BOX)
        opts = SolverOptions()
        report = solve_weighted_ds(inst, build_weights([], 1.0, 3), opts)

        assert np.allclose(report.x_hat.entries, x, atol=1e-8)
        assert_certified(report, opts)

    def test_large_radius_gives_zero(self, rng):
        """eps >= ||A^T y||_inf makes 0 the unique minimiser"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_ds

        A, x, _ = sparse_instance(rng, 10, 20, 3)
        y = A @ x
        eps = float(np.max(np.abs(A.T @ y))) * 1.01
        inst = ProblemInstance(A=A, y=y, noise_set=NoiseSet.DANTZIG_BOX, radius=eps)
        opts = SolverOptions()
        report = solve_weighted_ds(inst, build_weights([0, 1], 0.5, 20), opts)

        assert np.max(np.abs(report.x_hat.entries)) <= 1e-9
        assert_certified(report, opts)

    def test_dual_bound_matches_reference_optimum(self, rng):
        """The certificate's lower bound meets the reference LP optimum"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, solve_weighted_ds

        A, x, support = sparse_instance(rng, 15, 30, 4)
        y = A @ x + 1e-3 * rng.standard_normal(15)
        w = build_weights(support[:2], 0.4, 30)
        inst = ProblemInstance(A=A, y=y, noise_set=NoiseSet.DANTZIG_BOX, radius=1e-2)
        opts = SolverOptions()
        report = solve_weighted_ds(inst, w, opts)
        _, objective_ref = reference_lp(A, y, w.weights, eps=1e-2, dantzig=True)

        assert report.certificate.dual_bound == pytest.approx(objective_ref, rel=1e-7, abs=1e-9)
        assert report.objective == pytest.approx(objective_ref, rel=1e-7)
        assert_certified(report, opts)

    def test_solve_dispatches_on_noise_set(self):
        """solve() picks the program from the instance"""
        from wl1.models.signal import NoiseSet, ProblemInstance, build_weights
        from wl1.services.solver import solve

        inst = ProblemInstance(A=np.eye(2), y=[1.0, 0.0], noise_set="ds")
        report = solve(inst, build_weights([], 1.0, 2))

        assert report.program is NoiseSet.DANTZIG_BOX
        assert report.to_dict()["program"] == "ds"


class TestCertificate:

    def test_optimum_has_zero_gap(self):
        """Identity optimum: gap within 1e-10"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import optimality_certificate

        x = np.array([1.0, 0.0, -3.0])
        inst = ProblemInstance(A=np.eye(3), y=x)
        certificate = optimality_certificate(inst, build_weights([], 1.0, 3), x)

        assert certificate.feas_violation == 0.0
        assert abs(certificate.gap) <= 1e-10

    def test_perturbed_point_is_flagged(self, rng):
        """Off-support noise of 1e-2 shows as a positive gap and infeasibility"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolverOptions, optimality_certificate

        A, x, support = sparse_instance(rng, 10, 20, 3)
        inst = ProblemInstance(A=A, y=A @ x)
        noise = 1e-2 * rng.standard_normal(20)
        noise[list(support)] = 0.0
        certificate = optimality_certificate(inst, build_weights([], 1.0, 20), x + noise)

        assert certificate.gap >= 0.5 * np.sum(np.abs(noise))
        assert certificate.feas_violation > 0.0
        assert not certificate.holds(SolverOptions())

    def test_dual_bound_is_valid(self, rng):
        """Whatever the point, the bound never exceeds the true optimum"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import optimality_certificate

        A, x, _ = sparse_instance(rng, 10, 20, 3)
        y = A @ x
        w = build_weights([0, 1, 2], 0.2, 20)
        _, optimum = reference_lp(A, y, w.weights)
        for _ in range(5):
            guess = x + rng.standard_normal(20)
            certificate = optimality_certificate(ProblemInstance(A=A, y=y), w, guess)
            assert certificate.dual_bound <= optimum + 1e-9

    @patch("wl1.services.solver.optimality_certificate")
    def test_failed_certificate_downgrades_status(self, mock_certificate):
        """A backend optimum without a certificate is reported as MaxIters"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import (Certificate, SolveStatus,
                                         solve_weighted_bp)

        mock_certificate.return_value = Certificate(
            feas_violation=1e-3, objective=1.0, dual_bound=0.0, source="zero")
        inst = ProblemInstance(A=np.eye(2), y=[1.0, 0.0])
        report = solve_weighted_bp(inst, build_weights([], 1.0, 2))

        assert report.status is SolveStatus.MAX_ITERS

    @patch("wl1.services.solver.linprog")
    def test_iteration_limit(self, mock_linprog):
        """HiGHS iteration limit with a point maps to MaxIters"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import SolveStatus, solve_weighted_bp

        mock_linprog.return_value = SimpleNamespace(
            status=1, x=np.array([0.5, 0.0, 0.0, 0.0]), nit=1, message="limit",
            ineqlin=None, eqlin=None)
        inst = ProblemInstance(A=np.eye(2), y=[1.0, 0.0])
        report = solve_weighted_bp(inst, build_weights([], 1.0, 2))

        assert report.status is SolveStatus.MAX_ITERS
        assert report.iterations == 1
        assert report.x_hat.entries.tolist() == [0.5, 0.0]

    @patch("wl1.services.solver.linprog")
    def test_backend_failure(self, mock_linprog):
        """Statuses with no point raise SolverError"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import solve_weighted_bp
        from wl1.utils.errors import SolverError

        mock_linprog.return_value = SimpleNamespace(
            status=4, x=None, nit=0, message="numerical trouble", ineqlin=None, eqlin=None)
        inst = ProblemInstance(A=np.eye(2), y=[1.0, 0.0])
        with pytest.raises(SolverError):
            solve_weighted_bp(inst, build_weights([], 1.0, 2))


class TestConeDiagnostic:

    def test_exact_estimate(self):
        """x_hat = x gives lhs = 0"""
        from wl1.services.solver import cone_diagnostic

        x = np.array([1.0, 0.0, 0.2, 0.0])
        lhs, rhs, holds = cone_diagnostic(x, x, (0,), (0, 1), 0.5, 1)

        assert lhs == 0.0
        assert rhs >= 0.0
        assert holds

    def test_holds_at_optimal_points(self, rng):
        """Every certified minimiser satisfies the cone inequality"""
        from wl1.models.signal import (ProblemInstance, build_weights,
                                       top_k_support)
        from wl1.services.solver import (SolverOptions, cone_diagnostic,
                                         solve_weighted_bp)

        opts = SolverOptions()
        for _ in range(20):
            A = rng.standard_normal((10, 20)) / np.sqrt(10)
            x = rng.standard_normal(20) * np.logspace(0, -2, 20)[rng.permutation(20)]
            T0 = top_k_support(x, 3)
            T_tilde = tuple(sorted(rng.choice(20, size=3, replace=False).tolist()))
            omega = float(rng.uniform())
            report = solve_weighted_bp(ProblemInstance(A=A, y=A @ x),
                                       build_weights(T_tilde, omega, 20), opts)
            _, _, holds = cone_diagnostic(x, report.x_hat, T0, T_tilde, omega, 3)
            assert holds

    def test_detects_inflated_mass(self):
        """Mass off T0 and T~ breaks the inequality"""
        from wl1.services.solver import cone_diagnostic

        x = np.array([1.0, -1.0, 0.0, 0.0, 0.0])
        x_hat = x.copy()
        x_hat[4] = 10.0
        lhs, rhs, holds = cone_diagnostic(x, x_hat, (0, 1), (0, 2), 0.5, 2)

        assert lhs == 10.0
        assert rhs == 0.0
        assert not holds
