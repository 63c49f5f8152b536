import math

import numpy as np
import pytest


class TestEdgeCases:

    def test_zero_weights_on_estimate(self):
        """omega = 0 leaves T~ entries free in the objective"""
        from wl1.models.signal import ProblemInstance, build_weights
        from wl1.services.solver import solve

        A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        x = np.array([0.0, 2.0, 0.0])
        inst = ProblemInstance(A=A, y=A @ x, noise_set="l2", radius=0.0)
        report = solve(inst, build_weights((1,), 0.0, 3))

        assert report.objective == pytest.approx(0.0, abs=1e-9)
        assert np.allclose(report.x_hat.entries, x, atol=1e-8)

    def test_order_equal_to_columns(self, orthonormal_matrix):
        """k = N evaluates the single full support"""
        from wl1.services.rip import exact_ric

        result = exact_ric(orthonormal_matrix, 4)

        assert result.supports_evaluated == 1
        assert result.witness == (0, 1, 2, 3)

    def test_zero_column(self):
        """All-zero columns are allowed and give delta >= 1"""
        from wl1.services.rip import exact_ric

        A = np.hstack([np.eye(3), np.zeros((3, 1))])

        assert exact_ric(A, 1).delta == pytest.approx(1.0)

    def test_threshold_at_the_gap(self):
        """t = d leaves the threshold and the constants undefined"""
        from wl1.services.bounds import (GeometryParams, ric_threshold,
                                         stability_constants_l2)
        from wl1.utils.errors import DomainError

        g = GeometryParams.create(1.0, 1.0)

        with pytest.raises(DomainError, match="exceed d"):
            ric_threshold(g)
        with pytest.raises(DomainError):
            stability_constants_l2(g, 0.0)

    def test_empty_support_estimate(self):
        """rho = 0 gives gamma = 1 and the standard threshold"""
        from wl1.services.bounds import GeometryParams, cz_threshold, ric_threshold

        g = GeometryParams.create(3.0, 0.2, 0.0, 0.5)

        assert g.gamma == pytest.approx(1.0)
        assert ric_threshold(g) == pytest.approx(cz_threshold(3.0), rel=1e-15)

    def test_decomposition_on_the_boundary(self):
        """||v||_1 = k alpha exactly"""
        from wl1.services.analysis import sparse_decompose, verify_decomposition

        v = np.array([0.3, 0.3, 0.3, 0.3, 0.3, 0.3])
        dec = sparse_decompose(v, 0.6, 3)

        assert verify_decomposition(v, dec, 0.6, 3).ok

    def test_sweep_marks_undefined_cells(self):
        """Cells where t <= d are written as inf"""
        from wl1.services.bounds import SweepSpec, figure_sweep

        spec = SweepSpec(t=1.5, rho=1.0, delta=0.1, alphas=(0.1,), omegas=(0.0,))
        row = figure_sweep(spec)[0]

        assert math.isinf(row["delta_t_omega"])
        assert math.isinf(row["D0"])
