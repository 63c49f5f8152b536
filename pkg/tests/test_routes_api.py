from unittest.mock import patch

import numpy as np
import pytest


class TestBoundsRoutes:

    def test_threshold(self, client):
        """Thresholds for the quoted geometry"""
        response = client.post('/api/bounds/threshold',
                               json={'t': 4, 'omega': 0.4, 'rho': 1, 'alpha': 0.9})

        assert response.status_code == 200
        data = response.get_json()
        assert data['success'] is True
        assert data['delta_t_omega'] == pytest.approx(0.9330, abs=5e-5)
        assert data['gamma'] == pytest.approx(0.4 + 0.6 * np.sqrt(0.2), rel=1e-14)

    def test_threshold_below_d(self, client):
        """t <= d is a 400, never an Infinity token"""
        response = client.post('/api/bounds/threshold', json={'t': 1, 'omega': 1})

        assert response.status_code == 400
        assert response.get_json()['error'] == 'DomainError'
        assert b'Infinity' not in response.data

    def test_threshold_missing_field(self, client):
        """Missing t is a 400 with the field named"""
        response = client.post('/api/bounds/threshold', json={'omega': 0.5})

        assert response.status_code == 400
        data = response.get_json()
        assert data['success'] is False
        assert data['error'] == 'ParameterError'
        assert 't' in data['message']

    def test_non_json_body(self, client):
        """A body that is not a JSON object is rejected"""
        response = client.post('/api/bounds/threshold', data='t=4',
                               content_type='text/plain')

        assert response.status_code == 400

    def test_constants(self, client):
        """omega = 1 constants"""
        response = client.post('/api/bounds/constants',
                               json={'t': 4, 'omega': 1, 'delta': 0.1, 'k': 2})

        assert response.status_code == 200
        data = response.get_json()
        assert data['threshold'] == pytest.approx(np.sqrt(0.75), rel=1e-15)
        assert data['D1_ds'] == data['D1']

    def test_constants_out_of_domain(self, client):
        """delta above the threshold is a 400 DomainError"""
        response = client.post('/api/bounds/constants',
                               json={'t': 4, 'omega': 1, 'delta': 0.9})

        assert response.status_code == 400
        assert response.get_json()['error'] == 'DomainError'


class TestSolveRoute:

    def test_solve_with_support(self, client):
        """1-based support indices select the weighted entries"""
        x = [0.0, 1.5, 0.0, -2.0, 0.0]
        response = client.post('/api/solve', json={
            'A': np.eye(5).tolist(), 'y': x, 'omega': 0.3, 'support': [2, 4]})

        assert response.status_code == 200
        data = response.get_json()
        assert data['status'] == 'Optimal'
        assert data['objective'] == pytest.approx(0.3 * 3.5, abs=1e-7)
        assert np.allclose(data['x_hat'], x, atol=1e-7)

    def test_solve_dantzig(self, client):
        """Dantzig noise set through the API"""
        response = client.post('/api/solve', json={
            'A': np.eye(3).tolist(), 'y': [1.0, 0.0, 0.0], 'noise': 'ds', 'eps': 0.25})

        assert response.status_code == 200
        data = response.get_json()
        assert data['program'] == 'ds'
        assert data['x_hat'][0] == pytest.approx(0.75, abs=1e-7)

    def test_solve_shape_mismatch(self, client):
        """y of the wrong length is a 400"""
        response = client.post('/api/solve', json={'A': np.eye(3).tolist(), 'y': [1.0, 2.0]})

        assert response.status_code == 400

    @patch('wl1.routes.api.solve')
    def test_solver_failure(self, mock_solve, client):
        """Backend failures surface as 500 with the error type"""
        from wl1.utils.errors import SolverError

        mock_solve.side_effect = SolverError('backend crashed')
        response = client.post('/api/solve', json={'A': np.eye(2).tolist(), 'y': [1.0, 1.0]})

        assert response.status_code == 500
        data = response.get_json()
        assert data['error'] == 'SolverError'
        assert 'backend crashed' in data['message']


class TestRipRoute:

    def test_exact(self, client, orthonormal_matrix):
        """Orthonormal columns have delta 0"""
        response = client.post('/api/rip/exact', json={'A': orthonormal_matrix.tolist(), 'k': 2})

        assert response.status_code == 200
        data = response.get_json()
        assert data['delta'] == pytest.approx(0.0, abs=1e-12)
        assert data['mode'] == 'Exact'

    def test_budget_exceeded(self, client, rng):
        """Enumeration over budget is a 422"""
        response = client.post('/api/rip/exact', json={
            'A': rng.standard_normal((4, 12)).tolist(), 'k': 6, 'budget': 10})

        assert response.status_code == 422
        assert response.get_json()['error'] == 'EnumerationBudgetError'

    def test_budget_capped_by_config(self, client, config, rng):
        """A client budget above RIC_BUDGET does not lift the cap"""
        config['RIC_BUDGET'] = 10

        response = client.post('/api/rip/exact', json={
            'A': rng.standard_normal((4, 12)).tolist(), 'k': 6, 'budget': 10**9})

        assert response.status_code == 422

    def test_budget_must_be_positive(self, client, rng):
        """A zero budget is a bad parameter"""
        response = client.post('/api/rip/exact', json={
            'A': rng.standard_normal((4, 6)).tolist(), 'k': 2, 'budget': 0})

        assert response.status_code == 400


class TestSharpnessRoute:

    def test_minimal_t_from_gamma(self, client):
        """gamma = 1 gives 4/3"""
        response = client.post('/api/sharpness/minimal-t', json={'gamma': 1.0})

        assert response.status_code == 200
        assert response.get_json()['minimal_t'] == pytest.approx(4.0 / 3.0, rel=1e-15)

    def test_minimal_t_from_geometry(self, client):
        """omega = 1 has gamma = 1 for any (rho, alpha)"""
        response = client.post('/api/sharpness/minimal-t',
                               json={'omega': 1.0, 'rho': 1.0, 'alpha': 0.7})

        data = response.get_json()
        assert data['gamma'] == 1.0
        assert data['minimal_t'] == pytest.approx(4.0 / 3.0, rel=1e-15)

    def test_minimal_t_bad_gamma(self, client):
        """gamma outside (0, 1] is a 400"""
        response = client.post('/api/sharpness/minimal-t', json={'gamma': 0.0})

        assert response.status_code == 400


class TestAppErrors:

    def test_unknown_route(self, client):
        """404 returns JSON"""
        response = client.get('/api/nowhere')

        assert response.status_code == 404
        assert response.get_json()['error'] == 'NotFound'

    def test_wrong_method(self, client):
        """GET on a POST endpoint is a JSON 405"""
        response = client.get('/api/solve')

        assert response.status_code == 405
        assert response.get_json()['success'] is False
