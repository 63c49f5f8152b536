from unittest.mock import MagicMock, patch


def mock_system(mock_psutil, cpu=50.0, memory_percent=60.0):
    mock_psutil.cpu_percent.return_value = cpu
    mock_psutil.cpu_count.return_value = 8
    mock_memory = MagicMock()
    mock_memory.percent = memory_percent
    mock_memory.available = 6 * 1024 * 1024 * 1024
    mock_psutil.virtual_memory.return_value = mock_memory


class TestHealthRoutes:

    @patch('wl1.routes.health.psutil')
    def test_health_check_healthy(self, mock_psutil, client):
        """Test health check when system is healthy"""
        mock_system(mock_psutil)

        response = client.get('/health')

        assert response.status_code == 200
        data = response.get_json()
        assert data['status'] == 'healthy'
        assert data['system']['cpu_percent'] == 50.0
        assert data['system']['cpu_count'] == 8
        assert data['system']['memory_available_gb'] == 6.0

    @patch('wl1.routes.health.psutil')
    def test_health_check_reports_configuration(self, mock_psutil, client):
        """Test health check exposes environment, workers and budget"""
        mock_system(mock_psutil)

        with patch('wl1.routes.health.get_workers', return_value=3):
            response = client.get('/health')

        data = response.get_json()
        assert data['application']['environment'] == 'testing'
        assert data['application']['workers'] == 3
        assert data['application']['ric_budget'] == 2_000_000

    @patch('wl1.routes.health.psutil')
    def test_health_check_with_app_uptime(self, mock_psutil, client, app):
        """Test health check with application uptime"""
        mock_system(mock_psutil)

        import time
        app.start_time = time.time() - 120

        response = client.get('/health')

        assert response.status_code == 200
        data = response.get_json()
        assert 119 <= data['application']['uptime_seconds'] <= 121

    @patch('wl1.routes.health.psutil')
    def test_health_check_without_start_time(self, mock_psutil, client, app):
        """Test uptime is zero when the start time is unknown"""
        mock_system(mock_psutil)
        app.start_time = None

        response = client.get('/health')

        assert response.get_json()['application']['uptime_seconds'] == 0

    @patch('wl1.routes.health.available_backends',
           return_value={'lp': 'highs', 'cone': None})
    @patch('wl1.routes.health.psutil')
    def test_health_check_without_cone_backend(self, mock_psutil, mock_backends, client):
        """Test a missing cone backend reports degraded but stays up"""
        mock_system(mock_psutil)

        response = client.get('/health')

        assert response.status_code == 200
        data = response.get_json()
        assert data['status'] == 'degraded'
        assert data['backends'] == {'lp': 'highs', 'cone': None}

    @patch('wl1.routes.health.psutil')
    def test_health_check_reports_solver_defaults(self, mock_psutil, client):
        """Test solver tolerances from the config reach the payload"""
        mock_system(mock_psutil)

        defaults = client.get('/health').get_json()['application']['solver_defaults']

        assert defaults == {'feas_tol': 1e-8, 'opt_tol': 1e-8, 'max_iters': 50_000}

    @patch('wl1.routes.health.psutil')
    def test_health_check_exception(self, mock_psutil, client):
        """Test health check when psutil fails"""
        mock_psutil.cpu_percent.side_effect = Exception("System error")

        response = client.get('/health')

        assert response.status_code == 503
        data = response.get_json()
        assert data['status'] == 'unhealthy'
        assert 'System error' in data['error']


class TestHealthMetrics:

    @patch('wl1.routes.health.psutil')
    def test_health_metrics_success(self, mock_psutil, client):
        """Test Prometheus text output"""
        mock_system(mock_psutil, cpu=25.0, memory_percent=40.0)

        response = client.get('/health-metrics')

        assert response.status_code == 200
        assert response.mimetype == 'text/plain'
        body = response.get_data(as_text=True)
        assert 'wl1_health_status 1' in body
        assert 'wl1_cpu_percent 25.0' in body
        assert 'wl1_memory_percent 40.0' in body
        assert 'wl1_workers' in body
        assert 'wl1_cone_backend_available' in body

    @patch('wl1.routes.health.psutil')
    def test_health_metrics_exception(self, mock_psutil, client):
        """Test metrics endpoint reports an unhealthy status on failure"""
        mock_psutil.virtual_memory.side_effect = Exception("Memory error")

        response = client.get('/health-metrics')

        assert response.status_code == 503
        assert 'wl1_health_status 0' in response.get_data(as_text=True)
