import os
from unittest.mock import MagicMock, patch

import pytest


class TestRunModule:

    @patch('run.serve')
    @patch('run.validate_environment')
    @patch('run.setup_environment')
    def test_main_without_arguments_serves(self, mock_setup, mock_validate, mock_serve):
        """Test main starts the HTTP server when no command is given"""
        import run

        run.main([])

        mock_setup.assert_called_once()
        mock_validate.assert_called_once()
        mock_serve.assert_called_once()

    @patch('wl1.cli.main', return_value=0)
    @patch('run.serve')
    @patch('run.validate_environment')
    @patch('run.setup_environment')
    def test_main_with_arguments_runs_cli(self, mock_setup, mock_validate, mock_serve,
                                          mock_cli):
        """Test command-line arguments are handed to the wl1 CLI"""
        import run

        run.main(['bounds', 'threshold', '--t', '4', '--omega', '1'])

        mock_cli.assert_called_once_with(['bounds', 'threshold', '--t', '4', '--omega', '1'])
        mock_serve.assert_not_called()

    @patch('run.serve', side_effect=RuntimeError('port in use'))
    @patch('run.validate_environment')
    @patch('run.setup_environment')
    def test_main_startup_failure(self, mock_setup, mock_validate, mock_serve):
        """Test a failing server start exits with status 1"""
        import run

        with pytest.raises(SystemExit) as excinfo:
            run.main([])

        assert excinfo.value.code == 1

    @patch('run.create_application')
    def test_serve_uses_host_and_port(self, mock_create_application):
        """Test FLASK_HOST and PORT reach app.run"""
        import run

        mock_app = MagicMock()
        mock_app.config = {'WORKERS': 1, 'RIC_BUDGET': 10}
        mock_create_application.return_value = mock_app

        with patch.dict(os.environ, {'FLASK_HOST': '0.0.0.0', 'PORT': '8081'}):
            run.serve()

        kwargs = mock_app.run.call_args.kwargs
        assert kwargs['host'] == '0.0.0.0'
        assert kwargs['port'] == 8081

    @pytest.mark.parametrize('var,value', [
        ('WL1_WORKERS', '0'),
        ('WL1_RIC_BUDGET', 'lots'),
        ('WL1_FEAS_TOL', '0.5'),
        ('WL1_MAX_ITERS', '-1'),
    ])
    def test_validate_environment_invalid(self, var, value):
        """Test environment validation rejects malformed numeric settings"""
        import run

        with patch.dict(os.environ, {var: value}):
            with pytest.raises(SystemExit):
                run.validate_environment()

    def test_validate_environment_success(self):
        """Test successful environment validation"""
        import run

        with patch.dict(os.environ, {
            'WL1_WORKERS': '4',
            'WL1_RIC_BUDGET': '1000000',
            'WL1_FEAS_TOL': '1e-9',
        }):
            run.validate_environment()

    def test_validate_environment_unset(self):
        """Test unset variables fall back to defaults silently"""
        import run

        names = {var for var, *_ in run.NUMERIC_VARS}
        cleaned = {key: value for key, value in os.environ.items() if key not in names}
        with patch.dict(os.environ, cleaned, clear=True):
            run.validate_environment()
