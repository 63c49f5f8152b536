import pytest


class TestAppFactory:

    def test_create_app(self):
        """Test Flask app creation"""
        from wl1 import create_app

        app = create_app('testing')

        assert app is not None
        assert app.config['TESTING'] is True
        assert app.config['ENV_NAME'] == 'testing'
        assert app.start_time > 0

    def test_app_blueprints(self, app):
        """Test that all blueprints are registered"""
        blueprints = [bp.name for bp in app.blueprints.values()]

        assert 'api' in blueprints
        assert 'health' in blueprints

    def test_api_routes(self, app):
        """Test that the API routes sit under /api"""
        rules = {rule.rule for rule in app.url_map.iter_rules()}

        for path in ('/api/bounds/threshold', '/api/bounds/constants', '/api/solve',
                     '/api/rip/exact', '/api/sharpness/minimal-t', '/metrics', '/health'):
            assert path in rules

    def test_cli_commands(self, app):
        """Test that the command groups are registered"""
        for name in ('bounds', 'rip', 'sharpness', 'experiment', 'figures', 'solve'):
            assert name in app.cli.commands

    def test_error_handlers(self, client):
        """Test error handlers"""
        response = client.get('/nonexistent-page')

        assert response.status_code == 404
        assert response.get_json() == {
            'success': False, 'error': 'NotFound', 'message': 'Not found'}

    def test_unsorted_json(self, client):
        """Test responses keep insertion order"""
        response = client.post('/api/sharpness/minimal-t', json={'gamma': 1.0})

        body = response.get_data(as_text=True)
        assert body.index('success') < body.index('gamma') < body.index('minimal_t')

    def test_version(self):
        """Test the package exposes its version"""
        import wl1

        assert wl1.__version__ == '1.0.0'
