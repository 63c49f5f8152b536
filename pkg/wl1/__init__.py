import logging
import time

from flask import Flask, jsonify, request

from wl1.config import get_config

logger = logging.getLogger(__name__)

__version__ = "1.0.0"


def create_app(config_name=None):
    """Application factory pattern"""
    app = Flask(__name__)
    config_class = get_config(config_name)
    app.config.from_object(config_class)
    app.json.sort_keys = app.config.get("JSON_SORT_KEYS", False)

    # Set application start time
    app.start_time = time.time()

    # Register blueprints
    from wl1.routes.api import api_bp
    from wl1.routes.health import health_bp

    app.register_blueprint(api_bp, url_prefix="/api")
    app.register_blueprint(health_bp)

    # Setup monitoring
    from wl1.monitoring.logging import setup_logging
    from wl1.monitoring.metrics import setup_metrics
    from wl1.monitoring.tracing import setup_tracing

    setup_metrics(app)
    setup_logging(
        level=app.config["LOG_LEVEL"],
        log_dir=app.config["LOG_DIR"],
        json_file=app.config["LOG_JSON"],
    )
    setup_tracing(app)

    # Command groups
    from wl1.cli import register_commands

    register_commands(app)

    @app.errorhandler(404)
    def not_found(error):
        """Handle 404 errors"""
        logger.warning(f"404 error for {request.url}")
        return jsonify({"success": False, "error": "NotFound", "message": "Not found"}), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return (
            jsonify({"success": False, "error": "MethodNotAllowed",
                     "message": f"{request.method} not allowed on {request.path}"}),
            405,
        )

    @app.errorhandler(500)
    def internal_error(error):
        """Handle 500 errors"""
        logger.error(f"Internal server error: {error}", exc_info=True)
        return (
            jsonify({"success": False, "error": "InternalError",
                     "message": "Internal server error"}),
            500,
        )

    logger.debug("Application created", extra={"event": "app_created",
                                                "environment": config_class.ENV_NAME})
    return app
