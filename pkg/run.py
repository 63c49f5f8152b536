import logging
import os
import sys
from pathlib import Path

# Ensure the package directory is in the Python path
sys.path.insert(0, str(Path(__file__).resolve().parent))

# (variable, parser, predicate, description)
NUMERIC_VARS = (
    ("WL1_WORKERS", int, lambda v: v >= 1, "worker threads, at least 1"),
    ("WL1_RIC_BUDGET", int, lambda v: v >= 1, "support enumeration budget, at least 1"),
    ("WL1_RIC_BATCH", int, lambda v: v >= 1, "supports per eigen batch, at least 1"),
    ("WL1_FEAS_TOL", float, lambda v: 0.0 < v <= 1e-2, "feasibility tolerance in (0, 1e-2]"),
    ("WL1_OPT_TOL", float, lambda v: 0.0 < v <= 1e-2, "optimality tolerance in (0, 1e-2]"),
    ("WL1_MAX_ITERS", int, lambda v: v >= 1, "solver iteration cap, at least 1"),
)


def setup_environment():
    """Load .env and basic logging"""
    from dotenv import load_dotenv

    env_path = Path(__file__).resolve().parent / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path)
    else:
        load_dotenv()

    log_level = getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)
    logging.basicConfig(
        level=log_level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


def validate_environment():
    """Exit with status 1 when a numeric setting is malformed"""
    logger = logging.getLogger(__name__)
    invalid = []
    for var, parse, ok, description in NUMERIC_VARS:
        raw = os.getenv(var)
        if raw is None:
            continue
        try:
            valid = ok(parse(raw))
        except ValueError:
            valid = False
        if not valid:
            invalid.append(f"{var}={raw!r} ({description})")

    if invalid:
        logger.error(f"Invalid environment variables: {', '.join(invalid)}")
        print("\nERROR: Invalid environment variables:", file=sys.stderr)
        for entry in invalid:
            print(f"  - {entry}", file=sys.stderr)
        sys.exit(1)

    logger.debug("Environment validation completed successfully")


def create_application():
    """Create and configure the Flask application"""
    from wl1 import create_app

    app = create_app()
    logging.getLogger(__name__).info("Flask application created successfully")
    return app


def serve():
    """Serve the HTTP API"""
    logger = logging.getLogger(__name__)
    app = create_application()

    port = int(os.environ.get("PORT", 5000))
    debug_mode = os.getenv("FLASK_DEBUG", "False").lower() == "true"
    host = os.getenv("FLASK_HOST", "127.0.0.1")

    logger.info(f"Starting application on {host}:{port}")
    logger.info(f"Workers: {app.config['WORKERS']}, RIC budget: {app.config['RIC_BUDGET']}")
    try:
        app.run(host=host, port=port, debug=debug_mode, use_reloader=debug_mode)
    except KeyboardInterrupt:
        logger.info("Application stopped by user")


def main(argv=None):
    """With arguments, run the wl1 CLI; without, serve the HTTP API"""
    argv = sys.argv[1:] if argv is None else list(argv)
    setup_environment()
    validate_environment()

    if argv:
        from wl1.cli import main as cli_main

        return cli_main(argv)

    try:
        serve()
    except Exception as e:
        logging.getLogger(__name__).error(f"Failed to start application: {e}", exc_info=True)
        print(f"\nERROR: Failed to start application: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
