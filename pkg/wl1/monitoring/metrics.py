import logging
import time
from functools import wraps

from prometheus_client import (CONTENT_TYPE_LATEST, CollectorRegistry, Counter,
                               Histogram, generate_latest)

logger = logging.getLogger(__name__)

# Create a custom registry for our metrics
REGISTRY = CollectorRegistry()

solves_total = Counter(
    "wl1_solves_total",
    "Weighted l1 solves by program and final status",
    ["program", "status"],
    registry=REGISTRY,
)

solve_duration_seconds = Histogram(
    "wl1_solve_duration_seconds",
    "Wall time of a single solve",
    ["program"],
    registry=REGISTRY,
)

ric_supports_evaluated = Counter(
    "wl1_ric_supports_evaluated_total",
    "Gram blocks whose extremal eigenvalues were computed",
    ["mode"],
    registry=REGISTRY,
)

trials_total = Counter(
    "wl1_trials_total",
    "Experiment trials by outcome",
    ["status"],
    registry=REGISTRY,
)

figure_files_written = Counter(
    "wl1_figure_files_written_total",
    "Figure data files written",
    registry=REGISTRY,
)

http_requests_total = Counter(
    "wl1_http_requests_total",
    "Total HTTP requests",
    ["method", "endpoint", "status_code"],
    registry=REGISTRY,
)

application_errors = Counter(
    "wl1_application_errors_total",
    "Errors raised out of library calls",
    ["error_type"],
    registry=REGISTRY,
)


def track_solve(program):
    """Decorator recording duration and status of a solve returning a report"""

    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                report = f(*args, **kwargs)
            except Exception as e:
                solves_total.labels(program=program, status="Error").inc()
                application_errors.labels(error_type=type(e).__name__).inc()
                raise
            solve_duration_seconds.labels(program=program).observe(
                time.perf_counter() - start_time)
            status = getattr(report, "status", "unknown")
            solves_total.labels(program=program, status=getattr(status, "value", status)).inc()
            return report

        return decorated_function

    return decorator


def setup_metrics(app):
    """Setup Prometheus metrics for the Flask app"""
    from flask import Response, request

    @app.route("/metrics")
    def metrics():
        """Prometheus metrics endpoint"""
        try:
            return Response(generate_latest(REGISTRY), mimetype=CONTENT_TYPE_LATEST)
        except Exception as e:
            logger.error(f"Error generating metrics: {e}", exc_info=True)
            return "Error generating metrics", 500

    @app.after_request
    def count_request(response):
        http_requests_total.labels(
            method=request.method,
            endpoint=request.endpoint or "unknown",
            status_code=str(response.status_code),
        ).inc()
        return response

    logger.info("Prometheus metrics setup completed")
