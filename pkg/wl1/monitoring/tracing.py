import contextvars
import logging
import time
import uuid
from contextlib import contextmanager

logger = logging.getLogger(__name__)

_run_id = contextvars.ContextVar("wl1_run_id", default=None)


def current_run_id():
    """Id of the run the caller is executing in, or None"""
    return _run_id.get()


@contextmanager
def trace_run(name, **fields):
    """Log the start, end and duration of a named unit of work"""
    run_id = str(uuid.uuid4())
    token = _run_id.set(run_id)
    start_time = time.perf_counter()
    logger.info(
        f"{name} started",
        extra={"event": "run_started", "run_name": name, "run_id": run_id, **fields},
    )
    try:
        yield run_id
    except Exception as e:
        logger.error(
            f"{name} failed: {e}",
            extra={
                "event": "run_failed",
                "run_name": name,
                "run_id": run_id,
                "error_type": type(e).__name__,
                "duration_ms": round((time.perf_counter() - start_time) * 1000, 2),
            },
        )
        raise
    else:
        logger.info(
            f"{name} completed",
            extra={
                "event": "run_completed",
                "run_name": name,
                "run_id": run_id,
                "duration_ms": round((time.perf_counter() - start_time) * 1000, 2),
            },
        )
    finally:
        _run_id.reset(token)


def setup_tracing(app):
    """Setup request tracing for the Flask app"""
    from flask import g, request

    @app.before_request
    def before_request():
        """Open a run context for each request"""
        g.request_id = str(uuid.uuid4())
        g.start_time = time.time()
        g.run_token = _run_id.set(g.request_id)
        logger.info(
            "Request started",
            extra={
                "event": "request_started",
                "request_id": g.request_id,
                "method": request.method,
                "path": request.path,
                "endpoint": request.endpoint or "unknown",
            },
        )

    @app.after_request
    def after_request(response):
        """Log response details after each request"""
        duration = time.time() - getattr(g, "start_time", time.time())
        logger.info(
            "Request completed",
            extra={
                "event": "request_completed",
                "request_id": getattr(g, "request_id", "unknown"),
                "status_code": response.status_code,
                "duration_ms": round(duration * 1000, 2),
                "method": request.method,
                "endpoint": request.endpoint or "unknown",
                "success": response.status_code < 400,
            },
        )
        return response

    @app.teardown_request
    def teardown_request(error):
        token = g.pop("run_token", None)
        if token is not None:
            try:
                _run_id.reset(token)
            except ValueError:
                pass

    logger.info("Request tracing setup completed")
