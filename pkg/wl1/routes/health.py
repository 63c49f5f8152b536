import datetime
import logging
import time

import psutil
from flask import Blueprint, Response, current_app, jsonify

from wl1.config import get_workers
from wl1.services.solver import available_backends

logger = logging.getLogger(__name__)

health_bp = Blueprint("health", __name__)


def _uptime():
    start_time = getattr(current_app, "start_time", None)
    return int(time.time() - start_time) if start_time else 0


@health_bp.route("/health")
def health_check():
    """Process figures, solver backends and the active run settings

    Without a cone backend only noiseless and Dantzig solves work, which is
    reported as "degraded" with status 200.
    """
    try:
        backends = available_backends()
        cpu_percent = psutil.cpu_percent(interval=0.1)
        memory = psutil.virtual_memory()
        status = "healthy" if backends["cone"] else "degraded"

        payload = {
            "status": status,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "backends": backends,
            "system": {
                "cpu_percent": cpu_percent,
                "cpu_count": psutil.cpu_count(),
                "memory_percent": memory.percent,
                "memory_available_gb": round(memory.available / (1024**3), 2),
            },
            "application": {
                "environment": current_app.config.get("ENV_NAME", "development"),
                "workers": get_workers(),
                "ric_budget": current_app.config.get("RIC_BUDGET"),
                "solver_defaults": {
                    "feas_tol": current_app.config.get("FEAS_TOL"),
                    "opt_tol": current_app.config.get("OPT_TOL"),
                    "max_iters": current_app.config.get("MAX_ITERS"),
                },
                "uptime_seconds": _uptime(),
            },
        }
        logger.info(
            "Health check performed",
            extra={"event": "health_check", "status": status, "cone_backend": backends["cone"]},
        )
        return jsonify(payload), 200

    except Exception as e:
        logger.error(
            "Health check error",
            extra={"event": "health_check_error", "error_type": type(e).__name__},
            exc_info=True,
        )
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return jsonify({"status": "unhealthy", "timestamp": stamp, "error": str(e)}), 503


@health_bp.route("/health-metrics")
def health_metrics():
    """Process health in Prometheus text format"""
    try:
        memory = psutil.virtual_memory()
        cone_up = 1 if available_backends()["cone"] else 0
        lines = [
            "wl1_health_status 1",
            f"wl1_cone_backend_available {cone_up}",
            f"wl1_cpu_percent {psutil.cpu_percent(interval=0.1)}",
            f"wl1_memory_percent {memory.percent}",
            f"wl1_memory_available_bytes {memory.available}",
            f"wl1_workers {get_workers()}",
            f"wl1_uptime_seconds {_uptime()}",
        ]
        return Response("\n".join(lines) + "\n", mimetype="text/plain")

    except Exception as e:
        logger.error(f"Health metrics error: {e}", exc_info=True)
        return Response("wl1_health_status 0\n", mimetype="text/plain"), 503
