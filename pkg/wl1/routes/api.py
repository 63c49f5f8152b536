"""JSON API over the library. Index sets in requests and responses are 1-based."""
import logging

import numpy as np
from flask import Blueprint, current_app, jsonify, request

from wl1.models.io import indices_from_json
from wl1.models.signal import ProblemInstance, build_weights
from wl1.monitoring.metrics import application_errors
from wl1.services import bounds, rip, sharpness
from wl1.services.solver import SolverOptions, solve
from wl1.utils.errors import (DomainError, EnumerationBudgetError,
                              ParameterError, Wl1Error)
from wl1.utils.validators import validate_positive_int

logger = logging.getLogger(__name__)

api_bp = Blueprint("api", __name__)


def _payload():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ParameterError("request body must be a JSON object")
    return data


def _require(data, *names):
    missing = [name for name in names if name not in data]
    if missing:
        raise ParameterError(f"missing fields: {', '.join(missing)}")
    return [data[name] for name in names]


def _error_response(error, status_code):
    application_errors.labels(error_type=type(error).__name__).inc()
    logger.warning(
        f"API request rejected: {error}",
        extra={
            "event": "api_error",
            "error_type": type(error).__name__,
            "status_code": status_code,
            "path": request.path,
        },
    )
    return (
        jsonify({"success": False, "error": type(error).__name__, "message": str(error)}),
        status_code,
    )


@api_bp.errorhandler(ParameterError)
@api_bp.errorhandler(DomainError)
def handle_bad_request(error):
    return _error_response(error, 400)


@api_bp.errorhandler(EnumerationBudgetError)
def handle_budget(error):
    return _error_response(error, 422)


@api_bp.errorhandler(Wl1Error)
def handle_library_error(error):
    return _error_response(error, 500)


@api_bp.route("/bounds/threshold", methods=["POST"])
def threshold():
    """Every recovery threshold for one (t, omega, rho, alpha)"""
    data = _payload()
    t, omega = _require(data, "t", "omega")
    table = bounds.threshold_table(t, omega, data.get("rho", 1.0), data.get("alpha", 0.5),
                                   a=data.get("a", 3.0))
    return jsonify({"success": True, **table})


@api_bp.route("/bounds/constants", methods=["POST"])
def constants():
    """D0, D1 and D0' for one geometry and delta_tk"""
    data = _payload()
    t, omega, delta = _require(data, "t", "omega", "delta")
    g = bounds.GeometryParams.create(t, omega, data.get("rho", 1.0), data.get("alpha", 0.5))
    result = bounds.stability_constants(g, delta, data.get("k", 1))
    return jsonify({
        "success": True,
        "threshold": bounds.ric_threshold(g),
        "D0": result.D0,
        "D1": result.D1,
        "D0_ds": result.D0_ds,
        "D1_ds": result.D1_ds,
    })


@api_bp.route("/solve", methods=["POST"])
def solve_instance():
    """Weighted l1 solve of {A, y, eps, noise, omega, support}"""
    data = _payload()
    A, y = _require(data, "A", "y")
    inst = ProblemInstance(A=np.asarray(A, dtype=float), y=np.asarray(y, dtype=float),
                           noise_set=data.get("noise", "l2"), radius=data.get("eps", 0.0))
    support = indices_from_json(data.get("support", []))
    w = build_weights(support, data.get("omega", 1.0), inst.N)
    report = solve(inst, w, SolverOptions.from_config())
    return jsonify({"success": True, **report.to_dict()})


@api_bp.route("/rip/exact", methods=["POST"])
def rip_exact():
    """Exact restricted isometry constant of order ceil(k)

    A client budget can only lower the configured RIC_BUDGET.
    """
    data = _payload()
    A, k = _require(data, "A", "k")
    budget = int(current_app.config["RIC_BUDGET"])
    if data.get("budget") is not None:
        budget = min(budget, validate_positive_int("budget", data["budget"]))
    result = rip.exact_ric(np.asarray(A, dtype=float), k, budget=budget)
    return jsonify({"success": True, **result.to_dict()})


@api_bp.route("/sharpness/minimal-t", methods=["POST"])
def minimal_t():
    data = _payload()
    if "gamma" in data:
        gamma = data["gamma"]
    else:
        gamma = bounds.gamma(*_require(data, "omega", "rho", "alpha"))
    return jsonify({"success": True, "gamma": gamma, "minimal_t": sharpness.minimal_t(gamma)})
