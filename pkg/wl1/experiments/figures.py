"""Curve data for the threshold and constant comparison figures.

The fig1 panels compare the weighted conditions with standard l1 (t = 4, rho = 1,
delta_tk = 0.1, and 0.6 for the primed panels). The fig2 panels compare them with
the earlier weighted conditions (t = 4, a = 3, rho = 1, delta_tk =
delta_(a+1)k = 0.1, delta_ak = 0.05).
"""
import logging
from pathlib import Path

from wl1.monitoring.metrics import figure_files_written
from wl1.services.bounds import SweepSpec, figure_sweep, write_sweep_csv

logger = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.1, 0.3, 0.5, 0.7, 0.9)
OMEGA_STEPS = 101

FIGURE_T = 4.0
FIGURE_RHO = 1.0
FIGURE_A = 3.0


def figure_specs(alphas=DEFAULT_ALPHAS, omega_steps=OMEGA_STEPS):
    """name -> (SweepSpec, columns written)"""
    alphas = tuple(alphas)

    def reference(delta):
        return SweepSpec(t=FIGURE_T, rho=FIGURE_RHO, delta=delta, alphas=alphas,
                         omega_steps=omega_steps, include_reference=True)

    comparison = SweepSpec(t=FIGURE_T, rho=FIGURE_RHO, delta=0.1, alphas=alphas,
                           omega_steps=omega_steps, a=FIGURE_A, delta_ak=0.05, delta_a1k=0.1)
    return {
        "fig1a": (reference(0.1), ["omega", "alpha", "delta_t_omega", "delta_t_1"]),
        "fig1b": (reference(0.1), ["omega", "alpha", "D0", "C0"]),
        "fig1c": (reference(0.1), ["omega", "alpha", "D1", "C1"]),
        "fig1b_prime": (reference(0.6), ["omega", "alpha", "D0", "C0"]),
        "fig1c_prime": (reference(0.6), ["omega", "alpha", "D1", "C1"]),
        "fig2d": (comparison, ["omega", "alpha", "delta_t_omega", "delta_a_omega"]),
        "fig2e": (comparison, ["omega", "alpha", "D0", "C0pp"]),
        "fig2f": (comparison, ["omega", "alpha", "D1", "C1pp"]),
    }


def emit_figures(out_dir, alphas=DEFAULT_ALPHAS, omega_steps=OMEGA_STEPS) -> list:
    """Write every figure CSV into out_dir and return the paths"""
    out_dir = Path(out_dir)
    rows_by_spec = {}
    paths = []
    for name, (spec, columns) in figure_specs(alphas, omega_steps).items():
        if spec not in rows_by_spec:
            rows_by_spec[spec] = figure_sweep(spec)
        path = write_sweep_csv(out_dir / f"{name}.csv", spec, rows_by_spec[spec], columns)
        figure_files_written.inc()
        logger.info("Figure data written", extra={"event": "figure_written", "path": str(path)})
        paths.append(path)
    return paths
