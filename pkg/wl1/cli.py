"""Command groups registered on the Flask CLI.

    bounds sweep | threshold | constants
    solve
    rip exact | mc | certify
    sharpness build | demo
    experiment run | bound-check
    figures emit

Index sets in files are 1-based. JSON goes to --out or stdout.
"""
import functools
import json
import logging
from pathlib import Path

import click
import numpy as np
from flask.cli import AppGroup, FlaskGroup

from wl1.config import get_workers
from wl1.experiments.config import ExperimentConfig
from wl1.experiments.figures import emit_figures
from wl1.experiments.runner import (run_certified_bound_check,
                                    run_recovery_experiment)
from wl1.models.io import (read_json, read_matrix_csv, read_vector_csv,
                           weights_from_json, write_json, write_matrix_csv)
from wl1.models.signal import ProblemInstance
from wl1.monitoring.tracing import trace_run
from wl1.services import bounds, rip, sharpness
from wl1.services.solver import SolverOptions, solve
from wl1.utils.errors import Wl1Error

logger = logging.getLogger(__name__)

bounds_cli = AppGroup("bounds", help="Recovery thresholds and stability constants.")
rip_cli = AppGroup("rip", help="Restricted isometry constants.")
sharpness_cli = AppGroup("sharpness", help="Counterexample at the RIP threshold.")
experiment_cli = AppGroup("experiment", help="Monte Carlo recovery studies.")
figures_cli = AppGroup("figures", help="Figure curve data.")


def reports_errors(f):
    """Turn library errors into a clean CLI failure"""

    @functools.wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except Wl1Error as e:
            raise click.ClickException(f"{type(e).__name__}: {e}") from e

    return decorated_function


def _emit(data, out=None):
    if out:
        path = write_json(out, data)
        click.echo(f"wrote {path}")
    else:
        click.echo(json.dumps(data, indent=2))


def _floats(text):
    return tuple(float(value) for value in text.split(",") if value.strip())


@bounds_cli.command("sweep")
@click.option("--t", "t", type=float, default=4.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True, help="delta_tk")
@click.option("--alphas", default="0.5,0.7,0.9", show_default=True)
@click.option("--omega-steps", type=int, default=101, show_default=True)
@click.option("--a", "a", type=float, default=None, help="Add delta_a^omega, C0'', C1''")
@click.option("--delta-ak", type=float, default=0.05, show_default=True)
@click.option("--delta-a1k", type=float, default=0.1, show_default=True)
@click.option("--reference/--no-reference", default=False, help="Add standard l1 columns")
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@reports_errors
def bounds_sweep(t, rho, delta, alphas, omega_steps, a, delta_ak, delta_a1k, reference, k, out):
    """Thresholds and constants over an omega grid"""
    spec = bounds.SweepSpec(t=t, rho=rho, delta=delta, alphas=_floats(alphas),
                            omega_steps=omega_steps, k=k, a=a, delta_ak=delta_ak,
                            delta_a1k=delta_a1k, include_reference=reference)
    if out:
        click.echo(f"wrote {bounds.write_sweep_csv(out, spec)}")
        return
    columns = spec.columns()
    click.echo(",".join(columns))
    for row in bounds.figure_sweep(spec):
        click.echo(",".join(bounds.format_value(row[column]) for column in columns))


@bounds_cli.command("threshold")
@click.option("--t", "t", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--a", "a", type=float, default=3.0, show_default=True)
@reports_errors
def bounds_threshold(t, omega, rho, alpha, a):
    """All recovery thresholds for one geometry"""
    _emit(bounds.threshold_table(t, omega, rho, alpha, a=a))


@bounds_cli.command("constants")
@click.option("--t", "t", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--k", type=int, default=1, show_default=True)
@reports_errors
def bounds_constants(t, omega, delta, rho, alpha, k):
    """D0, D1, D0' and the standard l1 constants"""
    g = bounds.GeometryParams.create(t, omega, rho, alpha)
    constants = bounds.stability_constants(g, delta, k)
    data = {**g.to_dict(), "delta": delta, "threshold": bounds.ric_threshold(g),
            "D0": constants.D0, "D1": constants.D1, "D0_ds": constants.D0_ds}
    try:
        C0, C1, C0_ds, _ = bounds.cz_constants(t, delta, k)
        data.update({"C0": C0, "C1": C1, "C0_ds": C0_ds})
    except Wl1Error as e:
        logger.info(f"Standard l1 constants unavailable: {e}")
    _emit(data)


@click.command("solve")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--y", "y_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--weights", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--noise", type=click.Choice(["l2", "ds"]), default="l2", show_default=True)
@click.option("--eps", type=float, default=0.0, show_default=True)
@click.option("--feas-tol", type=float, default=None)
@click.option("--opt-tol", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@reports_errors
def solve_command(matrix, y_path, weights, noise, eps, feas_tol, opt_tol, max_iters, out):
    """Weighted l1 minimisation under the l2 or Dantzig constraint"""
    inst = ProblemInstance(A=read_matrix_csv(matrix), y=read_vector_csv(y_path),
                           noise_set=noise, radius=eps)
    w = weights_from_json(read_json(weights))
    opts = SolverOptions.from_config(feas_tol=feas_tol, opt_tol=opt_tol, max_iters=max_iters)
    with trace_run("solve", noise=noise, n=inst.n, N=inst.N):
        report = solve(inst, w, opts)
    _emit(report.to_dict(), out)


@rip_cli.command("exact")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=float, required=True)
@click.option("--budget", type=int, default=None)
@reports_errors
def rip_exact(matrix, k, budget):
    """Exact delta_ceil(k) by enumeration"""
    with trace_run("rip_exact", k=k):
        result = rip.exact_ric(read_matrix_csv(matrix), k, budget=budget)
    _emit(result.to_dict())


@rip_cli.command("mc")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=float, required=True)
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@reports_errors
def rip_mc(matrix, k, trials, seed):
    """Sampled lower bound on delta_ceil(k)"""
    with trace_run("rip_mc", k=k, trials=trials):
        result = rip.mc_ric_lower_bound(read_matrix_csv(matrix), k, trials, seed)
    _emit(result.to_dict())


@rip_cli.command("certify")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=int, required=True)
@click.option("--t", "t", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--mc-trials", type=int, default=rip.DEFAULT_MC_TRIALS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@reports_errors
def rip_certify(matrix, k, t, omega, rho, alpha, mc_trials, seed):
    """Check delta_tk < delta_t^omega for a matrix"""
    g = bounds.GeometryParams.create(t, omega, rho, alpha)
    with trace_run("rip_certify", k=k, t=t):
        result = rip.certify_recovery(read_matrix_csv(matrix), k, g,
                                      mc_trials=mc_trials, seed=seed)
    _emit(result.to_dict())


@sharpness_cli.command("build")
@click.option("--k", type=int, required=True)
@click.option("--t", "t", type=float, required=True)
@click.option("--omega", type=float, default=1.0, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--eps", type=float, default=None, help="Slack; requires k >= 6/eps")
@click.option("--n-columns", "N", type=int, default=None)
@click.option("--verify-ric/--no-verify-ric", default=False, help="Enumerate delta_ceil(tk)")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@reports_errors
def sharpness_build(k, t, omega, rho, alpha, eps, N, verify_ric, out):
    """Construct the counterexample; A goes to a CSV beside --out"""
    with trace_run("sharpness_build", k=k, t=t):
        ce = sharpness.construct_counterexample(k, t, omega, rho, alpha, epsilon=eps, N=N)
        data = ce.to_dict(include_matrix=False)
        matrix_path = write_matrix_csv(Path(out).with_suffix(".A.csv"), ce.A)
        data["A_path"] = matrix_path.name
        data["verification"] = sharpness.verify_counterexample(ce)
        if verify_ric:
            delta, bound, ok = sharpness.verify_ric_bound(ce, eps or 0.5)
            data["ric"] = {"delta": delta, "bound": bound, "ok": ok}
    _emit(data, out)


@sharpness_cli.command("demo")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@reports_errors
def sharpness_demo(in_path, out):
    """Show weighted l1 missing x0 on a built counterexample"""
    data = read_json(in_path)
    A = None
    if data.get("A_path"):
        A = read_matrix_csv(Path(in_path).parent / data["A_path"])
    ce = sharpness.Counterexample.from_dict(data, A=A)
    with trace_run("sharpness_demo", k=ce.k, t=ce.t):
        report = sharpness.demonstrate_failure(ce, opts=SolverOptions.from_config())
    _emit(report.to_dict(), out)


def _experiment_config(config_path, out_dir, trials, seed):
    cfg = ExperimentConfig.from_json(config_path)
    return cfg.replace(output_dir=out_dir, trials=trials, seed=seed)


@experiment_cli.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@reports_errors
def experiment_run(config_path, out_dir, trials, seed, workers):
    """Recovery sweep over the config's omega and alpha grids"""
    cfg = _experiment_config(config_path, out_dir, trials, seed)
    result = run_recovery_experiment(cfg, workers=workers or get_workers())
    for path in result.files:
        click.echo(f"wrote {path}")


@experiment_cli.command("bound-check")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@reports_errors
def experiment_bound_check(config_path, out_dir, trials, seed, workers):
    """Compare observed errors with certified error bounds on tiny instances"""
    cfg = _experiment_config(config_path, out_dir, trials, seed)
    result = run_certified_bound_check(cfg, workers=workers or get_workers())
    for path in result.files:
        click.echo(f"wrote {path}")
    click.echo(f"certified cells: {len(result.certified)}, violations: {len(result.violations)}")
    if result.violations:
        raise click.ClickException("certified error bound violated")


@figures_cli.command("emit")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--alphas", default=None, help="Comma-separated alpha grid")
@click.option("--omega-steps", type=int, default=101, show_default=True)
@reports_errors
def figures_emit(out_dir, alphas, omega_steps):
    """Write the figure CSVs"""
    kwargs = {"omega_steps": omega_steps}
    if alphas:
        kwargs["alphas"] = _floats(alphas)
    for path in emit_figures(out_dir, **kwargs):
        click.echo(f"wrote {path}")


def register_commands(app):
    for group in (bounds_cli, rip_cli, sharpness_cli, experiment_cli, figures_cli):
        app.cli.add_command(group)
    app.cli.add_command(solve_command)


def main(args=None):
    """Process entry point: the Flask CLI with the wl1 command groups"""
    from wl1 import create_app

    cli = FlaskGroup(create_app=create_app, help="Weighted l1 sparse recovery toolkit.")
    return cli.main(args=args, prog_name="wl1")
