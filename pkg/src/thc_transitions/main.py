"""Main CLI entry point for thermohaline transition analysis."""

import functools
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from dotenv import load_dotenv

from .config import LC_PRESETS, load_defaults
from .errors import Diverged, InvalidParameters, NoSignChange, ThcError, ToleranceExceeded
from .harmonics import harmonics_check
from .output_manager import OutputManager, render_csv, render_json
from .params import Params, Regime, regime, sigma_crit
from .reduced_dynamics import (
    AmplitudeState,
    attractor_check,
    integrate,
    random_state,
    trajectory_report,
)
from .reproduction import REPRODUCTIONS, run_reproduction
from .selection import parse_selection
from .spectrum import eigenvalues, spectrum_table, verify_pes
from .sweep import RGrid, qsweep
from .transition import critical_R_star, transition_number

load_dotenv()  # Load environment variables from .env

DEFAULTS = load_defaults()


def handle_errors(f):
    """Report package errors on stderr and exit with their exit code."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ThcError as e:
            click.echo(f"❌ Error: {e}", err=True)
            click.get_current_context().exit(e.exit_code)
        except (click.exceptions.Exit, click.Abort, click.UsageError):
            raise
        except Exception as e:
            click.echo(f"❌ Error: {e}", err=True)
            raise click.Abort()

    return wrapper


def physical_options(f):
    """Decorator for the parameter options shared by the analysis commands."""
    options = [
        click.option("--le", type=float, envvar="THC_LE", required=True,
                     help="Lewis number (or set THC_LE env var)"),
        click.option("--pr", type=float, envvar="THC_PR", default=DEFAULTS.pr,
                     show_default=True, help="Prandtl number (or set THC_PR env var)"),
        click.option("--R", "rayleigh", type=float, envvar="THC_R", required=True,
                     help="Thermal Rayleigh number (or set THC_R env var)"),
        click.option("--r", "aspect_ratio", type=float, envvar="THC_ASPECT_RATIO",
                     help="Aspect ratio a/h; overrides --lc (or set THC_ASPECT_RATIO env var)"),
        click.option("--lc", type=click.Choice(["1", "2"]), envvar="THC_LC",
                     default=str(DEFAULTS.lc), show_default=True,
                     help="Critical-degree preset: 1 -> r=2/pi, 2 -> r=2*sqrt(3)/pi"),
        click.option("--rtilde", type=float, envvar="THC_RTILDE",
                     help="Saline Rayleigh magnitude; default puts sigma at sigma_c"),
        click.option("--sign", type=click.Choice(["1", "-1"]), envvar="THC_SIGN",
                     default=str(DEFAULTS.sign), show_default=True,
                     help="Sign of S0 - S1, used together with --rtilde"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def output_options(f):
    """Decorator for --format and --out."""
    options = [
        click.option("--format", "-f", "output_format", type=click.Choice(["csv", "json"]),
                     envvar="THC_FORMAT", default=DEFAULTS.output_format, show_default=True,
                     help="Output format"),
        click.option("--out", "-o", type=click.Path(path_type=Path),
                     help="Write to this file instead of standard output"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def resolve_aspect_ratio(aspect_ratio: Optional[float], lc: str) -> float:
    return aspect_ratio if aspect_ratio is not None else LC_PRESETS[int(lc)]


def resolve_params(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign) -> Params:
    """Params from CLI values; without --rtilde the criticality line is used."""
    r = resolve_aspect_ratio(aspect_ratio, lc)
    if rtilde is None:
        return Params.at_criticality(rayleigh, le, pr, r)
    return Params(Pr=pr, Le=le, R=rayleigh, Rtilde=rtilde, r=r, s_sign=int(sign))


def emit_table(df: pd.DataFrame, output_format: str, out: Optional[Path], name: str):
    """Write a table to --out or print it."""
    if out is not None:
        manager = OutputManager(out.parent)
        stem = out.stem or name
        path = manager.write_table(stem, df, output_format)
        click.echo(f"📁 Results saved to: {path}", err=True)
        return
    if output_format == "json":
        click.echo(render_json({"columns": list(df.columns),
                                "rows": df.to_dict(orient="records")}), nl=False)
    else:
        click.echo(render_csv(df), nl=False)


def emit_record(record: dict, output_format: str, out: Optional[Path], name: str):
    """Write one flat record as a one-row CSV or a JSON object."""
    if output_format == "csv":
        emit_table(pd.DataFrame([record]), output_format, out, name)
        return
    if out is not None:
        path = OutputManager(out.parent).write_json(out.stem or name, record)
        click.echo(f"📁 Results saved to: {path}", err=True)
        return
    click.echo(render_json(record), nl=False)


@click.group()
def cli():
    """Thermohaline circulation transitions - stability spectrum, transition numbers and reduced dynamics."""
    pass


@cli.command()
@physical_options
@output_options
@handle_errors
def classify(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign, output_format, out):
    """Classify the first transition for one parameter set."""
    params = resolve_params(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign)
    report = regime(params)
    record = {**params.as_dict(), "sigma": report.sigma, "sigma_c": report.sigma_c,
              "l_c": report.l_c, "K": report.K, "R0": report.R0, "R1": report.R1,
              "eta": report.eta, "eta_c": report.eta_c, "regime": report.regime.value}

    if report.regime is Regime.STEADY:
        transition = transition_number(report.l_c, params)
        record.update({"q": transition.q, "classification": transition.classification.value,
                       "beta_critical": transition.beta_critical,
                       "attractor_radius_sq": transition.attractor_radius_sq,
                       "near_pole": transition.near_pole})
        record.update({f"D{label}": value for label, value in transition.d_terms.items()})
        try:
            record["R_star"] = critical_R_star(report.l_c, params.Le, params.Pr, params.r)
        except NoSignChange:
            record["R_star"] = None
    else:
        record["classification"] = None

    emit_record(record, output_format, out, "classify")


@cli.command()
@physical_options
@click.option("--l", "degree", type=int, help="Single degree l (with --n)")
@click.option("--n", "index", type=int, help="Single vertical index n (with --l)")
@click.option("--l-max", type=int, default=DEFAULTS.l_max, show_default=True)
@click.option("--n-max", type=int, default=DEFAULTS.n_max, show_default=True)
@output_options
@handle_errors
def spectrum(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign, degree, index,
             l_max, n_max, output_format, out):
    """Eigenvalues of the linearized problem."""
    params = resolve_params(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign)
    if degree is not None or index is not None:
        if degree is None or index is None:
            raise InvalidParameters("--l and --n must be given together")
        triple = eigenvalues(degree, index, params)
        df = pd.DataFrame(
            [{"l": degree, "n": index, "k": k, "re": beta.real, "im": beta.imag,
              "repeated": triple.repeated} for k, beta in enumerate(triple.betas, start=1)]
        )
    else:
        df = spectrum_table(params, l_max, n_max)
    emit_table(df, output_format, out, "spectrum")


@cli.command()
@click.option("--table", "-t", default="all",
              help="Tables to reproduce. Examples: 'all', '1-2', '1,3' (5 = q(R) curves)")
@click.option("--out", "-o", "output_dir", envvar="THC_OUTPUT_DIR",
              default=DEFAULTS.output_dir, type=click.Path(path_type=Path),
              show_default=True, help="Output directory for CSV and markdown reports")
@click.option("--quiet", "-q", is_flag=True, help="Disable progress bars")
@handle_errors
def tables(table, output_dir, quiet):
    """Reproduce the published tables and compare entry by entry."""
    selected = parse_selection(table, REPRODUCTIONS)
    manager = OutputManager(output_dir)
    _, summary = run_reproduction(selected, manager, progress=not quiet)

    click.echo(f"Entries compared: {summary.n_entries}")
    click.echo(f"Worst error / tolerance: {summary.worst_ratio:.3g}")
    click.echo(f"📁 Results saved to: {output_dir}")
    if not summary.passed:
        raise ToleranceExceeded(f"{summary.n_failed} entries exceed their tolerance")
    click.echo("✅ All entries within tolerance")


@cli.command("qsweep")
@click.option("--le", type=float, envvar="THC_LE", required=True, help="Lewis number")
@click.option("--pr", type=float, envvar="THC_PR", default=DEFAULTS.pr, show_default=True)
@click.option("--r", "aspect_ratio", type=float, envvar="THC_ASPECT_RATIO")
@click.option("--lc", type=click.Choice(["1", "2"]), envvar="THC_LC",
              default=str(DEFAULTS.lc), show_default=True)
@click.option("--rmin", type=float, required=True, help="Smallest R of the grid")
@click.option("--rmax", type=float, required=True, help="Largest R of the grid")
@click.option("--steps", type=int, required=True, help="Number of grid points (>= 2)")
@click.option("--workers", "-w", type=int, envvar="THC_WORKERS",
              default=DEFAULTS.workers, show_default=True)
@click.option("--quiet", "-q", is_flag=True, help="Disable progress bars")
@output_options
@handle_errors
def qsweep_command(le, pr, aspect_ratio, lc, rmin, rmax, steps, workers, quiet,
                   output_format, out):
    """Transition number q over a grid of R on the critical line."""
    r = resolve_aspect_ratio(aspect_ratio, lc)
    _, l_c = sigma_crit(r)
    grid = RGrid(rmin, rmax, steps)
    df = qsweep(l_c, le, pr, r, grid, workers=workers, progress=not quiet)
    emit_table(df, output_format, out, "qsweep")


@cli.command()
@physical_options
@click.option("--sigma-offset", type=float, default=1e-3, show_default=True,
              help="Relative offset: sigma = sigma_c (1 + offset)")
@click.option("--radius", type=float, help="Initial |x|^2 (default: half the attractor radius)")
@click.option("--dt", type=float, help="Time step (default: 0.05 / max(|beta|, |q| |x0|^2))")
@click.option("--horizon", type=float, help="Integration time (default: 10 / |beta|)")
@click.option("--stride", type=int, default=10, show_default=True)
@click.option("--seed", type=int, envvar="THC_SEED", default=DEFAULTS.seed, show_default=True)
@click.option("--attractor", is_flag=True, help="Run the 20-start attractor check instead")
@output_options
@handle_errors
def simulate(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign, sigma_offset, radius,
             dt, horizon, stride, seed, attractor, output_format, out):
    """Integrate the reduced amplitude equations above criticality."""
    base = resolve_params(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign)
    sigma_c = regime(base).sigma_c
    l_c = base.l_c

    if attractor:
        report = attractor_check(l_c, base, sigma_c * sigma_offset, seed=seed,
                                 workers=DEFAULTS.workers)
        emit_table(report.to_frame(), output_format, out, "attractor")
        click.echo(f"Target |x|^2 = beta/q = {report.target_radius_sq:.10g}", err=True)
        click.echo(f"Direction spread: {report.direction_spread:.3g}", err=True)
        if not report.passed:
            raise ToleranceExceeded("terminal radii differ from beta/q beyond tolerance")
        click.echo("✅ All starts converged to the attractor radius", err=True)
        return

    params = base.with_sigma(sigma_c * (1.0 + sigma_offset))
    transition = transition_number(l_c, params)
    beta, q = transition.beta_critical, transition.q

    if radius is None:
        radius = 0.5 * beta / q if beta > 0 and q > 0 else 1e-3
    state0 = (
        random_state(l_c, radius, np.random.default_rng(seed))
        if radius > 0
        else AmplitudeState.zero(l_c)
    )
    if dt is None:
        dt = 0.05 / max(abs(beta), abs(q) * max(radius, 1e-300), 1e-300)
    if horizon is None:
        horizon = 10.0 / abs(beta) if beta != 0 else 1e3

    try:
        trajectory = integrate(state0, beta, q, dt, horizon, stride=stride)
    except Diverged as e:
        if e.trajectory is not None:
            emit_table(e.trajectory.to_frame(), output_format, out, "trajectory")
        raise

    emit_table(trajectory.to_frame(), output_format, out, "trajectory")
    summary = trajectory_report(trajectory, beta, q)
    click.echo(f"beta = {beta:.10g}, q = {q:.10g} ({transition.classification.value})", err=True)
    click.echo(f"Terminal |x|^2 = {summary['terminal_radius_sq']:.10g}", err=True)
    if summary["attractor_radius_sq"] is not None:
        click.echo(f"Attractor |x|^2 = beta/q = {summary['attractor_radius_sq']:.10g}", err=True)


@cli.command("harmonics-check")
@click.option("--degree", type=int, default=8, show_default=True,
              help="Largest degree of the exhaustive comparison (<= 16)")
@handle_errors
def harmonics_check_command(degree):
    """Compare triple-product quadrature with the Wigner 3j closed form."""
    report = harmonics_check(degree)
    click.echo(f"Index triples: {report.n_triples} ({report.n_allowed} allowed by selection rules)")
    click.echo(f"Max deviation: {report.max_deviation:.3e}")
    click.echo(f"Selection-rule violations: {report.selection_violations}")
    if not report.passed:
        raise ToleranceExceeded(
            f"quadrature and closed form differ by {report.max_deviation:.3e}"
        )
    click.echo("✅ Quadrature and closed form agree")


@cli.command()
@physical_options
@click.option("--l-max", type=int, default=DEFAULTS.l_max, show_default=True)
@click.option("--n-max", type=int, default=DEFAULTS.n_max, show_default=True)
@click.option("--offset", type=float, default=0.01, show_default=True,
              help="Relative sigma offset below and above sigma_c")
@output_options
@handle_errors
def pes(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign, l_max, n_max, offset,
        output_format, out):
    """Check the exchange of stabilities around sigma_c."""
    params = resolve_params(le, pr, rayleigh, aspect_ratio, lc, rtilde, sign)
    report = verify_pes(params, l_max=l_max, n_max=n_max, sigma_offset=offset)
    emit_table(report.to_frame(), output_format, out, "pes")
    if not report.passed:
        raise ToleranceExceeded("spectrum does not show the exchange of stabilities")
    click.echo("✅ Exchange of stabilities verified", err=True)


if __name__ == "__main__":
    cli()
