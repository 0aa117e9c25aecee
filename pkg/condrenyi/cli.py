"""CLI for condrenyi: evaluate conditional Rényi entropies and run the verification suites."""

from __future__ import annotations

import csv
import json
import pathlib
import sys
from typing import Any

import click
import numpy as np

from . import __version__
from .config import (
    config_path,
    configure_logging,
    load_config,
    optimizer_config,
    save_config,
)
from .divergences import (
    AlphaError,
    AlphaParam,
    DensityOperator,
    DivergenceError,
    d_old,
    d_sandwiched,
)
from .entropies import EntropyKind, entropy
from .fileio import FormatError, dump, jsonable, load, to_dict
from .objects import (
    KrausChannel,
    Povm,
    PureState,
    SeededRng,
    bell_state,
    random_channel,
    random_density,
    random_pure_state,
)
from .operators import OperatorError, SubsystemLayout
from .verify import DEFAULT_ALPHAS, Suite, SuiteSpec, run_suite

DIVERGENCES = {"divergence-old": d_old, "divergence-sandwiched": d_sandwiched}
KINDS = [kind.slug for kind in EntropyKind] + list(DIVERGENCES)


@click.group()
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option(
    "--config",
    "config_file",
    type=click.Path(dir_okay=False, path_type=pathlib.Path),
    help="Config file to use instead of condrenyi.plist in the application directory.",
)
@click.version_option(__version__)
@click.pass_context
def cli(ctx: click.Context, debug: bool, config_file: pathlib.Path | None):
    ctx.ensure_object(dict)
    config = load_config(config_file)
    ctx.obj["CONFIG"] = config
    ctx.obj["CONFIG_FILE"] = config_file
    ctx.obj["DEBUG"] = debug or bool(config["debug"])
    configure_logging(ctx.obj["DEBUG"], log_to_file=bool(config["debug"]))
    try:
        ctx.obj["OPTIMIZER"] = optimizer_config(config)
    except (TypeError, ValueError) as e:
        raise click.UsageError(f"invalid optimizer settings in config file: {e}")


def get_indent(indent: int, no_indent: bool) -> int | None:
    """Return value for json indent argument"""
    if no_indent and indent is not None:
        raise click.UsageError("Cannot specify both --indent and --no-indent")

    if no_indent:
        return None

    return indent if indent is not None else 4


def parse_dims(ctx: click.Context, param: click.Parameter, value: str | None) -> tuple[int, ...] | None:
    """Comma separated dimensions, e.g. 2,2,2"""
    if value is None:
        return None
    try:
        dims = tuple(int(d) for d in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {value!r}")
    if any(d < 1 for d in dims):
        raise click.BadParameter(f"dimensions must be positive, got {value!r}")
    return dims


def parse_alphas(ctx: click.Context, param: click.Parameter, value: str | None) -> tuple[AlphaParam, ...] | None:
    """Comma separated orders; 0, 1, inf select the limits"""
    if value is None:
        return None
    try:
        return tuple(AlphaParam.parse(a) for a in value.split(","))
    except AlphaError as e:
        raise click.BadParameter(str(e))


def parse_alpha(ctx: click.Context, param: click.Parameter, value: str) -> AlphaParam:
    try:
        return AlphaParam.parse(value)
    except AlphaError as e:
        raise click.BadParameter(str(e))


def parse_labels(value: str | None) -> tuple[str, ...] | None:
    if value is None:
        return None
    return tuple(label.strip() for label in value.split(",") if label.strip())


def format_value(value: float) -> str:
    """Value rounded to 12 decimals, so that -0.9999999999999998 prints as -1.0"""
    return repr(round(float(value), 12))


def load_state(path: str) -> DensityOperator:
    """Density operator from a state file; pure states and bare matrices are converted"""
    try:
        obj = load(path)
    except FormatError as e:
        raise click.UsageError(f"{path}: {e}")
    match obj:
        case DensityOperator():
            return obj
        case PureState():
            return obj.density()
        case np.ndarray():
            try:
                return DensityOperator.from_matrix(obj)
            except ValueError as e:
                raise click.UsageError(f"{path}: {e}")
    raise click.UsageError(f"{path}: expected a state, got a {obj.__class__.__name__}")


def split(rho: DensityOperator, target: str | None, cond: str | None) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Target and conditioning labels; target defaults to the first subsystem, cond to the rest"""
    labels = rho.layout.labels
    target_labels = parse_labels(target) or labels[:1]
    cond_labels = parse_labels(cond)
    if cond_labels is None:
        cond_labels = tuple(label for label in labels if label not in target_labels)
    for label in target_labels + cond_labels:
        if label not in labels:
            raise click.BadParameter(f"unknown subsystem {label!r}; the state has {', '.join(labels)}")
    return target_labels, cond_labels


def write_output(text: str, out: str | None):
    if out:
        pathlib.Path(out).write_text(text + "\n")
    else:
        click.echo(text)


@cli.command()
@click.option("--kind", "-k", required=True, type=click.Choice(KINDS, case_sensitive=False), help="Entropy or divergence to evaluate.")
@click.option("--alpha", "-a", required=True, callback=parse_alpha, help="Rényi order: a positive real, 0, 1 or inf.")
@click.option("--target", "-t", help="Target subsystems, comma separated. Defaults to the first subsystem.")
@click.option("--cond", "-c", help="Conditioning subsystems, comma separated. Defaults to all others.")
@click.option("--state", "-s", "state_file", required=True, type=click.Path(exists=True, dir_okay=False), help="State file (JSON).")
@click.option("--sigma", "sigma_file", type=click.Path(exists=True, dir_okay=False), help="Second argument of a divergence (JSON).")
@click.option("--json", "json_", is_flag=True, help="Print the result as JSON.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
@click.pass_context
def compute(
    ctx: click.Context,
    kind: str,
    alpha: AlphaParam,
    target: str | None,
    cond: str | None,
    state_file: str,
    sigma_file: str | None,
    json_: bool,
    indent: int,
    no_indent: bool,
):
    """Evaluate one conditional entropy or divergence of a state file.

    For example, the sandwiched DOWN entropy of order 2 of a Bell state:

    condrenyi compute --kind sandwiched-down --alpha 2 --state bell.json

    Divergences (--kind divergence-old or divergence-sandwiched) need --sigma.
    """
    indent = get_indent(indent, no_indent)
    kind = kind.lower()
    rho = load_state(state_file)
    result: dict[str, Any] = {"kind": kind, "alpha": float(alpha)}
    try:
        if kind in DIVERGENCES:
            if sigma_file is None:
                raise click.UsageError(f"--kind {kind} needs --sigma")
            sigma = load_state(sigma_file)
            if sigma.dim != rho.dim:
                raise click.UsageError(f"state has dimension {rho.dim}, sigma has {sigma.dim}")
            result["value"] = DIVERGENCES[kind](rho, sigma, alpha)
        else:
            target_labels, cond_labels = split(rho, target, cond)
            value = entropy(
                EntropyKind.parse(kind),
                rho,
                None,
                target_labels,
                cond_labels,
                alpha,
                ctx.obj["OPTIMIZER"],
            )
            result |= {
                "target": list(target_labels),
                "cond": list(cond_labels),
                "value": value.value,
                "converged": value.converged,
                "iterations": value.iterations,
                "diagnostics": value.diagnostics,
                "optimizer_sigma": to_dict(value.optimizer_sigma) if value.optimizer_sigma else None,
            }
    except (DivergenceError, OperatorError) as e:
        raise click.ClickException(str(e))

    if json_:
        click.echo(json.dumps(jsonable(result), indent=indent))
    else:
        click.echo(format_value(result["value"]))


@cli.command()
@click.option("--suite", "-s", required=True, type=click.Choice([s.value for s in Suite], case_sensitive=False), help="Suite to run.")
@click.option("--dims", "-d", callback=parse_dims, help="Comma separated subsystem dimensions, e.g. 2,2,2.")
@click.option("--alphas", "-a", callback=parse_alphas, help="Comma separated orders, e.g. 0,0.5,1,inf.")
@click.option("--trials", "-n", type=int, help="Number of random trials. Defaults to the config file value.")
@click.option("--seed", type=int, help="Seed of the trial streams. Defaults to the config file value.")
@click.option("--tolerance", type=float, help="Tolerance for residuals. Defaults to the suite's tolerance.")
@click.option("--workers", "-w", type=int, help="Threads running trials. Defaults to the config file value.")
@click.option(
    "--measurements",
    nargs=2,
    type=click.Path(exists=True, dir_okay=False),
    help="Two POVM files (JSON) for the uncertainty suites.",
)
@click.option(
    "--min-converged",
    type=click.FloatRange(0, 1),
    default=0.0,
    show_default=True,
    help="Exit with 1 when a smaller share of checks had a converged optimizer.",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write the JSON report to this file.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
@click.pass_context
def verify(
    ctx: click.Context,
    suite: str,
    dims: tuple[int, ...] | None,
    alphas: tuple[AlphaParam, ...] | None,
    trials: int | None,
    seed: int | None,
    tolerance: float | None,
    workers: int | None,
    measurements: tuple[str, str] | None,
    min_converged: float,
    out: str | None,
    indent: int,
    no_indent: bool,
):
    """Run one verification suite and report residuals.

    Exit code is 0 when no relation is violated, no trial failed and at least
    --min-converged of the checks converged; 1 otherwise.

    condrenyi verify --suite duality3 --dims 2,2,2 --trials 100 --seed 7
    """
    indent = get_indent(indent, no_indent)
    config = ctx.obj["CONFIG"]
    povms = None
    if measurements:
        povms = tuple(_load_povm(path) for path in measurements)
    try:
        spec = SuiteSpec.create(
            suite,
            dims=dims,
            alphas=alphas,
            trials=config["trials"] if trials is None else trials,
            seed=config["seed"] if seed is None else seed,
            tolerance=tolerance,
            workers=config["workers"] if workers is None else workers,
            optimizer=ctx.obj["OPTIMIZER"],
            measurements=povms,
        )
    except ValueError as e:
        # SuiteSpecError or AlphaError
        raise click.UsageError(str(e))

    report = run_suite(spec)
    summary = report.summary
    if out:
        write_output(report.json(indent), out)
        click.echo(
            f"{spec.suite.value}: {spec.trials} trials, {summary['checks']} checks, "
            f"max residual {summary['max_residual']:.3e}, violations {summary['violations']}, "
            f"not converged {summary['not_converged']}, errors {summary['errors']}"
        )
    else:
        click.echo(report.json(indent))
    exit_code = report.exit_code
    if report.converged_fraction < min_converged:
        click.echo(
            f"{spec.suite.value}: only {report.converged_fraction:.1%} of checks converged, "
            f"need {min_converged:.1%}",
            err=True,
        )
        exit_code = 1
    ctx.exit(exit_code)


def _load_povm(path: str) -> Povm:
    try:
        obj = load(path)
    except FormatError as e:
        raise click.UsageError(f"{path}: {e}")
    if not isinstance(obj, Povm):
        raise click.UsageError(f"{path}: expected a POVM, got a {obj.__class__.__name__}")
    return obj


@cli.command()
@click.option(
    "--kind",
    "-k",
    "kinds",
    multiple=True,
    type=click.Choice([kind.slug for kind in EntropyKind], case_sensitive=False),
    help="Entropy to evaluate; may be repeated. Defaults to all four.",
)
@click.option("--alphas", "-a", callback=parse_alphas, help="Comma separated orders. Defaults to 0,0.25,0.5,0.75,1,1.5,2,3,inf.")
@click.option("--target", "-t", help="Target subsystems, comma separated. Defaults to the first subsystem.")
@click.option("--cond", "-c", help="Conditioning subsystems, comma separated. Defaults to all others.")
@click.option("--state", "-s", "state_file", required=True, type=click.Path(exists=True, dir_okay=False), help="State file (JSON).")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write CSV to this file instead of stdout.")
@click.pass_context
def sweep(
    ctx: click.Context,
    kinds: tuple[str, ...],
    alphas: tuple[AlphaParam, ...] | None,
    target: str | None,
    cond: str | None,
    state_file: str,
    out: str | None,
):
    """Evaluate entropies over a grid of orders and write CSV rows alpha,kind,value."""
    rho = load_state(state_file)
    target_labels, cond_labels = split(rho, target, cond)
    kinds = [EntropyKind.parse(kind) for kind in kinds] or list(EntropyKind)
    grid = alphas or tuple(AlphaParam.of(a) for a in DEFAULT_ALPHAS)
    config = ctx.obj["OPTIMIZER"]

    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.writer(handle)
        writer.writerow(["alpha", "kind", "value"])
        for alpha in grid:
            for kind in kinds:
                try:
                    value = entropy(kind, rho, None, target_labels, cond_labels, alpha, config).value
                except (DivergenceError, OperatorError) as e:
                    raise click.ClickException(f"{kind.slug} at alpha={alpha}: {e}")
                writer.writerow([str(alpha), kind.slug, repr(value)])
    finally:
        if out:
            handle.close()


@cli.group()
def gen():
    """Write random states, channels and POVMs as JSON files."""
    pass


@gen.command(name="state")
@click.option("--dims", "-d", required=True, callback=parse_dims, help="Comma separated subsystem dimensions.")
@click.option("--labels", "-l", help="Comma separated subsystem labels. Defaults to A,B,C,...")
@click.option("--rank", "-r", type=int, help="Rank of a mixed state. Defaults to full rank.")
@click.option("--pure", is_flag=True, help="Write a Haar-random pure state.")
@click.option("--seed", type=int, default=0, help="Random seed.")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Output file. Defaults to stdout.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
def gen_state(dims, labels, rank, pure, seed, out, indent, no_indent):
    """Random density operator or pure state."""
    indent = get_indent(indent, no_indent)
    try:
        layout = SubsystemLayout.from_dims(dims, parse_labels(labels))
        rng = SeededRng(seed)
        state = random_pure_state(layout, rng) if pure else random_density(layout, rank, rng)
    except ValueError as e:
        raise click.UsageError(str(e))
    _emit(state, out, indent)


@gen.command(name="channel")
@click.option("--dim-in", type=int, required=True, help="Input dimension.")
@click.option("--dim-out", type=int, help="Output dimension. Defaults to the input dimension.")
@click.option("--env", type=int, help="Environment dimension of the dilation. Defaults to the input dimension.")
@click.option("--seed", type=int, default=0, help="Random seed.")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Output file. Defaults to stdout.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
def gen_channel(dim_in, dim_out, env, seed, out, indent, no_indent):
    """Random channel from a Haar isometry."""
    indent = get_indent(indent, no_indent)
    try:
        channel = random_channel(dim_in, dim_out or dim_in, env, SeededRng(seed))
    except ValueError as e:
        raise click.UsageError(str(e))
    _emit(channel, out, indent)


@gen.command(name="povm")
@click.option("--dim", type=int, required=True, help="Dimension of the measured system.")
@click.option(
    "--basis",
    type=click.Choice(["computational", "fourier", "trivial"], case_sensitive=False),
    default="computational",
    help="Measurement to write.",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Output file. Defaults to stdout.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
def gen_povm(dim, basis, out, indent, no_indent):
    """Computational basis, Fourier basis or trivial measurement."""
    indent = get_indent(indent, no_indent)
    if dim < 1:
        raise click.BadParameter(f"dimension must be positive, got {dim}")
    match basis.lower():
        case "computational":
            povm = Povm.computational(dim)
        case "fourier":
            povm = Povm.fourier(dim)
        case _:
            povm = Povm.trivial(dim)
    _emit(povm, out, indent)


@gen.command(name="bell")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Output file. Defaults to stdout.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
def gen_bell(out, indent, no_indent):
    """The two-qubit maximally entangled state (|00⟩ + |11⟩)/√2."""
    _emit(bell_state(), out, get_indent(indent, no_indent))


def _emit(obj: DensityOperator | PureState | KrausChannel | Povm, out: str | None, indent: int | None):
    text = dump(obj, indent=indent)
    write_output(text, out)


@cli.command(name="config")
@click.option("--save", is_flag=True, help="Write the effective configuration to the config file.")
@click.option("--indent", "-i", type=int, help="Indentation level for JSON output")
@click.option("--no-indent", "-I", is_flag=True, help="Do not indent JSON output")
@click.pass_context
def show_config(ctx: click.Context, save: bool, indent: int, no_indent: bool):
    """Print the effective configuration and the config file location."""
    indent = get_indent(indent, no_indent)
    config = ctx.obj["CONFIG"]
    if save:
        path = save_config(config, ctx.obj["CONFIG_FILE"])
        click.echo(f"Saved config to {path}", err=True)
    click.echo(json.dumps({"path": str(config_path(ctx.obj["CONFIG_FILE"])), "config": config}, indent=indent))


if __name__ == "__main__":
    cli(obj={})
