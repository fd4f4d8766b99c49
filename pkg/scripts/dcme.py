#!/usr/bin/env python3
"""
Command-line runner for the DCME toolkit.
Runs protocol sweeps, evaluates closed-form theory operations, runs the
concentration validators and prints scheme parameters.
"""

import json
import logging
import sys
from pathlib import Path

import click

# Add project root and src to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(project_root / "src"))

from core.config import get_config, load_experiment_config, setup_logging
from core.errors import ConfigError, DCMEError
from core.models import NormKind, OutputFormat
from harness.emit import emit
from harness.fit import summarize
from harness.registry import THEORY_OPERATIONS, evaluate
from harness.sweep import run_sweep
from protocol.params import multi_agent_params, two_agent_params
from validate.registry import VALIDATORS, ValidationRunner

EXIT_VALIDATION_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _fail_config(message: str):
    click.echo(f"Configuration error: {message}", err=True)
    sys.exit(EXIT_CONFIG_ERROR)


def _resolve_experiment(config_path: str, experiments_dir: str) -> Path:
    """A missing path is looked up by name under experiments_dir, with or without .yaml."""
    path = Path(config_path)
    if path.exists():
        return path
    base = Path(experiments_dir)
    if not base.is_absolute():
        base = project_root / base
    for candidate in (base / path.name, base / f"{path.name}.yaml"):
        if candidate.exists():
            return candidate
    return path


@click.group()
@click.option('--debug', is_flag=True, help='Enable debug logging')
@click.pass_context
def cli(ctx, debug):
    """Distributed covariance estimation under communication constraints."""
    try:
        logger = setup_logging("DEBUG" if debug else None)
    except ConfigError as e:
        _fail_config(str(e))
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
    logger.debug("cli_started", command=ctx.invoked_subcommand)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(),
              help='Experiment config file, or its name under experiments_dir')
@click.option('--out', '-o', help='Output path (default: config value or simulation.output_dir)')
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), help='Record format')
@click.option('--threads', '-t', type=int, help='Worker threads')
@click.option('--dump-messages', type=click.Path(), help='Directory for raw message frames')
def simulate(config_path, out, fmt, threads, dump_messages):
    """Run an experiment sweep and write its trial records."""
    config_path = _resolve_experiment(config_path, get_config().experiments_dir)
    try:
        cfg = load_experiment_config(config_path)
    except ConfigError as e:
        _fail_config(str(e))

    settings = get_config().simulation
    if fmt is None:
        fmt = cfg.format if "format" in cfg.model_fields_set else settings.format
    fmt = OutputFormat(fmt)
    if out is None:
        out = cfg.out or str(Path(settings.output_dir) / f"{Path(config_path).stem}.{fmt.value}")
    threads = threads or settings.threads

    try:
        records = run_sweep(cfg, threads=threads, dump_dir=dump_messages)
    except DCMEError as e:
        click.echo(f"Simulation failed: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    path = emit(records, fmt, out)

    summary = summarize(records)
    click.echo(f"\nSweep Summary ({cfg.scheme.value}, {len(records)} records -> {path}):")
    for row in summary.itertuples(index=False):
        click.echo(
            f"  m={row.m} n={row.n} B=({row.B1}, {row.B2}): "
            f"op {row.dist_op_mean:.4g} ± {row.dist_op_stderr:.2g}, "
            f"fr {row.dist_fr_mean:.4g} ± {row.dist_fr_stderr:.2g}, "
            f"errors {row.error_rate:.1%}"
        )


@cli.command()
@click.argument('operation', type=click.Choice(sorted(THEORY_OPERATIONS)))
@click.option('--args', 'raw_args', default='{}', help='JSON object of keyword arguments')
def theory(operation, raw_args):
    """Evaluate a closed-form theory operation and print JSON."""
    try:
        args = json.loads(raw_args)
    except json.JSONDecodeError as e:
        _fail_config(f"--args is not valid JSON: {e}")
    if not isinstance(args, dict):
        _fail_config("--args must be a JSON object")

    try:
        result = evaluate(operation, args)
    except DCMEError as e:
        click.echo(f"{operation} failed: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    click.echo(json.dumps(result, indent=2))


@cli.command()
@click.argument('names', nargs=-1)
@click.option('--trials', '-n', type=int, help='Monte Carlo trials per validator')
@click.option('--seed', '-s', type=int, help='Master seed')
def validate(names, trials, seed):
    """Run concentration validators; exit 1 if any fails."""
    settings = get_config().validation
    unknown = [name for name in names if name not in VALIDATORS]
    if unknown:
        _fail_config(f"unknown validators {unknown}; choose from {sorted(VALIDATORS)}")

    try:
        runner = ValidationRunner(trials=trials or settings.trials,
                                  seed=settings.seed if seed is None else seed,
                                  chunk_size=settings.chunk_size)
        reports = runner.run(names)
    except DCMEError as e:
        _fail_config(str(e))

    click.echo(json.dumps([r.model_dump(mode="json") for r in reports], indent=2))
    if not all(r.passed for r in reports):
        sys.exit(EXIT_VALIDATION_FAILURE)


@cli.command()
@click.argument('scheme', type=click.Choice(['two-agent', 'multi']))
@click.option('--sigma', type=float, default=1.0, show_default=True)
@click.option('--eps', type=float, required=True)
@click.option('--d1', type=int, required=True)
@click.option('--d2', type=int, default=0, show_default=True)
@click.option('--norm', type=click.Choice(['op', 'fr']), default='op', show_default=True)
def params(scheme, sigma, eps, d1, d2, norm):
    """Print the scheme parameters as JSON."""
    try:
        if scheme == 'two-agent':
            result = two_agent_params(sigma, eps, d1, d2, NormKind(norm))
        else:
            result = multi_agent_params(sigma, eps, d1 + d2)
    except DCMEError as e:
        _fail_config(str(e))
    click.echo(result.model_dump_json(indent=2))


if __name__ == '__main__':
    cli()
