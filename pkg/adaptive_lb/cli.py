"""
Adaptive Load Balancing - Command Line
click entry point: run one scenario, run a preset, sweep w/n axes, list presets
"""

from __future__ import annotations

import asyncio
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import click
import structlog

from adaptive_lb.config import settings
from adaptive_lb.errors import ConfigValidationError, UnknownPresetError
from adaptive_lb.logging_config import configure_logging
from adaptive_lb.presets import DESCRIPTIONS, preset, preset_names
from adaptive_lb.scenario import load_config
from adaptive_lb.sweep_service import SweepService, SweepSpec, to_csv

logger = structlog.get_logger(__name__)

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def parse_axis(text: str) -> tuple[str, List[float]]:
    """`w=0.1,0.3,0.5` or `n=2..10` (inclusive integer range)"""
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or not name or not values.strip():
        raise ConfigValidationError("axis", f"expected <name>=<values>, got '{text}'")
    try:
        if ".." in values:
            low, high = (int(part) for part in values.split("..", 1))
            if low > high:
                raise ValueError(f"empty range {values}")
            return name, [float(v) for v in range(low, high + 1)]
        return name, [float(v) for v in values.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigValidationError("axis", f"cannot parse values of '{text}': {e}") from e


def _seed_range(count: Optional[int]) -> range:
    count = settings.DEFAULT_SEEDS if count is None else count
    if count < 1:
        raise ConfigValidationError("seeds", f"need at least one seed, got {count}")
    return range(settings.BASE_SEED, settings.BASE_SEED + count)


def _emit(csv_text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(csv_text, nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text, encoding="utf-8", newline="\n")
    logger.info("💾 Results written", path=str(out))


def _execute(ctx: click.Context, spec: SweepSpec, out: Optional[Path]) -> None:
    service = SweepService(ctx.obj["workers"])
    table = asyncio.run(service.run_sweep(spec))
    _emit(to_csv(table), out)


class _ExitCodeGroup(click.Group):
    """Maps package errors to the documented exit codes"""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (ConfigValidationError, UnknownPresetError) as e:
            logger.error("❌ Invalid input", error=str(e))
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_VALIDATION)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except Exception as e:
            logger.error("❌ Run failed", error=str(e), error_type=type(e).__name__)
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_RUNTIME)


out_option = click.option(
    "--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV destination (default: stdout)"
)
seeds_option = click.option("--seeds", type=int, default=None, help="Number of seeds (default: DEFAULT_SEEDS)")


@click.group(cls=_ExitCodeGroup)
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL")
@click.option("--workers", type=int, default=None, help="Worker processes (1 runs in-process)")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], workers: Optional[int]) -> None:
    """Adaptive load balancing simulator"""
    configure_logging(log_level or settings.LOG_LEVEL, settings.LOG_JSON)
    ctx.ensure_object(dict)
    ctx.obj["workers"] = workers
    logger.debug("⚖️ CLI started", app=settings.APP_NAME, command=ctx.invoked_subcommand, workers=workers)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Overrides the scenario seed")
@out_option
@click.pass_context
def run(ctx: click.Context, config_path: Path, seed: Optional[int], out: Optional[Path]) -> None:
    """Run one scenario for one seed"""
    config = load_config(config_path)
    seeds = [config.seed if seed is None else seed]
    _execute(ctx, SweepSpec.single(config, seeds), out)


@cli.command(name="preset")
@click.argument("name")
@seeds_option
@out_option
@click.pass_context
def preset_command(ctx: click.Context, name: str, seeds: Optional[int], out: Optional[Path]) -> None:
    """Run a named experiment from the catalog"""
    spec = preset(name, seeds=len(_seed_range(seeds)))
    _execute(ctx, spec, out)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--axis", "axes", multiple=True, required=True, help="w=0.1,0.3 | n=2..10 | g1.n=2..10")
@seeds_option
@out_option
@click.pass_context
def sweep(ctx: click.Context, config_path: Path, axes: Sequence[str], seeds: Optional[int], out: Optional[Path]) -> None:
    """Cross-product sweep of w/n axes over a scenario file"""
    config = load_config(config_path)
    parsed: Dict[str, List[float]] = {}
    for text in axes:
        name, values = parse_axis(text)
        if name in parsed:
            raise ConfigValidationError("axis", f"axis '{name}' given twice")
        parsed[name] = values
    _execute(ctx, SweepSpec.from_axes(config, parsed, _seed_range(seeds)), out)


@cli.command(name="list-presets")
def list_presets() -> None:
    """Print the preset catalog"""
    for name in preset_names():
        click.echo(f"{name}\t{DESCRIPTIONS[name]}")


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    sys.exit(main())
