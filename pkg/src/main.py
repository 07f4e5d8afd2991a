"""
Command-line entry point for the Pythagorean Weibull toolkit.

Subcommands:

- fit: fit every team in a game log and print per-team and summary tables
- test: run the goodness-of-fit, independence and mean z-test battery
- predict: expected record from mean runs scored and allowed
- plot-data: observed and fitted bin counts per team and side
- simulate: Monte Carlo check of the closed-form won-loss percentage

Usage: python -m src.main fit --input games.csv --method ls
"""
import functools
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
from pydantic import ValidationError

from src.analysis.estimation import fit_division, fit_observed_exponent, summarize_fits
from src.analysis.inference import INDEPENDENCE, familywise_error_rate
from src.config import settings
from src.distributions.weibull import won_loss_percentage
from src.formatters.report_formatter import ReportFormatter
from src.generators.season_simulator import simulate_games
from src.ingestion.archive import fit_fingerprint, new_archive, read_archive, write_archive
from src.ingestion.game_log import assemble_seasons, load_game_log
from src.models import (
    ArchiveEntry,
    FitConfig,
    FitMethod,
    FitResult,
    GofDof,
    ResultArchive,
    TeamSeason,
    ZCentering,
)
from src.utils.errors import DomainError, PythagoreanError
from src.utils.logging import bind_run, configure_logging, get_logger
from src.worker import fit_all, run_battery


logger = get_logger(__name__)

ARCHIVE_NAME = "archive.json"


def _handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn toolkit errors into click errors with a nonzero exit code."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except DomainError as e:
            raise click.UsageError(str(e))
        except ValidationError as e:
            raise click.UsageError("; ".join(err["msg"] for err in e.errors()))
        except PythagoreanError as e:
            raise click.ClickException(str(e))

    return wrapper


def _input_option(f: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Game log (date,team,opponent,runs_scored,runs_allowed)",
    )(f)


def _fit_options(f: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option("--method", type=click.Choice([m.value for m in FitMethod]), default=FitMethod.MAX_LIKELIHOOD.value,
                     show_default=True, help="Least squares or maximum likelihood"),
        click.option("--beta", type=float, default=settings.DEFAULT_BETA, show_default=True,
                     help="Shared Weibull translation"),
        click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
                     default=Path(settings.OUTPUT_DIR), show_default=True, help="Output directory"),
        click.option("--seed", type=int, default=settings.DEFAULT_SEED, show_default=True,
                     help="Seed for optimizer restarts"),
        click.option("--drop-ties", is_flag=True, help="Skip tied games with a warning instead of failing"),
        click.option("--archive", "archive_path", type=click.Path(dir_okay=False, path_type=Path),
                     help=f"Result archive (default OUT/{ARCHIVE_NAME})"),
        click.option("--workers", type=int, default=settings.WORKERS, show_default=True,
                     help="Processes for team-level work"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _load_seasons(input_path: Path, drop_ties: bool) -> List[TeamSeason]:
    seasons = assemble_seasons(load_game_log(input_path, drop_ties=drop_ties))
    if not seasons:
        raise click.ClickException(f"{input_path} contains no games")
    return seasons


def _archive_path(archive_path: Optional[Path], out_dir: Path) -> Path:
    return archive_path if archive_path is not None else out_dir / ARCHIVE_NAME


def _existing_archive(path: Path) -> Optional[ResultArchive]:
    return read_archive(path) if path.exists() else None


def _save_entries(path: Path, cfg: FitConfig, entries: Sequence[ArchiveEntry]) -> None:
    """Merge entries into the archive at path, replacing entries with the same key."""
    existing = _existing_archive(path)
    merged: Dict[Tuple[str, Optional[int], FitMethod], ArchiveEntry] = {}
    if existing is not None:
        merged.update((entry.key, entry) for entry in existing.entries)
    merged.update((entry.key, entry) for entry in entries)
    ordered = [merged[key] for key in sorted(merged, key=lambda k: (k[0], k[1] or 0, k[2].value))]
    write_archive(path, new_archive(cfg.describe(), ordered))


def _entries(seasons: Sequence[TeamSeason], fits: Sequence[FitResult], cfg: FitConfig) -> List[ArchiveEntry]:
    config = cfg.describe()
    return [
        ArchiveEntry(team=s.team, season=s.season, method=cfg.method, fit=f, fingerprint=fit_fingerprint(s, config))
        for s, f in zip(seasons, fits)
    ]


def _fits_for(
    seasons: Sequence[TeamSeason], cfg: FitConfig, archive_path: Path, workers: int
) -> Tuple[List[FitResult], List[ArchiveEntry]]:
    """
    Reuse archived fits when every team has one made from the same games and
    fit configuration, otherwise fit afresh.
    """
    archive = _existing_archive(archive_path)
    if archive is not None:
        config = cfg.describe()
        entries = []
        for season in seasons:
            try:
                entry = archive.get(season.team, cfg.method, season.season)
            except KeyError:
                break
            if entry.fingerprint != fit_fingerprint(season, config):
                logger.info("archived_fit_stale", path=str(archive_path), team=season.team)
                break
            entries.append(entry)
        else:
            logger.info("using_archived_fits", path=str(archive_path), teams=len(entries))
            return [e.fit for e in entries], entries
    fits = fit_all(seasons, cfg, workers)
    return fits, _entries(seasons, fits, cfg)


def _check_converged(fits: Sequence[FitResult]) -> None:
    failed = [f.team for f in fits if not f.converged]
    if failed:
        raise click.ClickException(f"fit did not converge for: {', '.join(failed)}")


def _parse_division(value: str) -> Tuple[str, List[str]]:
    name, sep, teams = value.partition(":")
    members = [t.strip() for t in teams.split(",") if t.strip()]
    if not sep or not name.strip() or not members:
        raise click.UsageError(f"--division expects 'NAME:TEAM,TEAM,...', got {value!r}")
    return name.strip(), members


@click.group()
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Override LOG_LEVEL")
@click.version_option(settings.APP_VERSION, prog_name=settings.APP_NAME)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]) -> None:
    """Weibull won-loss modelling of team run distributions."""
    configure_logging(log_level)
    bind_run(command=ctx.invoked_subcommand, version=settings.APP_VERSION)


@cli.command()
@_input_option
@_fit_options
@click.option("--division", "divisions", multiple=True, help="Pooled fit 'NAME:TEAM,TEAM,...' (repeatable)")
@_handle_errors
def fit(
    input_path: Path,
    method: str,
    beta: float,
    out_dir: Path,
    seed: int,
    drop_ties: bool,
    archive_path: Optional[Path],
    workers: int,
    divisions: Tuple[str, ...],
) -> None:
    """Fit scored/allowed Weibulls with a shared gamma for every team."""
    seasons = _load_seasons(input_path, drop_ties)
    cfg = FitConfig.from_settings(beta=beta, method=FitMethod(method), seed=seed)
    fits = fit_all(seasons, cfg, workers)
    formatter = ReportFormatter(out_dir)

    summary = summarize_fits(fits)
    observed_exponent = fit_observed_exponent(seasons, cfg.gamma_bounds)
    formatter.show(formatter.fit_table(fits, title=f"Weibull fits ({method})"))
    formatter.show(formatter.summary_table(summary, observed_exponent))
    formatter.write_fits(fits)
    formatter.write_summary(summary)

    if divisions:
        by_team = {s.team: s for s in seasons}
        pooled = []
        for value in divisions:
            name, members = _parse_division(value)
            missing = [t for t in members if t not in by_team]
            if missing:
                raise click.UsageError(f"division {name}: unknown teams {', '.join(missing)}")
            pooled.append(fit_division([by_team[t] for t in members], cfg, name=name))
        formatter.show(formatter.division_table(pooled))
        formatter.write_divisions(pooled)

    _save_entries(_archive_path(archive_path, out_dir), cfg, _entries(seasons, fits, cfg))
    _check_converged(fits)


@cli.command()
@_input_option
@_fit_options
@click.option("--independence-bins", type=click.Choice(["12", "13"]), default="12", show_default=True,
              help="Independence table size")
@click.option("--gof-dof", type=click.Choice([g.value for g in GofDof]), default=GofDof.LITERAL.value,
              show_default=True, help="Goodness-of-fit degrees of freedom convention")
@click.option("--z-centering", type=click.Choice([z.value for z in ZCentering]),
              default=ZCentering.WEIBULL_MEAN.value, show_default=True, help="Model mean used by the z-tests")
@click.option("--comparisons", type=int, default=settings.BONFERRONI_COMPARISONS, show_default=True,
              help="Tests in the Bonferroni family")
@_handle_errors
def test(
    input_path: Path,
    method: str,
    beta: float,
    out_dir: Path,
    seed: int,
    drop_ties: bool,
    archive_path: Optional[Path],
    workers: int,
    independence_bins: str,
    gof_dof: str,
    z_centering: str,
    comparisons: int,
) -> None:
    """Goodness of fit, independence and mean z-tests for every team."""
    seasons = _load_seasons(input_path, drop_ties)
    cfg = FitConfig.from_settings(beta=beta, method=FitMethod(method), seed=seed)
    archive_path = _archive_path(archive_path, out_dir)
    fits, entries = _fits_for(seasons, cfg, archive_path, workers)
    _check_converged(fits)

    batteries = run_battery(
        seasons,
        fits,
        cfg,
        workers,
        gof_dof=GofDof(gof_dof),
        independence_variant=int(independence_bins),
        centering=ZCentering(z_centering),
        comparisons=comparisons,
    )
    formatter = ReportFormatter(out_dir)
    formatter.show(formatter.test_table(batteries))
    click.echo(
        f"Chance of at least one false rejection among {comparisons} independent tests at 95%: "
        f"{familywise_error_rate(0.95, comparisons):.1%}"
    )
    skipped = [reports[0].team or "" for reports in batteries if INDEPENDENCE not in {r.name for r in reports}]
    if skipped:
        click.echo(f"independence test skipped (empty score bin) for: {', '.join(skipped)}")
    formatter.write_tests(batteries)

    tested = [entry.model_copy(update={"tests": tuple(reports)}) for entry, reports in zip(entries, batteries)]
    _save_entries(archive_path, cfg, tested)


@cli.command()
@click.option("--rs-mean", type=float, required=True, help="Mean runs scored per game")
@click.option("--ra-mean", type=float, required=True, help="Mean runs allowed per game")
@click.option("--gamma", type=float, default=settings.INITIAL_GAMMA, show_default=True, help="Shape exponent")
@click.option("--beta", type=float, default=settings.DEFAULT_BETA, show_default=True, help="Translation")
@click.option("--games", type=click.IntRange(min=0), default=settings.EXPECTED_SEASON_GAMES, show_default=True)
@_handle_errors
def predict(rs_mean: float, ra_mean: float, gamma: float, beta: float, games: int) -> None:
    """Expected won-loss percentage and record from run averages."""
    wlp = won_loss_percentage(rs_mean, ra_mean, beta, gamma)
    wins = wlp * games
    click.echo(f"won-loss percentage: {wlp:.4f}")
    click.echo(f"projected record over {games} games: {wins:.1f} - {games - wins:.1f}")


@cli.command("plot-data")
@_input_option
@_fit_options
@_handle_errors
def plot_data(
    input_path: Path,
    method: str,
    beta: float,
    out_dir: Path,
    seed: int,
    drop_ties: bool,
    archive_path: Optional[Path],
    workers: int,
) -> None:
    """Write observed and fitted bin counts per team and side."""
    seasons = _load_seasons(input_path, drop_ties)
    cfg = FitConfig.from_settings(beta=beta, method=FitMethod(method), seed=seed)
    fits, _ = _fits_for(seasons, cfg, _archive_path(archive_path, out_dir), workers)
    _check_converged(fits)
    formatter = ReportFormatter(out_dir)
    written = []
    for season, team_fit in zip(seasons, fits):
        written += formatter.write_plot_data(season, team_fit, cfg.scheme)
    for path in written:
        click.echo(str(path))


@cli.command()
@click.option("--alpha-rs", type=float, required=True, help="Scale of runs scored")
@click.option("--alpha-ra", type=float, required=True, help="Scale of runs allowed")
@click.option("--gamma", type=float, default=settings.INITIAL_GAMMA, show_default=True)
@click.option("--beta", type=float, default=settings.DEFAULT_BETA, show_default=True)
@click.option("--games", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=settings.DEFAULT_SEED, show_default=True)
@click.option("--sigmas", type=float, default=3.0, show_default=True, help="Interval half-width in standard errors")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path(settings.OUTPUT_DIR), show_default=True)
@_handle_errors
def simulate(
    alpha_rs: float, alpha_ra: float, gamma: float, beta: float, games: int, seed: int, sigmas: float, out_dir: Path
) -> None:
    """Simulate games and compare the win rate with the closed form."""
    report = simulate_games(alpha_rs, alpha_ra, gamma, beta, games, seed, sigmas)
    formatter = ReportFormatter(out_dir)
    formatter.show(formatter.simulation_table(report))
    formatter.write_simulation(report)


if __name__ == "__main__":
    cli()
