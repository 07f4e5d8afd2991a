"""
Report formatter for the Pythagorean Weibull toolkit.

This module renders fits, test batteries and simulation reports as rich
tables for the terminal and writes the same numbers as comma-delimited
files for downstream tools, together with per-team plot data.
"""
import csv
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from rich.console import Console
from rich.table import Table

from src.analysis.binning import bin_centers, bin_probabilities, histogram
from src.config import settings
from src.models import BinScheme, DivisionFitResult, FitResult, SimulationReport, TeamSeason, TestReport
from src.utils.logging import get_logger


logger = get_logger(__name__)

FIT_COLUMNS = (
    "team",
    "method",
    "beta",
    "alpha_rs",
    "alpha_ra",
    "gamma",
    "objective",
    "converged",
    "games",
    "observed_wins",
    "predicted_wins",
    "win_difference",
)
TEST_COLUMNS = ("team", "test", "distribution", "statistic", "dof", "p_value", "threshold", "value", "reject")
PLOT_COLUMNS = ("bin_lower", "bin_upper", "bin_center", "observed", "expected")


def _num(value: float) -> str:
    return f"{value:.10g}"


def plot_rows(
    scores: Sequence[int], scheme: BinScheme, fit: FitResult, side: str
) -> List[Tuple[float, float, float, int, float]]:
    """
    (lower, upper, center, observed, expected) per bin for one side of a fit.

    expected is #games times the fitted bin mass.
    """
    params = fit.scored_params() if side == "scored" else fit.allowed_params()
    hist = histogram(scores, scheme)
    expected = hist.total * bin_probabilities(params, scheme)
    centers = bin_centers(scheme)
    return [
        (scheme.edges[k], scheme.edges[k + 1], centers[k], hist.counts[k], float(expected[k]))
        for k in range(scheme.n_bins)
    ]


class ReportFormatter:
    """
    Terminal tables and delimited output files for one run.

    Files go under output_dir, which is created on first write.
    """

    def __init__(self, output_dir: Optional[Union[str, Path]] = None, console: Optional[Console] = None):
        self.output_dir = Path(output_dir) if output_dir else Path(settings.OUTPUT_DIR)
        # Fixed width keeps repeated runs byte-identical
        self.console = console or Console(width=120, highlight=False, soft_wrap=False)

    def show(self, renderable: Any) -> None:
        self.console.print(renderable)

    def _write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        logger.debug("csv_written", path=str(path))
        return path

    # Fits

    def fit_table(self, fits: Sequence[FitResult], title: str = "Weibull fits") -> Table:
        table = Table(title=title)
        for column in ("Team", "alpha_RS", "alpha_RA", "gamma", "Obs W", "Pred W", "Obs - Pred", "Converged"):
            table.add_column(column, justify="left" if column == "Team" else "right")
        for fit in fits:
            table.add_row(
                fit.team,
                f"{fit.alpha_rs:.2f}",
                f"{fit.alpha_ra:.2f}",
                f"{fit.gamma:.2f}",
                str(fit.observed_wins),
                f"{fit.predicted_wins:.1f}",
                f"{fit.win_difference:+.1f}",
                "yes" if fit.converged else "NO",
            )
        return table

    def summary_table(self, summary: Dict[str, Dict[str, float]], observed_exponent: Optional[float] = None) -> Table:
        table = Table(title="Summary")
        for column in ("Quantity", "Mean", "SD", "Median"):
            table.add_column(column, justify="left" if column == "Quantity" else "right")
        for name, stats in summary.items():
            table.add_row(name, f"{stats['mean']:.2f}", f"{stats['sd']:.2f}", f"{stats['median']:.2f}")
        if observed_exponent is not None:
            table.add_row("observed_exponent", f"{observed_exponent:.2f}", "", "")
        return table

    def division_table(self, divisions: Sequence[DivisionFitResult]) -> Table:
        table = Table(title="Division fits")
        for column in ("Division", "Teams", "gamma", "Converged"):
            table.add_column(column)
        for division in divisions:
            table.add_row(
                division.name,
                ",".join(t.team for t in division.teams),
                f"{division.gamma:.3f}",
                "yes" if division.converged else "NO",
            )
        return table

    def write_fits(self, fits: Sequence[FitResult], name: str = "fits.csv") -> Path:
        rows = [
            (
                f.team,
                f.method.value,
                _num(f.beta),
                _num(f.alpha_rs),
                _num(f.alpha_ra),
                _num(f.gamma),
                _num(f.objective_value),
                str(f.converged).lower(),
                f.games_played,
                f.observed_wins,
                _num(f.predicted_wins),
                _num(f.win_difference),
            )
            for f in fits
        ]
        return self._write_csv(name, FIT_COLUMNS, rows)

    def write_summary(self, summary: Dict[str, Dict[str, float]], name: str = "summary.csv") -> Path:
        rows = [(key, _num(s["mean"]), _num(s["sd"]), _num(s["median"])) for key, s in summary.items()]
        return self._write_csv(name, ("quantity", "mean", "sd", "median"), rows)

    def write_divisions(self, divisions: Sequence[DivisionFitResult], name: str = "divisions.csv") -> Path:
        rows = [
            (d.name, d.method.value, _num(d.gamma), _num(d.objective_value), str(d.converged).lower(), t.team)
            for d in divisions
            for t in d.teams
        ]
        return self._write_csv(name, ("division", "method", "gamma", "objective", "converged", "team"), rows)

    # Tests

    def test_table(self, batteries: Sequence[Sequence[TestReport]]) -> Table:
        table = Table(title="Test battery (reject flags at 95%, unadjusted / Bonferroni)")
        for column in ("Team", "Test", "Statistic", "dof", "p", "95%", "Bonf 95%", "Reject"):
            table.add_column(column, justify="left" if column in ("Team", "Test") else "right")
        for reports in batteries:
            for report in reports:
                flags = ("x" if report.reject["0.95"] else "-") + " / " + (
                    "x" if report.reject["bonferroni_0.95"] else "-"
                )
                table.add_row(
                    report.team or "",
                    report.name,
                    f"{report.statistic:.2f}",
                    "" if report.dof is None else str(report.dof),
                    f"{report.p_value:.4f}",
                    f"{report.thresholds['0.95']:.2f}",
                    f"{report.thresholds['bonferroni_0.95']:.2f}",
                    flags,
                )
        return table

    def write_tests(self, batteries: Sequence[Sequence[TestReport]], name: str = "tests.csv") -> Path:
        rows = []
        for reports in batteries:
            for r in reports:
                for key in sorted(r.thresholds):
                    rows.append(
                        (
                            r.team or "",
                            r.name,
                            r.distribution,
                            _num(r.statistic),
                            "" if r.dof is None else r.dof,
                            _num(r.p_value),
                            key,
                            _num(r.thresholds[key]),
                            str(r.reject[key]).lower(),
                        )
                    )
        return self._write_csv(name, TEST_COLUMNS, rows)

    # Plot data

    def write_plot_data(self, season: TeamSeason, fit: FitResult, scheme: BinScheme) -> List[Path]:
        """
        One file per side: plot_data/<team>_<season>_<side>.csv with PLOT_COLUMNS.
        """
        paths = []
        for side, scores in (("scored", season.scored()), ("allowed", season.allowed())):
            rows = [
                (_num(lo), _num(hi), _num(center), observed, _num(expected))
                for lo, hi, center, observed, expected in plot_rows(scores, scheme, fit, side)
            ]
            stem = f"{season.team}_{season.season}" if season.season is not None else season.team
            paths.append(self._write_csv(f"plot_data/{stem}_{side}.csv", PLOT_COLUMNS, rows))
        return paths

    # Simulation

    def simulation_table(self, report: SimulationReport) -> Table:
        table = Table(title="Monte Carlo won-loss check")
        table.add_column("Quantity")
        table.add_column("Value", justify="right")
        table.add_row("parameters", f"alpha_RS={report.alpha_rs} alpha_RA={report.alpha_ra} "
                                    f"beta={report.beta} gamma={report.gamma}")
        table.add_row("games", str(report.games))
        table.add_row("seed", str(report.seed))
        table.add_row("wins", str(report.wins))
        table.add_row("empirical rate", f"{report.empirical_rate:.6f}")
        table.add_row("closed form", f"{report.predicted_rate:.6f}")
        table.add_row("interval", f"[{report.ci_low:.6f}, {report.ci_high:.6f}]")
        table.add_row("z", f"{report.z_score:+.3f}")
        table.add_row("within interval", "yes" if report.within_ci else "NO")
        return table

    def write_simulation(self, report: SimulationReport, name: str = "simulation.json") -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return path
