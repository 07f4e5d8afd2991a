"""
Tests for the command-line interface.

Commands run through click's CliRunner with a single worker; assertions
look at exit codes, stdout substrings and the files each command writes.
"""
import csv
import json

import pytest
from click.testing import CliRunner

from src import worker
from src.generators.season_simulator import export_game_log, synthetic_league
from src.ingestion.archive import read_archive
from src.main import cli
from src.models import FitMethod
from src.utils.errors import EmptyMarginError


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def long_log_file(tmp_path):
    """Three 1500-game seasons, enough for every cell margin of the independence table."""
    seasons = synthetic_league({"AAA": (5.6, 4.9), "BBB": (5.2, 5.2), "CCC": (4.8, 5.5)}, gamma=1.8, games=1500, seed=5)
    path = tmp_path / "long.csv"
    path.write_text(export_game_log(seasons), encoding="utf-8")
    return path


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestPredict:
    def test_equal_means(self, runner):
        result = runner.invoke(cli, ["predict", "--rs-mean", "4.6", "--ra-mean", "4.6"])
        assert result.exit_code == 0, result.output
        assert "won-loss percentage: 0.5000" in result.output
        assert "81.0 - 81.0" in result.output

    def test_five_four(self, runner):
        result = runner.invoke(cli, ["predict", "--rs-mean", "5", "--ra-mean", "4", "--gamma", "1.82"])
        assert result.exit_code == 0, result.output
        expected = 5.5 ** 1.82 / (5.5 ** 1.82 + 4.5 ** 1.82)
        assert f"won-loss percentage: {expected:.4f}" in result.output

    @pytest.mark.parametrize("args", [["--gamma", "0"], ["--rs-mean", "-1"]])
    def test_invalid_inputs(self, runner, args):
        base = {"--rs-mean": "5", "--ra-mean": "4"}
        for flag, value in zip(args[::2], args[1::2]):
            base[flag] = value
        flat = [item for pair in base.items() for item in pair]
        result = runner.invoke(cli, ["predict", *flat])
        assert result.exit_code != 0


class TestFit:
    def test_fit_writes_tables_and_archive(self, runner, game_log_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            cli, ["fit", "--input", str(game_log_file), "--method", "ls", "--out", str(out), "--workers", "1"]
        )
        assert result.exit_code == 0, result.output
        assert "Weibull fits (ls)" in result.output

        rows = _read_csv(out / "fits.csv")
        assert [r["team"] for r in rows] == ["AAA", "BBB", "CCC"]
        assert all(r["converged"] == "true" for r in rows)
        assert (out / "summary.csv").exists()

        archive = read_archive(out / "archive.json")
        assert archive.teams() == ["AAA", "BBB", "CCC"]
        assert archive.get("AAA", FitMethod.LEAST_SQUARES).fit.converged

    def test_fit_is_reproducible(self, runner, game_log_file, tmp_path):
        for name in ("a", "b"):
            result = runner.invoke(
                cli, ["fit", "--input", str(game_log_file), "--out", str(tmp_path / name), "--workers", "1"]
            )
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a" / "fits.csv").read_bytes() == (tmp_path / "b" / "fits.csv").read_bytes()

    def test_methods_share_one_archive(self, runner, game_log_file, tmp_path):
        out = tmp_path / "out"
        for method in ("ls", "mle"):
            result = runner.invoke(
                cli, ["fit", "--input", str(game_log_file), "--method", method, "--out", str(out), "--workers", "1"]
            )
            assert result.exit_code == 0, result.output
        archive = read_archive(out / "archive.json")
        assert len(archive.entries) == 6
        assert archive.get("BBB", FitMethod.MAX_LIKELIHOOD).method == FitMethod.MAX_LIKELIHOOD

    def test_division_fit(self, runner, game_log_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            cli,
            ["fit", "--input", str(game_log_file), "--out", str(out), "--workers", "1",
             "--division", "East:AAA,BBB,CCC"],
        )
        assert result.exit_code == 0, result.output
        rows = _read_csv(out / "divisions.csv")
        assert [r["team"] for r in rows] == ["AAA", "BBB", "CCC"]
        assert len({r["gamma"] for r in rows}) == 1

    @pytest.mark.parametrize("division", ["East", "East:AAA,ZZZ"])
    def test_bad_division(self, runner, game_log_file, tmp_path, division):
        result = runner.invoke(
            cli, ["fit", "--input", str(game_log_file), "--out", str(tmp_path), "--workers", "1", "--division", division]
        )
        assert result.exit_code == 2

    def test_tie_in_log_fails(self, runner, tmp_path):
        path = tmp_path / "ties.csv"
        path.write_text("date,team,opponent,runs_scored,runs_allowed\n2004-04-05,BOS,BAL,3,3\n", encoding="utf-8")
        result = runner.invoke(cli, ["fit", "--input", str(path), "--out", str(tmp_path / "out")])
        assert result.exit_code == 1
        assert "line 2" in result.output

    def test_empty_log_fails(self, runner, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("date,team,opponent,runs_scored,runs_allowed\n", encoding="utf-8")
        result = runner.invoke(cli, ["fit", "--input", str(path), "--out", str(tmp_path / "out")])
        assert result.exit_code == 1
        assert "no games" in result.output


class TestBattery:
    def test_test_command(self, runner, long_log_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(cli, ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert result.exit_code == 0, result.output
        assert "false rejection among 14" in result.output
        assert "51.2%" in result.output

        rows = _read_csv(out / "tests.csv")
        names = {r["test"] for r in rows}
        assert names == {"goodness_of_fit", "independence", "mean_scored", "mean_allowed"}
        gof_dof = {r["dof"] for r in rows if r["test"] == "goodness_of_fit"}
        independence_dof = {r["dof"] for r in rows if r["test"] == "independence"}
        assert gof_dof == {"18"}
        assert independence_dof == {"109"}

        archive = read_archive(out / "archive.json")
        assert len(archive.get("CCC", FitMethod.MAX_LIKELIHOOD).tests) == 4

    def test_test_options(self, runner, long_log_file, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            cli,
            ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1",
             "--independence-bins", "13", "--gof-dof", "published", "--comparisons", "28"],
        )
        assert result.exit_code == 0, result.output
        rows = _read_csv(out / "tests.csv")
        assert {r["dof"] for r in rows if r["test"] == "goodness_of_fit"} == {"20"}
        assert {r["dof"] for r in rows if r["test"] == "independence"} == {"131"}

    def test_reuses_archived_fits(self, runner, long_log_file, tmp_path):
        out = tmp_path / "out"
        fitted = runner.invoke(cli, ["fit", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert fitted.exit_code == 0, fitted.output
        before = read_archive(out / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD).fit

        tested = runner.invoke(cli, ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert tested.exit_code == 0, tested.output
        after = read_archive(out / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD)
        assert after.fit == before
        assert len(after.tests) == 4

    def test_refits_when_input_changes(self, runner, game_log_file, long_log_file, tmp_path):
        out = tmp_path / "out"
        fitted = runner.invoke(cli, ["fit", "--input", str(game_log_file), "--out", str(out), "--workers", "1"])
        assert fitted.exit_code == 0, fitted.output
        earlier = read_archive(out / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD)

        tested = runner.invoke(cli, ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert tested.exit_code == 0, tested.output
        entry = read_archive(out / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD)
        assert entry.fingerprint != earlier.fingerprint
        assert entry.fit.games_played == 1500

        clean = tmp_path / "clean"
        fresh = runner.invoke(cli, ["fit", "--input", str(long_log_file), "--out", str(clean), "--workers", "1"])
        assert fresh.exit_code == 0, fresh.output
        assert entry.fit == read_archive(clean / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD).fit

    def test_refits_when_beta_changes(self, runner, long_log_file, tmp_path):
        out = tmp_path / "out"
        fitted = runner.invoke(cli, ["fit", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert fitted.exit_code == 0, fitted.output

        tested = runner.invoke(
            cli, ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1", "--beta", "-0.75"]
        )
        assert tested.exit_code == 0, tested.output
        entry = read_archive(out / "archive.json").get("AAA", FitMethod.MAX_LIKELIHOOD)
        assert entry.fit.beta == -0.75
        assert len(entry.tests) == 4

    def test_empty_margin_skips_one_team(self, runner, long_log_file, tmp_path, monkeypatch):
        real = worker.independence_test

        def independence_test(season, *args, **kwargs):
            if season.team == "BBB":
                raise EmptyMarginError("row 10 is empty")
            return real(season, *args, **kwargs)

        monkeypatch.setattr(worker, "independence_test", independence_test)
        out = tmp_path / "out"
        result = runner.invoke(cli, ["test", "--input", str(long_log_file), "--out", str(out), "--workers", "1"])
        assert result.exit_code == 0, result.output
        assert "independence test skipped (empty score bin) for: BBB" in result.output

        archive = read_archive(out / "archive.json")
        assert len(archive.get("AAA", FitMethod.MAX_LIKELIHOOD).tests) == 4
        assert [r.name for r in archive.get("BBB", FitMethod.MAX_LIKELIHOOD).tests] == [
            "goodness_of_fit", "mean_scored", "mean_allowed",
        ]


class TestPlotData:
    def test_plot_files(self, runner, game_log_file, synthetic_seasons, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(cli, ["plot-data", "--input", str(game_log_file), "--out", str(out), "--workers", "1"])
        assert result.exit_code == 0, result.output

        files = sorted(p.name for p in (out / "plot_data").iterdir())
        assert len(files) == 6
        assert "AAA_2004_scored.csv" in files

        season = synthetic_seasons[0]
        rows = _read_csv(out / "plot_data" / "AAA_2004_allowed.csv")
        assert len(rows) == 12
        assert sum(float(r["expected"]) for r in rows) == pytest.approx(season.games_played, rel=1e-9)
        assert sum(int(r["observed"]) for r in rows) == season.games_played
        zero_runs = sum(1 for g in season.games if g.runs_allowed == 0)
        assert int(rows[0]["observed"]) == zero_runs
        assert rows[-1]["bin_upper"] == "inf"


class TestSimulate:
    def test_same_seed_same_report(self, runner, tmp_path):
        args = ["simulate", "--alpha-rs", "5.0", "--alpha-ra", "4.5", "--games", "20000", "--seed", "3"]
        for name in ("a", "b"):
            result = runner.invoke(cli, args + ["--out", str(tmp_path / name)])
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a" / "simulation.json").read_text() == (tmp_path / "b" / "simulation.json").read_text()

    def test_equal_scales(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["simulate", "--alpha-rs", "4.0", "--alpha-ra", "4.0", "--games", "100000", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "simulation.json").read_text())
        assert report["predicted_rate"] == pytest.approx(0.5)
        assert report["within_ci"] is True

    def test_bad_scale(self, runner, tmp_path):
        result = runner.invoke(cli, ["simulate", "--alpha-rs", "0", "--alpha-ra", "4.0", "--out", str(tmp_path)])
        assert result.exit_code == 2
