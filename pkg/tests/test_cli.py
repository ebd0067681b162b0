"""Tests for the command-line interface."""

import io
import json

import pandas as pd

from thc_transitions.main import cli

LC1 = ["--le", "0.1", "--R", "620", "--lc", "1"]


class TestClassify:
    """Test the classify command."""

    def test_type_i_json(self, cli_runner):
        """Test JSON output for a continuous transition."""
        result = cli_runner.invoke(cli, ["classify", *LC1, "--format", "json"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["schema"] == 1
        assert payload["regime"] == "SteadyMultiEquilibria"
        assert payload["classification"] == "TypeI"
        assert payload["l_c"] == 1
        assert abs(payload["R_star"] - 664.182) < 1e-2

    def test_high_lewis_number_is_type_i(self, cli_runner):
        """Test the Le > 1 branch on the critical line."""
        result = cli_runner.invoke(
            cli, ["classify", "--le", "2", "--r", "0.63662", "--R", "300", "--format", "json"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["classification"] == "TypeI"
        assert payload["R_star"] is None

    def test_second_degree_moderate_lewis_number(self, cli_runner):
        """Test l_c = 2 at Le = 0.5, where R* search starts at Rtilde = 0."""
        result = cli_runner.invoke(
            cli, ["classify", "--le", "0.5", "--lc", "2", "--R", "700", "-f", "json"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["l_c"] == 2
        assert payload["classification"] == "TypeI"
        assert abs(payload["R_star"] - 878.513) < 1e-2

    def test_oscillatory_regime(self, cli_runner):
        """Test that K < 0 reports the regime without a transition number."""
        result = cli_runner.invoke(
            cli, ["classify", "--le", "0.1", "--R", "800", "--format", "json"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["regime"] == "Oscillatory"
        assert payload["classification"] is None

    def test_invalid_parameters_exit_code(self, cli_runner):
        """Test that domain errors exit with code 2."""
        result = cli_runner.invoke(cli, ["classify", "--le", "-1", "--R", "620"])
        assert result.exit_code == 2
        assert "❌ Error:" in result.stderr

    def test_environment_fallback(self, cli_runner):
        """Test that THC_LE and THC_R fill missing options."""
        result = cli_runner.invoke(
            cli, ["classify", "--format", "json"], env={"THC_LE": "0.1", "THC_R": "700"}
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["classification"] == "TypeII"


class TestSpectrumCommand:
    """Test the spectrum command."""

    def test_single_triple(self, cli_runner):
        """Test the three eigenvalues of one (l, n)."""
        result = cli_runner.invoke(cli, ["spectrum", *LC1, "--l", "1", "--n", "1"])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(io.StringIO(result.stdout))
        assert list(df["k"]) == [1, 2, 3]
        assert abs(df["re"].iloc[0]) < 1e-8

    def test_requires_both_indices(self, cli_runner):
        """Test that --l without --n is rejected."""
        result = cli_runner.invoke(cli, ["spectrum", *LC1, "--l", "1"])
        assert result.exit_code == 2


class TestQSweepCommand:
    """Test the qsweep command."""

    def test_writes_csv(self, cli_runner, temp_dir):
        """Test that --out writes the sweep table."""
        out = temp_dir / "sweep.csv"
        result = cli_runner.invoke(
            cli,
            ["qsweep", "--le", "0.1", "--rmin", "620", "--rmax", "700", "--steps", "3",
             "--quiet", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        df = pd.read_csv(out)
        assert list(df["R"]) == [620.0, 660.0, 700.0]

    def test_empty_sweep(self, cli_runner):
        """Test that a grid past R0 exits with code 2."""
        result = cli_runner.invoke(
            cli, ["qsweep", "--le", "0.1", "--rmin", "800", "--rmax", "900", "--steps", "2", "--quiet"]
        )
        assert result.exit_code == 2


class TestSimulateCommand:
    """Test the simulate command."""

    def test_type_i_trajectory(self, cli_runner):
        """Test that a Type-I run approaches beta/q."""
        result = cli_runner.invoke(cli, ["simulate", *LC1, "--stride", "100"])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(io.StringIO(result.stdout))
        assert "radius_sq" in df.columns
        assert "Attractor |x|^2" in result.stderr

    def test_type_ii_diverges(self, cli_runner):
        """Test that a Type-II run exits with code 3."""
        result = cli_runner.invoke(
            cli,
            ["simulate", "--le", "0.1", "--R", "700", "--radius", "1.0",
             "--horizon", "1000", "--stride", "1000"],
        )
        assert result.exit_code == 3
        assert "❌ Error:" in result.stderr


class TestChecks:
    """Test the self-check commands."""

    def test_harmonics_check(self, cli_runner):
        """Test the triple-product comparison at a small degree."""
        result = cli_runner.invoke(cli, ["harmonics-check", "--degree", "3"])
        assert result.exit_code == 0, result.output
        assert "✅" in result.stdout

    def test_pes(self, cli_runner):
        """Test the exchange-of-stabilities check."""
        result = cli_runner.invoke(cli, ["pes", *LC1, "--l-max", "10", "--n-max", "10"])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(io.StringIO(result.stdout))
        assert list(df["label"]) == ["below", "at", "above"]

    def test_tables(self, cli_runner, temp_dir):
        """Test reproduction of the threshold table."""
        result = cli_runner.invoke(cli, ["tables", "--table", "3", "--out", str(temp_dir), "--quiet"])
        assert result.exit_code == 0, result.output
        assert (temp_dir / "table_3.csv").exists()
        assert "✅ All entries within tolerance" in result.stdout

    def test_tables_bad_selection(self, cli_runner, temp_dir):
        """Test that an unknown table id is rejected."""
        result = cli_runner.invoke(cli, ["tables", "--table", "9", "--out", str(temp_dir)])
        assert result.exit_code == 2


class TestDeterminism:
    """Test that identical invocations produce identical bytes."""

    def test_simulate_stdout_repeats(self, cli_runner):
        """Test that a seeded trajectory prints the same CSV twice."""
        args = ["simulate", *LC1, "--stride", "100", "--seed", "5"]
        first = cli_runner.invoke(cli, args)
        second = cli_runner.invoke(cli, args)
        assert first.exit_code == 0, first.output
        assert first.stdout_bytes == second.stdout_bytes

    def test_written_files_repeat(self, cli_runner, temp_dir):
        """Test that JSON and CSV files written twice are byte-identical."""
        for fmt in ("json", "csv"):
            paths = []
            for run in ("first", "second"):
                out = temp_dir / f"{run}_{fmt}"
                result = cli_runner.invoke(
                    cli,
                    ["qsweep", "--le", "0.1", "--rmin", "620", "--rmax", "700", "--steps", "3",
                     "--quiet", "-f", fmt, "--out", str(out)],
                )
                assert result.exit_code == 0, result.output
                paths.append(temp_dir / f"{run}_{fmt}.{fmt}")
            assert paths[0].read_bytes() == paths[1].read_bytes()
