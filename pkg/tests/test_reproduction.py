"""Tests for the table reproduction and its reports."""

import pandas as pd
import pytest

from thc_transitions.output_manager import OutputManager
from thc_transitions.reference_data import (
    ERRATA,
    entry_tolerance,
    printed_tolerance,
    reference_value,
)
from thc_transitions.reproduction import (
    COLUMNS,
    REPRODUCTIONS,
    curve_comparison,
    d_term_comparison,
    run_reproduction,
    summarize,
    threshold_comparison,
)


class TestReferenceData:
    """Test reference lookups and tolerances."""

    def test_printed_tolerance_uses_last_digit(self):
        """Test half a unit in the last printed digit as the floor."""
        assert printed_tolerance("0.005") == pytest.approx(5e-4)
        assert printed_tolerance("40.825") == pytest.approx(5e-3 * 40.825)

    def test_truncated_tolerance_uses_full_unit(self):
        """Test a full unit in the last digit for truncated entries."""
        assert printed_tolerance("0.093", truncated=True) == pytest.approx(1e-3)
        assert printed_tolerance("0.0069", truncated=True) == pytest.approx(1e-4)
        assert entry_tolerance(2, 5.0, 660.0, "(2,1),(2,2)") == pytest.approx(1e-3)
        assert entry_tolerance(2, 5.0, 620.0, "(2,1),(2,2)") == pytest.approx(5e-4)

    def test_erratum_lookup(self):
        """Test that errata replace the printed value."""
        for (l_c, Le, R, label), value in ERRATA.items():
            reference, printed, erratum = reference_value(l_c, Le, R, label)
            assert erratum
            assert reference == value
            assert float(printed) != value


class TestComparisons:
    """Test each reproduced table."""

    @pytest.mark.parametrize("l_c", [1, 2])
    def test_d_term_tables(self, l_c):
        """Test that every D-term entry is within tolerance."""
        df = d_term_comparison(l_c)
        assert list(df.columns) == COLUMNS
        assert df["passed"].all(), df[~df["passed"]].to_string()
        assert df["erratum"].sum() == (2 if l_c == 1 else 0)

    @pytest.mark.parametrize("l_c", [1, 2])
    def test_threshold_tables(self, l_c):
        """Test R*, R0 and R1 for each Lewis number."""
        df = threshold_comparison(l_c)
        assert set(df["quantity"]) == {"R_star", "R0", "R1"}
        assert df["passed"].all(), df[~df["passed"]].to_string()

    @pytest.mark.slow
    def test_curves(self):
        """Test every published q(R) curve point."""
        df = curve_comparison()
        assert df["passed"].all(), df[~df["passed"]].to_string()


class TestRunReproduction:
    """Test the combined reproduction run."""

    def test_writes_reports(self, temp_dir):
        """Test CSV and markdown output for a selection of tables."""
        manager = OutputManager(temp_dir)
        df, summary = run_reproduction([1, 3], manager, progress=False)

        assert summary.passed
        assert summary.tables == [1, 3]
        assert summary.n_entries == len(df)
        assert (temp_dir / "table_1.csv").exists()
        assert (temp_dir / "table_3.csv").exists()
        report = (temp_dir / "reproduction.md").read_text(encoding="utf-8")
        assert report.startswith("# Reproduction Report")
        assert "## Table 1: D-terms for l_c = 1" in report
        assert "❌" not in report

    def test_summary_counts_failures(self):
        """Test that failing rows are counted."""
        df = pd.DataFrame(
            {"abs_err": [0.1, 2.0], "tolerance": [1.0, 1.0], "passed": [True, False]}
        )
        summary = summarize(df, [1])
        assert summary.n_failed == 1
        assert not summary.passed
        assert summary.worst_ratio == pytest.approx(2.0)

    def test_registry(self):
        """Test the five reproducible tables."""
        assert sorted(REPRODUCTIONS) == [1, 2, 3, 4, 5]
