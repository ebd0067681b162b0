"""Tests for OutputManager functionality."""

import json
import math

import pandas as pd
import pytest

from thc_transitions.errors import InvalidParameters
from thc_transitions.output_manager import OutputManager, render_csv, render_json
from thc_transitions.params import Regime


class TestOutputManager:
    """Test OutputManager class."""

    def test_init_creates_directory(self, temp_dir):
        """Test that OutputManager creates output directory on init."""
        output_dir = temp_dir / "test_output" / "nested"
        assert not output_dir.exists()

        manager = OutputManager(output_dir)
        assert output_dir.exists()
        assert manager.output_dir == output_dir

    def test_write_csv_keeps_full_precision(self, temp_dir):
        """Test that floats survive a CSV round trip bit for bit."""
        manager = OutputManager(temp_dir)
        df = pd.DataFrame({"R": [620.0, 660.0], "q": [1 / 3, math.pi]})
        filepath = manager.write_csv("qsweep", df)

        assert filepath.name == "qsweep.csv"
        loaded = pd.read_csv(filepath, float_precision="round_trip")
        assert list(loaded["q"]) == [1 / 3, math.pi]
        assert filepath.read_text().splitlines()[0] == "R,q"

    def test_write_json_is_versioned_and_sorted(self, temp_dir):
        """Test the JSON schema field, key order and value conversion."""
        manager = OutputManager(temp_dir)
        filepath = manager.write_json(
            "classify",
            {"q": 0.5, "regime": Regime.STEADY, "missing": math.nan, "beta": 1 + 2j},
        )
        text = filepath.read_text()
        payload = json.loads(text)

        assert payload["schema"] == 1
        assert payload["regime"] == "SteadyMultiEquilibria"
        assert payload["missing"] is None
        assert payload["beta"] == {"re": 1.0, "im": 2.0}
        assert list(payload) == sorted(payload)

    def test_write_table_formats(self, temp_dir):
        """Test CSV and JSON table output and rejection of unknown formats."""
        manager = OutputManager(temp_dir)
        df = pd.DataFrame({"l": [1, 2], "re": [-1.0, -2.0]})

        assert manager.write_table("spectrum", df, "csv").suffix == ".csv"
        json_path = manager.write_table("spectrum", df, "json")
        payload = json.loads(json_path.read_text())
        assert payload["columns"] == ["l", "re"]
        assert payload["rows"][1] == {"l": 2, "re": -2.0}

        with pytest.raises(InvalidParameters):
            manager.write_table("spectrum", df, "xml")

    def test_write_markdown(self, temp_dir):
        """Test the markdown report layout."""
        manager = OutputManager(temp_dir)
        df = pd.DataFrame({"quantity": ["R0"], "passed": ["✅"]})
        filepath = manager.write_markdown("report", "Threshold Report", df)

        content = filepath.read_text(encoding="utf-8")
        assert content.startswith("# Threshold Report\n\n")
        assert "| quantity" in content
        assert "✅" in content


class TestRenderers:
    """Test the text renderers used for standard output."""

    def test_render_csv_line_endings(self):
        """Test that rows end with a bare newline."""
        text = render_csv(pd.DataFrame({"a": [1.5]}))
        assert text == "a\n1.5\n"

    def test_render_json_trailing_newline(self):
        """Test that JSON text ends with a newline."""
        assert render_json({"a": 1}).endswith("}\n")
