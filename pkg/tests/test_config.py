"""Tests for default settings and environment overrides."""

import math

import pytest

from thc_transitions.config import LC_PRESETS, Defaults, load_defaults


class TestLoadDefaults:
    """Test THC_* environment overrides."""

    def test_builtin_defaults(self, monkeypatch):
        """Test the defaults without any environment."""
        for name in ("THC_PR", "THC_LC", "THC_SIGN", "THC_SEED", "THC_OUTPUT_DIR", "THC_FORMAT", "THC_WORKERS"):
            monkeypatch.delenv(name, raising=False)
        defaults = load_defaults()
        assert defaults == Defaults()
        assert defaults.pr == 7.5
        assert defaults.aspect_ratio == pytest.approx(2 / math.pi)

    def test_environment_overrides(self, monkeypatch):
        """Test that environment values replace defaults."""
        monkeypatch.setenv("THC_PR", "1.0")
        monkeypatch.setenv("THC_LC", "2")
        monkeypatch.setenv("THC_FORMAT", "JSON")
        monkeypatch.setenv("THC_WORKERS", " 4 ")
        defaults = load_defaults()
        assert defaults.pr == 1.0
        assert defaults.aspect_ratio == LC_PRESETS[2]
        assert defaults.output_format == "json"
        assert defaults.workers == 4

    def test_blank_values_ignored(self, monkeypatch):
        """Test that empty variables fall back to defaults."""
        monkeypatch.setenv("THC_SEED", "  ")
        assert load_defaults().seed == Defaults().seed

    def test_rejects_unknown_preset(self, monkeypatch):
        """Test that THC_LC must name a preset."""
        monkeypatch.setenv("THC_LC", "3")
        with pytest.raises(ValueError):
            load_defaults()
