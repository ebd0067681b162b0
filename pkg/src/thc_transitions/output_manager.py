"""Output manager for CSV, JSON and markdown result files."""

import json
import math
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd

from .errors import InvalidParameters

JSON_SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"


def _plain(value: Any) -> Any:
    """Convert numpy scalars, enums and containers into JSON-ready values."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        # JSON has no NaN or infinity
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def render_json(payload: Dict[str, Any]) -> str:
    """Versioned JSON text with sorted keys."""
    document = {"schema": JSON_SCHEMA_VERSION}
    document.update(_plain(payload))
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def render_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class OutputManager:
    """Writes result tables and reports into one output directory."""

    def __init__(self, output_dir: Path):
        """Initialize output manager.

        Args:
            output_dir: Directory to write output files
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str, suffix: str) -> Path:
        return self.output_dir / f"{name}{suffix}"

    def write_csv(self, name: str, df: pd.DataFrame) -> Path:
        """Write a DataFrame as CSV with 17 significant digits.

        Args:
            name: File stem
            df: Table to write

        Returns:
            Path to the created file
        """
        filepath = self._path(name, ".csv")
        filepath.write_text(render_csv(df), encoding="utf-8")
        return filepath

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        """Write a payload as versioned JSON with sorted keys."""
        filepath = self._path(name, ".json")
        filepath.write_text(render_json(payload), encoding="utf-8")
        return filepath

    def write_table(self, name: str, df: pd.DataFrame, output_format: str) -> Path:
        """Write a table in the requested format ('csv' or 'json')."""
        if output_format == "csv":
            return self.write_csv(name, df)
        if output_format == "json":
            records = df.to_dict(orient="records")
            return self.write_json(name, {"columns": list(df.columns), "rows": records})
        raise InvalidParameters(f"unknown output format: {output_format}")

    def write_markdown(self, name: str, title: str, df: pd.DataFrame) -> Path:
        """Write a markdown report with one title line and one table."""
        filepath = self._path(name, ".md")
        content = f"# {title}\n\n" + df.to_markdown(index=False) + "\n"
        filepath.write_text(content, encoding="utf-8")
        return filepath
