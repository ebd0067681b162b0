"""Default settings, overridable from the environment or a .env file."""

import math
import os
from dataclasses import dataclass, replace
from typing import Dict, Optional

# Aspect-ratio presets for the two critical degrees with closed-form
# transition numbers. Both give alpha_{l_c}^2 = pi^2 / 2.
LC_PRESETS: Dict[int, float] = {
    1: 2.0 / math.pi,
    2: 2.0 * math.sqrt(3.0) / math.pi,
}


@dataclass(frozen=True)
class Defaults:
    """Run defaults used by the CLI when an option is not given."""

    pr: float = 7.5
    lc: int = 1
    sign: int = 1
    l_max: int = 50
    n_max: int = 50
    seed: int = 20240101
    output_dir: str = "results"
    output_format: str = "csv"
    workers: int = 1

    @property
    def aspect_ratio(self) -> float:
        return LC_PRESETS[self.lc]


def _env(name: str) -> Optional[str]:
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return None
    return value.strip()


def load_defaults() -> Defaults:
    """Build Defaults with THC_* environment overrides applied.

    Returns:
        Defaults instance
    """
    defaults = Defaults()
    overrides = {}

    if (value := _env("THC_PR")) is not None:
        overrides["pr"] = float(value)
    if (value := _env("THC_LC")) is not None:
        lc = int(value)
        if lc not in LC_PRESETS:
            raise ValueError(f"THC_LC must be one of {sorted(LC_PRESETS)}, got {lc}")
        overrides["lc"] = lc
    if (value := _env("THC_SIGN")) is not None:
        overrides["sign"] = int(value)
    if (value := _env("THC_SEED")) is not None:
        overrides["seed"] = int(value)
    if (value := _env("THC_OUTPUT_DIR")) is not None:
        overrides["output_dir"] = value
    if (value := _env("THC_FORMAT")) is not None:
        overrides["output_format"] = value.lower()
    if (value := _env("THC_WORKERS")) is not None:
        overrides["workers"] = int(value)

    return replace(defaults, **overrides)
