"""R sweeps along the critical line, optionally spread over a worker pool."""

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List

import numpy as np
import pandas as pd
from tqdm import tqdm

from .errors import EmptySweep, InvalidParameters
from .params import sigma_crit, threshold_rayleigh
from .transition import SweepRow, rows_to_frame, sweep_row


@dataclass(frozen=True)
class RGrid:
    """Uniform grid of thermal Rayleigh numbers, endpoints included."""

    r_min: float
    r_max: float
    steps: int

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise InvalidParameters(
                f"sweep grid needs R_min < R_max, got {self.r_min} >= {self.r_max}"
            )
        if self.steps < 2:
            raise InvalidParameters(f"sweep grid needs steps >= 2, got {self.steps}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.steps)


def admissible_values(grid: RGrid, Le: float, Pr: float, r: float) -> List[float]:
    """Grid points with K > 0 on the critical line (R < R0 when Le < 1)."""
    sigma_c, _ = sigma_crit(r)
    R0, _ = threshold_rayleigh(Le, Pr, sigma_c)
    values = [float(R) for R in grid.values]
    if Le < 1.0:
        return [R for R in values if R < R0]
    return [R for R in values if R > R0]


def qsweep(
    l_c: int,
    Le: float,
    Pr: float,
    r: float,
    grid: RGrid,
    workers: int = 1,
    progress: bool = True,
) -> pd.DataFrame:
    """Transition number at every admissible grid point, in grid order.

    Raises:
        EmptySweep: when no grid point lies in the K > 0 region
    """
    values = admissible_values(grid, Le, Pr, r)
    if not values:
        raise EmptySweep(
            f"no R in [{grid.r_min}, {grid.r_max}] lies in the K > 0 region for Le={Le}"
        )
    skipped = grid.steps - len(values)
    if skipped and progress:
        tqdm.write(
            f"Skipping {skipped} grid points outside the K > 0 region", file=sys.stderr
        )

    task = partial(sweep_row, l_c, Le, Pr, r)
    rows: List[SweepRow]
    if workers > 1:
        # map keeps input order regardless of completion order
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(
                tqdm(pool.map(task, values), total=len(values), desc="Sweeping R",
                     disable=not progress)
            )
    else:
        rows = [task(R) for R in tqdm(values, desc="Sweeping R", disable=not progress)]
    return rows_to_frame(rows)
