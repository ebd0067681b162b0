"""Recompute the published tables and q(R) curves and compare with reference values."""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from .config import LC_PRESETS
from .output_manager import OutputManager
from .params import Params, sigma_crit, threshold_rayleigh
from .reference_data import (
    D_TERM_TABLES,
    PR_REFERENCE,
    Q_CURVES,
    R1_VALUES,
    THRESHOLD_TABLES,
    entry_tolerance,
    printed_tolerance,
    reference_value,
)
from .transition import critical_R_star, transition_number

THRESHOLD_ATOL = 1e-2
CURVE_RTOL = 1e-3

COLUMNS = [
    "table",
    "l_c",
    "Le",
    "R",
    "quantity",
    "computed",
    "reference",
    "printed",
    "erratum",
    "abs_err",
    "tolerance",
    "passed",
]


def _row(table: int, l_c: int, Le: float, R: Optional[float], quantity: str,
         computed: float, reference: float, printed: str, tolerance: float,
         erratum: bool = False) -> dict:
    abs_err = abs(computed - reference)
    return {
        "table": table,
        "l_c": l_c,
        "Le": Le,
        "R": R,
        "quantity": quantity,
        "computed": computed,
        "reference": reference,
        "printed": printed,
        "erratum": erratum,
        "abs_err": abs_err,
        "tolerance": tolerance,
        "passed": abs_err <= tolerance,
    }


def d_term_comparison(l_c: int, progress: bool = False) -> pd.DataFrame:
    """Every D-term of the l_c table next to its printed value."""
    table = l_c
    r = LC_PRESETS[l_c]
    rows = []
    cells = D_TERM_TABLES[l_c]
    for (Le, R), printed_terms in tqdm(cells.items(), desc=f"Table {table}", disable=not progress):
        report = transition_number(l_c, Params.at_criticality(R, Le, PR_REFERENCE, r))
        for label in printed_terms:
            reference, printed, erratum = reference_value(l_c, Le, R, label)
            rows.append(
                _row(table, l_c, Le, R, f"D{label}", report.d_terms[label],
                     reference, printed, entry_tolerance(l_c, Le, R, label), erratum)
            )
    return pd.DataFrame(rows, columns=COLUMNS)


def threshold_comparison(l_c: int, progress: bool = False) -> pd.DataFrame:
    """R*, R0 and R1 for each Lewis number of the threshold table."""
    table = 2 + l_c
    r = LC_PRESETS[l_c]
    sigma_c, _ = sigma_crit(r)
    rows = []
    for Le, (r_star_ref, r0_ref) in tqdm(
        THRESHOLD_TABLES[l_c].items(), desc=f"Table {table}", disable=not progress
    ):
        R0, R1 = threshold_rayleigh(Le, PR_REFERENCE, sigma_c)
        r_star = critical_R_star(l_c, Le, PR_REFERENCE, r)
        rows.append(_row(table, l_c, Le, None, "R_star", r_star, r_star_ref,
                         repr(r_star_ref), THRESHOLD_ATOL))
        rows.append(_row(table, l_c, Le, None, "R0", R0, r0_ref, repr(r0_ref),
                         THRESHOLD_ATOL))
        if Le in R1_VALUES:
            rows.append(_row(table, l_c, Le, None, "R1", R1, R1_VALUES[Le],
                             repr(R1_VALUES[Le]), THRESHOLD_ATOL))
    return pd.DataFrame(rows, columns=COLUMNS)


def curve_comparison(progress: bool = False) -> pd.DataFrame:
    """q_{l_c}(R) at every published curve point."""
    rows = []
    for (l_c, Le), points in tqdm(Q_CURVES.items(), desc="q(R) curves", disable=not progress):
        r = LC_PRESETS[l_c]
        for R, q_ref in points:
            report = transition_number(l_c, Params.at_criticality(float(R), Le, PR_REFERENCE, r))
            rows.append(
                _row(5, l_c, Le, float(R), f"q{l_c}", report.q, q_ref, repr(q_ref),
                     printed_tolerance(repr(q_ref), rtol=CURVE_RTOL))
            )
    return pd.DataFrame(rows, columns=COLUMNS)


REPRODUCTIONS: Dict[int, Tuple[str, Callable[[bool], pd.DataFrame]]] = {
    1: ("D-terms for l_c = 1", lambda progress: d_term_comparison(1, progress)),
    2: ("D-terms for l_c = 2", lambda progress: d_term_comparison(2, progress)),
    3: ("Transition thresholds for l_c = 1", lambda progress: threshold_comparison(1, progress)),
    4: ("Transition thresholds for l_c = 2", lambda progress: threshold_comparison(2, progress)),
    5: ("Transition numbers along R", curve_comparison),
}


@dataclass
class ReproductionSummary:
    """Totals over every reproduced table."""

    tables: List[int]
    n_entries: int
    n_failed: int
    worst_ratio: float

    @property
    def passed(self) -> bool:
        return self.n_failed == 0


def summarize(df: pd.DataFrame, tables: List[int]) -> ReproductionSummary:
    ratio = (df["abs_err"] / df["tolerance"]).max() if len(df) else 0.0
    return ReproductionSummary(
        tables=tables,
        n_entries=len(df),
        n_failed=int((~df["passed"].astype(bool)).sum()),
        worst_ratio=float(ratio),
    )


def run_reproduction(
    tables: List[int],
    output_manager: Optional[OutputManager] = None,
    progress: bool = True,
) -> Tuple[pd.DataFrame, ReproductionSummary]:
    """Reproduce the selected tables and optionally write CSV and markdown reports."""
    frames = []
    sections = []
    for table in tables:
        title, build = REPRODUCTIONS[table]
        df = build(progress)
        frames.append(df)

        display = df.copy()
        for col in ("computed", "reference", "abs_err", "tolerance"):
            display[col] = display[col].map("{:.6g}".format)
        display["passed"] = display["passed"].map({True: "✅", False: "❌"})
        sections.append(f"## Table {table}: {title}\n\n" + display.to_markdown(index=False))

        if output_manager is not None:
            output_manager.write_csv(f"table_{table}", df)

    combined = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=COLUMNS)
    summary = summarize(combined, tables)

    if output_manager is not None:
        content = "# Reproduction Report\n\n" + "\n\n".join(sections) + "\n"
        report_path = output_manager.output_dir / "reproduction.md"
        report_path.write_text(content, encoding="utf-8")
        print(f"Wrote {report_path} with {summary.n_entries} entries.")

    return combined, summary
