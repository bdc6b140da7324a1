"""Reports over measurements: the logarithmic-growth check and text tables."""

import json
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.table import Table

from metrics.sweep import DisseminationMeasurement

# Consecutive increments may differ by at most this factor
INCREMENT_TOLERANCE = 2.0
# Largest allowed median(largest n) / median(smallest n)
MAX_SPAN_RATIO = 4.0


class GrowthReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    medians: Dict[int, float]
    increments: List[float]
    span_ratio: Optional[float]
    passed: bool
    reasons: List[str]


def growth_ratio_check(measurements: Sequence[DisseminationMeasurement]) -> GrowthReport:
    """Check that median dissemination rounds grow logarithmically over geometric n.

    Logarithmic growth adds a constant number of rounds per fixed
    multiplicative step in n, so consecutive increments must stay within a
    factor of two of each other, and the largest median must stay below four
    times the smallest.
    """
    if len({(m.fanout_x, m.loss_probability) for m in measurements}) > 1:
        raise ValueError("measurements must share fanout and loss probability")
    ordered = sorted(measurements, key=lambda m: m.n)
    reasons: List[str] = []
    medians: Dict[int, float] = {}
    for m in ordered:
        if m.median is None:
            reasons.append(f"n={m.n}: dissemination never completed")
        else:
            medians[m.n] = m.median
    values = [medians[n] for n in sorted(medians)]
    increments = [b - a for a, b in zip(values, values[1:])]
    span = values[-1] / values[0] if len(values) >= 2 and values[0] > 0 else None

    if len(values) < 3:
        reasons.append("at least three sizes are needed to compare increments")
    elif min(increments) <= 0:
        reasons.append(f"medians do not grow: increments {increments}")
    elif max(increments) > INCREMENT_TOLERANCE * min(increments):
        reasons.append(f"increments {increments} differ by more than a factor of {INCREMENT_TOLERANCE:g}")
    if span is not None and span >= MAX_SPAN_RATIO:
        reasons.append(
            f"median ratio {span:.2f} between n={min(medians)} and n={max(medians)} is not below {MAX_SPAN_RATIO:g}"
        )
    return GrowthReport(medians=medians, increments=increments, span_ratio=span, passed=not reasons, reasons=reasons)


def measurements_table(measurements: Sequence[DisseminationMeasurement]) -> Table:
    table = Table(title="Dissemination rounds")
    for column in ("n", "fanout", "loss", "trials", "median", "min", "max", "not reached"):
        table.add_column(column, justify="right")
    for m in sorted(measurements, key=lambda m: m.n):
        reached = m.rounds_to_full
        table.add_row(
            str(m.n),
            str(m.fanout_x),
            f"{m.loss_probability:g}",
            str(m.trials),
            f"{m.median:g}" if m.median is not None else "-",
            str(min(reached)) if reached else "-",
            str(max(reached)) if reached else "-",
            str(m.not_reached),
        )
    return table


def growth_table(report: GrowthReport) -> Table:
    table = Table(title=f"Growth check: {'PASS' if report.passed else 'FAIL'}")
    table.add_column("n -> 4n", justify="right")
    table.add_column("increment", justify="right")
    sizes = sorted(report.medians)
    for (a, b), delta in zip(zip(sizes, sizes[1:]), report.increments):
        table.add_row(f"{a} -> {b}", f"{delta:g}")
    return table


def print_report(tables: Sequence[Table], notes: Sequence[str] = (), console: Optional[Console] = None) -> None:
    console = console or Console()
    for table in tables:
        console.print(table)
    for note in notes:
        console.print(note)


def summary_record(kind: str, payload: BaseModel) -> str:
    """One machine-readable line, encoded like trace lines (JSON, no spaces)."""
    return json.dumps([kind, payload.model_dump(mode="json")], separators=(",", ":"), sort_keys=True)
