from importlib import resources
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from cli.checks import run_checks
from cli.config_file import parse_scenario, parse_scenario_text
from cli.manifest import build_manifest, manifest_path, write_manifest
from cli.trace_io import write_trace
from gossip.errors import GossipError, ScenarioConfigError
from metrics.latency import (
    compromised_subjects,
    consensus_latency,
    convergence_report,
    dissemination_latency,
    false_positive_count,
)
from metrics.report import growth_ratio_check, growth_table, measurements_table, print_report, summary_record
from metrics.sweep import sweep as run_sweep
from simnet.scenario import ScenarioConfig
from simnet.settings import sim_settings
from simnet.simulator import run_scenario
from simnet.trace import EventKind, TraceEvent
from utils.dttm import current_utc, to_utc_str
from utils.log import logger, set_log_level

######################################################
## Scenario runner
######################################################

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_CHECK_FAILED = 2

EXAMPLE_SCENARIO = "example_replay.cfg"
# Node A and node D of the replayed walkthrough
EXAMPLE_OBSERVER, EXAMPLE_SUBJECT = 0, 3
EXAMPLE_EXPECTED = 4.6

app = typer.Typer(name="gossipnet", help="Gossip-based suspicion dissemination simulator.", no_args_is_help=True)
console = Console()


@app.callback()
def main() -> None:
    set_log_level(sim_settings.log_level)


def _load(scenario: Path) -> tuple[ScenarioConfig, bytes]:
    try:
        config_bytes = scenario.read_bytes()
    except OSError as e:
        logger.error(f"Cannot read scenario {scenario}: {e.strerror}")
        raise typer.Exit(EXIT_CONFIG_ERROR)
    try:
        return parse_scenario(scenario), config_bytes
    except (ScenarioConfigError, GossipError) as e:
        logger.error(f"Invalid scenario {scenario}: {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)


def _parse_sizes(raw: str) -> List[int]:
    try:
        sizes = [int(item) for item in raw.split(",") if item.strip()]
    except ValueError:
        sizes = []
    if not sizes or min(sizes) < 2:
        logger.error(f"--n expects comma separated network sizes >= 2, got '{raw}'")
        raise typer.Exit(EXIT_CONFIG_ERROR)
    return sizes


def scenario_table(cfg: ScenarioConfig, trace: List[TraceEvent]) -> Table:
    table = Table(title=f"Scenario n={cfg.n}, seed={cfg.params.seed}")
    table.add_column("subject", justify="right")
    table.add_column("level", justify="right")
    table.add_column("dissemination rounds", justify="right")
    table.add_column("consensus rounds", justify="right")
    for event in trace:
        if event.kind != EventKind.compromise or event.subject is None or event.value is None:
            continue
        spread = dissemination_latency(trace, event.subject, event.value, cfg.n)
        agreed = consensus_latency(trace, event.subject, cfg.n)
        table.add_row(
            str(event.subject),
            f"{event.value:g}",
            str(spread) if spread is not None else "not reached",
            str(agreed) if agreed is not None else "not reached",
        )
    return table


@app.command()
def run(
    scenario: Path = typer.Argument(..., help="Scenario file"),
    trace_out: Optional[Path] = typer.Option(None, "--trace-out", help="Where to write the trace"),
    report: bool = typer.Option(False, "--report", help="Print latency and convergence tables"),
) -> None:
    """Run a scenario and persist its trace."""
    cfg, config_bytes = _load(scenario)
    started_at = current_utc()
    logger.info(f"Running {scenario} ({cfg.n} nodes, {cfg.total_rounds} rounds)")
    trace, states = run_scenario(cfg)
    finished_at = current_utc()

    trace_path = trace_out or sim_settings.output_dir / f"{scenario.stem}-seed{cfg.params.seed}.trace"
    write_trace(trace, trace_path)
    manifest = build_manifest(config_bytes, cfg.params.seed, started_at, finished_at, [trace_path])
    write_manifest(manifest, manifest_path(trace_path))
    logger.info(f"Wrote {len(trace)} events to {trace_path} at {to_utc_str(finished_at)}")

    if report:
        convergence = convergence_report(states, trace, cfg.total_rounds)
        print_report(
            [scenario_table(cfg, trace)],
            notes=[
                f"false positives: {false_positive_count(trace, cfg.params.theta)}",
                f"identical suspicion vectors: {convergence.identical_vectors}",
                f"last adopt round: {convergence.last_adopt_round}",
                summary_record("convergence", convergence),
            ],
            console=console,
        )


@app.command()
def sweep(
    template: Path = typer.Argument(..., help="Scenario template with the injected compromise"),
    n: str = typer.Option(..., "--n", help="Comma separated network sizes, e.g. 16,64,256,1024"),
    seeds: int = typer.Option(100, "--seeds", min=1, help="Trials per network size"),
    fanout: Optional[int] = typer.Option(None, "--fanout", min=1, help="Override the template's fanout"),
    workers: int = typer.Option(sim_settings.sweep_workers, "--workers", min=1),
    check_growth: bool = typer.Option(False, "--check-growth", help="Exit 2 unless growth is logarithmic"),
    summary_out: Optional[Path] = typer.Option(None, "--summary-out", help="Write summary records here"),
) -> None:
    """Measure rounds to full dissemination over network sizes and seeds."""
    cfg, _ = _load(template)
    sizes = _parse_sizes(n)
    if not cfg.compromises:
        logger.error(f"Template {template} has no [compromise] block to measure")
        raise typer.Exit(EXIT_CONFIG_ERROR)
    if fanout is not None:
        try:
            params = cfg.params.model_validate({**cfg.params.model_dump(), "fanout_x": fanout})
        except ValueError as e:
            logger.error(f"Invalid fanout {fanout}: {e}")
            raise typer.Exit(EXIT_CONFIG_ERROR)
        cfg = cfg.model_copy(update={"params": params})

    measurements = run_sweep(cfg, sizes, seeds, first_seed=cfg.params.seed, workers=workers)
    growth = growth_ratio_check(measurements) if len(sizes) >= 3 else None
    tables = [measurements_table(measurements)] + ([growth_table(growth)] if growth is not None else [])
    print_report(tables, notes=growth.reasons if growth is not None else [], console=console)

    if summary_out is not None:
        summary_out.parent.mkdir(parents=True, exist_ok=True)
        lines = [summary_record("dissemination", m) for m in measurements]
        if growth is not None:
            lines.append(summary_record("growth", growth))
        summary_out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if check_growth and (growth is None or not growth.passed):
        raise typer.Exit(EXIT_CHECK_FAILED)


@app.command("replay-example")
def replay_example() -> None:
    """Replay the four-node walkthrough and print node A's final view of node D."""
    text = resources.files("cli.scenarios").joinpath(EXAMPLE_SCENARIO).read_text(encoding="utf-8")
    cfg = parse_scenario_text(text)
    _, states = run_scenario(cfg)
    observer = states[EXAMPLE_OBSERVER]
    value = float(observer.suspicion_vector.values[EXAMPLE_SUBJECT])
    age = int(observer.gossip_list.ages[EXAMPLE_SUBJECT])
    console.print(f"node A suspicion for D: {value:g} (age {age})")
    console.print(f"node A suspicion vector: {[float(v) for v in observer.suspicion_vector.values]}")
    if value != EXAMPLE_EXPECTED:
        logger.error(f"Expected {EXAMPLE_EXPECTED}, replay produced {value}")
        raise typer.Exit(EXIT_CHECK_FAILED)


@app.command()
def check(scenario: Path = typer.Argument(..., help="Scenario file")) -> None:
    """Run a scenario with a full trace and exit 2 if any of `run_checks` fails."""
    cfg, _ = _load(scenario)
    cfg = cfg.model_copy(update={"trace_kinds": None, "trace_subjects": None})
    trace, _ = run_scenario(cfg)
    results = run_checks(cfg, trace)

    table = Table(title=f"Checks for {scenario}")
    table.add_column("criterion")
    table.add_column("result")
    table.add_column("detail")
    for result in results:
        table.add_row(result.criterion, "PASS" if result.passed else "FAIL", result.detail)
    console.print(table)

    failed = [result for result in results if not result.passed]
    for result in failed:
        logger.error(f"Criterion '{result.criterion}' violated: {result.detail}")
    if failed:
        raise typer.Exit(EXIT_CHECK_FAILED)
    compromised = compromised_subjects(trace, cfg.params.theta)
    logger.info(f"All {len(results)} criteria hold for {len(compromised)} compromises")


if __name__ == "__main__":
    app()
