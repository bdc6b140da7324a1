"""Run-level assertions behind `gossipnet check`."""

from typing import List, Sequence

from pydantic import BaseModel, ConfigDict

from metrics.latency import compromised_subjects, consensus_latency, false_positive_count, unmatched_emits
from simnet.scenario import ScenarioConfig
from simnet.trace import TraceEvent


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    criterion: str
    passed: bool
    detail: str


def check_conservation(trace: Sequence[TraceEvent]) -> CheckResult:
    balance = unmatched_emits(trace)
    return CheckResult(
        criterion="conservation",
        passed=balance == 0,
        detail=f"{balance} packets unaccounted for" if balance else "every emitted packet was delivered or dropped",
    )


def check_consensus_deadline(cfg: ScenarioConfig, trace: Sequence[TraceEvent]) -> CheckResult:
    deadline = cfg.params.consensus_deadline_rounds
    misses = []
    for subject in sorted(compromised_subjects(trace, cfg.params.theta)):
        latency = consensus_latency(trace, subject, cfg.n)
        if latency is None or latency > deadline:
            misses.append(f"node {subject}: {'not reached' if latency is None else f'{latency} rounds'}")
    return CheckResult(
        criterion="consensus-deadline",
        passed=not misses,
        detail=f"all compromised nodes declared within {deadline} rounds" if not misses else "; ".join(misses),
    )


def check_false_positives(cfg: ScenarioConfig, trace: Sequence[TraceEvent]) -> CheckResult:
    count = false_positive_count(trace, cfg.params.theta)
    return CheckResult(criterion="no-false-positives", passed=count == 0, detail=f"{count} false declarations")


def run_checks(cfg: ScenarioConfig, trace: Sequence[TraceEvent]) -> List[CheckResult]:
    return [
        check_conservation(trace),
        check_consensus_deadline(cfg, trace),
        check_false_positives(cfg, trace),
    ]
