"""Pure trace post-processing.

Every metric here is a function of a trace alone, so it gives the same answer
on a live run and on a trace read back from disk. Latencies count rounds
inclusively: something true by the end of the injection round took 1 round.
"""

from itertools import groupby
from typing import Dict, Iterable, List, Optional, Sequence, Set

from pydantic import BaseModel, ConfigDict

from gossip.core import NodeId
from gossip.node import NodeState
from simnet.trace import EventKind, TraceEvent


def injection_round(trace: Iterable[TraceEvent], subject: NodeId, value: Optional[float] = None) -> Optional[int]:
    """Round of the first compromise event for `subject` (with `value`, if given)."""
    for event in trace:
        if event.kind == EventKind.compromise and event.subject == subject:
            if value is None or event.value == value:
                return event.round
    return None


def dissemination_latency(
    trace: Sequence[TraceEvent], subject: NodeId, injected_value: float, n: int
) -> Optional[int]:
    """Rounds from the injection until all `n` nodes hold `injected_value` for `subject`.

    A node counts as informed once it adopted `injected_value` from information
    that originated at or after the injection, or when the value it already
    held at the injection equals `injected_value` (no adopt is traced then).
    Foreign entries start at 0.0. Returns None when never reached.
    """
    start = injection_round(trace, subject, injected_value)
    if start is None:
        return None
    held: Dict[NodeId, float] = {}
    for event in trace:
        if event.round >= start:
            break
        if event.kind == EventKind.adopt and event.subject == subject and event.value is not None:
            held[event.node] = event.value
    informed = {subject} | {i for i in range(n) if held.get(i, 0.0) == injected_value}
    if len(informed) == n:
        return 1
    relevant = (e for e in trace if e.round >= start and e.kind == EventKind.adopt and e.subject == subject)
    for round, events in groupby(relevant, key=lambda e: e.round):
        for event in events:
            assert event.age is not None
            if event.value == injected_value and round - event.age >= start:
                informed.add(event.node)
            else:
                informed.discard(event.node)
        if len(informed) == n:
            return round - start + 1
    return None


def consensus_latency(trace: Sequence[TraceEvent], subject: NodeId, n: int) -> Optional[int]:
    """Rounds from `subject`'s compromise until every other node has declared it.

    Declarations from before the compromise round are false positives and do
    not count. Declarations are sticky, so a node that declared `subject`
    early never declares it again and the subject reports not reached.
    """
    start = injection_round(trace, subject)
    if start is None:
        return None
    declared: Set[NodeId] = set()
    last = start
    for event in trace:
        if event.round < start or event.kind != EventKind.declare:
            continue
        if event.subject == subject and event.node != subject:
            declared.add(event.node)
            last = max(last, event.round)
    if len(declared) < n - 1:
        return None
    return last - start + 1


def compromised_subjects(trace: Iterable[TraceEvent], theta: float) -> Set[NodeId]:
    return {
        event.node
        for event in trace
        if event.kind == EventKind.compromise and event.value is not None and event.value >= theta
    }


def false_positive_count(trace: Sequence[TraceEvent], theta: float) -> int:
    """Declare events about subjects that were never compromised at or above theta."""
    compromised = compromised_subjects(trace, theta)
    return sum(1 for e in trace if e.kind == EventKind.declare and e.subject not in compromised)


def unmatched_emits(trace: Iterable[TraceEvent]) -> int:
    """Emits minus (delivers + drops); zero when every packet was accounted for."""
    balance = 0
    for event in trace:
        if event.kind == EventKind.emit:
            balance += 1
        elif event.kind in (EventKind.deliver, EventKind.drop):
            balance -= 1
    return balance


class ConvergenceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    identical_vectors: bool
    last_adopt_round: Optional[int]
    quiet_rounds: int
    converged: bool


def convergence_report(
    final_states: List[NodeState], trace: Sequence[TraceEvent], total_rounds: int, quiet_window: int = 20
) -> ConvergenceReport:
    """All suspicion vectors identical and no adopt event during the last `quiet_window` rounds."""
    first = final_states[0].suspicion_vector.values
    identical = all((state.suspicion_vector.values == first).all() for state in final_states)
    adopt_rounds = [e.round for e in trace if e.kind == EventKind.adopt]
    last_adopt = max(adopt_rounds) if adopt_rounds else None
    quiet = total_rounds - (last_adopt or 0)
    return ConvergenceReport(
        identical_vectors=identical,
        last_adopt_round=last_adopt,
        quiet_rounds=quiet,
        converged=identical and quiet >= quiet_window,
    )
