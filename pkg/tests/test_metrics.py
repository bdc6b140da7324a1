import json
from concurrent.futures import ProcessPoolExecutor

import pytest

from agents.suspicion import AgentProfile, CompromiseEvent
from gossip.core import ProtocolParams
from metrics.latency import (
    compromised_subjects,
    consensus_latency,
    convergence_report,
    dissemination_latency,
    false_positive_count,
    injection_round,
    unmatched_emits,
)
from metrics.report import growth_ratio_check, growth_table, measurements_table, summary_record
from metrics.sweep import DisseminationMeasurement, dissemination_template, dissemination_trial, sweep
from simnet.scenario import ScenarioConfig, resize_scenario
from simnet.simulator import run_scenario
from simnet.trace import EventKind, TraceEvent
from tests.conftest import constant_scenario

POOL_WORKERS = 4


def measurement(n, rounds, fanout_x=1, loss=0.0):
    return DisseminationMeasurement(
        n=n, fanout_x=fanout_x, loss_probability=loss, trials=len(rounds), rounds_to_full=rounds
    )


def consensus_scenario(n, seed, at_round=10, level=5.0, total_rounds=40, loss=0.0) -> ScenarioConfig:
    return constant_scenario(
        n,
        total_rounds,
        params=ProtocolParams(n=n, seed=seed, theta=4.0),
        loss_probability=loss,
        compromises=[CompromiseEvent(node=n // 2, at_round=at_round, level=level)],
    )


def test_measurement_median():
    assert measurement(16, [5, 7, 6, 9]).median == 6.5
    assert measurement(16, []).median is None


def test_growth_check_passes_on_logarithmic_medians():
    report = growth_ratio_check([measurement(n, [m]) for n, m in ((16, 5), (64, 7), (256, 9), (1024, 11))])
    assert report.passed, report.reasons
    assert report.increments == [2.0, 2.0, 2.0]
    assert report.span_ratio == pytest.approx(2.2)


@pytest.mark.parametrize(
    "medians, reason",
    [
        ([5, 6, 12, 30], "differ by more than"),
        ([5, 5, 6, 7], "do not grow"),
        ([1, 2, 3, 5], "not below"),
    ],
)
def test_growth_check_failures(medians, reason):
    report = growth_ratio_check([measurement(16 * 4**k, [m]) for k, m in enumerate(medians)])
    assert not report.passed
    assert any(reason in r for r in report.reasons)


def test_growth_check_needs_three_complete_sizes():
    report = growth_ratio_check([measurement(16, [5]), measurement(64, [7]), measurement(256, [])])
    assert not report.passed
    assert any("never completed" in r for r in report.reasons)
    assert any("three sizes" in r for r in report.reasons)


def test_growth_check_rejects_mixed_fanouts():
    with pytest.raises(ValueError):
        growth_ratio_check([measurement(16, [5]), measurement(64, [7], fanout_x=2)])


def test_two_node_dissemination_takes_one_round():
    assert dissemination_trial(dissemination_template(2)) == 1
    trace, _ = run_scenario(dissemination_template(2, total_rounds=3))
    assert dissemination_latency(trace, 0, 5.0, 2) == 1


def test_total_loss_never_disseminates():
    cfg = dissemination_template(4, loss_probability=1.0, total_rounds=20)
    assert dissemination_trial(cfg) is None
    trace, _ = run_scenario(cfg)
    assert dissemination_latency(trace, 0, 5.0, 4) is None


def test_dissemination_needs_an_injection():
    with pytest.raises(ValueError):
        dissemination_trial(constant_scenario(4, 10))
    trace, _ = run_scenario(constant_scenario(4, 10))
    assert injection_round(trace, 0) is None
    assert dissemination_latency(trace, 0, 5.0, 4) is None
    assert consensus_latency(trace, 0, 4) is None


def test_stale_information_does_not_count_as_informed():
    trace = [
        TraceEvent(round=3, node=0, kind=EventKind.compromise, subject=0, value=5.0),
        # Same value, but from information older than the injection
        TraceEvent(round=3, node=1, kind=EventKind.adopt, subject=0, value=5.0, age=1),
        TraceEvent(round=4, node=1, kind=EventKind.adopt, subject=0, value=5.0, age=0),
    ]
    assert dissemination_latency(trace, 0, 5.0, 2) == 2


def test_two_node_consensus_takes_one_round():
    trace, _ = run_scenario(consensus_scenario(2, seed=0, at_round=1, total_rounds=5))
    assert consensus_latency(trace, 1, 2) == 1


def test_below_theta_is_never_declared():
    trace, _ = run_scenario(consensus_scenario(16, seed=3, level=3.9))
    assert consensus_latency(trace, 8, 16) is None
    assert compromised_subjects(trace, 4.0) == set()
    assert false_positive_count(trace, 4.0) == 0


def test_round_zero_compromise_is_measured():
    trace, _ = run_scenario(consensus_scenario(2, seed=0, at_round=0, total_rounds=5))
    assert injection_round(trace, 1) == 0
    assert dissemination_latency(trace, 1, 5.0, 2) == 2
    assert consensus_latency(trace, 1, 2) == 2
    assert false_positive_count(trace, 4.0) == 0


def test_declarations_before_the_compromise_do_not_count():
    trace = [
        TraceEvent(round=2, node=0, kind=EventKind.declare, subject=2),
        TraceEvent(round=4, node=2, kind=EventKind.compromise, subject=2, value=5.0),
        TraceEvent(round=5, node=1, kind=EventKind.declare, subject=2),
    ]
    assert consensus_latency(trace, 2, 3) is None
    trace.append(TraceEvent(round=6, node=0, kind=EventKind.declare, subject=2))
    assert consensus_latency(trace, 2, 3) == 3


def test_unchanged_value_counts_as_held():
    trace = [
        TraceEvent(round=2, node=1, kind=EventKind.adopt, subject=0, value=3.0, age=0),
        TraceEvent(round=4, node=0, kind=EventKind.compromise, subject=0, value=3.0),
        TraceEvent(round=5, node=2, kind=EventKind.adopt, subject=0, value=3.0, age=0),
    ]
    assert dissemination_latency(trace, 0, 3.0, 3) == 2

    profiles = [AgentProfile.constant(0.0)] + [AgentProfile.constant(1.0)] * 3
    cfg = constant_scenario(4, 10, profiles=profiles, compromises=[CompromiseEvent(node=0, at_round=5, level=0.0)])
    trace, _ = run_scenario(cfg)
    assert not [e for e in trace if e.kind == EventKind.adopt and e.subject == 0]
    assert dissemination_latency(trace, 0, 0.0, 4) == 1


def test_false_positives():
    trace, _ = run_scenario(constant_scenario(8, 30))
    assert false_positive_count(trace, 4.0) == 0
    alarmed, _ = run_scenario(constant_scenario(8, 30, profiles=[AgentProfile.constant(4.5)] * 8))
    assert false_positive_count(alarmed, 4.0) > 0


def test_consensus_follows_dissemination():
    for seed in range(5):
        cfg = consensus_scenario(16, seed)
        trace, _ = run_scenario(cfg)
        assert unmatched_emits(trace) == 0
        spread = dissemination_latency(trace, 8, 5.0, 16)
        agreed = consensus_latency(trace, 8, 16)
        assert spread is not None and agreed is not None
        assert agreed >= spread


def test_convergence_report():
    cfg = constant_scenario(8, 80, seed=2, compromises=[CompromiseEvent(node=3, at_round=5, level=4.5)])
    trace, states = run_scenario(cfg)
    report = convergence_report(states, trace, cfg.total_rounds)
    assert report.identical_vectors
    assert report.converged
    assert report.last_adopt_round is not None and report.last_adopt_round >= 5
    assert report.quiet_rounds == 80 - report.last_adopt_round

    short = run_scenario(constant_scenario(8, 6, seed=2))
    assert not convergence_report(short[1], short[0], 6).converged


def test_sweep_and_tables():
    measurements = sweep(dissemination_template(4, total_rounds=30), sizes=[4, 8], seeds=3)
    assert [m.n for m in measurements] == [4, 8]
    assert all(m.trials == 3 and m.not_reached == 0 for m in measurements)
    assert measurements_table(measurements).row_count == 2
    report = growth_ratio_check(measurements)
    assert growth_table(report).row_count == len(report.increments)


def test_summary_record_is_a_compact_json_line():
    line = summary_record("measurement", measurement(16, [5, 6]))
    assert " " not in line
    kind, payload = json.loads(line)
    assert kind == "measurement"
    assert payload["rounds_to_full"] == [5, 6]


def consensus_outcome(seed):
    n = 32
    trace, _ = run_scenario(consensus_scenario(n, seed))
    return consensus_latency(trace, n // 2, n), false_positive_count(trace, 4.0)


def converged(seed):
    template = constant_scenario(
        32, 200, loss_probability=0.2, compromises=[CompromiseEvent(node=3, at_round=5, level=4.5)]
    )
    cfg = resize_scenario(template, 32, seed)
    cfg = cfg.model_copy(update={"trace_kinds": frozenset({EventKind.adopt})})
    trace, states = run_scenario(cfg)
    return convergence_report(states, trace, cfg.total_rounds).converged


@pytest.mark.slow
def test_dissemination_grows_logarithmically():
    measurements = sweep(dissemination_template(16), sizes=[16, 64, 256, 1024], seeds=100, workers=POOL_WORKERS)
    assert all(m.not_reached == 0 for m in measurements)
    report = growth_ratio_check(measurements)
    assert report.passed, report.reasons


@pytest.mark.slow
def test_larger_fanout_is_not_slower():
    slow, fast = (
        sweep(dissemination_template(16, fanout_x=x), sizes=[256], seeds=100, workers=POOL_WORKERS)[0] for x in (1, 3)
    )
    assert fast.median <= slow.median


@pytest.mark.slow
def test_lossy_network_converges():
    with ProcessPoolExecutor(max_workers=POOL_WORKERS) as pool:
        outcomes = list(pool.map(converged, range(100)))
    assert sum(outcomes) >= 95


@pytest.mark.slow
def test_compromise_declared_within_deadline():
    with ProcessPoolExecutor(max_workers=POOL_WORKERS) as pool:
        outcomes = list(pool.map(consensus_outcome, range(100)))
    for seed, (latency, false_positives) in enumerate(outcomes):
        assert latency is not None and latency <= 30, seed
        assert false_positives == 0, seed
