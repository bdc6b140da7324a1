"""Repeated dissemination trials over network sizes and seeds."""

from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from agents.suspicion import AgentProfile, CompromiseEvent
from gossip.core import ProtocolParams
from metrics.latency import dissemination_latency
from simnet.scenario import ScenarioConfig, resize_scenario
from simnet.simulator import Simulator
from simnet.trace import EventKind
from utils.log import logger

TRACKED_KINDS = frozenset({EventKind.compromise, EventKind.adopt})


class DisseminationMeasurement(BaseModel):
    """Rounds-to-full-dissemination of one injected value, per trial."""

    model_config = ConfigDict(frozen=True)

    n: int
    fanout_x: int
    loss_probability: float = 0.0
    trials: int
    rounds_to_full: List[int] = Field(default_factory=list)
    not_reached: int = 0

    @property
    def median(self) -> Optional[float]:
        return float(np.median(self.rounds_to_full)) if self.rounds_to_full else None


def dissemination_template(
    n: int,
    fanout_x: int = 1,
    loss_probability: float = 0.0,
    inject_at: int = 1,
    level: float = 5.0,
    total_rounds: int = 60,
    seed: int = 0,
) -> ScenarioConfig:
    """Benign constant network where node 0 jumps to `level` at `inject_at`."""
    return ScenarioConfig(
        params=ProtocolParams(n=n, fanout_x=fanout_x, seed=seed),
        profiles=[AgentProfile.constant(1.0)] * n,
        compromises=[CompromiseEvent(node=0, at_round=inject_at, level=level)],
        loss_probability=loss_probability,
        total_rounds=total_rounds,
    )


def dissemination_trial(cfg: ScenarioConfig) -> Optional[int]:
    """Run one trial of `cfg` and measure the spread of its first compromise."""
    if not cfg.compromises:
        raise ValueError("a dissemination trial needs a compromise event to measure")
    injected = cfg.compromises[0]
    cfg = cfg.model_copy(update={"trace_kinds": TRACKED_KINDS, "trace_subjects": frozenset({injected.node})})
    sim = Simulator(cfg)
    # The first round with every node informed is final
    while not sim.finished:
        sim.step()
        if sim.round >= injected.at_round:
            latency = dissemination_latency(sim.trace, injected.node, injected.level, cfg.n)
            if latency is not None:
                return latency
    return None


def measure_dissemination(
    template: ScenarioConfig, n: int, seeds: Iterable[int], workers: int = 1
) -> DisseminationMeasurement:
    configs = [resize_scenario(template, n, seed) for seed in seeds]
    logger.info(f"Measuring dissemination at n={n} over {len(configs)} seeds")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(dissemination_trial, configs))
    else:
        results = [dissemination_trial(cfg) for cfg in configs]
    reached = [r for r in results if r is not None]
    return DisseminationMeasurement(
        n=n,
        fanout_x=configs[0].params.fanout_x,
        loss_probability=template.loss_probability,
        trials=len(configs),
        rounds_to_full=reached,
        not_reached=len(results) - len(reached),
    )


def sweep(
    template: ScenarioConfig, sizes: Iterable[int], seeds: int, first_seed: int = 0, workers: int = 1
) -> List[DisseminationMeasurement]:
    seed_range: Tuple[int, ...] = tuple(range(first_seed, first_seed + seeds))
    return [measure_dissemination(template, n, seed_range, workers=workers) for n in sizes]
