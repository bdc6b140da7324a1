"""Simulator input: protocol parameters, agent profiles and the network's faults."""

from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from agents.operator import ProfileKind, get_profile
from agents.suspicion import AgentProfile, CompromiseEvent
from gossip.core import GossipList, NodeId, ProtocolParams, SuspicionVector
from gossip.errors import ScenarioError
from simnet.trace import EventKind


class Partition(BaseModel):
    """While `from_round <= round <= to_round`, nothing crosses between the two sides."""

    model_config = ConfigDict(frozen=True)

    from_round: int = Field(ge=0)
    to_round: int = Field(ge=0)
    side_a: FrozenSet[NodeId]
    side_b: FrozenSet[NodeId]

    @model_validator(mode="after")
    def check_sides(self) -> "Partition":
        if self.to_round < self.from_round:
            raise ValueError(f"partition window [{self.from_round}, {self.to_round}] is empty")
        if self.side_a & self.side_b:
            raise ValueError(f"partition sides overlap on {sorted(self.side_a & self.side_b)}")
        return self

    def separates(self, round: int, a: NodeId, b: NodeId) -> bool:
        if not (self.from_round <= round <= self.to_round):
            return False
        return (a in self.side_a and b in self.side_b) or (a in self.side_b and b in self.side_a)


class SeededView(BaseModel):
    """Gossip list and suspicion vector a node is forced into after round 1 begins."""

    model_config = ConfigDict(frozen=True)

    ages: List[int]
    values: List[float]


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: ProtocolParams
    profiles: List[AgentProfile]
    compromises: List[CompromiseEvent] = Field(default_factory=list)
    loss_probability: float = Field(default=0.0, ge=0.0, le=1.0)
    latency_rounds: int = Field(default=0, ge=0)
    partitions: List[Partition] = Field(default_factory=list)
    total_rounds: int = Field(ge=1)
    # Forced views and per-round scripted (sender, receiver) deliveries
    seeded: Dict[NodeId, SeededView] = Field(default_factory=dict)
    schedule: Dict[int, List[Tuple[NodeId, NodeId]]] = Field(default_factory=dict)
    # Trace filters. None records everything.
    trace_kinds: Optional[FrozenSet[EventKind]] = None
    trace_subjects: Optional[FrozenSet[NodeId]] = None

    @model_validator(mode="after")
    def check_scenario(self) -> "ScenarioConfig":
        return validate_scenario(self)

    @property
    def n(self) -> int:
        return self.params.n


def validate_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    n = cfg.params.n

    def check_node(node: NodeId, what: str) -> None:
        if not (0 <= node < n):
            raise ScenarioError(f"{what} refers to node {node}, outside [0, {n})")

    if len(cfg.profiles) != n:
        raise ScenarioError(f"profiles cover {len(cfg.profiles)} nodes, expected {n}")
    for event in cfg.compromises:
        check_node(event.node, "compromise")
    for partition in cfg.partitions:
        if partition.to_round > cfg.total_rounds:
            raise ScenarioError(f"partition window ends at {partition.to_round}, after round {cfg.total_rounds}")
        for node in partition.side_a | partition.side_b:
            check_node(node, "partition")
    for node, view in cfg.seeded.items():
        check_node(node, "seeded view")
        if len(view.ages) != n or len(view.values) != n:
            raise ScenarioError(f"seeded view of node {node} must have {n} ages and {n} values")
        try:
            GossipList.from_ages(node, view.ages)
            SuspicionVector.from_values(node, view.values)
        except ValidationError as exc:
            reason = exc.errors()[0]["msg"]
            raise ScenarioError(f"seeded view of node {node} is invalid: {reason}") from exc
    for round, deliveries in cfg.schedule.items():
        if not (1 <= round <= cfg.total_rounds):
            raise ScenarioError(f"scheduled round {round} outside [1, {cfg.total_rounds}]")
        for sender, receiver in deliveries:
            check_node(sender, "schedule")
            check_node(receiver, "schedule")
            if sender == receiver:
                raise ScenarioError(f"round {round} schedules node {sender} to gossip with itself")
    for node in cfg.trace_subjects or ():
        check_node(node, "trace_subjects")
    return cfg


def resize_scenario(
    cfg: ScenarioConfig, n: int, seed: int, default_profile: Optional[AgentProfile] = None
) -> ScenarioConfig:
    """Instantiate a scenario template for another network size and seed.

    Per-node settings for nodes beyond `n` are dropped; new nodes get
    `default_profile` (constant 1.0 when not given). Seeded views and scripted
    schedules only make sense at the template's own size and are dropped when
    the size changes.
    """
    profile = default_profile or get_profile(ProfileKind.BENIGN)
    profiles = [cfg.profiles[i] if i < cfg.n else profile for i in range(n)]
    params = ProtocolParams(
        **{**cfg.params.model_dump(), "n": n, "seed": seed, "fanout_x": min(cfg.params.fanout_x, n - 1)}
    )
    same_size = n == cfg.n
    return ScenarioConfig(
        params=params,
        profiles=profiles,
        compromises=[e for e in cfg.compromises if e.node < n],
        loss_probability=cfg.loss_probability,
        latency_rounds=cfg.latency_rounds,
        partitions=[
            Partition(
                from_round=p.from_round,
                to_round=p.to_round,
                side_a=frozenset(i for i in p.side_a if i < n),
                side_b=frozenset(i for i in p.side_b if i < n),
            )
            for p in cfg.partitions
        ],
        total_rounds=cfg.total_rounds,
        seeded=cfg.seeded if same_size else {},
        schedule=cfg.schedule if same_size else {},
        trace_kinds=cfg.trace_kinds,
        trace_subjects=frozenset(i for i in cfg.trace_subjects if i < n) if cfg.trace_subjects is not None else None,
    )
