"""Deterministic round-based network simulator.

Round r proceeds as:
  1. compromise events taking effect at r are traced (those at round 0 when
     the simulator is built);
  2. in node-index order every node begins the round with its agent's value,
     picks its peers and emits one packet per peer;
  3. each emitted packet is dropped (partition or loss) or queued for
     delivery `latency_rounds` later;
  4. packets due at r are delivered ordered by (send round, sender, receiver);
     push-pull replies are queued behind them;
  5. every node runs its cleanup scan and its consensus check.

Given the same `ScenarioConfig` the trace is identical, event for event.
"""

from typing import Callable, List, NamedTuple, Optional, Tuple

from agents.suspicion import AgentProfile, agent_value
from gossip.core import ExchangeMode, GossipPacket, NodeId
from gossip.node import (
    NodeState,
    absorb_packet,
    begin_round,
    build_packet,
    cleanup_scan,
    consensus_check,
    init_node,
    seed_view,
    select_peers,
)
from simnet.scenario import ScenarioConfig, validate_scenario
from simnet.streams import derive_streams
from simnet.trace import SUBJECT_KINDS, EventKind, TraceEvent
from utils.log import logger


class InFlight(NamedTuple):
    due_round: int
    sent_round: int
    sender: NodeId
    receiver: NodeId
    packet: GossipPacket


def _delivery_order(flight: InFlight) -> Tuple[int, int, int]:
    return flight.sent_round, flight.sender, flight.receiver


def effective_profiles(cfg: ScenarioConfig) -> List[AgentProfile]:
    """Profiles with every compromise folded in as a noiseless segment."""
    profiles = list(cfg.profiles)
    for event in sorted(cfg.compromises, key=lambda e: (e.at_round, e.node, e.level)):
        profiles[event.node] = profiles[event.node].with_compromise(event)
    return profiles


class Simulator:
    def __init__(self, cfg: ScenarioConfig, observer: Optional[Callable[["Simulator"], None]] = None):
        self.cfg = validate_scenario(cfg)
        self.params = cfg.params
        self.observer = observer
        self.streams = derive_streams(cfg.params.seed)
        self.profiles = effective_profiles(cfg)
        self.round = 0
        self.trace: List[TraceEvent] = []
        self.in_flight: List[InFlight] = []
        self.states: List[NodeState] = [
            init_node(i, self.params, agent_value(self.profiles[i], 0, self.streams.agent)) for i in range(cfg.n)
        ]
        self._compromises = sorted({(e.at_round, e.node, e.level) for e in cfg.compromises})
        # Round-0 compromises already shaped the initial agent values
        self._trace_compromises()

    @property
    def finished(self) -> bool:
        return self.round >= self.cfg.total_rounds

    def record(
        self,
        node: NodeId,
        kind: EventKind,
        subject: Optional[NodeId] = None,
        value: Optional[float] = None,
        age: Optional[int] = None,
    ) -> None:
        kinds, subjects = self.cfg.trace_kinds, self.cfg.trace_subjects
        if kinds is not None and kind not in kinds:
            return
        if subjects is not None and kind in SUBJECT_KINDS and subject not in subjects:
            return
        self.trace.append(
            TraceEvent.model_construct(round=self.round, node=node, kind=kind, subject=subject, value=value, age=age)
        )

    def emit(self, packet: GossipPacket, receiver: NodeId) -> None:
        sender = packet.sender
        self.record(sender, EventKind.emit, subject=receiver)
        # Exactly one loss draw per packet, even at probability 0 or 1
        lost = self.streams.loss.random() < self.cfg.loss_probability
        partitioned = any(p.separates(self.round, sender, receiver) for p in self.cfg.partitions)
        if lost or partitioned:
            self.record(sender, EventKind.drop, subject=receiver)
            return
        due = self.round + self.cfg.latency_rounds
        self.in_flight.append(InFlight(due, packet.sent_round, sender, receiver, packet))

    def deliver(self, packet: GossipPacket, receiver: NodeId) -> None:
        self.record(receiver, EventKind.deliver, subject=packet.sender)
        reception = absorb_packet(self.states[receiver], packet)
        state = reception.state
        self.states[receiver] = state
        for j in sorted(reception.merged.changed):
            self.record(
                receiver,
                EventKind.adopt,
                subject=j,
                value=float(state.suspicion_vector.values[j]),
                age=int(state.gossip_list.ages[j]),
            )
        if self.params.exchange_mode == ExchangeMode.push_pull and not packet.reply:
            self.emit(build_packet(state, reply=True), packet.sender)

    def _take_due(self) -> List[InFlight]:
        due = sorted((f for f in self.in_flight if f.due_round <= self.round), key=_delivery_order)
        self.in_flight = [f for f in self.in_flight if f.due_round > self.round]
        return due

    def _trace_compromises(self) -> None:
        for at_round, node, level in self._compromises:
            if at_round == self.round:
                self.record(node, EventKind.compromise, subject=node, value=level)

    def _begin_round(self) -> None:
        self._trace_compromises()
        for i, state in enumerate(self.states):
            self.states[i] = begin_round(state, agent_value(self.profiles[i], self.round, self.streams.agent))
        if self.round == 1:
            for node, view in sorted(self.cfg.seeded.items()):
                self.states[node] = seed_view(self.states[node], view.ages, view.values)

    def _gossip(self) -> None:
        scripted = self.cfg.schedule.get(self.round)
        if scripted is not None:
            # Forced deliveries bypass peer selection and transport, in script order
            for sender, receiver in scripted:
                self.record(sender, EventKind.emit, subject=receiver)
                self.deliver(build_packet(self.states[sender]), receiver)
        else:
            for i, state in enumerate(self.states):
                peers = select_peers(state, self.params, self.streams.peers)
                packet = build_packet(state)
                for peer in peers:
                    self.emit(packet, peer)
        due = self._take_due()
        while due:
            for flight in due:
                self.deliver(flight.packet, flight.receiver)
            due = self._take_due()

    def _scan(self) -> None:
        for i, state in enumerate(self.states):
            cleanup = cleanup_scan(state, self.params)
            for j in sorted(cleanup.entered):
                self.record(i, EventKind.stale_suspect, subject=j)
            consensus = consensus_check(cleanup.state, self.params)
            for j in sorted(consensus.entered):
                self.record(i, EventKind.declare, subject=j)
            self.states[i] = consensus.state

    def step(self) -> None:
        """Run one full round."""
        self.round += 1
        self._begin_round()
        self._gossip()
        self._scan()
        logger.debug(f"Round {self.round} done, {len(self.in_flight)} packets in flight")
        if self.observer is not None:
            self.observer(self)

    def drain(self) -> None:
        """Drop every packet still in flight so each emit is matched by a deliver or a drop."""
        if not self.in_flight:
            return
        logger.warning(f"Dropping {len(self.in_flight)} packets still in flight after round {self.round}")
        for flight in sorted(self.in_flight, key=_delivery_order):
            self.record(flight.sender, EventKind.drop, subject=flight.receiver)
        self.in_flight = []

    def run(self) -> Tuple[List[TraceEvent], List[NodeState]]:
        logger.debug(f"Simulating {self.cfg.n} nodes for {self.cfg.total_rounds} rounds, seed {self.params.seed}")
        while not self.finished:
            self.step()
        self.drain()
        return self.trace, self.states


def run_scenario(cfg: ScenarioConfig) -> Tuple[List[TraceEvent], List[NodeState]]:
    """Run `cfg` to completion and return its trace and the final node states."""
    return Simulator(cfg).run()
