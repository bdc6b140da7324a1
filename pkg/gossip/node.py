"""Per-node protocol state machine.

Every operation is a pure transformation: it takes a `NodeState` and returns a
new one. Nodes interact only through immutable `GossipPacket`s.
"""

from enum import IntEnum
from typing import FrozenSet, Iterable, List

import numpy as np
from pydantic import BaseModel, ConfigDict

from gossip.core import (
    GossipList,
    GossipPacket,
    NodeId,
    ProtocolParams,
    SuspicionMatrix,
    SuspicionVector,
    clamp_suspicion,
    read_only,
)
from gossip.errors import StructuralError
from gossip.merge import MergedView, age_view, merge_views


class Classification(IntEnum):
    HEALTHY = 0
    STALE_SUSPECTED = 1
    DECLARED_COMPROMISED = 2


class NodeClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Classification
    since: int


class NodeState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: NodeId
    round: int
    gossip_list: GossipList
    suspicion_vector: SuspicionVector
    matrix: SuspicionMatrix
    # Classification code and entry round per subject, see `Classification`
    status: np.ndarray
    status_since: np.ndarray

    @property
    def n(self) -> int:
        return self.gossip_list.n

    def classification(self, j: NodeId) -> NodeClassification:
        return NodeClassification(kind=Classification(int(self.status[j])), since=int(self.status_since[j]))

    def classifications(self) -> List[NodeClassification]:
        return [self.classification(j) for j in range(self.n)]

    def declared(self) -> FrozenSet[NodeId]:
        return frozenset(np.flatnonzero(self.status == Classification.DECLARED_COMPROMISED).tolist())


class Reception(BaseModel):
    """State after a packet was absorbed, plus the merge that produced it."""

    model_config = ConfigDict(frozen=True)

    state: NodeState
    merged: MergedView


class ScanResult(BaseModel):
    """State after a cleanup or consensus scan.

    `flagged` is the full set the scan reports, `entered` the subjects whose
    classification changed into the scanned class during this scan.
    """

    model_config = ConfigDict(frozen=True)

    state: NodeState
    flagged: FrozenSet[NodeId]
    entered: FrozenSet[NodeId]


def init_node(id: NodeId, p: ProtocolParams, agent_value: float = 0.0) -> NodeState:
    """Round-0 state: every age 0, every foreign suspicion 0.0, everyone healthy."""
    if not (0 <= id < p.n):
        raise StructuralError(f"node id {id} outside [0, {p.n})")
    values = np.zeros(p.n)
    values[id] = clamp_suspicion(agent_value)
    sv = SuspicionVector(owner=id, values=values)
    matrix = SuspicionMatrix(owner=id, n=p.n).with_row(id, sv.values, refreshed=0)
    return NodeState(
        id=id,
        round=0,
        gossip_list=GossipList.fresh(id, p.n),
        suspicion_vector=sv,
        matrix=matrix,
        status=read_only(np.zeros(p.n, dtype=np.int8)),
        status_since=read_only(np.zeros(p.n, dtype=np.int64)),
    )


def begin_round(s: NodeState, agent_value: float) -> NodeState:
    """Tick one gossip round and record the local agent's fresh output."""
    round = s.round + 1
    sv = s.suspicion_vector.with_own_value(agent_value)
    return s.model_copy(
        update={
            "round": round,
            "gossip_list": age_view(s.gossip_list),
            "suspicion_vector": sv,
            "matrix": s.matrix.with_row(s.id, sv.values, refreshed=round),
        }
    )


def select_peers(s: NodeState, p: ProtocolParams, rng: np.random.Generator) -> List[NodeId]:
    """Draw `fanout_x` distinct peers uniformly from everyone but `s.id`."""
    draws = rng.choice(s.n - 1, size=p.fanout_x, replace=False)
    return [int(k) if k < s.id else int(k) + 1 for k in draws]


def build_packet(s: NodeState, reply: bool = False) -> GossipPacket:
    return GossipPacket.model_construct(
        sender=s.id,
        gossip_list=s.gossip_list,
        suspicion_vector=s.suspicion_vector,
        sent_round=s.round,
        reply=reply,
    )


def absorb_packet(s: NodeState, pkt: GossipPacket) -> Reception:
    """Merge `pkt` into `s` and attribute its vector to the sender's matrix row."""
    if pkt.sender == s.id:
        raise StructuralError(f"node {s.id} received its own packet")
    if not (0 <= pkt.sender < s.n) or pkt.gossip_list.n != s.n:
        raise StructuralError(f"packet from {pkt.sender} does not fit a {s.n}-node network")
    transit = s.round - pkt.sent_round
    merged = merge_views(s.gossip_list, s.suspicion_vector, pkt, transit=transit)
    matrix = s.matrix
    # A late packet never replaces a row refreshed more recently
    if pkt.sender not in matrix.refreshed or matrix.refreshed[pkt.sender] <= pkt.sent_round:
        matrix = matrix.with_row(pkt.sender, pkt.suspicion_vector.values, refreshed=pkt.sent_round)
    matrix = matrix.with_row(s.id, merged.suspicion_vector.values, refreshed=s.round)
    state = s.model_copy(
        update={
            "gossip_list": merged.gossip_list,
            "suspicion_vector": merged.suspicion_vector,
            "matrix": matrix,
        }
    )
    return Reception.model_construct(state=state, merged=merged)


def receive_packet(s: NodeState, pkt: GossipPacket) -> NodeState:
    return absorb_packet(s, pkt).state


def seed_view(s: NodeState, ages: Iterable[int], values: Iterable[float]) -> NodeState:
    """Install a pre-seeded gossip list and suspicion vector, e.g. to replay a known situation."""
    gl = GossipList.from_ages(s.id, ages)
    sv = SuspicionVector.from_values(s.id, values)
    if gl.n != s.n or sv.n != s.n:
        raise StructuralError(f"seeded view has length {gl.n}/{sv.n}, expected {s.n}")
    return s.model_copy(
        update={
            "gossip_list": gl,
            "suspicion_vector": sv,
            "matrix": s.matrix.with_row(s.id, sv.values, refreshed=s.round),
        }
    )


def _reclassify(s: NodeState, status: np.ndarray) -> NodeState:
    moved = status != s.status
    since = np.where(moved, s.round, s.status_since)
    return s.model_copy(update={"status": read_only(status), "status_since": read_only(since)})


def cleanup_scan(s: NodeState, p: ProtocolParams) -> ScanResult:
    """Flag every peer whose information is older than `cleanup_rounds`.

    Flagged peers become StaleSuspected unless already declared; a stale peer
    that was refreshed since the last scan goes back to Healthy.
    """
    stale = s.gossip_list.ages > p.cleanup_rounds
    stale[s.id] = False
    declared = s.status == Classification.DECLARED_COMPROMISED
    status = s.status.copy()
    status[stale & ~declared] = Classification.STALE_SUSPECTED
    status[~stale & (s.status == Classification.STALE_SUSPECTED)] = Classification.HEALTHY
    entered = stale & ~declared & (s.status != Classification.STALE_SUSPECTED)
    return ScanResult.model_construct(
        state=_reclassify(s, status),
        flagged=frozenset(np.flatnonzero(stale).tolist()),
        entered=frozenset(np.flatnonzero(entered).tolist()),
    )


def consensus_votes(s: NodeState, p: ProtocolParams) -> tuple[int, np.ndarray]:
    """Number of live matrix rows and, per subject, how many of them reach theta."""
    live, rows = s.matrix.live_rows(s.round, p.cleanup_rounds)
    if rows is None:
        return live, np.zeros(s.n, dtype=np.int64)
    return live, (rows >= p.theta).sum(axis=0)


def consensus_check(s: NodeState, p: ProtocolParams) -> ScanResult:
    """Declare every subject a strict majority of live rows rates at or above theta."""
    live, votes = consensus_votes(s, p)
    majority = votes * 2 > live
    already = s.status == Classification.DECLARED_COMPROMISED
    status = s.status.copy()
    status[majority] = Classification.DECLARED_COMPROMISED
    return ScanResult.model_construct(
        state=_reclassify(s, status),
        flagged=frozenset(np.flatnonzero(majority | already).tolist()),
        entered=frozenset(np.flatnonzero(majority & ~already).tolist()),
    )
