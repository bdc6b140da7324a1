"""Freshness-based merge: per subject, keep whichever side saw the most recent information."""

from typing import FrozenSet

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from gossip.core import GossipList, GossipPacket, NodeId, SuspicionVector, read_only
from gossip.errors import StructuralError


class MergedView(BaseModel):
    """Result of a pairwise merge.

    `adopted` holds the subjects where the peer's fresher entry was taken;
    `changed` is the subset whose suspicion value actually differs.
    """

    model_config = ConfigDict(frozen=True)

    gossip_list: GossipList
    suspicion_vector: SuspicionVector
    adopted: FrozenSet[NodeId] = frozenset()
    changed: FrozenSet[NodeId] = frozenset()

    @model_validator(mode="after")
    def check_shape(self) -> "MergedView":
        if self.gossip_list.owner != self.suspicion_vector.owner:
            raise ValueError("gossip list and suspicion vector owners differ")
        if self.gossip_list.n != self.suspicion_vector.n:
            raise ValueError("gossip list and suspicion vector lengths differ")
        return self


def age_view(gl: GossipList, rounds: int = 1) -> GossipList:
    """Advance every age but the owner's by `rounds`."""
    ages = gl.ages + rounds
    ages[gl.owner] = 0
    return GossipList.model_construct(owner=gl.owner, ages=read_only(ages))


def merge_views(own_gl: GossipList, own_sv: SuspicionVector, pkt: GossipPacket, transit: int = 0) -> MergedView:
    """Merge a received packet into the receiver's view.

    A peer entry wins only when strictly fresher; ties keep the receiver's
    entry and the receiver's own index is never touched. `transit` is the
    number of rounds the packet spent in flight, added to every peer age.
    """
    owner = own_gl.owner
    if own_sv.owner != owner:
        raise StructuralError(f"gossip list owner {owner} != suspicion vector owner {own_sv.owner}")
    if pkt.sender == owner:
        raise StructuralError(f"node {owner} cannot merge its own packet")
    n = own_gl.n
    if own_sv.n != n or pkt.gossip_list.n != n or pkt.suspicion_vector.n != n:
        raise StructuralError(f"vector length mismatch: own {n}, packet {pkt.gossip_list.n}")
    if transit < 0:
        raise StructuralError(f"packet from round {pkt.sent_round} arrived {-transit} rounds early")

    peer_ages = pkt.gossip_list.ages + transit
    fresher = peer_ages < own_gl.ages
    fresher[owner] = False
    # Inputs are checked above; results skip revalidation
    if not fresher.any():
        return MergedView.model_construct(gossip_list=own_gl, suspicion_vector=own_sv)

    ages = np.where(fresher, peer_ages, own_gl.ages)
    values = np.where(fresher, pkt.suspicion_vector.values, own_sv.values)
    changed = fresher & (values != own_sv.values)
    return MergedView.model_construct(
        gossip_list=GossipList.model_construct(owner=owner, ages=read_only(ages)),
        suspicion_vector=SuspicionVector.model_construct(owner=owner, values=read_only(values)),
        adopted=frozenset(np.flatnonzero(fresher).tolist()),
        changed=frozenset(np.flatnonzero(changed).tolist()),
    )
