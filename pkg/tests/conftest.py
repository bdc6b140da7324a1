from typing import List

import pytest

from agents.suspicion import AgentProfile
from gossip.core import GossipList, GossipPacket, ProtocolParams, SuspicionVector
from gossip.node import NodeState, init_node, seed_view
from simnet.scenario import ScenarioConfig

# Node A, B, C, D of the four-node walkthrough
A, B, C, D = 0, 1, 2, 3

WALKTHROUGH_AGES = {
    A: [0, 10, 13, 10],
    B: [12, 0, 15, 2],
    C: [20, 2, 0, 6],
}
WALKTHROUGH_VALUES = {
    A: [3.1, 2.0, 2.3, 2.8],
    B: [3.1, 2.1, 2.4, 4.6],
    C: [3.1, 2.0, 2.3, 3.7],
}


@pytest.fixture
def params4() -> ProtocolParams:
    return ProtocolParams(n=4, fanout_x=1, cleanup_rounds=5, consensus_deadline_rounds=30, theta=4.0)


@pytest.fixture
def walkthrough_states(params4: ProtocolParams) -> List[NodeState]:
    """Nodes A, B and C in the situation of the walkthrough tables, at round 0."""
    states = []
    for node in (A, B, C):
        state = init_node(node, params4, WALKTHROUGH_VALUES[node][node])
        states.append(seed_view(state, WALKTHROUGH_AGES[node], WALKTHROUGH_VALUES[node]))
    return states


def packet(sender: int, ages: List[int], values: List[float], sent_round: int = 0) -> GossipPacket:
    return GossipPacket(
        sender=sender,
        gossip_list=GossipList.from_ages(sender, ages),
        suspicion_vector=SuspicionVector.from_values(sender, values),
        sent_round=sent_round,
    )


def constant_scenario(n: int, total_rounds: int, **kwargs) -> ScenarioConfig:
    params = kwargs.pop("params", None) or ProtocolParams(
        n=n, fanout_x=kwargs.pop("fanout_x", 1), seed=kwargs.pop("seed", 0), theta=kwargs.pop("theta", 4.0)
    )
    profiles = kwargs.pop("profiles", None) or [AgentProfile.constant(1.0)] * n
    return ScenarioConfig(params=params, profiles=profiles, total_rounds=total_rounds, **kwargs)
