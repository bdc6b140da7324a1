from gossip.core import (
    ExchangeMode,
    GossipList,
    GossipPacket,
    NodeId,
    ProtocolParams,
    SuspicionMatrix,
    SuspicionVector,
    clamp_suspicion,
    validate_params,
)
from gossip.merge import MergedView, age_view, merge_views
from gossip.node import (
    Classification,
    NodeClassification,
    NodeState,
    begin_round,
    build_packet,
    cleanup_scan,
    consensus_check,
    init_node,
    receive_packet,
    select_peers,
)
