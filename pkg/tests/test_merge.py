import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from gossip.core import GossipList, GossipPacket, SuspicionVector
from gossip.errors import StructuralError
from gossip.merge import age_view, merge_views
from tests.conftest import A, B, C, D, WALKTHROUGH_AGES, WALKTHROUGH_VALUES, packet

PROPERTY_EXAMPLES = 1000


def own_view():
    return (
        GossipList.from_ages(A, WALKTHROUGH_AGES[A]),
        SuspicionVector.from_values(A, WALKTHROUGH_VALUES[A]),
    )


def test_age_view_increments_all_but_owner():
    aged = age_view(GossipList.from_ages(A, [0, 10, 13, 10]))
    assert aged.ages.tolist() == [0, 11, 14, 11]
    assert age_view(GossipList.fresh(A, 4)).ages.tolist() == [0, 1, 1, 1]


def test_age_view_composes():
    gl = GossipList.from_ages(2, [4, 7, 0, 1])
    for _ in range(5):
        gl = age_view(gl)
    assert gl.ages.tolist() == [9, 12, 0, 6]


def test_walkthrough_merge_from_c_then_b():
    gl, sv = own_view()
    from_c = merge_views(gl, sv, packet(C, WALKTHROUGH_AGES[C], WALKTHROUGH_VALUES[C]))
    assert from_c.suspicion_vector.values.tolist() == [3.1, 2.0, 2.3, 3.7]
    assert from_c.gossip_list.ages.tolist() == [0, 2, 0, 6]
    assert from_c.adopted == {B, C, D}
    assert from_c.changed == {D}

    from_b = merge_views(
        from_c.gossip_list, from_c.suspicion_vector, packet(B, WALKTHROUGH_AGES[B], WALKTHROUGH_VALUES[B])
    )
    assert from_b.suspicion_vector.values[D] == 4.6
    assert from_b.gossip_list.ages[D] == 2
    assert from_b.suspicion_vector.values[B] == 2.1
    assert from_b.gossip_list.ages[B] == 0
    assert from_b.suspicion_vector.values[C] == 2.3
    assert from_b.adopted == {B, D}


def test_equal_ages_keep_own_values():
    gl, sv = own_view()
    ages = [5, 0, 13, 10]
    gl = GossipList.from_ages(A, [0, 0, 13, 10])
    merged = merge_views(gl, sv, packet(B, ages, [0.0, 2.0, 0.0, 0.0]))
    assert merged.adopted == frozenset()
    assert merged.gossip_list == gl
    assert merged.suspicion_vector == sv


def test_transit_ages_the_packet():
    gl, sv = own_view()
    merged = merge_views(gl, sv, packet(B, WALKTHROUGH_AGES[B], WALKTHROUGH_VALUES[B]), transit=3)
    assert merged.gossip_list.ages.tolist() == [0, 3, 13, 5]


def test_structural_errors():
    gl, sv = own_view()
    with pytest.raises(StructuralError):
        merge_views(gl, sv, packet(A, WALKTHROUGH_AGES[A], WALKTHROUGH_VALUES[A]))
    with pytest.raises(StructuralError):
        merge_views(gl, sv, packet(B, [1, 0, 2], [1.0, 1.0, 1.0]))
    with pytest.raises(StructuralError):
        merge_views(gl, SuspicionVector.from_values(B, WALKTHROUGH_VALUES[B]), packet(C, [1, 1, 0, 1], [0.0] * 4))


@st.composite
def views(draw, n, owner):
    ages = draw(st.lists(st.integers(0, 50), min_size=n, max_size=n))
    ages[owner] = 0
    values = draw(st.lists(st.floats(0.0, 5.0, allow_nan=False), min_size=n, max_size=n))
    return GossipList.from_ages(owner, ages), SuspicionVector.from_values(owner, values)


@st.composite
def merge_case(draw, min_n=2, packets=1):
    n = draw(st.integers(min_n, 8))
    gl, sv = draw(views(n, 0))
    pkts = []
    for _ in range(packets):
        sender = draw(st.integers(1, n - 1))
        peer_gl, peer_sv = draw(views(n, sender))
        pkts.append(GossipPacket(sender=sender, gossip_list=peer_gl, suspicion_vector=peer_sv, sent_round=0))
    return gl, sv, pkts


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
@given(merge_case())
def test_freshness_is_monotone(case):
    gl, sv, (pkt,) = case
    merged = merge_views(gl, sv, pkt)
    expected = np.minimum(gl.ages, pkt.gossip_list.ages)
    expected[0] = 0
    assert merged.gossip_list.ages.tolist() == expected.tolist()
    assert (merged.gossip_list.ages <= gl.ages).all()


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
@given(merge_case())
def test_values_change_only_with_strictly_fresher_ages(case):
    gl, sv, (pkt,) = case
    merged = merge_views(gl, sv, pkt)
    for j in np.flatnonzero(merged.suspicion_vector.values != sv.values):
        assert j in merged.adopted
        assert j in merged.changed
        assert merged.gossip_list.ages[j] < gl.ages[j]
    assert merged.changed <= merged.adopted


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
@given(merge_case())
def test_merge_is_idempotent(case):
    gl, sv, (pkt,) = case
    once = merge_views(gl, sv, pkt)
    twice = merge_views(once.gossip_list, once.suspicion_vector, pkt)
    assert twice.gossip_list == once.gossip_list
    assert twice.suspicion_vector == once.suspicion_vector
    assert twice.adopted == frozenset()


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
@given(merge_case())
def test_ties_keep_own(case):
    gl, sv, (pkt,) = case
    tied = GossipPacket(
        sender=pkt.sender,
        gossip_list=GossipList(owner=pkt.sender, ages=np.where(np.arange(gl.n) == pkt.sender, 0, gl.ages)),
        suspicion_vector=pkt.suspicion_vector,
        sent_round=0,
    )
    merged = merge_views(gl, sv, tied)
    for j in range(gl.n):
        if j != pkt.sender or gl.ages[j] == 0:
            assert merged.suspicion_vector.values[j] == sv.values[j]


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None)
@given(merge_case())
def test_owner_entry_is_sovereign(case):
    gl, sv, (pkt,) = case
    merged = merge_views(gl, sv, pkt)
    assert merged.gossip_list.ages[0] == 0
    assert merged.suspicion_vector.values[0] == sv.values[0]
    if gl.ages[pkt.sender] > 0:
        assert merged.suspicion_vector.values[pkt.sender] == pkt.suspicion_vector.values[pkt.sender]


@settings(max_examples=PROPERTY_EXAMPLES, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(merge_case(min_n=3, packets=2))
def test_distinct_ages_merge_in_any_order(case):
    gl, sv, (p1, p2) = case
    assume((p1.gossip_list.ages != p2.gossip_list.ages)[1:].all())
    first = merge_views(gl, sv, p1)
    forward = merge_views(first.gossip_list, first.suspicion_vector, p2)
    second = merge_views(gl, sv, p2)
    backward = merge_views(second.gossip_list, second.suspicion_vector, p1)
    assert forward.gossip_list == backward.gossip_list
    assert forward.suspicion_vector == backward.suspicion_vector
