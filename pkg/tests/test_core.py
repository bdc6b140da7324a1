import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from gossip.core import (
    GossipList,
    GossipPacket,
    ProtocolParams,
    SuspicionMatrix,
    SuspicionVector,
    clamp_suspicion,
    validate_params,
)
from gossip.errors import InvalidParamsError, StructuralError, SuspicionRangeError


@pytest.mark.parametrize("raw, expected", [(2.8, 2.8), (-1.0, 0.0), (7.3, 5.0), (0.0, 0.0), (5.0, 5.0)])
def test_clamp_suspicion(raw, expected):
    assert clamp_suspicion(raw) == expected


@pytest.mark.parametrize("raw", [math.nan, math.inf, -math.inf])
def test_clamp_rejects_non_finite(raw):
    with pytest.raises(SuspicionRangeError):
        clamp_suspicion(raw)


@settings(max_examples=500)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_clamp_is_idempotent(x):
    once = clamp_suspicion(x)
    assert clamp_suspicion(once) == once
    assert 0.0 <= once <= 5.0


def test_valid_params_are_accepted():
    p = ProtocolParams(n=4, fanout_x=1, cleanup_rounds=5, consensus_deadline_rounds=30, theta=4.0)
    assert validate_params(p) is p


@pytest.mark.parametrize(
    "overrides, code",
    [
        ({"n": 1}, "n_too_small"),
        ({"fanout_x": 4}, "fanout_exceeds_peers"),
        ({"fanout_x": 0}, "fanout_too_small"),
        ({"cleanup_rounds": 0}, "cleanup_rounds_too_small"),
        ({"consensus_deadline_rounds": 0}, "consensus_deadline_too_small"),
        ({"theta": 0.0}, "theta_out_of_range"),
        ({"theta": 5.5}, "theta_out_of_range"),
        ({"seed": -1}, "seed_out_of_range"),
    ],
)
def test_each_violation_has_a_named_error(overrides, code):
    fields = {"n": 4, "fanout_x": 1, "cleanup_rounds": 5, "consensus_deadline_rounds": 30, "theta": 4.0, **overrides}
    with pytest.raises(InvalidParamsError) as exc_info:
        validate_params(ProtocolParams.model_construct(**fields))
    assert exc_info.value.code == code

    with pytest.raises(ValidationError, match=code):
        ProtocolParams(**fields)


def test_gossip_list_keeps_owner_fresh():
    gl = GossipList.from_ages(0, [0, 10, 13, 10])
    assert gl.n == 4
    with pytest.raises(ValidationError):
        GossipList.from_ages(1, [0, 10, 13, 10])
    with pytest.raises(ValidationError):
        GossipList.from_ages(0, [0, -1, 3, 4])


def test_vectors_are_read_only():
    sv = SuspicionVector.from_values(0, [3.1, 2.0, 2.3, 2.8])
    with pytest.raises(ValueError):
        sv.values[1] = 4.0


@pytest.mark.parametrize("values", [[0.0, 5.1], [-0.1, 1.0], [0.0, math.nan]])
def test_suspicion_vector_rejects_out_of_range(values):
    with pytest.raises(ValidationError):
        SuspicionVector.from_values(0, values)


def test_packet_belongs_to_its_sender():
    gl = GossipList.from_ages(1, [3, 0, 2])
    sv = SuspicionVector.from_values(1, [1.0, 2.0, 3.0])
    pkt = GossipPacket(sender=1, gossip_list=gl, suspicion_vector=sv, sent_round=4)
    assert pkt.gossip_list.ages[pkt.sender] == 0
    with pytest.raises(ValidationError):
        GossipPacket(sender=2, gossip_list=gl, suspicion_vector=sv, sent_round=4)


def test_own_value_update_is_clamped():
    sv = SuspicionVector(owner=2, values=np.zeros(3))
    assert sv.with_own_value(9.0).values.tolist() == [0.0, 0.0, 5.0]


def test_matrix_rows_and_ages():
    matrix = (
        SuspicionMatrix(owner=0, n=3)
        .with_row(0, np.array([1.0, 2.0, 3.0]), refreshed=2)
        .with_row(1, np.array([0.5, 0.0, 4.5]), refreshed=4)
    )
    assert matrix.refreshed == {0: 2, 1: 4}
    assert matrix.row(1).tolist() == [0.5, 0.0, 4.5]
    assert matrix.row(2).tolist() == [0.0, 0.0, 0.0]
    # Replacing a row keeps the original matrix untouched
    newer = matrix.with_row(1, np.zeros(3), refreshed=5)
    assert newer.refreshed[1] == 5 and newer.row(1).tolist() == [0.0, 0.0, 0.0]
    assert matrix.row(1).tolist() == [0.5, 0.0, 4.5]


def test_matrix_live_rows():
    matrix = SuspicionMatrix(owner=0, n=3).with_row(0, np.ones(3), refreshed=2).with_row(1, np.ones(3), refreshed=4)
    # Never-refreshed rows count only while round <= cleanup_rounds
    live, stacked = matrix.live_rows(5, cleanup_rounds=5)
    assert live == 3
    assert stacked is not None and stacked.shape == (2, 3)
    assert matrix.live_rows(6, cleanup_rounds=5)[0] == 2
    assert matrix.live_rows(9, cleanup_rounds=4)[0] == 0
    assert SuspicionMatrix(owner=0, n=3).live_rows(9, cleanup_rounds=5) == (0, None)


def test_matrix_row_length_checked():
    with pytest.raises(StructuralError):
        SuspicionMatrix(owner=0, n=3).with_row(1, np.ones(4), refreshed=0)
