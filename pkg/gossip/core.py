"""Domain types, parameter validation and value-range rules of the protocol.

Vectors are numpy arrays frozen at construction; every model is immutable so
states and packets can be shared freely between nodes and threads.
"""

import math
from enum import Enum
from typing import Any, Dict, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from gossip.errors import InvalidParamsError, StructuralError, SuspicionRangeError

MIN_SUSPICION = 0.0
MAX_SUSPICION = 5.0

NodeId = int


def clamp_suspicion(raw: float) -> float:
    """Clamp a raw agent output into [0, 5]. Rejects NaN and infinities."""
    if not math.isfinite(raw):
        raise SuspicionRangeError(f"suspicion value must be finite, got {raw!r}")
    return min(MAX_SUSPICION, max(MIN_SUSPICION, float(raw)))


def read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class ExchangeMode(str, Enum):
    push = "push"
    push_pull = "push_pull"


class ProtocolParams(BaseModel):
    """Protocol parameters. Time is expressed in whole gossip rounds."""

    model_config = ConfigDict(frozen=True)

    n: int
    fanout_x: int = 1
    cleanup_rounds: int = 5
    consensus_deadline_rounds: int = 30
    theta: float = 4.0
    seed: int = 0
    exchange_mode: ExchangeMode = ExchangeMode.push

    @model_validator(mode="after")
    def check_invariants(self) -> "ProtocolParams":
        return validate_params(self)


def validate_params(p: ProtocolParams) -> ProtocolParams:
    """Return `p` unchanged if every invariant holds, else raise the named error."""
    if p.n < 2:
        raise InvalidParamsError("n_too_small", f"n must be >= 2, got {p.n}")
    if p.fanout_x < 1:
        raise InvalidParamsError("fanout_too_small", f"fanout_x must be >= 1, got {p.fanout_x}")
    if p.fanout_x > p.n - 1:
        raise InvalidParamsError("fanout_exceeds_peers", f"fanout_x={p.fanout_x} exceeds the {p.n - 1} peers")
    if p.cleanup_rounds < 1:
        raise InvalidParamsError("cleanup_rounds_too_small", f"cleanup_rounds must be >= 1, got {p.cleanup_rounds}")
    if p.consensus_deadline_rounds < 1:
        raise InvalidParamsError(
            "consensus_deadline_too_small",
            f"consensus_deadline_rounds must be >= 1, got {p.consensus_deadline_rounds}",
        )
    if not (MIN_SUSPICION < p.theta <= MAX_SUSPICION):
        raise InvalidParamsError("theta_out_of_range", f"theta must be in (0, 5], got {p.theta}")
    if not (0 <= p.seed < 2**64):
        raise InvalidParamsError("seed_out_of_range", f"seed must fit in 64 bits, got {p.seed}")
    return p


class _Vector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    owner: NodeId

    @property
    def n(self) -> int:
        return len(self._array())

    def _array(self) -> np.ndarray:
        raise NotImplementedError

    def _check_owner(self) -> None:
        if not (0 <= self.owner < self.n):
            raise StructuralError(f"owner {self.owner} outside [0, {self.n})")


class GossipList(_Vector):
    """Per-node freshness ages: rounds since information about each node originated."""

    ages: np.ndarray

    @field_validator("ages", mode="before")
    @classmethod
    def as_age_array(cls, value: Any) -> np.ndarray:
        ages = np.array(value, dtype=np.int64)
        if ages.ndim != 1:
            raise ValueError("ages must be a vector")
        if (ages < 0).any():
            raise ValueError("ages must be non-negative")
        return read_only(ages)

    @model_validator(mode="after")
    def check_diagonal(self) -> "GossipList":
        self._check_owner()
        if self.ages[self.owner] != 0:
            raise ValueError(f"ages[{self.owner}] must be 0 for the owner")
        return self

    def _array(self) -> np.ndarray:
        return self.ages

    @classmethod
    def fresh(cls, owner: NodeId, n: int) -> "GossipList":
        return cls(owner=owner, ages=np.zeros(n, dtype=np.int64))

    @classmethod
    def from_ages(cls, owner: NodeId, ages: Iterable[int]) -> "GossipList":
        return cls(owner=owner, ages=list(ages))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GossipList) and self.owner == other.owner and np.array_equal(self.ages, other.ages)


class SuspicionVector(_Vector):
    """Latest known suspicion value for every node; the owner's entry comes from its own agent."""

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def as_value_array(cls, value: Any) -> np.ndarray:
        values = np.array(value, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be a vector")
        if not np.isfinite(values).all() or (values < MIN_SUSPICION).any() or (values > MAX_SUSPICION).any():
            raise ValueError("suspicion values must lie in [0, 5]")
        return read_only(values)

    @model_validator(mode="after")
    def check_owner(self) -> "SuspicionVector":
        self._check_owner()
        return self

    def _array(self) -> np.ndarray:
        return self.values

    @classmethod
    def from_values(cls, owner: NodeId, values: Iterable[float]) -> "SuspicionVector":
        return cls(owner=owner, values=list(values))

    def with_own_value(self, value: float) -> "SuspicionVector":
        values = self.values.copy()
        values[self.owner] = clamp_suspicion(value)
        return SuspicionVector.model_construct(owner=self.owner, values=read_only(values))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SuspicionVector)
            and self.owner == other.owner
            and np.array_equal(self.values, other.values)
        )


class SuspicionMatrix(BaseModel):
    """n x n assembly of the latest suspicion vector attributed to each node.

    Stored sparsely: a row that was never refreshed is the all-zero initial row
    refreshed at round 0. `refreshed[i]` is the round row i was last refreshed,
    so its age at round r is `r - refreshed[i]`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    owner: NodeId
    n: int
    rows: Dict[NodeId, np.ndarray] = Field(default_factory=dict)
    refreshed: Dict[NodeId, int] = Field(default_factory=dict)

    def row(self, i: NodeId) -> np.ndarray:
        row = self.rows.get(i)
        return row if row is not None else np.zeros(self.n)

    def with_row(self, i: NodeId, values: np.ndarray, refreshed: int) -> "SuspicionMatrix":
        if len(values) != self.n:
            raise StructuralError(f"matrix row of length {len(values)} in a {self.n}-node matrix")
        rows = dict(self.rows)
        rows[i] = values
        stamps = dict(self.refreshed)
        stamps[i] = refreshed
        return SuspicionMatrix.model_construct(owner=self.owner, n=self.n, rows=rows, refreshed=stamps)

    def live_rows(self, round: int, cleanup_rounds: int) -> tuple[int, Optional[np.ndarray]]:
        """Count live rows (age <= cleanup_rounds) and stack the refreshed ones.

        Never-refreshed live rows are all zero and cannot vote, so only their
        count matters.
        """
        live = [i for i, stamp in self.refreshed.items() if round - stamp <= cleanup_rounds]
        count = len(live)
        if round <= cleanup_rounds:
            count += self.n - len(self.refreshed)
        stacked = np.stack([self.rows[i] for i in live]) if live else None
        return count, stacked


class GossipPacket(BaseModel):
    """Immutable snapshot of a sender's gossip list and suspicion vector."""

    model_config = ConfigDict(frozen=True)

    sender: NodeId
    gossip_list: GossipList
    suspicion_vector: SuspicionVector
    sent_round: int
    reply: bool = False

    @model_validator(mode="after")
    def check_sender(self) -> "GossipPacket":
        if self.gossip_list.owner != self.sender or self.suspicion_vector.owner != self.sender:
            raise ValueError("gossip list and suspicion vector must belong to the sender")
        if self.gossip_list.n != self.suspicion_vector.n:
            raise ValueError("gossip list and suspicion vector lengths differ")
        return self
