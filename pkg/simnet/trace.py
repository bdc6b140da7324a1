from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from gossip.core import NodeId


class EventKind(str, Enum):
    emit = "emit"
    deliver = "deliver"
    drop = "drop"
    adopt = "adopt"
    stale_suspect = "stale_suspect"
    declare = "declare"
    compromise = "compromise"


# Kinds whose `subject` is the node the event is about rather than a packet peer
SUBJECT_KINDS = frozenset({EventKind.adopt, EventKind.stale_suspect, EventKind.declare, EventKind.compromise})


class TraceEvent(BaseModel):
    """One state change of a simulated run.

    For emit/drop `node` is the sender and `subject` the receiver; for deliver
    `node` is the receiver and `subject` the sender.
    """

    model_config = ConfigDict(frozen=True)

    round: int
    node: NodeId
    kind: EventKind
    subject: Optional[NodeId] = None
    value: Optional[float] = None
    age: Optional[int] = None

    @model_validator(mode="after")
    def check_payload(self) -> "TraceEvent":
        if self.kind == EventKind.adopt and (self.subject is None or self.value is None or self.age is None):
            raise ValueError("adopt events carry subject, value and age")
        if self.kind in SUBJECT_KINDS and self.subject is None:
            raise ValueError(f"{self.kind.value} events carry a subject")
        return self
