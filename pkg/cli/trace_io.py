"""Line-delimited trace codec.

Each line is a JSON array with fields in the fixed order
(round, node, kind, subject, value, age); missing optionals are `null`.
"""

import json
from pathlib import Path
from typing import Iterable, List, Union

from pydantic import ValidationError

from gossip.errors import TraceFormatError
from simnet.trace import TraceEvent

FIELDS = ("round", "node", "kind", "subject", "value", "age")


def encode_event(event: TraceEvent) -> str:
    record = [event.round, event.node, event.kind.value, event.subject, event.value, event.age]
    return json.dumps(record, separators=(",", ":"))


def decode_event(line: str, number: int = 1) -> TraceEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(number, f"not a JSON record: {exc.msg}")
    if not isinstance(record, list) or len(record) != len(FIELDS):
        raise TraceFormatError(number, f"expected a {len(FIELDS)}-field array {list(FIELDS)}")
    try:
        return TraceEvent(**dict(zip(FIELDS, record)))
    except ValidationError as exc:
        raise TraceFormatError(number, exc.errors()[0]["msg"])


def write_trace(trace: Iterable[TraceEvent], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for event in trace:
            f.write(encode_event(event))
            f.write("\n")
    return path


def read_trace(path: Union[str, Path]) -> List[TraceEvent]:
    trace: List[TraceEvent] = []
    with Path(path).open(encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if line.strip():
                trace.append(decode_event(line, number))
    return trace
