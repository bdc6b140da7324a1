"""Scenario file parser.

Flat `key = value` text. Lists are comma separated, `#` starts a comment and
blocks open with a bracketed header:

    n = 4
    total_rounds = 20

    [node 3]                  # per-node settings, keyed by node index
    profile = 0:1.0:0, 10:5.0:0.2   # from_round:base[:noise] segments
    ages = 0,10,13,10         # seeded gossip list (installed after round 1 begins)
    suspicion = 3.1,2,2.3,2.8 # seeded suspicion vector

    [compromise]              # may repeat
    node = 3
    at_round = 10
    level = 5.0

    [partition]               # may repeat
    from_round = 5
    to_round = 15
    side_a = 0,1
    side_b = 2,3

    [schedule]                # round = sender>receiver, ...
    1 = 2>0, 1>0

Defaults: fanout=1, loss_probability=0, latency_rounds=0, theta=4.0,
cleanup_rounds=5, consensus_deadline_rounds=30, seed=0, exchange_mode=push,
every node on a constant 1.0 profile. `default_profile` takes either
segments or a profile kind name (benign, noisy, compromised, constant).
"""

import re
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar, Union

from pydantic import ValidationError

from agents.operator import ProfileKind, get_available_profiles, get_profile
from agents.suspicion import AgentProfile, CompromiseEvent, ProfileSegment
from gossip.core import ExchangeMode, GossipList, ProtocolParams, SuspicionVector
from gossip.errors import InvalidParamsError, ScenarioConfigError, ScenarioError
from simnet.scenario import Partition, ScenarioConfig, SeededView
from simnet.trace import EventKind

T = TypeVar("T")

TOP_LEVEL_KEYS = {
    "n",
    "total_rounds",
    "fanout",
    "cleanup_rounds",
    "consensus_deadline_rounds",
    "theta",
    "seed",
    "exchange_mode",
    "loss_probability",
    "latency_rounds",
    "default_profile",
    "trace_kinds",
    "trace_subjects",
}
NODE_KEYS = {"profile", "ages", "suspicion"}
COMPROMISE_KEYS = {"node", "at_round", "level"}
PARTITION_KEYS = {"from_round", "to_round", "side_a", "side_b"}

# Which scenario key each parameter invariant is about
PARAM_CODE_KEYS = {
    "n_too_small": "n",
    "fanout_too_small": "fanout",
    "fanout_exceeds_peers": "fanout",
    "cleanup_rounds_too_small": "cleanup_rounds",
    "consensus_deadline_too_small": "consensus_deadline_rounds",
    "theta_out_of_range": "theta",
    "seed_out_of_range": "seed",
}

SEGMENTS = "from_round:base[:noise] segments"

_HEADER = re.compile(r"^\[\s*(node\s+(?P<node>\S+)|compromise|partition|schedule)\s*\]$")

Entry = Tuple[str, int]


class _Block:
    def __init__(self, kind: str, line: int, label: Optional[str] = None):
        self.kind = kind
        self.line = line
        self.label = label
        self.entries: Dict[str, Entry] = {}


def _convert(key: str, entry: Entry, parse: Callable[[str], T], expected: str) -> T:
    raw, line = entry
    try:
        return parse(raw)
    except ValueError:
        raise ScenarioConfigError(f"expected {expected}, got '{raw}'", key=key, line=line)


def _split(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _int_list(raw: str) -> List[int]:
    return [int(item) for item in _split(raw)]


def _float_list(raw: str) -> List[float]:
    return [float(item) for item in _split(raw)]


def _segments(raw: str) -> List[ProfileSegment]:
    segments = []
    for item in _split(raw):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(item)
        noise = float(parts[2]) if len(parts) == 3 else 0.0
        segments.append(ProfileSegment(from_round=int(parts[0]), base=float(parts[1]), noise_amplitude=noise))
    return segments


def _kinds(raw: str) -> List[EventKind]:
    return [EventKind(item) for item in _split(raw)]


def _pairs(raw: str) -> List[Tuple[int, int]]:
    pairs = []
    for item in _split(raw):
        sender, _, receiver = item.partition(">")
        pairs.append((int(sender), int(receiver)))
    return pairs


def _block_reader(block: _Block, where: str) -> Callable[[str, Callable[[str], T], str], T]:
    def field(key: str, parse: Callable[[str], T], expected: str) -> T:
        return _convert(key, _require(block.entries, key, where, block.line), parse, expected)

    return field


def _lex(text: str) -> Tuple[Dict[str, Entry], List[_Block]]:
    top: Dict[str, Entry] = {}
    blocks: List[_Block] = []
    current: Optional[_Block] = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            match = _HEADER.match(line)
            if match is None:
                raise ScenarioConfigError(f"unknown block header {line}", line=number)
            kind = "node" if match.group("node") is not None else match.group(1)
            current = _Block(kind, number, match.group("node"))
            blocks.append(current)
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ScenarioConfigError(f"expected 'key = value', got '{line}'", line=number)
        target = current.entries if current is not None else top
        if key in target:
            raise ScenarioConfigError(f"duplicate key, first set on line {target[key][1]}", key=key, line=number)
        target[key] = (value, number)
    return top, blocks


def _check_keys(entries: Dict[str, Entry], allowed: set, where: str) -> None:
    for key, (_, line) in entries.items():
        if key not in allowed:
            raise ScenarioConfigError(f"unknown key in {where}, expected one of {sorted(allowed)}", key=key, line=line)


def _require(entries: Dict[str, Entry], key: str, where: str, line: int) -> Entry:
    if key not in entries:
        raise ScenarioConfigError(f"missing required key in {where}", key=key, line=line)
    return entries[key]


def _validated(
    build: Callable[[], T], entries: Dict[str, Entry], line: int, aliases: Optional[Dict[str, str]] = None
) -> T:
    """Run a model constructor and re-raise validation errors against the file's keys."""
    try:
        return build()
    except ValidationError as exc:
        error = exc.errors()[0]
        cause = error.get("ctx", {}).get("error")
        if isinstance(cause, InvalidParamsError):
            key = PARAM_CODE_KEYS.get(cause.code)
            raise ScenarioConfigError(str(cause), key=key, line=entries[key][1] if key in entries else line)
        if isinstance(cause, ScenarioError):
            raise ScenarioConfigError(str(cause), line=line)
        field = str(error["loc"][0]) if error["loc"] else None
        key = (aliases or {}).get(field, field) if field is not None else None
        where = entries[key][1] if key in entries else line
        raise ScenarioConfigError(error["msg"], key=key, line=where)


def _seeded_part(key: str, entry: Entry, size: int, n: int, build: Callable[[], object]) -> None:
    """Check one half of a seeded view and report failures against its key."""
    if size != n:
        raise ScenarioConfigError(f"expected {n} entries, got {size}", key=key, line=entry[1])
    try:
        build()
    except ValidationError as exc:
        raise ScenarioConfigError(exc.errors()[0]["msg"], key=key, line=entry[1])


def parse_scenario_text(text: str) -> ScenarioConfig:
    top, blocks = _lex(text)
    _check_keys(top, TOP_LEVEL_KEYS, "the top level")
    n = _convert("n", _require(top, "n", "the top level", 1), int, "an integer")
    total_rounds = _convert("total_rounds", _require(top, "total_rounds", "the top level", 1), int, "an integer")

    def get(key: str, parse: Callable[[str], T], expected: str, default: T) -> T:
        return _convert(key, top[key], parse, expected) if key in top else default

    def out_of_range(key: str, message: str) -> ScenarioConfigError:
        return ScenarioConfigError(message, key=key, line=top[key][1])

    loss = get("loss_probability", float, "a number", 0.0)
    if not 0.0 <= loss <= 1.0:
        raise out_of_range("loss_probability", f"must lie in [0, 1], got {loss}")
    latency = get("latency_rounds", int, "an integer", 0)
    if latency < 0:
        raise out_of_range("latency_rounds", f"must be >= 0, got {latency}")
    if total_rounds < 1:
        raise out_of_range("total_rounds", f"must be >= 1, got {total_rounds}")

    params = _validated(
        lambda: ProtocolParams(
            n=n,
            fanout_x=get("fanout", int, "an integer", 1),
            cleanup_rounds=get("cleanup_rounds", int, "an integer", 5),
            consensus_deadline_rounds=get("consensus_deadline_rounds", int, "an integer", 30),
            theta=get("theta", float, "a number", 4.0),
            seed=get("seed", int, "an integer", 0),
            exchange_mode=get("exchange_mode", ExchangeMode, "push or push_pull", ExchangeMode.push),
        ),
        top,
        1,
        aliases={"fanout_x": "fanout"},
    )

    default_profile = get_profile(ProfileKind.BENIGN)
    if "default_profile" in top and top["default_profile"][0] in get_available_profiles():
        default_profile = get_profile(ProfileKind(top["default_profile"][0]))
    elif "default_profile" in top:
        default_segments = _convert("default_profile", top["default_profile"], _segments, SEGMENTS)
        default_profile = _validated(
            lambda: AgentProfile(segments=default_segments), {"segments": top["default_profile"]}, 1
        )
    profiles: List[AgentProfile] = [default_profile] * n
    seeded: Dict[int, SeededView] = {}
    compromises: List[CompromiseEvent] = []
    partitions: List[Partition] = []
    schedule: Dict[int, List[Tuple[int, int]]] = {}
    seen_nodes: Dict[int, int] = {}

    for block in blocks:
        entries = block.entries
        if block.kind == "node":
            _check_keys(entries, NODE_KEYS, f"[node {block.label}]")
            node = _convert("node", (block.label or "", block.line), int, "a node index")
            if not 0 <= node < n:
                raise ScenarioConfigError(f"node index {node} outside [0, {n})", key="node", line=block.line)
            if node in seen_nodes:
                raise ScenarioConfigError(f"node {node} already configured on line {seen_nodes[node]}", line=block.line)
            seen_nodes[node] = block.line
            if "profile" in entries:
                segments = _convert("profile", entries["profile"], _segments, SEGMENTS)
                profiles[node] = _validated(
                    lambda: AgentProfile(segments=segments), {"segments": entries["profile"]}, block.line
                )
            if "ages" in entries or "suspicion" in entries:
                field = _block_reader(block, "a seeded [node] block")
                ages = field("ages", _int_list, "integers")
                values = field("suspicion", _float_list, "numbers")
                _seeded_part("ages", entries["ages"], len(ages), n, lambda: GossipList.from_ages(node, ages))
                _seeded_part(
                    "suspicion", entries["suspicion"], len(values), n, lambda: SuspicionVector.from_values(node, values)
                )
                seeded[node] = SeededView(ages=ages, values=values)
        elif block.kind == "compromise":
            _check_keys(entries, COMPROMISE_KEYS, "[compromise]")
            field = _block_reader(block, "[compromise]")
            node, at_round = field("node", int, "an integer"), field("at_round", int, "an integer")
            level = field("level", float, "a number")
            compromises.append(
                _validated(lambda: CompromiseEvent(node=node, at_round=at_round, level=level), entries, block.line)
            )
        elif block.kind == "partition":
            _check_keys(entries, PARTITION_KEYS, "[partition]")
            field = _block_reader(block, "[partition]")
            window = field("from_round", int, "an integer"), field("to_round", int, "an integer")
            sides = field("side_a", _int_list, "node indices"), field("side_b", _int_list, "node indices")
            partitions.append(
                _validated(
                    lambda: Partition(
                        from_round=window[0], to_round=window[1], side_a=frozenset(sides[0]), side_b=frozenset(sides[1])
                    ),
                    entries,
                    block.line,
                )
            )
        else:
            for key, entry in entries.items():
                round = _convert(key, (key, entry[1]), int, "a round number")
                schedule[round] = _convert(key, entry, _pairs, "sender>receiver pairs")

    trace_kinds = None
    if "trace_kinds" in top:
        kinds = _convert("trace_kinds", top["trace_kinds"], _kinds, "event kinds")
        trace_kinds = frozenset(kinds)
    trace_subjects = None
    if "trace_subjects" in top:
        trace_subjects = frozenset(_convert("trace_subjects", top["trace_subjects"], _int_list, "node indices"))

    return _validated(
        lambda: ScenarioConfig(
            params=params,
            profiles=profiles,
            compromises=compromises,
            loss_probability=loss,
            latency_rounds=latency,
            partitions=partitions,
            total_rounds=total_rounds,
            seeded=seeded,
            schedule=schedule,
            trace_kinds=trace_kinds,
            trace_subjects=trace_subjects,
        ),
        top,
        1,
    )


def parse_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Parse and validate the scenario file at `path`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioConfigError(f"cannot read scenario file {path}: {exc.strerror}")
    return parse_scenario_text(text)
