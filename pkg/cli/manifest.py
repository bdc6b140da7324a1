import hashlib
from datetime import datetime
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, ConfigDict

from simnet.settings import sim_settings


class RunManifest(BaseModel):
    """Provenance of one run, written next to its trace."""

    model_config = ConfigDict(frozen=True)

    config_sha256: str
    seed: int
    version: str
    started_at: datetime
    finished_at: datetime
    outputs: List[str]

    def matches(self, config_bytes: bytes) -> bool:
        return self.config_sha256 == config_checksum(config_bytes)


def config_checksum(config_bytes: bytes) -> str:
    return hashlib.sha256(config_bytes).hexdigest()


def build_manifest(
    config_bytes: bytes, seed: int, started_at: datetime, finished_at: datetime, outputs: List[Path]
) -> RunManifest:
    return RunManifest(
        config_sha256=config_checksum(config_bytes),
        seed=seed,
        version=sim_settings.version,
        started_at=started_at,
        finished_at=finished_at,
        outputs=[str(path) for path in outputs],
    )


def manifest_path(trace_path: Union[str, Path]) -> Path:
    trace_path = Path(trace_path)
    return trace_path.with_name(trace_path.name + ".manifest.json")


def write_manifest(manifest: RunManifest, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
