from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class SimSettings(BaseSettings):
    """Runner settings that can be set using GOSSIPNET_* environment variables.

    None of these change what a scenario computes, only how runs are carried
    out and reported.

    Reference: https://docs.pydantic.dev/latest/usage/pydantic_settings/
    """

    model_config = SettingsConfigDict(env_prefix="GOSSIPNET_")

    # Artifact version recorded in run manifests
    version: str = "0.1.0"

    # Level of the shared rich logger
    log_level: str = "INFO"

    # Worker processes used by sweeps. 1 runs trials in-process.
    sweep_workers: int = Field(1, ge=1)

    # Where `run` and `sweep` write traces when no explicit path is given
    output_dir: Path = Path("runs")

    @field_validator("log_level", mode="before")
    def normalise_log_level(cls, log_level: str) -> str:
        return str(log_level).upper()


# Create SimSettings object
sim_settings = SimSettings()
