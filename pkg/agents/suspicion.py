"""Scripted local suspicion sources.

Each node's stand-alone agent is modelled as a piecewise profile: from a given
round on, the agent reports `base` perturbed by uniform noise of
`noise_amplitude`, clamped into [0, 5].
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from gossip.core import MAX_SUSPICION, MIN_SUSPICION, NodeId, clamp_suspicion


class ProfileSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    from_round: int = Field(ge=0)
    base: float = Field(ge=MIN_SUSPICION, le=MAX_SUSPICION)
    # Finite, and no wider than the suspicion range
    noise_amplitude: float = Field(default=0.0, ge=0.0, le=MAX_SUSPICION, allow_inf_nan=False)


class CompromiseEvent(BaseModel):
    """Node `node` starts reporting `level` from `at_round` on."""

    model_config = ConfigDict(frozen=True)

    node: NodeId = Field(ge=0)
    at_round: int = Field(ge=0)
    level: float = Field(ge=MIN_SUSPICION, le=MAX_SUSPICION)


class AgentProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments: List[ProfileSegment]

    @field_validator("segments")
    @classmethod
    def check_segments(cls, segments: List[ProfileSegment]) -> List[ProfileSegment]:
        if not segments:
            raise ValueError("a profile needs at least one segment")
        if segments[0].from_round != 0:
            raise ValueError("the first segment must start at round 0")
        rounds = [segment.from_round for segment in segments]
        if rounds != sorted(set(rounds)):
            raise ValueError("segments must be strictly increasing in from_round")
        return segments

    @classmethod
    def constant(cls, base: float, noise_amplitude: float = 0.0) -> "AgentProfile":
        return cls(segments=[ProfileSegment(from_round=0, base=base, noise_amplitude=noise_amplitude)])

    def segment_at(self, round: int) -> ProfileSegment:
        current = self.segments[0]
        for segment in self.segments:
            if segment.from_round > round:
                break
            current = segment
        return current

    def with_compromise(self, event: CompromiseEvent) -> "AgentProfile":
        """Append the compromise as a noiseless segment, replacing one at the same round."""
        kept = [segment for segment in self.segments if segment.from_round != event.at_round]
        kept.append(ProfileSegment(from_round=event.at_round, base=event.level))
        return AgentProfile(segments=sorted(kept, key=lambda segment: segment.from_round))


def agent_value(profile: AgentProfile, round: int, rng: np.random.Generator) -> float:
    """The agent's output for `round`. Noiseless segments never touch `rng`."""
    if round < 0:
        raise ValueError(f"round must be >= 0, got {round}")
    segment = profile.segment_at(round)
    if segment.noise_amplitude == 0.0:
        return segment.base
    u = rng.uniform(-segment.noise_amplitude, segment.noise_amplitude)
    return clamp_suspicion(segment.base + u)
