from enum import Enum
from typing import List, Optional

from agents.suspicion import AgentProfile, ProfileSegment


class ProfileKind(Enum):
    BENIGN = "benign"
    NOISY = "noisy"
    COMPROMISED = "compromised"
    CONSTANT = "constant"


DEFAULT_BENIGN_LEVEL = 1.0
DEFAULT_NOISE = 0.5


def get_available_profiles() -> List[str]:
    """Returns a list of all available profile kinds."""
    return [kind.value for kind in ProfileKind]


def get_profile(
    kind: ProfileKind = ProfileKind.BENIGN,
    base: Optional[float] = None,
    noise_amplitude: Optional[float] = None,
    compromised_at: int = 0,
    level: float = 5.0,
) -> AgentProfile:
    """Build a profile of a well-known shape.

    `compromised` starts benign and jumps to `level` at `compromised_at`.
    """
    benign = DEFAULT_BENIGN_LEVEL if base is None else base
    if kind == ProfileKind.NOISY:
        return AgentProfile.constant(benign, DEFAULT_NOISE if noise_amplitude is None else noise_amplitude)
    elif kind == ProfileKind.COMPROMISED:
        segments = [ProfileSegment(from_round=0, base=benign)]
        if compromised_at == 0:
            segments = []
        segments.append(ProfileSegment(from_round=compromised_at, base=level))
        return AgentProfile(segments=segments)
    elif kind == ProfileKind.CONSTANT:
        return AgentProfile.constant(benign, noise_amplitude or 0.0)
    else:
        return AgentProfile.constant(benign)
