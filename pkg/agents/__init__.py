from agents.operator import ProfileKind, get_available_profiles, get_profile
from agents.suspicion import AgentProfile, CompromiseEvent, ProfileSegment, agent_value

__all__ = [
    "AgentProfile",
    "CompromiseEvent",
    "ProfileKind",
    "ProfileSegment",
    "agent_value",
    "get_available_profiles",
    "get_profile",
]
