"""Independent randomness streams derived from one master seed.

The master seed feeds a numpy `SeedSequence` whose first three spawned
children are, in this fixed order, the peer-selection, loss and agent-noise
streams. Drawing from one stream never moves another, so changing the loss
probability leaves every peer choice untouched.
"""

from typing import NamedTuple

import numpy as np

STREAM_ORDER = ("peers", "loss", "agent")


class RandomStreams(NamedTuple):
    peers: np.random.Generator
    loss: np.random.Generator
    agent: np.random.Generator


def derive_streams(seed: int) -> RandomStreams:
    children = np.random.SeedSequence(seed).spawn(len(STREAM_ORDER))
    return RandomStreams(*(np.random.default_rng(child) for child in children))
