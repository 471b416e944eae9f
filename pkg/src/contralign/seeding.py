"""Named random substreams derived from a single integer seed."""

from __future__ import annotations

import numpy as np

NOISE, ORDER, THETA, GIBBS = 0, 1, 2, 3


def substream(seed: int, stream: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, stream, *path); order-free across callers."""
    return np.random.default_rng([seed, stream, *path])
