"""Counter-based random streams keyed by (seed, purpose, index).

Every replicate or shard gets its own Philox generator whose key is derived
from the run seed and the stream coordinates, so results never depend on how
work is distributed over workers.
"""

from __future__ import annotations

import numpy as np

# stream purposes, used as the first spawn-key coordinate
REPLICATE = 1
WEIGHT_SHARD = 2
CELL_SHARD = 3
TEST = 99


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def replicate_stream(seed: int, replicate: int) -> np.random.Generator:
    return stream(seed, REPLICATE, replicate)


def shard_sizes(n: int, shard: int) -> list:
    """Split ``n`` into fixed-size shards (independent of the worker count)."""
    full, rest = divmod(n, shard)
    return [shard] * full + ([rest] if rest else [])
