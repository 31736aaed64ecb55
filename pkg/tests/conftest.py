import numpy as np
import pytest

from selinet.model import Topology, init_head_params
from selinet.numerics import Rng

# Small layer sizes keep forward/backward tests fast; the code under
# test is size-generic.
SMALL_KW = dict(
    body_channels=6,
    aes_channels=8,
    spatial=(2, 2),
    branch_units=5,
    fuse_units=(6, 4),
    trunk_units=4,
    n_emotions=4,
    n_sentiments=3,
)

SMALL_EMOTIONS = ["e0", "e1", "e2", "e3"]
SMALL_SENTIMENTS = ["positive", "negative", "neutral"]


def small_topology(**overrides):
    kw = dict(SMALL_KW)
    kw.update(overrides)
    return Topology(**kw)


def small_params(seed=1, dtype=np.float64, **overrides):
    t = small_topology(**overrides)
    return init_head_params(
        t, seed, emotions=SMALL_EMOTIONS, sentiments=SMALL_SENTIMENTS, dtype=dtype
    )


def random_features(topology, n, seed=5, dtype=np.float64):
    rng = Rng(seed)
    body = rng.normals(n * topology.body_channels * topology.locations).reshape(
        n, topology.body_channels, *topology.spatial
    )
    aes = rng.normals(n * topology.aes_channels * topology.locations).reshape(
        n, topology.aes_channels, *topology.spatial
    )
    return body.astype(dtype), aes.astype(dtype)


@pytest.fixture
def tiny_dataset(tmp_path):
    """A small on-disk synthetic dataset (full-size feature maps)."""
    from selinet.data import synth_dataset

    return synth_dataset(tmp_path / "ds", seed=3, n_per_split=6, separability=10.0)
