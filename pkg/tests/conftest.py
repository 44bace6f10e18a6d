import numpy as np
import pytest

from biasdyn.network import (
    make_complete,
    make_path,
    make_random_graph,
    make_regular_ring,
    make_small_world,
    randomize_weights,
)


def random_connected_net(seed: int, n_low: int = 3, n_high: int = 12,
                         self_weight_high: float = 1.0,
                         allow_zero_self: bool = True):
    """Seeded strongly connected instance with weights in [0.5, 1.5]."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_low, n_high + 1))
    kind = rng.choice(["random", "ring", "complete", "path", "small_world"])
    sub = int(rng.integers(2 ** 32))
    if kind == "random":
        net = make_random_graph(n, 0.5, sub)
    elif kind == "ring":
        net = make_regular_ring(n, 2)
    elif kind == "complete":
        net = make_complete(n)
    elif kind == "path":
        net = make_path(n)
    else:
        net = make_small_world(n, 2, 0.2, sub)
    net = randomize_weights(net, 0.5, 1.5, int(rng.integers(2 ** 32)))
    wii = rng.uniform(0.0, self_weight_high, n)
    if allow_zero_self:
        wii = wii * rng.integers(0, 2, n)
    W = np.array(net.weights)
    np.fill_diagonal(W, wii)
    return type(net)(W, meta=net.meta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
