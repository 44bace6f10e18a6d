"""Influence networks: nonnegative weighted digraphs with per-agent self-weights.

Convention: off-diagonal entry ``weights[i, j] > 0`` means agent j influences
agent i with that weight, and the diagonal holds each agent's anchoring on its
own current opinion. Neighbor sets and weighted degrees are derived from the
off-diagonal part only, so a self-weight never counts as a neighbor.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstructionInfeasibleError,
    GenerationFailedError,
    InvalidParameterError,
)

__all__ = [
    "InfluenceNetwork",
    "TwoIslandSpec",
    "is_strongly_connected",
    "make_complete",
    "make_star",
    "make_path",
    "make_regular_ring",
    "make_random_graph",
    "make_small_world",
    "make_two_island",
    "randomize_weights",
    "read_edge_list",
    "write_edge_list",
]

_MAX_RETRIES = 1000


def _self_weight_vector(self_weight, n: int) -> np.ndarray:
    w = np.asarray(self_weight, dtype=float)
    if w.ndim == 0:
        w = np.full(n, float(w))
    if w.shape != (n,):
        raise InvalidParameterError(
            f"self weights must be a scalar or a length-{n} vector, got shape {w.shape}"
        )
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise InvalidParameterError("self weights must be finite and nonnegative")
    return w


class InfluenceNetwork:
    """Immutable weight matrix plus cached degree data.

    The constructor copies the given matrix and freezes it, so instances can be
    shared freely. ``neighbor_weights`` is the matrix with the diagonal zeroed
    and ``degrees`` holds the weighted in-degree d_i (row sums of the
    off-diagonal part).
    """

    def __init__(self, weights, meta: dict | None = None):
        W = np.array(weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InvalidParameterError("weight matrix must be square")
        if W.shape[0] < 2:
            raise InvalidParameterError("a network needs at least two agents")
        if not np.all(np.isfinite(W)):
            raise InvalidParameterError("weights must be finite")
        if np.any(W < 0.0):
            raise InvalidParameterError("weights must be nonnegative")
        W.flags.writeable = False
        self._weights = W
        off = np.array(W)
        np.fill_diagonal(off, 0.0)
        off.flags.writeable = False
        self._neighbor_weights = off
        deg = off.sum(axis=1)
        deg.flags.writeable = False
        self._degrees = deg
        self.meta = dict(meta) if meta else {}

    @property
    def n(self) -> int:
        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def self_weights(self) -> np.ndarray:
        return np.diagonal(self._weights)

    @property
    def neighbor_weights(self) -> np.ndarray:
        return self._neighbor_weights

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self._neighbor_weights[i] > 0.0)

    def __repr__(self) -> str:
        kind = self.meta.get("topology", "custom")
        return f"InfluenceNetwork(n={self.n}, topology={kind!r})"


def _reaches_all(adj: np.ndarray) -> bool:
    # adj[u, v] True means there is an edge u -> v
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        nxt = adj[frontier].any(axis=0) & ~seen
        frontier = np.flatnonzero(nxt)
        seen[frontier] = True
    return bool(seen.all())


def is_strongly_connected(net: InfluenceNetwork) -> bool:
    """True when a directed path joins every ordered pair of agents.

    Edges run from the influencing agent to the influenced one, so the edge
    set is {(j, i) : weights[i, j] > 0, i != j}.
    """
    pattern = net.neighbor_weights > 0.0
    return _reaches_all(pattern.T) and _reaches_all(pattern)


def _assemble(pattern: np.ndarray, weight: float, self_weight, meta: dict) -> InfluenceNetwork:
    if weight <= 0.0 or not np.isfinite(weight):
        raise InvalidParameterError("edge weight must be positive and finite")
    n = pattern.shape[0]
    W = np.where(pattern, weight, 0.0)
    np.fill_diagonal(W, _self_weight_vector(self_weight, n))
    return InfluenceNetwork(W, meta=meta)


def make_complete(n: int, off_diag_weight: float = 1.0, self_weight=0.0) -> InfluenceNetwork:
    """All-to-all network with a common edge weight."""
    if n < 2:
        raise InvalidParameterError("complete network needs n >= 2")
    pattern = ~np.eye(n, dtype=bool)
    return _assemble(pattern, off_diag_weight, self_weight,
                     {"topology": "complete", "n": n})


def make_star(n: int, weight: float = 1.0, self_weights=0.0) -> InfluenceNetwork:
    """Hub-and-leaves network; agent 0 is the center."""
    if n < 3:
        raise InvalidParameterError("star network needs n >= 3")
    pattern = np.zeros((n, n), dtype=bool)
    pattern[0, 1:] = True
    pattern[1:, 0] = True
    return _assemble(pattern, weight, self_weights,
                     {"topology": "star", "n": n})


def make_path(n: int, weight: float = 1.0, self_weight=0.0) -> InfluenceNetwork:
    """Chain of agents with bidirectional nearest-neighbor edges."""
    if n < 2:
        raise InvalidParameterError("path network needs n >= 2")
    pattern = np.zeros((n, n), dtype=bool)
    idx = np.arange(n - 1)
    pattern[idx, idx + 1] = True
    pattern[idx + 1, idx] = True
    return _assemble(pattern, weight, self_weight,
                     {"topology": "path", "n": n})


def make_regular_ring(n: int, deg: int, weight: float = 1.0, self_weight=0.0) -> InfluenceNetwork:
    """Ring lattice where every agent links to deg/2 neighbors on each side."""
    if n < 3:
        raise InvalidParameterError("ring network needs n >= 3")
    if deg < 2 or deg % 2 != 0 or deg >= n:
        raise InvalidParameterError("ring degree must be even, >= 2 and < n")
    pattern = np.zeros((n, n), dtype=bool)
    for k in range(1, deg // 2 + 1):
        idx = np.arange(n)
        pattern[idx, (idx + k) % n] = True
        pattern[idx, (idx - k) % n] = True
    return _assemble(pattern, weight, self_weight,
                     {"topology": "ring", "n": n, "deg": deg})


def _symmetric_pattern_from_pairs(n: int, pairs) -> np.ndarray:
    pattern = np.zeros((n, n), dtype=bool)
    for a, b in pairs:
        pattern[a, b] = True
        pattern[b, a] = True
    return pattern


def make_random_graph(n: int, edge_prob: float, seed, weight: float = 1.0,
                      self_weight=0.0, require_strongly_connected: bool = True,
                      max_retries: int = _MAX_RETRIES) -> InfluenceNetwork:
    """Undirected Erdos-Renyi edge pattern with a common weight.

    With ``require_strongly_connected`` the sample is redrawn until the pattern
    is connected, up to ``max_retries`` attempts.
    """
    if n < 2:
        raise InvalidParameterError("random network needs n >= 2")
    if not 0.0 <= edge_prob <= 1.0:
        raise InvalidParameterError("edge probability must lie in [0, 1]")
    ss = np.random.SeedSequence(seed)
    meta = {"topology": "random", "n": n, "edge_prob": edge_prob}
    for _ in range(max_retries):
        rng = np.random.default_rng(ss.spawn(1)[0])
        upper = np.triu(rng.random((n, n)) < edge_prob, k=1)
        pattern = upper | upper.T
        net = _assemble(pattern, weight, self_weight, meta)
        if not require_strongly_connected or is_strongly_connected(net):
            return net
    raise GenerationFailedError(
        f"no strongly connected sample in {max_retries} attempts (n={n}, p={edge_prob})"
    )


def make_small_world(n: int, ring_deg: int, rewire_prob: float, seed,
                     weight: float = 1.0, self_weight=0.0,
                     require_strongly_connected: bool = True,
                     max_retries: int = _MAX_RETRIES) -> InfluenceNetwork:
    """Ring lattice with each forward edge rewired independently."""
    if n < 3:
        raise InvalidParameterError("small-world network needs n >= 3")
    if ring_deg < 2 or ring_deg % 2 != 0 or ring_deg >= n:
        raise InvalidParameterError("ring degree must be even, >= 2 and < n")
    if not 0.0 <= rewire_prob <= 1.0:
        raise InvalidParameterError("rewire probability must lie in [0, 1]")
    ss = np.random.SeedSequence(seed)
    meta = {"topology": "small_world", "n": n, "ring_deg": ring_deg,
            "rewire_prob": rewire_prob}
    for _ in range(max_retries):
        rng = np.random.default_rng(ss.spawn(1)[0])
        pattern = np.zeros((n, n), dtype=bool)
        for k in range(1, ring_deg // 2 + 1):
            idx = np.arange(n)
            pattern[idx, (idx + k) % n] = True
            pattern[(idx + k) % n, idx] = True
        for k in range(1, ring_deg // 2 + 1):
            for i in range(n):
                j = (i + k) % n
                if not pattern[i, j] or rng.random() >= rewire_prob:
                    continue
                free = np.flatnonzero(~pattern[i])
                free = free[free != i]
                if free.size == 0:
                    continue
                m = int(rng.choice(free))
                pattern[i, j] = pattern[j, i] = False
                pattern[i, m] = pattern[m, i] = True
        net = _assemble(pattern, weight, self_weight, meta)
        if not require_strongly_connected or is_strongly_connected(net):
            return net
    raise GenerationFailedError(
        f"no strongly connected sample in {max_retries} attempts (n={n})"
    )


def _as_degree_pair(value, name: str) -> tuple[int, int]:
    if np.isscalar(value):
        pair = (value, value)
    else:
        pair = tuple(value)
        if len(pair) != 2:
            raise InvalidParameterError(f"{name} must be an int or a pair of ints")
    for v in pair:
        if not float(v).is_integer() or int(v) < 1:
            raise ConstructionInfeasibleError(f"{name} entries must be positive integers")
    return int(pair[0]), int(pair[1])


@dataclass(frozen=True)
class TwoIslandSpec:
    """Parameters of a two-community network with regular degrees.

    ``same_deg`` and ``cross_deg`` accept an int (both islands) or a pair
    (island 1, island 2). Cross degrees must satisfy the handshake condition
    n1 * cross_deg1 == n2 * cross_deg2.
    """

    n1: int
    n2: int
    same_deg: object
    cross_deg: object
    seed: object = 0

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise InvalidParameterError("each island needs at least two agents")
        s1, s2 = self.same_degs
        c1, c2 = self.cross_degs
        for s, m, label in ((s1, self.n1, "island 1"), (s2, self.n2, "island 2")):
            if s >= m:
                raise ConstructionInfeasibleError(
                    f"same-island degree {s} must be below the {label} size {m}"
                )
            if (s * m) % 2 != 0:
                raise ConstructionInfeasibleError(
                    f"same-island degree {s} on {m} nodes has odd stub count"
                )
        if self.n1 * c1 != self.n2 * c2:
            raise ConstructionInfeasibleError(
                f"cross-edge handshake fails: {self.n1}*{c1} != {self.n2}*{c2}"
            )
        if c1 > self.n2 or c2 > self.n1:
            raise ConstructionInfeasibleError("cross degree exceeds the opposite island size")

    @property
    def same_degs(self) -> tuple[int, int]:
        return _as_degree_pair(self.same_deg, "same_deg")

    @property
    def cross_degs(self) -> tuple[int, int]:
        return _as_degree_pair(self.cross_deg, "cross_deg")

    @property
    def n(self) -> int:
        return self.n1 + self.n2


def _pair_is_bad(pairs: np.ndarray, k: int, seen: set, self_loops_ok: bool) -> bool:
    a, b = int(pairs[k, 0]), int(pairs[k, 1])
    if not self_loops_ok and a == b:
        return True
    return (a, b) in seen


def _repair_pairing(pairs: np.ndarray, rng: np.random.Generator,
                    self_loops_ok: bool, directed_keys: bool) -> bool:
    """Remove self-loops and duplicates from a stub pairing by edge swaps.

    Swapping the second endpoints of two pairs preserves all stub counts, so
    degrees stay exact. Returns False if the repair stalls, in which case the
    caller should redraw the whole pairing.
    """
    n_pairs = pairs.shape[0]
    for _ in range(200 * n_pairs):
        seen: set = set()
        bad = []
        for k in range(n_pairs):
            a, b = int(pairs[k, 0]), int(pairs[k, 1])
            key = (a, b) if directed_keys else (min(a, b), max(a, b))
            if (not self_loops_ok and a == b) or key in seen:
                bad.append(k)
            else:
                seen.add(key)
        if not bad:
            return True
        k = bad[int(rng.integers(len(bad)))]
        j = int(rng.integers(n_pairs))
        pairs[k, 1], pairs[j, 1] = pairs[j, 1], pairs[k, 1]
    return False


def _regular_pairing(m: int, deg: int, rng: np.random.Generator,
                     max_retries: int) -> np.ndarray:
    """Edge list of a random simple deg-regular graph on m nodes."""
    stubs = np.repeat(np.arange(m), deg)
    for _ in range(max_retries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if _repair_pairing(pairs, rng, self_loops_ok=False, directed_keys=False):
            return pairs
    raise GenerationFailedError(
        f"no simple {deg}-regular pairing on {m} nodes in {max_retries} attempts"
    )


def _bipartite_pairing(n_left: int, deg_left: int, n_right: int, deg_right: int,
                       rng: np.random.Generator, max_retries: int) -> np.ndarray:
    """Edge list of a random simple biregular bipartite graph."""
    left = np.repeat(np.arange(n_left), deg_left)
    right = np.repeat(np.arange(n_right), deg_right)
    for _ in range(max_retries):
        pairs = np.column_stack([left, rng.permutation(right)])
        if _repair_pairing(pairs, rng, self_loops_ok=True, directed_keys=True):
            return pairs
    raise GenerationFailedError(
        f"no simple biregular pairing ({n_left}x{deg_left} | {n_right}x{deg_right}) "
        f"in {max_retries} attempts"
    )


def make_two_island(spec: TwoIslandSpec, self_weight=0.0,
                    require_strongly_connected: bool = True,
                    max_retries: int = _MAX_RETRIES) -> InfluenceNetwork:
    """Two regular communities joined by a regular biregular cut.

    Island nodes come first (0..n1-1), then island 2. Every island-1 node gets
    same_deg1 neighbors inside its island and cross_deg1 on the other island,
    and symmetrically for island 2. All edges carry unit weight; reweight with
    :func:`randomize_weights` if needed.
    """
    n1, n2 = spec.n1, spec.n2
    s1, s2 = spec.same_degs
    c1, c2 = spec.cross_degs
    ss = np.random.SeedSequence(spec.seed)
    meta = {"topology": "two_island", "n1": n1, "n2": n2,
            "same_deg": (s1, s2), "cross_deg": (c1, c2)}
    for _ in range(max_retries):
        k1, k2, k3 = ss.spawn(3)
        intra1 = _regular_pairing(n1, s1, np.random.default_rng(k1), max_retries)
        intra2 = _regular_pairing(n2, s2, np.random.default_rng(k2), max_retries) + n1
        cross = _bipartite_pairing(n1, c1, n2, c2, np.random.default_rng(k3), max_retries)
        cross = np.column_stack([cross[:, 0], cross[:, 1] + n1])
        pairs = np.vstack([intra1, intra2, cross])
        net = _assemble(_symmetric_pattern_from_pairs(spec.n, pairs), 1.0,
                        self_weight, meta)
        if not require_strongly_connected or is_strongly_connected(net):
            return net
    raise GenerationFailedError(
        f"no strongly connected two-island sample in {max_retries} attempts"
    )


def randomize_weights(net: InfluenceNetwork, low: float, high: float, seed) -> InfluenceNetwork:
    """Redraw every positive off-diagonal weight independently from [low, high).

    Zero entries and the diagonal are kept, so the edge pattern and the
    self-weights survive. Returns a new network.
    """
    if not (np.isfinite(low) and np.isfinite(high)) or low > high or low < 0.0:
        raise InvalidParameterError("need 0 <= low <= high and finite bounds")
    rng = np.random.default_rng(seed)
    W = np.array(net.weights)
    mask = np.array(net.neighbor_weights > 0.0)
    W[mask] = rng.uniform(low, high, int(mask.sum()))
    meta = dict(net.meta)
    meta["weights"] = ("uniform", low, high)
    return InfluenceNetwork(W, meta=meta)


def write_edge_list(net: InfluenceNetwork, path) -> None:
    """Serialize a network as plain text, one directed influence per line.

    Format: a header ``N <n>``, optional ``self <i> <w>`` lines for positive
    self-weights, then ``<i> <j> <w>`` lines meaning agent j influences agent
    i (node ids are 1-based). Weights are written with shortest round-trip
    precision, so read_edge_list reproduces the matrix bit for bit.
    """
    lines = [f"N {net.n}"]
    wii = net.self_weights
    for i in range(net.n):
        if wii[i] > 0.0:
            lines.append(f"self {i + 1} {float(wii[i])!r}")
    W = net.neighbor_weights
    for i in range(net.n):
        for j in np.flatnonzero(W[i] > 0.0):
            lines.append(f"{i + 1} {int(j) + 1} {float(W[i, j])!r}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def read_edge_list(path) -> InfluenceNetwork:
    """Parse the text format produced by :func:`write_edge_list`."""
    if hasattr(path, "read"):
        text = path.read()
        name = getattr(path, "name", "<stream>")
    else:
        name = os.fspath(path)
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("N "):
        raise InvalidParameterError(f"{name}: missing 'N <count>' header")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise InvalidParameterError(f"{name}: malformed header {lines[0]!r}") from exc
    if n < 2:
        raise InvalidParameterError(f"{name}: need at least two agents")
    W = np.zeros((n, n))
    seen = set()

    def _node(tok: str) -> int:
        v = int(tok)
        if not 1 <= v <= n:
            raise InvalidParameterError(f"{name}: node id {v} out of range 1..{n}")
        return v - 1

    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "self":
            if len(parts) != 3:
                raise InvalidParameterError(f"{name}: malformed line {ln!r}")
            i = _node(parts[1])
            if ("self", i) in seen:
                raise InvalidParameterError(f"{name}: duplicate self-weight for node {i + 1}")
            seen.add(("self", i))
            W[i, i] = float(parts[2])
        else:
            if len(parts) != 3:
                raise InvalidParameterError(f"{name}: malformed line {ln!r}")
            i, j = _node(parts[0]), _node(parts[1])
            if i == j:
                raise InvalidParameterError(f"{name}: self-loops must use 'self' lines")
            if (i, j) in seen:
                raise InvalidParameterError(f"{name}: duplicate edge {i + 1} {j + 1}")
            seen.add((i, j))
            w = float(parts[2])
            if w <= 0.0:
                raise InvalidParameterError(f"{name}: edge weights must be positive")
            W[i, j] = w
    return InfluenceNetwork(W, meta={"topology": "edge_list"})
