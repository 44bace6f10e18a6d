"""Randomized sweeps that confirm the analytical stability regimes.

Each sweep draws seeded instances inside one regime's hypotheses, classifies
the relevant equilibria and collects any disagreement with the predicted
verdict. An empty return means the implementation conforms on that draw.

Regime names:

* ``thm1``: positive bias on strongly connected networks; both extreme
  consensus states are stable and the neutral consensus is unstable.
* ``thm2``: small negative bias with positive self-weights; the neutral
  consensus is stable.
* ``thm4``: fractional bias in (0, 1); every mixed extreme state has a
  divergent linearization and is unstable.
* ``thm5``: unit-weight complete networks; mixed extreme states with at
  least two agents per side are unstable at bias one and stable above one.
* ``thm6``: unit-weight two-island networks; the island-aligned extreme
  state is stable for bias at or above one.
* ``thm7``: unit-weight stars at bias one; every cataloged equilibrium is
  unstable except the two extreme consensus states.
"""

from __future__ import annotations

import numpy as np

from .equilibria import EquilibriumPoint, is_equilibrium, star_equilibria
from .errors import InvalidParameterError
from .network import (
    InfluenceNetwork,
    TwoIslandSpec,
    make_complete,
    make_path,
    make_random_graph,
    make_regular_ring,
    make_small_world,
    make_star,
    make_two_island,
    randomize_weights,
)
from .stability import classify

__all__ = ["REGIMES", "run_regime"]


def _with_self_weights(net: InfluenceNetwork, values) -> InfluenceNetwork:
    W = np.array(net.weights)
    np.fill_diagonal(W, values)
    return InfluenceNetwork(W, meta=net.meta)


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2 ** 32))


def _random_connected_network(rng: np.random.Generator,
                              self_weight_mode: str = "mixed") -> InfluenceNetwork:
    """Small strongly connected instance with weights drawn in [0.5, 1.5]."""
    n = int(rng.integers(3, 13))
    kind = rng.choice(["random", "ring", "complete", "path", "small_world"])
    if kind == "random":
        net = make_random_graph(n, 0.5, _seed(rng))
    elif kind == "ring":
        deg = 2 if n < 6 else int(rng.choice([2, 4]))
        net = make_regular_ring(n, deg)
    elif kind == "complete":
        net = make_complete(n)
    elif kind == "path":
        net = make_path(n)
    else:
        net = make_small_world(n, 2, 0.2, _seed(rng))
    net = randomize_weights(net, 0.5, 1.5, _seed(rng))
    if self_weight_mode == "positive":
        wii = rng.uniform(0.5, 1.5, n)
    elif self_weight_mode == "mixed":
        wii = rng.uniform(0.0, 1.0, n) * rng.integers(0, 2, n)
    else:
        raise InvalidParameterError(f"unknown self-weight mode {self_weight_mode!r}")
    return _with_self_weights(net, wii)


def _verified_point(net, b, x, family: str, **info) -> EquilibriumPoint:
    ok, res = is_equilibrium(net, b, x)
    if not ok:
        raise AssertionError(f"sweep produced a non-equilibrium {family} point ({res:.2e})")
    return EquilibriumPoint(x=np.asarray(x, float), family=family,
                            residual=res, **info)


def _expect(out: list, regime: str, trial: int, net, b, point, expected: str) -> None:
    report = classify(net, b, point)
    if report.verdict != expected:
        out.append({
            "regime": regime,
            "trial": trial,
            "family": point.family,
            "expected": expected,
            "got": report.verdict,
            "spectral_radius": report.spectral_radius,
        })


def sweep_thm1(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        net = _random_connected_network(rng, "mixed")
        b = rng.uniform(0.05, 3.0, net.n)
        n = net.n
        _expect(out, "thm1", t, net, b,
                _verified_point(net, b, np.zeros(n), "extreme_zero"), "locally_exp_stable")
        _expect(out, "thm1", t, net, b,
                _verified_point(net, b, np.ones(n), "extreme_one"), "locally_exp_stable")
        _expect(out, "thm1", t, net, b,
                _verified_point(net, b, np.full(n, 0.5), "neutral"), "unstable")
    return out


def sweep_thm2(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        net = _random_connected_network(rng, "positive")
        b = rng.uniform(-0.05, -0.005, net.n)
        point = _verified_point(net, b, np.full(net.n, 0.5), "neutral")
        _expect(out, "thm2", t, net, b, point, "locally_exp_stable")
    return out


def _mixed_mask(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        mask = rng.integers(0, 2, n).astype(bool)
        if mask.any() and not mask.all():
            return mask


def sweep_thm4(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        net = _random_connected_network(rng, "mixed")
        b = rng.uniform(0.05, 0.95, net.n)
        mask = _mixed_mask(rng, net.n)
        point = _verified_point(net, b, mask.astype(float), "polarization",
                                partition=mask)
        _expect(out, "thm4", t, net, b, point, "singular_unstable")
    return out


def sweep_thm5(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        n = int(rng.integers(4, 13))
        wii = rng.uniform(0.0, 1.0, n) * rng.integers(0, 2, n)
        net = make_complete(n, 1.0, wii)
        n_ones = int(rng.integers(2, n - 1))
        mask = np.zeros(n, dtype=bool)
        mask[rng.choice(n, n_ones, replace=False)] = True
        x = mask.astype(float)
        b_one = np.ones(n)
        _expect(out, "thm5", t, net, b_one,
                _verified_point(net, b_one, x, "polarization", partition=mask),
                "unstable")
        b_strong = rng.uniform(1.05, 3.0, n)
        _expect(out, "thm5", t, net, b_strong,
                _verified_point(net, b_strong, x, "polarization", partition=mask),
                "locally_exp_stable")
    return out


def sweep_thm6(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        m = int(rng.integers(4, 17))
        while True:
            same = int(rng.integers(2, min(7, m)))
            if (same * m) % 2 == 0:
                break
        cross = int(rng.integers(1, same))
        spec = TwoIslandSpec(n1=m, n2=m, same_deg=same, cross_deg=cross,
                             seed=_seed(rng))
        net = make_two_island(spec)
        wii = rng.uniform(0.0, 1.0, net.n) * rng.integers(0, 2, net.n)
        net = _with_self_weights(net, wii)
        mask = np.zeros(net.n, dtype=bool)
        if rng.integers(0, 2):
            mask[:m] = True
        else:
            mask[m:] = True
        b = np.ones(net.n) if rng.integers(0, 2) else rng.uniform(1.0, 2.5, net.n)
        point = _verified_point(net, b, mask.astype(float), "polarization",
                                partition=mask)
        _expect(out, "thm6", t, net, b, point, "locally_exp_stable")
    return out


def sweep_thm7(trials: int, seed) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        n = int(rng.integers(3, 12))
        wii = rng.uniform(0.5, 1.5, n)
        net = make_star(n, 1.0, wii)
        b = np.ones(n)
        _expect(out, "thm7", t, net, b,
                _verified_point(net, b, np.zeros(n), "extreme_zero"),
                "locally_exp_stable")
        _expect(out, "thm7", t, net, b,
                _verified_point(net, b, np.ones(n), "extreme_one"),
                "locally_exp_stable")
        mask = _mixed_mask(rng, n)
        _expect(out, "thm7", t, net, b,
                _verified_point(net, b, mask.astype(float), "polarization",
                                partition=mask),
                "unstable")
        leaves = _paired_leaf_values(rng, n - 1)
        half_pt = star_equilibria(n, leaf_values=leaves, self_weights=wii)
        _expect(out, "thm7", t, net, b, half_pt, "unstable")
        if n % 2 == 1:
            c = 0.5 if t % 3 == 0 else float(rng.uniform(0.05, 0.95))
            free_pt = star_equilibria(n, center_value=c, self_weights=wii)
            _expect(out, "thm7", t, net, b, free_pt, "unstable")
    return out


def _paired_leaf_values(rng: np.random.Generator, count: int) -> np.ndarray:
    """Leaf vector with entries in [0, 1] summing to count/2."""
    vals = []
    if count % 2 == 1:
        vals.append(0.5)
    for _ in range(count // 2):
        u = float(rng.uniform(0.05, 0.95))
        vals.extend([u, 1.0 - u])
    return np.asarray(vals)


REGIMES = {
    "thm1": sweep_thm1,
    "thm2": sweep_thm2,
    "thm4": sweep_thm4,
    "thm5": sweep_thm5,
    "thm6": sweep_thm6,
    "thm7": sweep_thm7,
}


def run_regime(name: str, trials: int = 100, seed=0) -> list[dict]:
    """Run one named sweep (or ``all``) and return the violations found."""
    if trials < 1:
        raise InvalidParameterError("trials must be at least 1")
    if name == "all":
        out = []
        for key in sorted(REGIMES):
            out.extend(REGIMES[key](trials, seed))
        return out
    if name not in REGIMES:
        raise InvalidParameterError(
            f"unknown regime {name!r}; pick one of {sorted(REGIMES)} or 'all'"
        )
    return REGIMES[name](trials, seed)
