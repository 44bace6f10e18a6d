"""Config-driven experiment runner with reproducible seeding.

An experiment is a JSON-serializable :class:`ExperimentConfig` naming a
topology, a weight scheme, a bias profile and an initial opinion profile.
Every random component derives its own seed from the experiment seed and a
fixed component label, so changing one component never reshuffles another,
and rerunning a config byte-for-byte reproduces its outputs.

Outcome labels for a finished run:

* ``extreme_consensus_0`` / ``extreme_consensus_1``: every opinion within
  ``extreme_delta`` of the same extreme.
* ``extreme_polarization``: every opinion within ``extreme_delta`` of an
  extreme, both extremes present.
* ``clustered_mixed``: converged, but some opinion sits away from both
  extremes.
* ``non_converged``: the residual never stayed under tolerance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import Trajectory, simulate, write_trajectory_csv
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

__all__ = [
    "OUTCOME_LABELS",
    "ExperimentConfig",
    "ExperimentResult",
    "batch",
    "build_bias",
    "build_init",
    "build_network",
    "classify_outcome",
    "component_seed",
    "load_preset",
    "preset_names",
    "run_experiment",
]

OUTCOME_LABELS = (
    "extreme_consensus_0",
    "extreme_consensus_1",
    "extreme_polarization",
    "clustered_mixed",
    "non_converged",
)

# Fixed labels keep the per-component streams independent: the stream for
# component c is seeded by SeedSequence((experiment_seed, _LABELS[c])).
_COMPONENT_LABELS = {"topology": 1, "weights": 2, "bias": 3, "init": 4}


def component_seed(base_seed: int, component: str) -> int:
    if component not in _COMPONENT_LABELS:
        raise InvalidParameterError(
            f"unknown component {component!r}; expected one of "
            f"{sorted(_COMPONENT_LABELS)}"
        )
    seq = np.random.SeedSequence((int(base_seed), _COMPONENT_LABELS[component]))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one simulation experiment."""

    name: str
    topology: dict
    bias: dict
    init: dict
    weights: dict | None = None
    self_weight: float = 0.0
    max_steps: int = 20000
    tol: float = 1e-12
    window: int = 10
    extreme_delta: float = 1e-6
    record_stride: int = 1
    seed: int = 0
    comment: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise InvalidParameterError(f"unknown config keys: {sorted(extra)}")
        missing = {"name", "topology", "bias", "init"} - set(data)
        if missing:
            raise InvalidParameterError(f"config is missing keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def preset_names() -> list[str]:
    pkg = resources.files("biasdyn").joinpath("presets")
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> ExperimentConfig:
    """Load a bundled config by name, e.g. ``fig1``."""
    ref = resources.files("biasdyn").joinpath("presets", f"{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InvalidParameterError(
            f"unknown preset {name!r}; bundled presets: {preset_names()}"
        ) from None
    return ExperimentConfig.from_dict(json.loads(text))


def _component_rng(cfg: ExperimentConfig, spec: dict, component: str):
    seed = spec.get("seed")
    if seed is None:
        seed = component_seed(cfg.seed, component)
    return np.random.default_rng(int(seed)), int(seed)


def build_network(cfg: ExperimentConfig) -> InfluenceNetwork:
    topo = dict(cfg.topology)
    kind = topo.get("kind")
    seed = topo.get("seed")
    if seed is None:
        seed = component_seed(cfg.seed, "topology")
    seed = int(seed)
    sw = cfg.self_weight
    if kind in ("two_island", "two-island"):
        spec = TwoIslandSpec(
            n1=int(topo["n1"]),
            n2=int(topo["n2"]),
            same_deg=topo["same_deg"],
            cross_deg=topo["cross_deg"],
            seed=seed,
        )
        net = make_two_island(spec, self_weight=sw)
    elif kind == "complete":
        net = make_complete(int(topo["n"]), self_weight=sw)
    elif kind == "star":
        net = make_star(int(topo["n"]), self_weights=sw)
    elif kind == "path":
        net = make_path(int(topo["n"]), self_weight=sw)
    elif kind == "ring":
        net = make_regular_ring(int(topo["n"]), int(topo.get("deg", 2)),
                                self_weight=sw)
    elif kind == "random":
        net = make_random_graph(int(topo["n"]), float(topo["edge_prob"]), seed,
                                self_weight=sw)
    elif kind == "small_world":
        net = make_small_world(int(topo["n"]), int(topo.get("ring_deg", 2)),
                               float(topo.get("rewire_prob", 0.1)), seed,
                               self_weight=sw)
    else:
        raise InvalidParameterError(f"unknown topology kind {cfg.topology!r}")
    if cfg.weights is not None:
        wspec = dict(cfg.weights)
        wkind = wspec.get("kind")
        if wkind == "uniform":
            wseed = wspec.get("seed")
            if wseed is None:
                wseed = component_seed(cfg.seed, "weights")
            net = randomize_weights(net, float(wspec["low"]),
                                    float(wspec["high"]), int(wseed))
        elif wkind == "fixed":
            net = randomize_weights(net, float(wspec["value"]),
                                    float(wspec["value"]), 0)
        else:
            raise InvalidParameterError(f"unknown weight scheme {cfg.weights!r}")
    return net


def _build_profile(cfg: ExperimentConfig, spec: dict, component: str,
                   n: int) -> np.ndarray:
    kind = spec.get("kind")
    if kind == "const":
        return np.full(n, float(spec["value"]))
    if kind == "uniform":
        rng, _ = _component_rng(cfg, spec, component)
        return rng.uniform(float(spec["low"]), float(spec["high"]), n)
    if kind == "split":
        n1 = int(spec["n1"])
        if not 0 <= n1 <= n:
            raise InvalidParameterError(f"split point {n1} outside 0..{n}")
        rng, _ = _component_rng(cfg, spec, component)
        out = np.empty(n)
        out[:n1] = rng.uniform(float(spec["low1"]), float(spec["high1"]), n1)
        out[n1:] = rng.uniform(float(spec["low2"]), float(spec["high2"]), n - n1)
        return out
    if kind == "file":
        values = np.loadtxt(spec["path"], dtype=float, ndmin=1)
        if values.shape != (n,):
            raise InvalidParameterError(
                f"{spec['path']} holds {values.size} values, expected {n}"
            )
        return values
    raise InvalidParameterError(f"unknown {component} spec {spec!r}")


def build_bias(cfg: ExperimentConfig, n: int) -> np.ndarray:
    return _build_profile(cfg, dict(cfg.bias), "bias", n)


def build_init(cfg: ExperimentConfig, n: int) -> np.ndarray:
    return _build_profile(cfg, dict(cfg.init), "init", n)


def classify_outcome(x, converged: bool, extreme_delta: float = 1e-6) -> str:
    """Label a terminal opinion profile."""
    if not converged:
        return "non_converged"
    x = np.asarray(x, dtype=float)
    low = x <= extreme_delta
    high = x >= 1.0 - extreme_delta
    if low.all():
        return "extreme_consensus_0"
    if high.all():
        return "extreme_consensus_1"
    if (low | high).all():
        return "extreme_polarization"
    return "clustered_mixed"


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    network: InfluenceNetwork
    bias: np.ndarray
    init: np.ndarray
    trajectory: Trajectory
    outcome: str
    summary: dict = field(repr=False)


def _summary_dict(cfg: ExperimentConfig, traj: Trajectory, outcome: str) -> dict:
    return {
        "name": cfg.name,
        "outcome": outcome,
        "converged": bool(traj.converged),
        "steps_run": int(traj.steps_run),
        "terminal_residual": float(traj.terminal_residual),
        "final_state": [float(v) for v in traj.final_state],
        "config": cfg.to_dict(),
    }


def run_experiment(cfg: ExperimentConfig, out_dir=None,
                   write_trajectory: bool = True) -> ExperimentResult:
    """Build the instance from ``cfg``, simulate it and label the outcome."""
    net = build_network(cfg)
    bias = build_bias(cfg, net.n)
    x0 = build_init(cfg, net.n)
    traj = simulate(net, bias, x0, max_steps=cfg.max_steps, tol=cfg.tol,
                    window=cfg.window, record_stride=cfg.record_stride)
    outcome = classify_outcome(traj.final_state, traj.converged,
                               cfg.extreme_delta)
    summary = _summary_dict(cfg, traj, outcome)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if write_trajectory:
            write_trajectory_csv(traj, out_dir / "trajectory.csv")
    return ExperimentResult(config=cfg, network=net, bias=bias, init=x0,
                            trajectory=traj, outcome=outcome, summary=summary)


def batch(cfg: ExperimentConfig, n_seeds: int, out_dir=None,
          write_trajectories: bool = False) -> dict:
    """Run ``cfg`` under seeds ``cfg.seed .. cfg.seed + n_seeds - 1``.

    Returns ``{"counts": ..., "frequencies": ..., "outcomes": [...]}`` and,
    when ``out_dir`` is given, writes one summary per seed plus an aggregate
    ``frequencies.csv``.
    """
    if n_seeds < 1:
        raise InvalidParameterError("n_seeds must be at least 1")
    counts = {label: 0 for label in OUTCOME_LABELS}
    outcomes = []
    base = Path(out_dir) if out_dir is not None else None
    for k in range(n_seeds):
        sub = replace(cfg, seed=cfg.seed + k)
        sub_dir = base / f"seed_{sub.seed:05d}" if base is not None else None
        res = run_experiment(sub, out_dir=sub_dir,
                             write_trajectory=write_trajectories)
        counts[res.outcome] += 1
        outcomes.append(res.outcome)
    frequencies = {label: counts[label] / n_seeds for label in OUTCOME_LABELS}
    if base is not None:
        base.mkdir(parents=True, exist_ok=True)
        with open(base / "frequencies.csv", "w", encoding="utf-8",
                  newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "count", "frequency"])
            for label in OUTCOME_LABELS:
                writer.writerow([label, counts[label],
                                 f"{frequencies[label]:.6f}"])
    return {"counts": counts, "frequencies": frequencies, "outcomes": outcomes}
