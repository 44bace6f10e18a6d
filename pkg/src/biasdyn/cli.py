"""Command line front end.

Subcommands: ``generate``, ``simulate``, ``equilibria``, ``stability``,
``conformance``, ``experiment``. Exit status is 0 on success, 1 when a
conformance sweep reports violations, 2 on invalid input.

Vector specs (for ``--bias``, ``--init``, ``--equilibrium``) use a small
grammar::

    zeros | ones | half           constant shorthand
    const:V                       every entry V
    uniform:LO:HI:SEED            seeded uniform draw
    split:LO1:HI1:LO2:HI2:SEED:N1 first N1 entries from [LO1,HI1), rest
                                  from [LO2,HI2)
    file:PATH                     whitespace-separated numbers
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import conformance, harness
from .dynamics import simulate, write_trajectory_csv
from .equilibria import canonical_equilibria, find_equilibrium_near, is_equilibrium
from .errors import BiasDynError, InvalidParameterError
from .network import (
    TwoIslandSpec,
    is_strongly_connected,
    make_complete,
    make_path,
    make_random_graph,
    make_regular_ring,
    make_small_world,
    make_star,
    make_two_island,
    randomize_weights,
    read_edge_list,
    write_edge_list,
)
from .stability import classify

__all__ = ["main", "parse_vector_spec", "run"]

_MATRIX_PRINT_CAP = 32


def parse_vector_spec(spec: str, n: int, what: str = "vector") -> np.ndarray:
    """Resolve a CLI vector spec to a length-``n`` float array."""
    if spec == "zeros":
        return np.zeros(n)
    if spec == "ones":
        return np.ones(n)
    if spec == "half":
        return np.full(n, 0.5)
    head, _, rest = spec.partition(":")
    if head == "const":
        try:
            return np.full(n, float(rest))
        except ValueError:
            raise InvalidParameterError(f"bad {what} spec {spec!r}") from None
    if head == "uniform":
        parts = rest.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(
                f"bad {what} spec {spec!r}; expected uniform:LO:HI:SEED"
            )
        lo, hi, seed = float(parts[0]), float(parts[1]), int(parts[2])
        return np.random.default_rng(seed).uniform(lo, hi, n)
    if head == "split":
        parts = rest.split(":")
        if len(parts) != 6:
            raise InvalidParameterError(
                f"bad {what} spec {spec!r}; expected split:LO1:HI1:LO2:HI2:SEED:N1"
            )
        lo1, hi1, lo2, hi2 = (float(p) for p in parts[:4])
        seed, n1 = int(parts[4]), int(parts[5])
        rng = np.random.default_rng(seed)
        if not 0 <= n1 <= n:
            raise InvalidParameterError(f"split point {n1} outside 0..{n}")
        out = np.empty(n)
        out[:n1] = rng.uniform(lo1, hi1, n1)
        out[n1:] = rng.uniform(lo2, hi2, n - n1)
        return out
    if head == "file":
        values = np.loadtxt(rest, dtype=float, ndmin=1)
        if values.shape != (n,):
            raise InvalidParameterError(
                f"{rest} holds {values.size} values, expected {n}"
            )
        return values
    raise InvalidParameterError(f"bad {what} spec {spec!r}")


def _load_network(path: str):
    return read_edge_list(path)


def _cmd_generate(args) -> int:
    kind = args.topology
    sw = args.self_weight
    if kind == "two-island":
        for name in ("n1", "n2", "same_deg", "cross_deg"):
            if getattr(args, name) is None:
                raise InvalidParameterError(f"two-island needs --{name.replace('_', '-')}")
        spec = TwoIslandSpec(n1=args.n1, n2=args.n2, same_deg=args.same_deg,
                             cross_deg=args.cross_deg, seed=args.seed)
        net = make_two_island(spec, self_weight=sw)
    else:
        if args.n is None:
            raise InvalidParameterError(f"{kind} needs --n")
        if kind == "complete":
            net = make_complete(args.n, args.weight, sw)
        elif kind == "star":
            net = make_star(args.n, args.weight, sw)
        elif kind == "path":
            net = make_path(args.n, args.weight, sw)
        elif kind == "ring":
            net = make_regular_ring(args.n, args.ring_deg, args.weight, sw)
        elif kind == "random":
            net = make_random_graph(args.n, args.edge_prob, args.seed,
                                    args.weight, sw)
        elif kind == "small-world":
            net = make_small_world(args.n, args.ring_deg, args.rewire_prob,
                                   args.seed, args.weight, sw)
        else:
            raise InvalidParameterError(f"unknown topology {kind!r}")
    if args.randomize_low is not None or args.randomize_high is not None:
        if args.randomize_low is None or args.randomize_high is None:
            raise InvalidParameterError(
                "--randomize-low and --randomize-high go together"
            )
        net = randomize_weights(net, args.randomize_low, args.randomize_high,
                                args.weights_seed)
    write_edge_list(net, args.out)
    print(f"wrote {args.out}: n={net.n}, "
          f"strongly_connected={is_strongly_connected(net)}")
    return 0


def _cmd_simulate(args) -> int:
    net = _load_network(args.graph)
    bias = parse_vector_spec(args.bias, net.n, "bias")
    x0 = parse_vector_spec(args.init, net.n, "init")
    traj = simulate(net, bias, x0, max_steps=args.steps, tol=args.tol,
                    window=args.window, record_stride=args.stride)
    if args.out is not None:
        write_trajectory_csv(traj, args.out)
    x = traj.final_state
    print(f"converged={traj.converged} steps={traj.steps_run} "
          f"residual={traj.terminal_residual:.3e} "
          f"min={x.min():.6f} max={x.max():.6f}")
    return 0


def _point_payload(point) -> dict:
    payload = {
        "family": point.family,
        "residual": float(point.residual),
        "x": [float(v) for v in point.x],
    }
    if point.partition is not None:
        payload["ones"] = [int(i) for i in np.flatnonzero(point.partition)]
    return payload


def _cmd_equilibria(args) -> int:
    net = _load_network(args.graph)
    bias = parse_vector_spec(args.bias, net.n, "bias")
    if args.near is not None:
        guess = parse_vector_spec(args.near, net.n, "guess")
        search = find_equilibrium_near(net, bias, guess, tol=args.tol)
        payload = {
            "mode": "near",
            "found": search.found,
            "iterations": search.iterations,
            "best_residual": float(search.best_residual),
        }
        if search.point is not None:
            payload["point"] = _point_payload(search.point)
        points = [search.point] if search.point is not None else []
    else:
        points = canonical_equilibria(net, bias, tol=args.tol)
        payload = {
            "mode": "catalog",
            "count": len(points),
            "points": [_point_payload(p) for p in points],
        }
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.near is not None:
        print(f"found={payload['found']} best_residual={payload['best_residual']:.3e}")
    else:
        families = sorted({p.family for p in points})
        print(f"count={len(points)} families={','.join(families)}")
    return 0


def _cmd_stability(args) -> int:
    net = _load_network(args.graph)
    bias = parse_vector_spec(args.bias, net.n, "bias")
    x = parse_vector_spec(args.equilibrium, net.n, "equilibrium")
    ok, residual = is_equilibrium(net, bias, x, tol=args.tol)
    if not ok:
        print(f"not an equilibrium: residual={residual:.3e} exceeds "
              f"tol={args.tol:.1e}", file=sys.stderr)
        return 2
    search = find_equilibrium_near(net, bias, x, tol=args.tol, max_iter=1)
    point = search.point
    report = classify(net, bias, point)
    payload = {
        "family": point.family,
        "residual": float(point.residual),
        "verdict": report.verdict,
        "spectral_radius": ("infinite" if not np.isfinite(report.spectral_radius)
                            else float(report.spectral_radius)),
        "theorem_tag": report.theorem_tag,
        "singular_rows": [int(i) for i in report.jacobian.singular_rows],
        "spectrum": None,
    }
    J = report.jacobian.matrix
    if J is not None:
        eigs = np.linalg.eigvals(J)
        order = np.argsort(-np.abs(eigs))
        payload["spectrum"] = [[float(v.real), float(v.imag)]
                               for v in eigs[order]]
        if net.n <= _MATRIX_PRINT_CAP:
            payload["jacobian"] = [[float(v) for v in row] for row in J]
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    rho = payload["spectral_radius"]
    rho_text = rho if isinstance(rho, str) else f"{rho:.9f}"
    tag = report.theorem_tag or "-"
    print(f"verdict={report.verdict} rho={rho_text} tag={tag}")
    return 0


def _cmd_conformance(args) -> int:
    violations = conformance.run_regime(args.regime, trials=args.trials,
                                        seed=args.seed)
    names = (sorted(conformance.REGIMES) if args.regime == "all"
             else [args.regime])
    for name in names:
        bad = [v for v in violations if v["regime"] == name]
        print(f"{name}: trials={args.trials} violations={len(bad)}")
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"trials": args.trials, "seed": args.seed,
                       "violations": violations}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if violations:
        for v in violations[:10]:
            print(f"  {v['regime']} trial {v['trial']}: {v['family']} "
                  f"expected {v['expected']}, got {v['got']}", file=sys.stderr)
        return 1
    return 0


def _cmd_experiment(args) -> int:
    if args.preset is not None:
        cfg = harness.load_preset(args.preset)
    else:
        cfg = harness.ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg = harness.ExperimentConfig.from_dict({**cfg.to_dict(),
                                                  "seed": args.seed})
    if args.batch is not None:
        result = harness.batch(cfg, args.batch, out_dir=args.out,
                               write_trajectories=args.trajectories)
        for label in harness.OUTCOME_LABELS:
            print(f"{label}: {result['counts'][label]} "
                  f"({result['frequencies'][label]:.3f})")
    else:
        res = harness.run_experiment(cfg, out_dir=args.out)
        x = res.trajectory.final_state
        print(f"outcome={res.outcome} converged={res.trajectory.converged} "
              f"steps={res.trajectory.steps_run} "
              f"min={x.min():.6f} max={x.max():.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasdyn",
        description="Opinion dynamics with biased assimilation on weighted "
                    "directed networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a network and write an edge list")
    p.add_argument("--topology", required=True,
                   choices=["complete", "star", "path", "ring", "random",
                            "small-world", "two-island"])
    p.add_argument("--n", type=int)
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--same-deg", type=int, dest="same_deg")
    p.add_argument("--cross-deg", type=int, dest="cross_deg")
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--ring-deg", type=int, default=2)
    p.add_argument("--rewire-prob", type=float, default=0.1)
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--self-weight", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--randomize-low", type=float)
    p.add_argument("--randomize-high", type=float)
    p.add_argument("--weights-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("simulate", help="iterate the update map from an "
                                        "initial profile")
    p.add_argument("--graph", required=True)
    p.add_argument("--bias", required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("equilibria", help="catalog equilibria or refine a guess")
    p.add_argument("--graph", required=True)
    p.add_argument("--bias", required=True)
    p.add_argument("--near", help="vector spec for a starting guess")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_equilibria)

    p = sub.add_parser("stability", help="linearize at an equilibrium and "
                                         "classify it")
    p.add_argument("--graph", required=True)
    p.add_argument("--bias", required=True)
    p.add_argument("--equilibrium", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("conformance", help="randomized checks of the "
                                           "analytical stability regimes")
    p.add_argument("--regime", default="all",
                   choices=sorted(conformance.REGIMES) + ["all"])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_conformance)

    p = sub.add_parser("experiment", help="run a config-driven experiment")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a config JSON file")
    group.add_argument("--preset", help="bundled config name, e.g. fig1")
    p.add_argument("--batch", type=int, help="run this many consecutive seeds")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--trajectories", action="store_true",
                   help="write per-seed trajectories in batch mode")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BiasDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
