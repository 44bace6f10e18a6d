"""Synchronous opinion updates with biased assimilation of neighbor influence.

Opinions live in [0, 1]. In one update, agent i weighs the total neighbor
support for position 1, s_i = sum_j w_ij x_j, against the support for
position 0, d_i - s_i, but filters both through its own current opinion:
supporting mass is scaled by x_i**b_i and opposing mass by (1 - x_i)**b_i,
where b_i is the agent's assimilation bias. The new opinion is

    x_i+ = (w_ii x_i + x_i**b_i * s_i)
           / (w_ii + x_i**b_i * s_i + (1 - x_i)**b_i * (d_i - s_i))

Bias 0 reduces this to plain weighted averaging. Powers follow t**0 == 1 for
every t in [0, 1] and 0**b == 0 for b > 0. For positively biased agents the
extreme opinions 0 and 1 are fixed and the update returns them unchanged,
which also covers the corner where the normalizing mass would otherwise
vanish. Negative bias requires an interior opinion and a positive self-weight
(the self-weight keeps the iterate interior, so the next update stays
defined).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BiasDynError,
    BoundaryBiasError,
    InvalidParameterError,
    IsolatedAgentError,
)
from .network import InfluenceNetwork

__all__ = [
    "Trajectory",
    "as_bias_profile",
    "as_opinion_state",
    "bias_response",
    "classify_bias",
    "simulate",
    "step",
    "write_trajectory_csv",
]


def as_opinion_state(x, n: int) -> np.ndarray:
    """Validate and return an opinion vector as float64, entries in [0, 1]."""
    v = np.asarray(x, dtype=float)
    if v.shape != (n,):
        raise InvalidParameterError(f"opinion state must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
        raise InvalidParameterError("opinion entries must be finite and lie in [0, 1]")
    return v


def as_bias_profile(bias, n: int) -> np.ndarray:
    """Validate a bias profile; a scalar is broadcast to all agents."""
    b = np.asarray(bias, dtype=float)
    if b.ndim == 0:
        b = np.full(n, float(b))
    if b.shape != (n,):
        raise InvalidParameterError(f"bias profile must have shape ({n},), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise InvalidParameterError("bias entries must be finite")
    return b


def _require_no_isolated(net: InfluenceNetwork) -> None:
    bad = np.flatnonzero((net.degrees == 0.0) & (net.self_weights == 0.0))
    if bad.size:
        raise IsolatedAgentError(
            f"agents {list(bad + 1)} have no neighbors and zero self-weight"
        )


def _require_negative_bias_domain(net: InfluenceNetwork, b: np.ndarray,
                                  x: np.ndarray) -> None:
    neg = b < 0.0
    if not neg.any():
        return
    at_edge = neg & ((x == 0.0) | (x == 1.0))
    if at_edge.any():
        raise BoundaryBiasError(
            f"agents {list(np.flatnonzero(at_edge) + 1)} hold an extreme opinion "
            "but have negative bias"
        )
    no_anchor = neg & (net.self_weights == 0.0)
    if no_anchor.any():
        raise InvalidParameterError(
            f"agents {list(np.flatnonzero(no_anchor) + 1)} need a positive "
            "self-weight to iterate with negative bias"
        )


def _step_batch(net: InfluenceNetwork, b: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Update rule applied to each row of X; inputs assumed validated."""
    W = net.neighbor_weights
    wii = net.self_weights
    d = net.degrees
    S = X @ W.T
    with np.errstate(divide="ignore", invalid="ignore"):
        xb = X ** b
        omxb = (1.0 - X) ** b
        numer = wii * X + xb * S
        denom = wii + xb * S + omxb * (d - S)
        out = numer / denom
    frozen = (b > 0.0) & ((X == 0.0) | (X == 1.0))
    out = np.where(frozen, X, out)
    if not np.all(np.isfinite(out)):
        raise IsolatedAgentError("update undefined: an agent received zero total mass")
    return np.clip(out, 0.0, 1.0)


def step(net: InfluenceNetwork, bias, x) -> np.ndarray:
    """Apply one synchronous update to an opinion state."""
    xv = as_opinion_state(x, net.n)
    b = as_bias_profile(bias, net.n)
    _require_no_isolated(net)
    _require_negative_bias_domain(net, b, xv)
    return _step_batch(net, b, xv[np.newaxis, :])[0]


@dataclass
class Trajectory:
    """Recorded states of one simulation run.

    ``states[r]`` is the opinion vector after ``step_indices[r]`` updates;
    row 0 is always the initial state and the last row the terminal one.
    ``terminal_residual`` is the max-norm change of the final executed step.
    """

    states: np.ndarray
    step_indices: np.ndarray
    converged: bool
    steps_run: int
    terminal_residual: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def simulate(net: InfluenceNetwork, bias, x0, max_steps: int = 10000,
             tol: float = 1e-12, window: int = 10,
             record_stride: int = 1) -> Trajectory:
    """Iterate the update until the state stalls or the step budget runs out.

    The run counts as converged once the max-norm change stays below ``tol``
    for ``window`` consecutive steps. ``record_stride`` thins the recorded
    states; the initial and terminal states are always kept.
    """
    if max_steps < 1:
        raise InvalidParameterError("max_steps must be at least 1")
    if tol <= 0.0:
        raise InvalidParameterError("tolerance must be positive")
    if window < 1:
        raise InvalidParameterError("window must be at least 1")
    if record_stride < 1:
        raise InvalidParameterError("record stride must be at least 1")
    x = as_opinion_state(x0, net.n)
    b = as_bias_profile(bias, net.n)
    _require_no_isolated(net)
    has_negative = bool((b < 0.0).any())

    states = [x.copy()]
    indices = [0]
    quiet = 0
    residual = np.inf
    steps_run = 0
    converged = False
    for k in range(1, max_steps + 1):
        if has_negative:
            try:
                _require_negative_bias_domain(net, b, x)
            except BiasDynError as exc:
                raise type(exc)(f"step {k}: {exc}") from exc
        x_next = _step_batch(net, b, x[np.newaxis, :])[0]
        residual = float(np.max(np.abs(x_next - x)))
        x = x_next
        steps_run = k
        if k % record_stride == 0:
            states.append(x.copy())
            indices.append(k)
        quiet = quiet + 1 if residual < tol else 0
        if quiet >= window:
            converged = True
            break
    if indices[-1] != steps_run:
        states.append(x.copy())
        indices.append(steps_run)
    return Trajectory(
        states=np.asarray(states),
        step_indices=np.asarray(indices, dtype=int),
        converged=converged,
        steps_run=steps_run,
        terminal_residual=residual,
    )


def bias_response(b, x):
    """Single-agent response to evenly split neighbor influence.

    One unit of neighbor mass supports each position and the self-weight is
    one, so the update collapses to

        p(b, x) = (x + x**b) / (1 + x**b + (1 - x)**b)

    Accepts scalars or arrays (broadcast together). p(1, x) == x for every x,
    and p(b, 1/2) == 1/2 for every b.
    """
    bv = np.asarray(b, dtype=float)
    xv = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(bv)):
        raise InvalidParameterError("bias must be finite")
    if not np.all(np.isfinite(xv)) or np.any(xv < 0.0) or np.any(xv > 1.0):
        raise InvalidParameterError("opinion must lie in [0, 1]")
    if np.any((bv < 0.0) & ((xv == 0.0) | (xv == 1.0))):
        raise BoundaryBiasError("negative bias is undefined at extreme opinions")
    xb = xv ** bv
    omxb = (1.0 - xv) ** bv
    out = (xv + xb) / (1.0 + xb + omxb)
    if np.isscalar(b) and np.isscalar(x):
        return float(out)
    return out


def classify_bias(b: float) -> str:
    """Name the qualitative assimilation regime of a scalar bias value."""
    if not np.isfinite(b):
        raise InvalidParameterError("bias must be finite")
    if b < 0.0:
        return "negative"
    if b == 0.0:
        return "none"
    if b < 1.0:
        return "weak"
    if b == 1.0:
        return "intermediate"
    return "strong"


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write a trajectory as CSV with header ``step,x1,...,xN``.

    Values carry 17 significant digits, enough to reproduce the float64
    states exactly.
    """
    n = traj.states.shape[1]
    header = "step," + ",".join(f"x{i + 1}" for i in range(n))
    lines = [header]
    for idx, row in zip(traj.step_indices, traj.states):
        lines.append(f"{int(idx)}," + ",".join(f"{v:.17g}" for v in row))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
