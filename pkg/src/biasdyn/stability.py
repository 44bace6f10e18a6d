"""Linearization of the biased update and local stability classification.

The Jacobian of the update has closed forms both at generic states and at the
cataloged equilibria. At extreme coordinates the generic entries are one-sided
limits: they stay finite for bias >= 1, while for fractional bias an agent at
an extreme facing any opposing influence has a divergent diagonal entry. Such
rows are reported structurally (``singular_rows``) instead of as float
infinities, and the classifier turns them into an ``singular_unstable``
verdict.

Verdicts compare the spectral radius against 1 with a symmetric margin;
anything inside the margin stays ``inconclusive`` except for the unit-star
families under bias one, whose instability is known analytically even though
their spectral radius sits exactly at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    _require_no_isolated,
    as_bias_profile,
    as_opinion_state,
    simulate,
    step,
)
from .equilibria import EquilibriumPoint, polarization_state
from .errors import (
    BiasDynError,
    BoundaryBiasError,
    HypothesisViolatedError,
    InvalidParameterError,
    SingularInputError,
)
from .network import InfluenceNetwork, is_strongly_connected

__all__ = [
    "JacobianResult",
    "MonotoneCertificate",
    "StabilityReport",
    "classify",
    "conjecture_sweep",
    "jacobian",
    "monotone_certificate",
    "neutral_jacobian",
    "polarization_jacobian",
    "power_iteration_radius",
    "spectral_radius",
]

VERDICTS = ("locally_exp_stable", "unstable", "inconclusive", "singular_unstable")


@dataclass
class JacobianResult:
    """Linearization at a point; ``matrix`` is None when any entry diverges."""

    matrix: np.ndarray | None
    singular_rows: frozenset
    note: str

    @property
    def is_singular(self) -> bool:
        return len(self.singular_rows) > 0


def _boundary_row_diag(b_i: float, wii_i: float, same_mass: float,
                       opp_mass: float, opp_positive: bool):
    """Diagonal entry for an agent at an extreme opinion, or None when divergent.

    ``same_mass`` is the neighbor mass already sitting at the agent's extreme
    plus nothing else (it enters the normalizer), ``opp_mass`` the mass on the
    far side. ``opp_positive`` is the structural test for opp_mass > 0 so a
    rounded sum cannot flip the divergence decision.
    """
    g = wii_i + same_mass
    if wii_i == 0.0 and not _structurally_positive(same_mass):
        return None
    if b_i < 1.0 and opp_positive:
        return None
    if b_i == 1.0:
        return (wii_i + opp_mass) / g
    return wii_i / g


def _structurally_positive(mass: float) -> bool:
    return mass > 0.0


def jacobian(net: InfluenceNetwork, bias, x) -> JacobianResult:
    """Jacobian of the update at an arbitrary state.

    Rows for agents at extreme opinions use the one-sided closed forms; rows
    with zero bias are the exact averaging rows. Divergent rows (fractional
    bias at an extreme with opposing influence present, or an extreme agent
    whose entire normalizing mass vanishes) are flagged in ``singular_rows``
    and no matrix is returned.
    """
    xv = as_opinion_state(x, net.n)
    b = as_bias_profile(bias, net.n)
    _require_no_isolated(net)
    at_edge = (xv == 0.0) | (xv == 1.0)
    if np.any((b < 0.0) & at_edge):
        raise BoundaryBiasError(
            "the update is undefined for a negatively biased agent at an extreme"
        )
    W = net.neighbor_weights
    wii = net.self_weights
    d = net.degrees
    S = W @ xv
    with np.errstate(divide="ignore", invalid="ignore"):
        xb = xv ** b
        omxb = (1.0 - xv) ** b
        g = wii + xb * S + omxb * (d - S)
        numer = wii * xv + xb * S
        coeff = (xb * g - numer * (xb - omxb)) / g ** 2
        J = coeff[:, None] * W
        t_same = b * xv ** (b - 1.0) * S
        t_opp = b * (1.0 - xv) ** (b - 1.0) * (d - S)
        diag = ((wii + t_same) * g - numer * (t_same - t_opp)) / g ** 2
    J[np.arange(net.n), np.arange(net.n)] = diag

    singular = set()
    for i in np.flatnonzero(at_edge | (b == 0.0)):
        if b[i] == 0.0:
            row = W[i] / (wii[i] + d[i])
            J[i] = row
            J[i, i] = wii[i] / (wii[i] + d[i])
            continue
        nbr = W[i] > 0.0
        if xv[i] == 0.0:
            opp_positive = bool(np.any(nbr & (xv > 0.0)))
            same_structural = bool(np.any(nbr & (xv < 1.0)))
            same_mass = d[i] - S[i]
            opp_mass = S[i]
        else:
            opp_positive = bool(np.any(nbr & (xv < 1.0)))
            same_structural = bool(np.any(nbr & (xv > 0.0)))
            same_mass = S[i]
            opp_mass = d[i] - S[i]
        J[i] = 0.0
        if wii[i] == 0.0 and not same_structural:
            singular.add(int(i))
            continue
        if b[i] < 1.0 and opp_positive:
            singular.add(int(i))
            continue
        if b[i] == 1.0:
            J[i, i] = (wii[i] + opp_mass) / (wii[i] + same_mass)
        else:
            J[i, i] = wii[i] / (wii[i] + same_mass)
    if singular:
        return JacobianResult(matrix=None, singular_rows=frozenset(singular),
                              note="generic_formula")
    if not np.all(np.isfinite(J)):
        raise BiasDynError("jacobian produced non-finite entries at a regular point")
    return JacobianResult(matrix=J, singular_rows=frozenset(),
                          note="generic_formula")


def neutral_jacobian(net: InfluenceNetwork, bias) -> JacobianResult:
    """Closed-form Jacobian at the neutral consensus (everyone at one half).

    Valid for any positive bias and for negative bias provided every agent
    keeps a positive self-weight.
    """
    b = as_bias_profile(bias, net.n)
    _require_no_isolated(net)
    wii = net.self_weights
    if np.any((b < 0.0) & (wii == 0.0)):
        raise HypothesisViolatedError(
            "negative bias at the neutral consensus needs positive self-weights"
        )
    d = net.degrees
    scale = 2.0 ** -b
    g = wii + d * scale
    J = (scale / g)[:, None] * net.neighbor_weights
    J[np.arange(net.n), np.arange(net.n)] = (wii + b * d * scale) / g
    return JacobianResult(matrix=J, singular_rows=frozenset(),
                          note="closed_form_at_equilibrium")


def polarization_jacobian(net: InfluenceNetwork, bias, partition) -> JacobianResult:
    """Closed-form (diagonal) Jacobian at a mixed extreme state.

    ``partition`` marks the agents holding opinion 1 (mask or index list).
    For each agent the entry depends on its own bias and on the neighbor mass
    on its side versus the opposite side. Fractional bias with any opposing
    mass diverges, as does an extreme agent with no normalizing mass at all;
    both cases are reported through ``singular_rows``. The degenerate all-0
    and all-1 partitions are allowed and give the extreme-consensus form.
    """
    b = as_bias_profile(bias, net.n)
    if np.any(b <= 0.0):
        raise HypothesisViolatedError("extreme states are equilibria only for positive bias")
    _require_no_isolated(net)
    xv = polarization_state(net.n, partition)
    ones = xv > 0.5
    W = net.neighbor_weights
    wii = net.self_weights
    diag = np.zeros(net.n)
    singular = set()
    for i in range(net.n):
        side = ones if ones[i] else ~ones
        same_mass = float(W[i, side].sum())
        opp_mass = float(W[i, ~side].sum())
        val = _boundary_row_diag(b[i], wii[i], same_mass, opp_mass,
                                 opp_positive=opp_mass > 0.0)
        if val is None:
            singular.add(i)
        else:
            diag[i] = val
    if singular:
        return JacobianResult(matrix=None, singular_rows=frozenset(singular),
                              note="closed_form_at_equilibrium")
    return JacobianResult(matrix=np.diag(diag), singular_rows=frozenset(),
                          note="closed_form_at_equilibrium")


def spectral_radius(matrix) -> float:
    """Largest eigenvalue modulus via the dense eigensolver.

    For entrywise nonnegative matrices the result is cross-checked against
    the row-sum sandwich (min row sum <= rho <= max row sum) before being
    returned.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameterError("spectral radius needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise SingularInputError("matrix contains non-finite entries")
    rho = float(np.max(np.abs(np.linalg.eigvals(M))))
    if np.all(M >= 0.0):
        row_sums = M.sum(axis=1)
        if not (row_sums.min() - 1e-9 <= rho <= row_sums.max() + 1e-9):
            raise BiasDynError(
                f"spectral radius {rho!r} escapes the row-sum bounds "
                f"[{row_sums.min()!r}, {row_sums.max()!r}]"
            )
    return rho


def power_iteration_radius(matrix, iterations: int = 600, seed: int = 0) -> float:
    """Spectral-radius estimate for nonnegative matrices by power steps.

    Averages the log growth over the trailing iterations, which tolerates the
    oscillation of imprimitive patterns. Meant as an independent cross-check
    of :func:`spectral_radius`, not as a precision eigensolver.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameterError("power iteration needs a square matrix")
    if not np.all(np.isfinite(M)) or np.any(M < 0.0):
        raise SingularInputError("power iteration expects a finite nonnegative matrix")
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.5, 1.0, M.shape[0])
    v /= np.linalg.norm(v)
    tail = min(256, iterations // 2)
    logs = []
    for k in range(iterations):
        w = M @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        if k >= iterations - tail:
            logs.append(math.log(norm))
        v = w / norm
    return math.exp(sum(logs) / len(logs))


def _unit_star_center(net: InfluenceNetwork):
    """Index of the hub when the network is exactly a unit-weight star."""
    W = net.neighbor_weights
    n = net.n
    counts = (W > 0.0).sum(axis=1)
    centers = np.flatnonzero(counts == n - 1)
    if centers.size != 1:
        return None
    c = int(centers[0])
    expected = np.zeros((n, n))
    expected[c, :] = 1.0
    expected[:, c] = 1.0
    expected[c, c] = 0.0
    return c if np.array_equal(W, expected) else None


def _is_unit_complete(net: InfluenceNetwork) -> bool:
    expected = np.ones((net.n, net.n))
    np.fill_diagonal(expected, 0.0)
    return np.array_equal(net.neighbor_weights, expected)


def _star_family(net: InfluenceNetwork, center: int, x: np.ndarray):
    """Catalog membership of a state on a unit star, or None."""
    n = net.n
    if np.all((x == 0.0) | (x == 1.0)):
        return "extreme" if x.min() == x.max() else "polarization"
    leaves = np.delete(x, center)
    if x[center] == 0.5 and abs(float(leaves.sum()) - (n - 1) / 2.0) <= 1e-12:
        return "star_half_leaves"
    if 0.0 < x[center] < 1.0 and np.all((leaves == 0.0) | (leaves == 1.0)):
        if int((leaves == 1.0).sum()) * 2 == n - 1:
            return "star_center_free"
    return None


def _two_island_aligned(net: InfluenceNetwork, ones_mask: np.ndarray) -> bool:
    """True for a unit-weight homophilous two-community pattern split by the mask."""
    W = net.neighbor_weights
    if not np.all((W == 0.0) | (W == 1.0)):
        return False
    if not np.array_equal(W, W.T):
        return False
    idx1 = np.flatnonzero(ones_mask)
    idx0 = np.flatnonzero(~ones_mask)
    if idx0.size < 2 or idx1.size < 2:
        return False
    same0 = W[np.ix_(idx0, idx0)].sum(axis=1)
    same1 = W[np.ix_(idx1, idx1)].sum(axis=1)
    cross0 = W[np.ix_(idx0, idx1)].sum(axis=1)
    cross1 = W[np.ix_(idx1, idx0)].sum(axis=1)
    for block in (same0, same1, cross0, cross1):
        if block.min() != block.max() or block.min() < 1.0:
            return False
    if not (same0[0] > cross0[0] and same1[0] > cross1[0]):
        return False
    return is_strongly_connected(net)


def _match_theorem(net: InfluenceNetwork, b: np.ndarray, x: np.ndarray):
    """Syntactic hypothesis matching for the named analytical regimes."""
    is01 = np.all((x == 0.0) | (x == 1.0))
    all_zero = np.all(x == 0.0)
    all_one = np.all(x == 1.0)
    half = np.all(x == 0.5)
    center = _unit_star_center(net)
    if center is not None and np.all(b == 1.0) and _star_family(net, center, x):
        return "thm7"
    if is01 and not all_zero and not all_one:
        mask = x > 0.5
        if np.all(b >= 1.0) and _two_island_aligned(net, mask):
            return "thm6"
        n_ones = int(mask.sum())
        if (_is_unit_complete(net) and 2 <= n_ones <= net.n - 2
                and (np.all(b == 1.0) or np.all(b > 1.0))):
            return "thm5"
        if np.all((b > 0.0) & (b < 1.0)) and is_strongly_connected(net):
            return "thm4"
    if (half and np.all((b >= -0.05) & (b < 0.0))
            and np.all(net.self_weights > 0.0) and is_strongly_connected(net)):
        return "thm2"
    if (all_zero or all_one or half) and np.all(b > 0.0) and is_strongly_connected(net):
        return "thm1"
    return None


@dataclass
class StabilityReport:
    """Verdict on one equilibrium plus the evidence used to reach it."""

    equilibrium: EquilibriumPoint
    jacobian: JacobianResult
    spectral_radius: float
    verdict: str
    theorem_tag: str | None
    margin: float


def classify(net: InfluenceNetwork, bias, eq: EquilibriumPoint,
             margin: float = 1e-9) -> StabilityReport:
    """Classify the local stability of a verified equilibrium.

    Chooses the matching closed-form Jacobian (extreme or mixed 0/1 states,
    the neutral consensus) and falls back to the generic formula elsewhere.
    The spectral radius decides the verdict up to ``margin``; a divergent
    linearization gives ``singular_unstable``. Unit-star family equilibria
    under bias one are classified unstable even when the radius sits exactly
    at 1, which is their known behavior.
    """
    if margin <= 0.0:
        raise InvalidParameterError("margin must be positive")
    b = as_bias_profile(bias, net.n)
    x = as_opinion_state(eq.x, net.n)
    is01 = np.all((x == 0.0) | (x == 1.0))
    if is01 and np.all(b > 0.0):
        jac = polarization_jacobian(net, b, x > 0.5)
    elif np.all(x == 0.5):
        jac = neutral_jacobian(net, b)
    else:
        jac = jacobian(net, b, x)
    tag = _match_theorem(net, b, x)
    if jac.is_singular:
        return StabilityReport(eq, jac, math.inf, "singular_unstable", tag, margin)
    rho = spectral_radius(jac.matrix)
    if rho < 1.0 - margin:
        verdict = "locally_exp_stable"
    elif rho > 1.0 + margin:
        verdict = "unstable"
    else:
        verdict = "inconclusive"
        extreme = np.all(x == 0.0) or np.all(x == 1.0)
        if tag == "thm7" and not extreme:
            verdict = "unstable"
    return StabilityReport(eq, jac, rho, verdict, tag, margin)


@dataclass
class MonotoneCertificate:
    """Outcome of a monotone-convergence run toward an extreme consensus.

    ``terminal_residual`` is the max-norm distance to the limit consensus.
    On refutation ``violation_step`` and ``violation_kind`` say where and how
    the expected monotonicity failed; that would indicate an implementation
    bug, not a counterexample to the underlying result.
    """

    certified: bool
    direction: str
    steps_run: int
    terminal_residual: float
    final_state: np.ndarray
    violation_step: int | None = None
    violation_kind: str | None = None


def monotone_certificate(net: InfluenceNetwork, bias, x0, direction: str,
                         max_steps: int = 100000,
                         residual_tol: float = 1e-10) -> MonotoneCertificate:
    """Run a one-sided initial state and certify monotone extreme consensus.

    Requires bias >= 1 everywhere, a strongly connected network, and an
    initial state on one side of one half with at least one strict entry
    (``direction`` 'up' means at or above one half, heading to 1). While
    running this asserts entrywise monotonicity, and, once every entry has
    strictly passed one half, strict decay of the distance to the extreme.
    """
    if direction not in ("up", "down"):
        raise InvalidParameterError("direction must be 'up' or 'down'")
    b = as_bias_profile(bias, net.n)
    x = as_opinion_state(x0, net.n).copy()
    if np.any(b < 1.0):
        raise HypothesisViolatedError("monotone certificate needs bias >= 1 everywhere")
    if not is_strongly_connected(net):
        raise HypothesisViolatedError("monotone certificate needs strong connectivity")
    up = direction == "up"
    if up:
        if np.any(x < 0.5) or not np.any(x > 0.5):
            raise HypothesisViolatedError(
                "direction 'up' needs every entry at or above one half and one above"
            )
    else:
        if np.any(x > 0.5) or not np.any(x < 0.5):
            raise HypothesisViolatedError(
                "direction 'down' needs every entry at or below one half and one below"
            )

    slack = 1e-13

    def dist(v: np.ndarray) -> float:
        return float(1.0 - v.min()) if up else float(v.max())

    past_half = bool(np.all(x > 0.5)) if up else bool(np.all(x < 0.5))
    if dist(x) <= residual_tol:
        return MonotoneCertificate(True, direction, 0, dist(x), x)
    for k in range(1, max_steps + 1):
        x_next = step(net, b, x)
        drop = np.any(x_next < x - slack) if up else np.any(x_next > x + slack)
        if drop:
            return MonotoneCertificate(False, direction, k, dist(x_next), x_next,
                                       violation_step=k,
                                       violation_kind="monotonicity")
        v_prev, v_next = dist(x), dist(x_next)
        if past_half and v_prev > residual_tol and not v_next < v_prev:
            return MonotoneCertificate(False, direction, k, v_next, x_next,
                                       violation_step=k,
                                       violation_kind="stalled_distance")
        x = x_next
        if not past_half:
            past_half = bool(np.all(x > 0.5)) if up else bool(np.all(x < 0.5))
        if dist(x) <= residual_tol:
            return MonotoneCertificate(True, direction, k, dist(x), x)
    return MonotoneCertificate(False, direction, max_steps, dist(x), x,
                               violation_step=None, violation_kind="max_steps")


def conjecture_sweep(net: InfluenceNetwork, pairs, max_steps: int = 20000,
                     tol: float = 1e-12, window: int = 10) -> list[dict]:
    """Compare plain-averaging convergence against biased convergence.

    Each pair is (bias, x0) with positive bias. For every pair the same
    initial state is run once with zero bias and once with the given bias; a
    row is flagged as a counterexample candidate only when the zero-bias run
    converged and the biased one did not. Rows where the zero-bias run fails
    to converge (periodic averaging) never flag.
    """
    rows = []
    for idx, (bias, x0) in enumerate(pairs):
        b = as_bias_profile(bias, net.n)
        if np.any(b <= 0.0):
            raise InvalidParameterError("sweep bias profiles must be positive")
        base = simulate(net, np.zeros(net.n), x0, max_steps=max_steps,
                        tol=tol, window=window, record_stride=max_steps)
        trial = simulate(net, b, x0, max_steps=max_steps,
                         tol=tol, window=window, record_stride=max_steps)
        rows.append({
            "index": idx,
            "degroot_converged": base.converged,
            "biased_converged": trial.converged,
            "premise_holds": base.converged,
            "counterexample": base.converged and not trial.converged,
        })
    return rows
