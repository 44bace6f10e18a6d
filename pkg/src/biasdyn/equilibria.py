"""Fixed points of the biased update: catalog construction and numeric search.

The cataloged families for positive bias are the two extreme consensus
states, the neutral consensus at one half, and the mixed extreme states
(polarization). Unit-weight stars under bias one carry two extra families
around the center agent. Anything found numerically outside these shapes is
tagged ``numeric``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import _require_no_isolated, _step_batch, as_bias_profile, as_opinion_state, step
from .errors import (
    FamilyUndefinedError,
    InvalidParameterError,
    NotAnEquilibriumError,
    OutOfFamilyError,
)
from .network import InfluenceNetwork, make_star

__all__ = [
    "EquilibriumPoint",
    "FixedPointSearch",
    "canonical_equilibria",
    "find_equilibrium_near",
    "is_equilibrium",
    "polarization_state",
    "star_equilibria",
]

FAMILIES = (
    "extreme_zero",
    "extreme_one",
    "neutral",
    "polarization",
    "star_half_leaves",
    "star_center_free",
    "numeric",
)


@dataclass
class EquilibriumPoint:
    """A state together with its family tag and verified residual.

    ``partition`` (for polarization) is the boolean mask of agents holding
    opinion 1; ``leaf_values`` and ``center_value`` describe the star
    families.
    """

    x: np.ndarray
    family: str
    residual: float
    partition: np.ndarray | None = None
    leaf_values: np.ndarray | None = None
    center_value: float | None = None


def is_equilibrium(net: InfluenceNetwork, bias, x, tol: float = 1e-10):
    """Check whether one update moves the state by at most ``tol`` (max norm).

    Returns ``(flag, residual)``.
    """
    if tol <= 0.0:
        raise InvalidParameterError("tolerance must be positive")
    xv = as_opinion_state(x, net.n)
    residual = float(np.max(np.abs(step(net, bias, xv) - xv)))
    return residual <= tol, residual


def polarization_state(n: int, ones) -> np.ndarray:
    """Build a 0/1 state; ``ones`` is a boolean mask or an index collection."""
    arr = np.asarray(ones)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise InvalidParameterError(f"mask must have shape ({n},)")
        mask = arr
    else:
        mask = np.zeros(n, dtype=bool)
        idx = arr.astype(int)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise InvalidParameterError("partition indices out of range")
        mask[idx] = True
    return mask.astype(float)


def _checked_point(net, b, x, family: str, tol: float, **info) -> EquilibriumPoint:
    ok, residual = is_equilibrium(net, b, x, tol)
    if not ok:
        raise NotAnEquilibriumError(
            f"constructed {family} point has residual {residual:.3e} above {tol:.1e}"
        )
    return EquilibriumPoint(x=x, family=family, residual=residual, **info)


def canonical_equilibria(net: InfluenceNetwork, bias, partition=None,
                         enumeration_cap: int = 16,
                         tol: float = 1e-10) -> list[EquilibriumPoint]:
    """Catalog the closed-form equilibria for a positive bias profile.

    Always returns both extreme consensus states and the neutral consensus.
    When ``n <= enumeration_cap`` every mixed 0/1 state is enumerated as well
    (2**n - 2 points); above the cap a single polarization point can be
    requested through ``partition``. Every returned point is verified against
    one actual update.
    """
    b = as_bias_profile(bias, net.n)
    if np.any(b <= 0.0):
        raise OutOfFamilyError("the closed-form catalog needs positive bias everywhere")
    _require_no_isolated(net)
    n = net.n
    points = [
        _checked_point(net, b, np.zeros(n), "extreme_zero", tol),
        _checked_point(net, b, np.ones(n), "extreme_one", tol),
        _checked_point(net, b, np.full(n, 0.5), "neutral", tol),
    ]
    enumerated = n <= enumeration_cap
    if enumerated:
        masks = np.arange(1, 2 ** n - 1, dtype=np.uint64)
        X = ((masks[:, None] >> np.arange(n, dtype=np.uint64)) & 1).astype(float)
        residuals = np.max(np.abs(_step_batch(net, b, X) - X), axis=1)
        bad = np.flatnonzero(residuals > tol)
        if bad.size:
            raise NotAnEquilibriumError(
                f"polarization state {X[bad[0]]} has residual {residuals[bad[0]]:.3e}"
            )
        for row, res in zip(X, residuals):
            points.append(EquilibriumPoint(
                x=row, family="polarization", residual=float(res),
                partition=row > 0.5,
            ))
    if partition is not None and not enumerated:
        x = polarization_state(n, partition)
        if x.min() == x.max():
            raise InvalidParameterError("a polarization partition needs both opinions")
        points.append(_checked_point(net, b, x, "polarization", tol,
                                     partition=x > 0.5))
    return points


def star_equilibria(n: int, leaf_values=None, center_value=None,
                    self_weights=0.0) -> EquilibriumPoint:
    """Construct one equilibrium of a unit-weight star under bias one.

    Two families exist around the center agent (index 0). With
    ``leaf_values`` the center sits at 1/2 and the leaves may take any values
    in [0, 1] whose sum is (n - 1)/2. With ``center_value`` (n odd) the center
    takes any interior value while half the leaves sit at 0 and half at 1.
    The point is verified against an actual update on a unit star.
    """
    if (leaf_values is None) == (center_value is None):
        raise InvalidParameterError("pass exactly one of leaf_values, center_value")
    if n < 3:
        raise InvalidParameterError("star network needs n >= 3")
    if leaf_values is not None:
        leaves = np.asarray(leaf_values, dtype=float)
        if leaves.shape != (n - 1,):
            raise InvalidParameterError(f"need {n - 1} leaf values, got shape {leaves.shape}")
        if not np.all(np.isfinite(leaves)) or leaves.min() < 0.0 or leaves.max() > 1.0:
            raise InvalidParameterError("leaf values must lie in [0, 1]")
        target = (n - 1) / 2.0
        if abs(float(leaves.sum()) - target) > 1e-12:
            raise NotAnEquilibriumError(
                f"leaf values must sum to {target}, got {leaves.sum()!r}"
            )
        x = np.concatenate([[0.5], leaves])
        family = "star_half_leaves"
        info = {"leaf_values": leaves}
    else:
        c = float(center_value)
        if n % 2 == 0:
            raise FamilyUndefinedError(
                "the free-center family needs an odd agent count"
            )
        if not 0.0 < c < 1.0:
            raise InvalidParameterError("center value must be strictly interior")
        half = (n - 1) // 2
        x = np.concatenate([[c], np.zeros(half), np.ones(half)])
        family = "star_center_free"
        info = {"center_value": c}
    net = make_star(n, 1.0, self_weights)
    return _checked_point(net, np.ones(n), x, family, 1e-10, **info)


@dataclass
class FixedPointSearch:
    """Outcome of :func:`find_equilibrium_near`."""

    found: bool
    point: EquilibriumPoint | None
    best_residual: float
    iterations: int


def _structural_family(x: np.ndarray, atol: float):
    """Match a state against the catalog shapes; fall back to ``numeric``."""
    if np.max(np.abs(x)) <= atol:
        return "extreme_zero", {}
    if np.max(np.abs(x - 1.0)) <= atol:
        return "extreme_one", {}
    if np.max(np.abs(x - 0.5)) <= atol:
        return "neutral", {}
    near0 = x <= atol
    near1 = x >= 1.0 - atol
    if np.all(near0 | near1):
        return "polarization", {"partition": near1.copy()}
    return "numeric", {}


def find_equilibrium_near(net: InfluenceNetwork, bias, x_guess,
                          tol: float = 1e-10,
                          max_iter: int = 10000) -> FixedPointSearch:
    """Refine a guess by fixed-point iteration of the update map.

    Plain iteration follows the actual dynamics, so it finds whatever
    attractor the guess flows to. Residuals may rise transiently along the
    way, which is fine; only sustained stagnation (no improvement across a
    16-step lookback) triggers an averaging step x <- (x + F(x))/2, which
    collapses period-two orbits such as plain averaging on bipartite
    networks. On success the point is tagged by structure; states that match
    none of the closed-form shapes come back as ``numeric``.
    """
    if tol <= 0.0:
        raise InvalidParameterError("tolerance must be positive")
    if max_iter < 1:
        raise InvalidParameterError("max_iter must be at least 1")
    lookback = 16
    b = as_bias_profile(bias, net.n)
    x = as_opinion_state(x_guess, net.n).copy()
    fx = step(net, b, x)
    res = float(np.max(np.abs(fx - x)))
    best = res
    history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if res <= tol:
            break
        history.append(res)
        if len(history) >= lookback and res >= 0.9 * history[-lookback]:
            x = 0.5 * (x + fx)
            history.clear()
        else:
            x = fx
        fx = step(net, b, x)
        res = float(np.max(np.abs(fx - x)))
        best = min(best, res)
    if res <= tol:
        family, info = _structural_family(x, tol)
        point = EquilibriumPoint(x=x, family=family, residual=res, **info)
        return FixedPointSearch(found=True, point=point,
                                best_residual=res, iterations=iterations)
    return FixedPointSearch(found=False, point=None,
                            best_residual=best, iterations=iterations)
