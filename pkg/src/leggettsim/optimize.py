"""Search for settings families that certify infeasibility of singlet targets.

A settings family maps a small real parameter vector to a list of target
constraints (correlations from the singlet prediction, marginals zero).
The optimizer runs a random-restart pattern search (coordinate steps with
shrinking radius) maximizing the certified infeasibility margin; the
margin of a feasible problem counts as zero. With several atom grids the
objective is the worst margin across them, so a reported violation cannot
be an artifact of one discretization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import sphere
from .certify import CertStatus, TargetConstraint, build_problem, solve
from .models import SettingsPair
from .quantum import singlet_correlation


@dataclass(frozen=True)
class SettingsFamily:
    name: str
    lower: np.ndarray  # per-parameter search bounds
    upper: np.ndarray
    build: Callable[[np.ndarray], list[TargetConstraint]]

    @property
    def n_params(self) -> int:
        return self.lower.shape[0]


def _singlet_constraint(a: np.ndarray, b: np.ndarray) -> TargetConstraint:
    s = SettingsPair(a, b)
    return TargetConstraint(settings=s, e=singlet_correlation(s), ma=0.0, mb=0.0)


def _orthogonal_doublets(params: np.ndarray) -> list[TargetConstraint]:
    """Six pairs: for each coordinate axis e, Bob measures the two
    directions cos(t/2) m +/- sin(t/2) e with m orthogonal to e (rotated
    by the per-axis angle), while Alice measures m. The two bound rows of
    such a doublet jointly cap the mean of |v.e|, and no distribution on
    the sphere can keep that small along three orthogonal axes at once."""
    theta, psis = params[0], params[1:]
    axes = np.eye(3)
    others = [(1, 2), (2, 0), (0, 1)]
    out = []
    for i in range(3):
        e = axes[i]
        j, k = others[i]
        m = np.cos(psis[i]) * axes[j] + np.sin(psis[i]) * axes[k]
        b_plus = np.cos(theta / 2.0) * m + np.sin(theta / 2.0) * e
        b_minus = np.cos(theta / 2.0) * m - np.sin(theta / 2.0) * e
        out.append(_singlet_constraint(m, sphere.normalize(b_plus)))
        out.append(_singlet_constraint(m, sphere.normalize(b_minus)))
    return out


def _planar_chsh(params: np.ndarray) -> list[TargetConstraint]:
    """Four CHSH-style pairs with all directions in the xy-plane."""

    def vec(t: float) -> np.ndarray:
        return np.array([np.cos(t), np.sin(t), 0.0])

    a, ap, b, bp = (vec(t) for t in params)
    return [
        _singlet_constraint(a, b),
        _singlet_constraint(a, bp),
        _singlet_constraint(ap, b),
        _singlet_constraint(ap, bp),
    ]


_FAMILIES = {
    "orthogonal-doublets": lambda: SettingsFamily(
        name="orthogonal-doublets",
        lower=np.array([0.05, 0.0, 0.0, 0.0]),
        upper=np.array([2.0, 2.0 * np.pi, 2.0 * np.pi, 2.0 * np.pi]),
        build=_orthogonal_doublets,
    ),
    "planar-chsh": lambda: SettingsFamily(
        name="planar-chsh",
        lower=np.zeros(4),
        upper=np.full(4, 2.0 * np.pi),
        build=_planar_chsh,
    ),
}


def settings_family(name: str) -> SettingsFamily:
    try:
        return _FAMILIES[name]()
    except KeyError:
        raise ValueError(f"unknown settings family {name!r}") from None


@dataclass(frozen=True)
class OptimizeResult:
    family: str
    params: np.ndarray
    margin: float  # worst certified margin across the grids (0 = feasible somewhere)
    margins: tuple[float, ...]  # per-grid margins at the best parameters
    evaluations: int


def certified_margin(
    family: SettingsFamily,
    params: np.ndarray,
    grids: Sequence[tuple[np.ndarray, np.ndarray]],
    include_marginals: bool = False,
) -> tuple[float, ...]:
    """Per-grid infeasibility margins at one parameter point (0 when feasible)."""
    constraints = family.build(params)
    margins = []
    for u, v in grids:
        cert = solve(build_problem(u, v, constraints, include_marginals=include_marginals))
        margins.append(cert.margin if cert.status is CertStatus.INFEASIBLE else 0.0)
    return tuple(margins)


def pattern_search(
    objective: Callable[[np.ndarray], float],
    lower: np.ndarray,
    upper: np.ndarray,
    budget: int,
    rng: np.random.Generator,
    shrink: float = 0.5,
    min_step: float = 1e-3,
) -> tuple[np.ndarray, float, int]:
    """Maximize over a box via random-restart coordinate pattern search."""
    if budget < 1:
        raise ValueError("evaluation budget must be >= 1")
    span = upper - lower
    best_x, best_f = None, -np.inf
    evals = 0
    while evals < budget:
        x = lower + span * rng.random(lower.shape[0])
        f = objective(x)
        evals += 1
        step = 0.25
        while step >= min_step and evals < budget:
            improved = False
            for i in range(x.shape[0]):
                for sign in (1.0, -1.0):
                    if evals >= budget:
                        break
                    trial = x.copy()
                    trial[i] = np.clip(trial[i] + sign * step * span[i], lower[i], upper[i])
                    ft = objective(trial)
                    evals += 1
                    if ft > f:
                        x, f = trial, ft
                        improved = True
            if not improved:
                step *= shrink
        if f > best_f:
            best_x, best_f = x, f
    return best_x, best_f, evals


def optimize_settings(
    family: SettingsFamily,
    grids: Sequence[tuple[np.ndarray, np.ndarray]],
    budget: int,
    seed: int,
    include_marginals: bool = False,
) -> OptimizeResult:
    """Search the family's parameters for the largest certified margin.

    Deterministic given the seed; the objective is the minimum margin over
    the supplied grids.
    """
    if budget < 1:
        raise ValueError("evaluation budget must be >= 1")
    rng = sphere.make_rng(seed, stream_id=0)

    def objective(params: np.ndarray) -> float:
        return min(certified_margin(family, params, grids, include_marginals))

    best_x, best_f, evals = pattern_search(objective, family.lower, family.upper, budget, rng)
    margins = certified_margin(family, best_x, grids, include_marginals)
    return OptimizeResult(
        family=family.name,
        params=best_x,
        margin=min(margins),
        margins=margins,
        evaluations=evals,
    )
