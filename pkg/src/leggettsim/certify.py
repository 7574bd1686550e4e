"""LP feasibility certification of subensemble distributions.

Given a grid of candidate hidden-vector atoms and target correlations for
a family of settings pairs, decide whether any nonnegative normalized
weighting of the atoms satisfies every averaged bound (and optionally the
marginal constraints). Feasible problems return a witness; infeasible
problems return a Farkas combination whose recomputation proves, by plain
arithmetic, that no weighting exists.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, sphere
from .models import SettingsPair, SubensembleDistribution
from .simplex import SolverFailure, phase1_simplex

FEAS_TOL = 1e-9


class CertStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class TargetConstraint:
    """Target correlation (and optional marginals) for one settings pair."""

    settings: SettingsPair
    e: float
    ma: float | None = None
    mb: float | None = None

    def __post_init__(self):
        if abs(self.e) > 1.0:
            raise ValueError("target correlation must lie in [-1, 1]")


@dataclass(frozen=True)
class CertificationProblem:
    u: np.ndarray  # (m, 3) candidate hidden vectors for Alice's side
    v: np.ndarray  # (m, 3) candidate hidden vectors for Bob's side
    constraints: tuple[TargetConstraint, ...]
    include_marginals: bool
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray  # marginal equality rows only (possibly empty)
    b_eq: np.ndarray
    grid_hash: str

    @property
    def n_atoms(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class FeasibilityCertificate:
    status: CertStatus
    grid_hash: str
    weights: np.ndarray | None = None  # feasible witness
    farkas_ub: np.ndarray | None = None  # multipliers on the inequality rows, >= 0
    farkas_eq: np.ndarray | None = None  # multipliers on the marginal equality rows
    margin: float = 0.0  # proven slack of the infeasibility proof

    def to_dict(self) -> dict:
        out = {"status": self.status.value, "grid_hash": self.grid_hash, "margin": self.margin}
        if self.weights is not None:
            out["weights"] = [float(x) for x in self.weights]
        if self.farkas_ub is not None:
            out["farkas_ub"] = [float(x) for x in self.farkas_ub]
            out["farkas_eq"] = [float(x) for x in self.farkas_eq]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FeasibilityCertificate":
        status = CertStatus(data["status"])
        return cls(
            status=status,
            grid_hash=data["grid_hash"],
            weights=np.asarray(data["weights"], dtype=np.float64) if "weights" in data else None,
            farkas_ub=np.asarray(data["farkas_ub"], dtype=np.float64) if "farkas_ub" in data else None,
            farkas_eq=np.asarray(data["farkas_eq"], dtype=np.float64) if "farkas_eq" in data else None,
            margin=float(data.get("margin", 0.0)),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "FeasibilityCertificate":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def grid_hash(u: np.ndarray, v: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(u, dtype=np.float64).tobytes())
    h.update(np.ascontiguousarray(v, dtype=np.float64).tobytes())
    return h.hexdigest()


def build_atom_grid(n_u: int, n_v: int, n_mirrored: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Candidate atoms: the product of two Fibonacci lattices, plus an
    optional mirrored sub-grid (v = -u) covering anticorrelated models."""
    if n_u < 1 or n_v < 1:
        raise ValueError("lattice sizes must be >= 1")
    gu = sphere.sphere_grid(n_u)
    gv = sphere.sphere_grid(n_v)
    u = np.repeat(gu, n_v, axis=0)
    v = np.tile(gv, (n_u, 1))
    if n_mirrored > 0:
        gm = sphere.sphere_grid(n_mirrored)
        u = np.vstack([u, gm])
        v = np.vstack([v, -gm])
    return u, v


def build_problem(
    u, v, constraints, include_marginals: bool = False
) -> CertificationProblem:
    """Assemble the LP rows: per settings pair j, the averaged bounds become

        sum_i w_i |u_i.a_j + v_i.b_j| <= 1 + E_j
        sum_i w_i |u_i.a_j - v_i.b_j| <= 1 - E_j

    plus, when requested, equality rows pinning the marginal means."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    constraints = tuple(constraints)
    if u.shape[0] == 0 or len(constraints) == 0:
        raise ValueError("grid and constraint list must be non-empty")
    if u.shape != v.shape or u.shape[1] != 3:
        raise ValueError("atom grids must be matching (m, 3) arrays")
    if not (sphere.is_unit(u) and sphere.is_unit(v)):
        raise ValueError("grid atoms must be unit vectors")

    rows_ub, rhs_ub, rows_eq, rhs_eq = [], [], [], []
    for c in constraints:
        alpha = sphere.dots(u, c.settings.a)
        beta = sphere.dots(v, c.settings.b)
        plus, minus = kernels.abs_sum_diff(alpha, beta)
        rows_ub.append(plus)
        rhs_ub.append(1.0 + c.e)
        rows_ub.append(minus)
        rhs_ub.append(1.0 - c.e)
        if include_marginals:
            if c.ma is None or c.mb is None:
                raise ValueError("include_marginals requires target marginals on every constraint")
            rows_eq.append(alpha)
            rhs_eq.append(c.ma)
            rows_eq.append(beta)
            rhs_eq.append(c.mb)

    m = u.shape[0]
    return CertificationProblem(
        u=u,
        v=v,
        constraints=constraints,
        include_marginals=include_marginals,
        A_ub=np.asarray(rows_ub),
        b_ub=np.asarray(rhs_ub),
        A_eq=np.asarray(rows_eq) if rows_eq else np.empty((0, m)),
        b_eq=np.asarray(rhs_eq),
        grid_hash=grid_hash(u, v),
    )


def _farkas_margin(problem: CertificationProblem, lam: np.ndarray, mu: np.ndarray) -> float:
    """Proven infeasibility slack of the multiplier pair, scale-normalized.

    For any w in the simplex: (lam^T A_ub + mu^T A_eq) w >= min over
    columns, while the constraints force it <= lam^T b_ub + mu^T b_eq.
    A positive gap therefore excludes every admissible w.
    """
    combo = lam @ problem.A_ub
    if mu.size:
        combo = combo + mu @ problem.A_eq
    value = float(lam @ problem.b_ub) + (float(mu @ problem.b_eq) if mu.size else 0.0)
    scale = max(float(np.max(np.abs(lam), initial=0.0)), float(np.max(np.abs(mu), initial=0.0)))
    if scale <= 0.0:
        return -math.inf
    return (float(np.min(combo)) - value) / scale


def solve(problem: CertificationProblem) -> FeasibilityCertificate:
    """Phase-1 feasibility solve over {w >= 0, sum w = 1, constraint rows}."""
    m = problem.n_atoms
    ones = np.ones((1, m))
    A_eq = np.vstack([problem.A_eq, ones]) if problem.A_eq.size else ones
    b_eq = np.concatenate([problem.b_eq, [1.0]])

    result = phase1_simplex(problem.A_ub, problem.b_ub, A_eq, b_eq)

    if result.feasible:
        w = np.clip(result.x, 0.0, None)
        cert = FeasibilityCertificate(
            status=CertStatus.FEASIBLE, grid_hash=problem.grid_hash, weights=w
        )
        if not verify_certificate(problem, cert):
            raise SolverFailure("phase-1 witness failed independent verification")
        return cert

    p = problem.b_ub.shape[0]
    q = problem.b_eq.shape[0]
    # multipliers g on the original rows satisfy g^T A <= 0 (columns) and
    # g^T b > 0; the certificate stores lam = -g_ub >= 0, mu = -g_eq, and
    # drops the normalization row (it cancels in the margin).
    g = result.y
    lam = np.clip(-g[:p], 0.0, None)
    mu = -g[p : p + q]
    margin = _farkas_margin(problem, lam, mu)
    if not margin > 0.0:
        raise SolverFailure("infeasible solve produced a non-positive Farkas margin")
    cert = FeasibilityCertificate(
        status=CertStatus.INFEASIBLE,
        grid_hash=problem.grid_hash,
        farkas_ub=lam,
        farkas_eq=mu,
        margin=margin,
    )
    if not verify_certificate(problem, cert):
        raise SolverFailure("Farkas certificate failed independent verification")
    return cert


def _fsum_dot(row, x) -> float:
    return math.fsum(float(a) * float(b) for a, b in zip(row, x))


def verify_certificate(problem: CertificationProblem, cert: FeasibilityCertificate) -> bool:
    """Re-check a certificate with plain summation, trusting no solver state."""
    if cert.grid_hash != problem.grid_hash:
        return False
    if cert.status is CertStatus.FEASIBLE:
        w = cert.weights
        if w is None or w.shape != (problem.n_atoms,):
            raise ValueError("witness has wrong dimensions")
        if np.any(w < -FEAS_TOL):
            return False
        if abs(math.fsum(map(float, w)) - 1.0) > FEAS_TOL:
            return False
        for row, rhs in zip(problem.A_ub, problem.b_ub):
            if _fsum_dot(row, w) > float(rhs) + FEAS_TOL:
                return False
        for row, rhs in zip(problem.A_eq, problem.b_eq):
            if abs(_fsum_dot(row, w) - float(rhs)) > FEAS_TOL:
                return False
        return True

    lam, mu = cert.farkas_ub, cert.farkas_eq
    if lam is None or mu is None:
        return False
    if lam.shape != (problem.b_ub.shape[0],) or mu.shape != (problem.b_eq.shape[0],):
        raise ValueError("Farkas vector has wrong dimensions")
    if np.any(lam < 0.0):
        return False
    combo_min = math.inf
    for j in range(problem.n_atoms):
        combo = math.fsum(float(lam[i]) * float(problem.A_ub[i, j]) for i in range(lam.shape[0]))
        combo += math.fsum(float(mu[i]) * float(problem.A_eq[i, j]) for i in range(mu.shape[0]))
        combo_min = min(combo_min, combo)
    value = math.fsum(float(lam[i]) * float(problem.b_ub[i]) for i in range(lam.shape[0]))
    value += math.fsum(float(mu[i]) * float(problem.b_eq[i]) for i in range(mu.shape[0]))
    scale = max((abs(float(x)) for x in np.concatenate([lam, mu])), default=0.0)
    if scale <= 0.0:
        return False
    margin = (combo_min - value) / scale
    return margin > 0.0 and margin >= cert.margin - FEAS_TOL


def witness_distribution(problem: CertificationProblem, cert: FeasibilityCertificate) -> SubensembleDistribution:
    """Convert a feasible witness into a model distribution."""
    if cert.status is not CertStatus.FEASIBLE or cert.weights is None:
        raise ValueError("only feasible certificates carry a witness")
    w = cert.weights / math.fsum(map(float, cert.weights))
    keep = w > 0.0
    return SubensembleDistribution(problem.u[keep], problem.v[keep], w[keep])


def problem_to_dict(problem: CertificationProblem) -> dict:
    return {
        "u": [list(map(float, row)) for row in problem.u],
        "v": [list(map(float, row)) for row in problem.v],
        "include_marginals": problem.include_marginals,
        "constraints": [
            {
                "a": list(map(float, c.settings.a)),
                "b": list(map(float, c.settings.b)),
                "e": c.e,
                "ma": c.ma,
                "mb": c.mb,
            }
            for c in problem.constraints
        ],
    }


def problem_from_dict(data: dict) -> CertificationProblem:
    constraints = [
        TargetConstraint(
            settings=SettingsPair(np.asarray(c["a"]), np.asarray(c["b"])),
            e=float(c["e"]),
            ma=None if c.get("ma") is None else float(c["ma"]),
            mb=None if c.get("mb") is None else float(c["mb"]),
        )
        for c in data["constraints"]
    ]
    return build_problem(
        np.asarray(data["u"], dtype=np.float64),
        np.asarray(data["v"], dtype=np.float64),
        constraints,
        include_marginals=bool(data["include_marginals"]),
    )
