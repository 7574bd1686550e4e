"""Dense phase-1 simplex for feasibility of {x >= 0, A_ub x <= b_ub, A_eq x = b_eq}.

Minimizes the sum of artificial variables with a fixed pivoting rule
(most-negative reduced cost, lowest column index on ties; lowest row
index on ratio-test ties), so results are bit-stable across runs. On
infeasibility the optimal simplex multipliers provide a Farkas-style
dual vector for the original row orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SolverFailure(RuntimeError):
    """Numerical breakdown or iteration cap; distinct from infeasibility."""


PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9


@dataclass
class Phase1Result:
    feasible: bool
    x: np.ndarray  # primal point (meaningful when feasible)
    y: np.ndarray  # simplex multipliers per original row (meaningful when infeasible)
    objective: float  # optimal sum of artificials


def phase1_simplex(A_ub, b_ub, A_eq, b_eq, max_iter: int | None = None) -> Phase1Result:
    A_ub = np.atleast_2d(np.asarray(A_ub, dtype=np.float64))
    A_eq = np.atleast_2d(np.asarray(A_eq, dtype=np.float64))
    b_ub = np.atleast_1d(np.asarray(b_ub, dtype=np.float64))
    b_eq = np.atleast_1d(np.asarray(b_eq, dtype=np.float64))
    p = b_ub.shape[0]
    q = b_eq.shape[0]
    n = A_ub.shape[1] if p else A_eq.shape[1]
    if (p and A_ub.shape != (p, n)) or (q and A_eq.shape != (q, n)):
        raise ValueError("constraint matrix shapes do not match")
    m = p + q

    A = np.vstack([A_ub if p else np.empty((0, n)), A_eq if q else np.empty((0, n))])
    b = np.concatenate([b_ub, b_eq])

    # orient every row to a nonnegative right-hand side; remember the flips
    flip = np.where(b < 0.0, -1.0, 1.0)
    A = A * flip[:, None]
    b = b * flip

    # columns: n structural | p slacks (inequality rows only) | m artificials
    total = n + p + m
    T = np.zeros((m, total + 1))
    T[:, :n] = A
    for i in range(p):
        T[i, n + i] = flip[i]  # slack coefficient carries the row flip
    for i in range(m):
        T[i, n + p + i] = 1.0
    T[:, -1] = b

    basis = np.arange(n + p, n + p + m)
    cost = np.zeros(total)
    cost[n + p :] = 1.0

    # reduced costs for basis of artificials: r = c - sum of rows
    r = cost - T[:, :-1].sum(axis=0)

    if max_iter is None:
        max_iter = 200 * (m + n) + 1000
    bland_after = 20 * (m + n) + 200

    for it in range(max_iter):
        if it < bland_after:
            j = int(np.argmin(r))
            if r[j] >= -PIVOT_TOL:
                break
        else:
            # Bland's rule as an anti-cycling fallback
            candidates = np.nonzero(r < -PIVOT_TOL)[0]
            if candidates.size == 0:
                break
            j = int(candidates[0])
        col = T[:, j]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            # phase-1 objective is bounded below by 0; unboundedness signals breakdown
            raise SolverFailure("no admissible pivot row (numerical breakdown)")
        ratios = T[rows, -1] / col[rows]
        i = int(rows[np.argmin(ratios)])  # argmin takes the lowest index on ties
        piv = T[i, j]
        T[i] /= piv
        factors = T[:, j].copy()
        factors[i] = 0.0
        T -= np.outer(factors, T[i])
        r -= r[j] * T[i, :-1]
        r[j] = 0.0
        basis[i] = j
    else:
        raise SolverFailure("simplex iteration cap exceeded")

    objective = float(cost[basis] @ T[:, -1])

    x = np.zeros(total)
    x[basis] = T[:, -1]

    # multipliers: artificial column i has reduced cost 1 - y_i in the
    # flipped orientation; undo the flips for the original rows
    y_flipped = 1.0 - r[n + p :]
    y = y_flipped * flip

    return Phase1Result(
        feasible=objective <= FEAS_TOL,
        x=x[:n].copy(),
        y=y,
        objective=objective,
    )
