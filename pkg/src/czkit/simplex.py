"""Dense primal simplex with Bland's rule for the package's small LPs.

Solves   max c.x  subject to  A x <= b,  x >= 0,  with  b >= 0,
so the slack basis is feasible and no phase-1 is needed.  Bland's smallest
index rule guarantees termination under degeneracy; determinism over speed is
the point, problem sizes stay in the hundreds of rows.
"""
from __future__ import annotations

import numpy as np

from .errors import LPInfeasible, LPNotConverged

TOL = 1e-9


def solve_lp(c: np.ndarray, A: np.ndarray, b: np.ndarray,
             max_pivots: int | None = None) -> tuple[float, np.ndarray]:
    """Return (optimal value, optimal x) of max c.x s.t. A x <= b, x >= 0.

    Requires b >= 0 (the origin is feasible).  Raises LPNotConverged if the
    pivot budget is exhausted and LPInfeasible on a negative RHS.
    """
    c = np.asarray(c, dtype=float).ravel()
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    if len(b) != m or len(c) != n:
        raise ValueError("inconsistent LP shapes")
    if np.any(b < -TOL):
        raise LPInfeasible("negative right-hand side; slack basis infeasible")
    b = np.maximum(b, 0.0)

    # row scaling for conditioning (exact reformulation)
    rs = np.maximum(np.max(np.abs(A), axis=1), 1e-30)
    A = A / rs[:, None]
    b = b / rs

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    limit = max_pivots if max_pivots is not None else 200 * (m + n + 10)

    for _ in range(limit):
        red = T[m, :n + m]
        enter = -1
        for j in range(n + m):                      # Bland: smallest improving index
            if red[j] < -TOL:
                enter = j
                break
        if enter < 0:
            x = np.zeros(n + m)
            for i, bi in enumerate(basis):
                x[bi] = T[i, -1]
            return float(T[m, -1]), x[:n]
        col = T[:m, enter]
        rows = np.nonzero(col > TOL)[0]
        if len(rows) == 0:
            raise LPNotConverged("objective unbounded above",
                                 {"entering": enter})
        ratios = T[rows, -1] / col[rows]
        best = np.min(ratios)
        cand = rows[ratios <= best + TOL * (1.0 + abs(best))]
        leave = min(cand, key=lambda i: basis[i])   # Bland tie-break
        piv = T[leave, enter]
        T[leave] /= piv
        for i in range(m + 1):
            if i != leave and T[i, enter] != 0.0:
                T[i] -= T[i, enter] * T[leave]
        T[:m, -1] = np.maximum(T[:m, -1], 0.0)      # clamp degenerate roundoff
        basis[leave] = enter

    raise LPNotConverged("pivot budget exhausted",
                         {"pivots": limit, "tolerance": TOL})
