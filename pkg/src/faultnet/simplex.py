"""Dense two-phase simplex for small cutting-plane models.

Solves  min c.x  subject to  A x >= b,  0 <= x <= ub  in tableau form.
Sized for desk-scale models (tens of variables, a few hundred rows), which
is all the cutting-plane driver ever produces.  Pivot rule: Dantzig with
lowest-index ties, falling back to Bland's rule after 1000 degenerate
pivots; pivot tolerance 1e-9.  Fully deterministic.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import LpUnbounded

PIVOT_TOL = 1e-9
DEGENERATE_LIMIT = 1000
MAX_ITERATIONS = 200_000


class SimplexStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def solve_dense_lp(
    objective,
    rows,
    upper_bounds=1.0,
) -> tuple[SimplexStatus, list[float], float]:
    """Minimize objective subject to sparse >=-rows and box constraints.

    objective: per-variable costs.
    rows: list of (terms, rhs) with terms = [(var index, coeff), ...].
    upper_bounds: scalar or per-variable upper bound (None entry = free up).

    Returns (status, x, objective value); raises nothing, reports status.
    """
    n = len(objective)
    if isinstance(upper_bounds, (int, float)) or upper_bounds is None:
        ubs = [upper_bounds] * n
    else:
        ubs = list(upper_bounds)
    bounded = [j for j in range(n) if ubs[j] is not None]

    m_ge = len(rows)
    m_ub = len(bounded)
    m = m_ge + m_ub

    # Columns: x (n) | surplus/slack for >= rows (m_ge) | ub slacks (m_ub).
    total = n + m_ge + m_ub
    A = np.zeros((m, total))
    b = np.zeros(m)
    for i, (terms, rhs) in enumerate(rows):
        for j, coeff in terms:
            A[i, j] += coeff
        A[i, n + i] = -1.0  # surplus
        b[i] = rhs
    for k, j in enumerate(bounded):
        i = m_ge + k
        A[i, j] = 1.0
        A[i, n + m_ge + k] = 1.0  # slack
        b[i] = ubs[j]

    # Normalize to b >= 0 (flips surplus signs where rhs < 0).
    for i in range(m):
        if b[i] < 0:
            A[i, :] *= -1.0
            b[i] *= -1.0

    # Initial basis: slack columns where they are +1, else artificials.
    basis = [-1] * m
    art_cols = []
    for i in range(m):
        slack_col = None
        for j in range(n, total):
            if A[i, j] == 1.0 and np.count_nonzero(A[:, j]) == 1:
                slack_col = j
                break
        if slack_col is not None and basis.count(slack_col) == 0:
            basis[i] = slack_col
    for i in range(m):
        if basis[i] == -1:
            art_cols.append(A.shape[1])
            col = np.zeros((m, 1))
            col[i, 0] = 1.0
            A = np.hstack([A, col])
            basis[i] = A.shape[1] - 1

    tab = np.hstack([A, b.reshape(-1, 1)])

    def pivot(tab, basis, row, col):
        tab[row, :] /= tab[row, col]
        for r in range(tab.shape[0]):
            if r != row and abs(tab[r, col]) > 0:
                tab[r, :] -= tab[r, col] * tab[row, :]
        basis[row] = col

    def run_phase(tab, basis, c_full):
        """Optimize c_full over the current tableau in place."""
        # Reduced costs row kept separately.
        z = c_full.copy().astype(float)
        obj = 0.0
        for i, bc in enumerate(basis):
            if c_full[bc] != 0.0:
                z -= c_full[bc] * tab[i, :-1]
                obj += c_full[bc] * tab[i, -1]
        degenerate = 0
        bland = False
        for _ in range(MAX_ITERATIONS):
            if bland:
                enter = next((j for j in range(len(z)) if z[j] < -PIVOT_TOL), None)
            else:
                j_min = int(np.argmin(z))
                enter = j_min if z[j_min] < -PIVOT_TOL else None
            if enter is None:
                return obj, z
            ratios = []
            for i in range(tab.shape[0]):
                a = tab[i, enter]
                if a > PIVOT_TOL:
                    ratios.append((tab[i, -1] / a, i))
            if not ratios:
                raise LpUnbounded("unbounded direction in simplex")
            theta, row = min(ratios)
            delta = z[enter]
            pivot(tab, basis, row, enter)
            z = z - delta * tab[row, :-1]
            new_obj = obj + theta * delta
            if abs(new_obj - obj) <= PIVOT_TOL:
                degenerate += 1
                if degenerate >= DEGENERATE_LIMIT:
                    bland = True
            else:
                degenerate = 0
            obj = new_obj
        raise LpUnbounded("simplex iteration limit hit")

    # Phase 1: drive artificials to zero.
    if art_cols:
        c1 = np.zeros(tab.shape[1] - 1)
        for j in art_cols:
            c1[j] = 1.0
        obj1, _ = run_phase(tab, basis, c1)
        if obj1 > 1e-7:
            return SimplexStatus.INFEASIBLE, [0.0] * n, 0.0
        # Pivot remaining artificials out of the basis where possible.
        for i in range(m):
            if basis[i] in art_cols:
                done = False
                for j in range(n + m_ge + m_ub):
                    if abs(tab[i, j]) > PIVOT_TOL:
                        pivot(tab, basis, i, j)
                        done = True
                        break
                if not done:
                    # Redundant row; leave the zero-valued artificial basic.
                    pass
        # Freeze artificial columns at zero.
        for j in art_cols:
            tab[:, j] = 0.0

    # Phase 2.
    c2 = np.zeros(tab.shape[1] - 1)
    for j in range(n):
        c2[j] = objective[j]
    try:
        obj2, _ = run_phase(tab, basis, c2)
    except LpUnbounded:
        return SimplexStatus.UNBOUNDED, [0.0] * n, float("-inf")

    x = [0.0] * n
    for i, bc in enumerate(basis):
        if bc < n:
            x[bc] = float(tab[i, -1])
    # Clamp float dust into the box.
    for j in range(n):
        if x[j] < 0 and x[j] > -1e-9:
            x[j] = 0.0
        ub = ubs[j]
        if ub is not None and x[j] > ub and x[j] < ub + 1e-9:
            x[j] = ub
    return SimplexStatus.OPTIMAL, x, float(obj2)
