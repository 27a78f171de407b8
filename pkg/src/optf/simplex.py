"""Dense phase-1 simplex for small feasibility problems.

Decides whether ``{x >= 0 : A x = b}`` (with ``b >= 0``) is nonempty by
minimizing the sum of artificial variables. Bland's rule picks both the
entering and the leaving variable, so the method cannot cycle on the highly
degenerate systems produced by homogeneous cone constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimplexCycle

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class PhaseOneResult:
    objective: float  # sum of artificials at termination
    x: np.ndarray  # values of the original variables
    iterations: int


def phase_one(A, b, max_iter: int) -> PhaseOneResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("phase_one expects b >= 0; flip the sign of those rows first")
    m, n = A.shape

    # tableau columns: original vars, artificials, rhs; last row: reduced costs
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -A.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    for it in range(max_iter + 1):
        costs = tab[m, :-1]
        entering = next((j for j in range(n + m) if costs[j] < -PIVOT_TOL), None)
        if entering is None:
            break
        if it == max_iter:
            raise SimplexCycle(f"phase-1 simplex exceeded {max_iter} pivots")

        col = tab[:m, entering]
        rows = np.flatnonzero(col > PIVOT_TOL)
        ratios = tab[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        leaving = min(ties, key=lambda r: basis[r])

        tab[leaving] /= tab[leaving, entering]
        for r in range(m + 1):
            if r != leaving and tab[r, entering] != 0.0:
                tab[r] -= tab[r, entering] * tab[leaving]
        basis[leaving] = entering

    x = np.zeros(n + m)
    x[basis] = tab[:m, -1]
    return PhaseOneResult(float(x[n:].sum()), x[:n], it)
