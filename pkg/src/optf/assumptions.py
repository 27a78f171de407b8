"""Admissibility checks run before any optimization.

A return matrix is accepted when every system has a recorded loss, every
system has a positive mean return, the columns are linearly independent, and
no nonzero nonnegative fraction vector avoids a loss in every period.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ingest import NormalizedReturns, ReturnMatrix
from .simplex import phase_one

TOL_RANK = 1e-10
TOL_CONE = 1e-9


@dataclass(frozen=True)
class LossCheck:
    passed: bool
    failing_columns: tuple  # 0-based


@dataclass(frozen=True)
class ProfitCheck:
    passed: bool
    means: tuple
    failing_columns: tuple


@dataclass(frozen=True)
class RankCheck:
    passed: bool
    rank: int
    smallest_singular_value: float


@dataclass(frozen=True)
class RiskFreeCheck:
    passed: bool
    witness: Optional[np.ndarray]
    diagnostic: str


@dataclass(frozen=True)
class AssumptionReport:
    loss_per_column: LossCheck
    profitable: ProfitCheck
    full_rank: RankCheck
    no_risk_free: RiskFreeCheck

    @property
    def overall(self) -> bool:
        return (
            self.loss_per_column.passed
            and self.profitable.passed
            and self.full_rank.passed
            and self.no_risk_free.passed
        )


def check_loss_history(T: ReturnMatrix) -> LossCheck:
    has_loss = np.any(T.entries < 0, axis=0)
    failing = tuple(int(k) for k in np.flatnonzero(~has_loss))
    return LossCheck(not failing, failing)


def check_profitable(T: ReturnMatrix) -> ProfitCheck:
    means = T.entries.mean(axis=0)
    failing = tuple(int(k) for k in np.flatnonzero(~(means > 0)))
    return ProfitCheck(not failing, tuple(float(x) for x in means), failing)


def check_full_rank(T: ReturnMatrix, tol_rank: float = TOL_RANK) -> RankCheck:
    """Numerical rank from singular values relative to the largest one."""
    s = np.linalg.svd(T.entries, compute_uv=False)
    rank = int(np.sum(s > tol_rank * s[0])) if s[0] > 0 else 0
    smallest = float(s[-1]) if T.n_periods >= T.n_systems else 0.0
    return RankCheck(rank == T.n_systems, rank, smallest)


def check_no_risk_free(R, tol_cone: float = TOL_CONE) -> RiskFreeCheck:
    """Search for a risk-free direction ``f >= 0, sum(f) = 1, <r_i, f> >= 0``.

    ``R`` is a :class:`NormalizedReturns` or a plain ``(N, M)`` row array. The
    check passes when no such direction exists; otherwise the direction is
    returned as a witness.
    """
    rows = R.rows if isinstance(R, NormalizedReturns) else np.asarray(R, dtype=float)
    n, m = rows.shape
    # variables (f, s) >= 0 with R f - s = 0 and sum(f) = 1
    A = np.zeros((n + 1, m + n))
    A[:n, :m] = rows
    A[:n, m:] = -np.eye(n)
    A[n, :m] = 1.0
    b = np.zeros(n + 1)
    b[n] = 1.0
    res = phase_one(A, b, max_iter=10 * (n + m + 1))
    if res.objective > tol_cone:
        return RiskFreeCheck(True, None, "every nonzero allocation loses in some period")

    f = np.maximum(res.x[:m], 0.0)
    f /= f.sum()
    dots = rows @ f
    if np.any(dots > tol_cone):
        msg = "risk-free direction found; TWR unbounded along the witness ray"
    else:
        msg = "risk-free direction found; TWR stays at 1 along the witness ray"
    return RiskFreeCheck(False, f, msg)


def _cone_rows(T: ReturnMatrix) -> NormalizedReturns:
    """Normalized rows, tolerating columns without a loss.

    Column scaling by positive factors maps risk-free directions to risk-free
    directions, so lossless columns are scaled by their largest magnitude (or 1)
    and the cone verdict is unaffected.
    """
    t = T.entries
    losses = np.where(t < 0, -t, 0.0).max(axis=0)
    fallback = np.abs(t).max(axis=0)
    scale = np.where(losses > 0, losses, np.where(fallback > 0, fallback, 1.0))
    return NormalizedReturns(scale, t / scale, T.system_names)


def assumption_report(
    T: ReturnMatrix, tol_rank: float = TOL_RANK, tol_cone: float = TOL_CONE
) -> AssumptionReport:
    """Run all four checks; none short-circuits the others."""
    return AssumptionReport(
        loss_per_column=check_loss_history(T),
        profitable=check_profitable(T),
        full_rank=check_full_rank(T, tol_rank),
        no_risk_free=check_no_risk_free(_cone_rows(T), tol_cone),
    )
