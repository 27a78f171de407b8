"""Holding period returns, terminal wealth relative and the admissible set.

All evaluators accept either a single fraction vector of shape ``(M,)`` or a
batch of shape ``(..., M)``; a single vector is evaluated as a batch of one so
both paths share the exact same arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NoLossDirection, RuinDomain
from .ingest import NormalizedReturns

TOL_RUIN = 1e-12


class Admissibility(enum.Enum):
    INTERIOR = "interior"
    RUIN = "ruin"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class AdmissibilityStatus:
    kind: Admissibility
    min_hpr: float
    argmin_period: int  # 0-based


def _dots(R: NormalizedReturns, f) -> np.ndarray:
    """<r_i, f> for every period, shape ``(..., N)``.

    Elementwise product followed by a reduction over the system axis; unlike
    a BLAS matmul this rounds identically regardless of the batch shape.
    """
    f = np.asarray(f, dtype=float)
    return np.sum(f[..., None, :] * R.rows, axis=-1)


def _scalar_or_array(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def hprs(R: NormalizedReturns, f) -> np.ndarray:
    """All N holding period returns ``1 + <r_i, f>``."""
    return 1.0 + _dots(R, f)


def hpr(R: NormalizedReturns, f, i: int) -> float:
    """Holding period return of period ``i`` (0-based)."""
    return float(hprs(R, f)[i])


def twr(R: NormalizedReturns, f, tol_ruin: float = TOL_RUIN):
    """Terminal wealth relative, the product of all holding period returns.

    Interior points are evaluated as ``exp(sum(log HPR))``. Points on the ruin
    set return exactly 0; points outside the admissible set fall back to the
    plain product.
    """
    f = np.asarray(f, dtype=float)
    single = f.ndim == 1
    F = f[None] if single else f
    d = _dots(R, F)
    lo = d.min(axis=-1)
    inside = lo > tol_ruin - 1.0
    with np.errstate(invalid="ignore", divide="ignore"):
        logs = np.sum(np.log1p(np.where(inside[..., None], d, 0.0)), axis=-1)
    out = np.where(inside, np.exp(logs), np.prod(1.0 + d, axis=-1))
    out = np.where(~inside & (lo >= -1.0 - tol_ruin), 0.0, out)
    return _scalar_or_array(out, single)


def log_twr_mean(R: NormalizedReturns, f) -> float:
    """``(1/N) * log TWR(f)``, the objective the solver maximizes."""
    d = _dots(R, f)
    if np.min(d) <= -1.0:
        raise RuinDomain(f"holding period return {1.0 + np.min(d)!r} <= 0")
    return float(np.mean(np.log1p(d)))


def risk(R: NormalizedReturns, f, tol_ruin: float = TOL_RUIN) -> float:
    """Worst single-period relative loss ``max(-min_i <r_i, f>, 0)``; 1 on the ruin set."""
    status = classify(R, f, tol_ruin)
    if status.kind is Admissibility.RUIN:
        return 1.0
    return max(-float(np.min(_dots(R, f))), 0.0)


def classify(R: NormalizedReturns, f, tol_ruin: float = TOL_RUIN) -> AdmissibilityStatus:
    f = np.asarray(f, dtype=float)
    negative = bool(np.any(f < -tol_ruin))
    # rounding residue like -0.0 or -1e-17 counts as zero
    h = hprs(R, np.maximum(f, 0.0))
    i = int(np.argmin(h))
    lo = float(h[i])
    if negative or lo < -tol_ruin:
        kind = Admissibility.OUTSIDE
    elif lo <= tol_ruin:
        kind = Admissibility.RUIN
    else:
        kind = Admissibility.INTERIOR
    return AdmissibilityStatus(kind, lo, i)


def boundary_scale(R: NormalizedReturns, f) -> float:
    """Scale ``s0 > 0`` at which ``s0 * f`` first reaches the ruin set."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0) or not np.any(f > 0):
        raise ValueError("direction must be nonnegative and nonzero")
    worst = float(np.min(_dots(R, f)))
    if worst >= 0:
        raise NoLossDirection("no period loses along this direction")
    return -1.0 / worst
