"""Projected gradient ascent for the optimal fraction vector.

The objective is the mean log holding period return ``(1/N) log TWR(f)``,
which shares its maximizer with ``TWR`` and acts as a barrier at the ruin
set. Iterates start at ``f = 0`` and stay nonnegative by clamping. Each line
search starts from a Barzilai-Borwein step, capped so that no holding period
return reaches zero, and backtracks until the Armijo condition holds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import domain
from .assumptions import TOL_CONE, TOL_RANK, assumption_report
from .errors import (
    AssumptionViolation,
    InconsistentReduction,
    RuinDomain,
    TooManySystems,
    UnboundedAscent,
)
from .ingest import NormalizedReturns, ReturnMatrix, eliminate_system, normalize

__all__ = [
    "SolverOptions",
    "SolverResult",
    "KKTCertificate",
    "Location",
    "TwrDerivatives",
    "derivatives",
    "twr_gradient",
    "optimize",
    "solve",
    "eliminate_system",
    "refine_boundary",
    "grid_oracle",
]

LOG_TWR_CEILING = 700.0
STEP_MIN, STEP_MAX = 1e-10, 1e10


@dataclass(frozen=True)
class SolverOptions:
    tol_grad: float = 1e-9
    max_iter: int = 100_000
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    boundary_fraction: float = 0.95

    def __post_init__(self):
        if not self.tol_grad > 0:
            raise ValueError("tol_grad must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        for name in ("armijo_c", "backtrack_factor", "boundary_fraction"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie strictly between 0 and 1")


class Location(enum.Enum):
    INTERIOR = "interior"
    ORTHANT_BOUNDARY = "orthant_boundary"


@dataclass(frozen=True)
class KKTCertificate:
    projected_grad_norm: float
    gradient: np.ndarray
    # per active component: gradient <= tol_grad
    active_signs_ok: tuple
    certified: bool


@dataclass(frozen=True)
class SolverResult:
    f_opt: np.ndarray
    twr_value: float
    log_twr_mean_value: float
    risk_value: float
    iterations: int
    location: Location
    active_set: tuple  # 0-based system indices with f_k == 0
    kkt: KKTCertificate
    eliminated_chain: tuple = ()
    # accumulated objective after each accepted step, starting value first
    trace: tuple = field(default=(), repr=False)

    @property
    def certified(self) -> bool:
        return self.kkt.certified


@dataclass(frozen=True)
class TwrDerivatives:
    """First and second order information at an interior point.

    ``gradient`` is the gradient of ``(1/N) log TWR``. ``hessian_B`` is
    ``sum_i w_i w_i^T`` with ``w_i = y_i - mean(y)`` and ``y_i = r_i / HPR_i``,
    the matrix whose semi-definiteness gives concavity of ``TWR^(1/N)``.
    ``hessian_log`` is the Hessian of ``(1/N) log TWR`` itself,
    ``-(1/N) sum_i y_i y_i^T``.
    """

    gradient: np.ndarray
    hessian_B: np.ndarray
    hessian_log: np.ndarray


def derivatives(R: NormalizedReturns, f, tol_ruin: float = domain.TOL_RUIN) -> TwrDerivatives:
    h = domain.hprs(R, f)
    if np.min(h) <= tol_ruin:
        raise RuinDomain(f"holding period return {np.min(h)!r} too close to 0")
    y = R.rows / h[:, None]
    w = y - y.mean(axis=0)
    n = R.n_periods
    return TwrDerivatives(
        gradient=y.mean(axis=0),
        hessian_B=w.T @ w,
        hessian_log=-(y.T @ y) / n,
    )


def twr_gradient(R: NormalizedReturns, f) -> np.ndarray:
    """Gradient of ``TWR`` itself: ``TWR(f) * sum_i r_i / HPR_i``."""
    g = derivatives(R, f).gradient
    return domain.twr(R, f) * R.n_periods * g


def _kkt(g: np.ndarray, f: np.ndarray, tol: float) -> KKTCertificate:
    active = f <= 0
    pg = np.where(active & (g < 0), 0.0, g)
    norm = float(np.max(np.abs(pg))) if pg.size else 0.0
    signs = tuple(bool(g[k] <= tol) for k in np.flatnonzero(active))
    inactive_ok = bool(np.all(np.abs(g[~active]) <= tol))
    return KKTCertificate(norm, g.copy(), signs, inactive_ok and all(signs))


def _check(R: NormalizedReturns, tol_rank: float, tol_cone: float):
    # normalized columns give the same verdicts as the raw matrix
    report = assumption_report(ReturnMatrix(R.rows, R.system_names), tol_rank, tol_cone)
    if not report.overall:
        raise AssumptionViolation(report)


def optimize(
    R: NormalizedReturns,
    opts: Optional[SolverOptions] = None,
    f0=None,
    check: bool = True,
    tol_rank: float = TOL_RANK,
    tol_cone: float = TOL_CONE,
) -> SolverResult:
    """Maximize TWR over the admissible set.

    Args:
        R: normalized returns.
        opts: solver settings; defaults to :class:`SolverOptions`.
        f0: optional warm start, must be nonnegative with every HPR > 0.
            Defaults to the zero vector.
        check: run the admissibility checks first and raise
            :class:`AssumptionViolation` if they fail.

    Hitting ``max_iter`` does not raise; the best iterate is returned with
    ``kkt.certified`` set to False.
    """
    opts = opts or SolverOptions()
    if check:
        _check(R, tol_rank, tol_cone)
    rows = R.rows
    m = R.n_systems

    f = np.zeros(m) if f0 is None else np.maximum(np.asarray(f0, dtype=float), 0.0)
    d = rows @ f
    if np.min(d) <= -1.0:
        raise RuinDomain("warm start is not strictly inside the admissible set")
    val = float(np.mean(np.log1p(d)))
    trace = [val]

    it = 0
    trial = 1.0
    f_prev = g_prev = None
    while True:
        h = 1.0 + d
        g = np.mean(rows / h[:, None], axis=0)
        direction = np.where((f <= 0) & (g < 0), 0.0, g)
        pg = np.max(np.abs(direction))
        if pg <= opts.tol_grad and _distance_bound(rows, h, f, direction) <= opts.tol_grad:
            break
        if it >= opts.max_iter:
            break

        if f_prev is not None:
            trial = _spectral_step(f - f_prev, g - g_prev)
        slope = rows @ direction
        falling = slope < 0
        t_edge = np.min(h[falling] / -slope[falling]) if np.any(falling) else math.inf
        t = min(trial, opts.boundary_fraction * t_edge)

        while True:
            cand = np.maximum(f + t * direction, 0.0)
            step = cand - f
            ds = rows @ step
            # increment of the objective, computed relative to h so that
            # gains far below the objective's rounding level stay visible
            ratio = ds / h
            if np.min(ratio) > -1.0:
                gain = float(np.mean(np.log1p(ratio)))
                if gain >= opts.armijo_c * float(g @ step):
                    break
            t *= opts.backtrack_factor
            if t < 1e-300:
                cand = None
                break
        if cand is None:
            # no representable ascent step left
            break

        f_prev, g_prev = f, g
        f = cand
        d = rows @ f
        val += gain
        trace.append(val)
        it += 1
        if val > LOG_TWR_CEILING:
            raise UnboundedAscent(
                f"log TWR/N exceeded {LOG_TWR_CEILING}; a risk-free direction slipped past the checks"
            )

    return _result(R, f, g, it, opts, tuple(trace))


def _distance_bound(rows, h, f, direction) -> float:
    """Estimated distance to the optimum, ``|projected gradient| / curvature``.

    On flat problems a small gradient alone leaves f poorly determined, so
    the smallest curvature over the free components scales the estimate.
    """
    free = ~((f <= 0) & (direction == 0))
    if not np.any(free):
        return 0.0
    y = rows[:, free] / h[:, None]
    curvature = np.linalg.eigvalsh(y.T @ y / len(h))[0]
    if curvature <= 0:
        return math.inf
    return float(np.linalg.norm(direction[free]) / curvature)


def _spectral_step(s: np.ndarray, y: np.ndarray) -> float:
    """Barzilai-Borwein trial step ``s.s / -s.y`` for a concave objective, safeguarded."""
    curvature = -float(s @ y)
    if curvature <= 0:
        return 1.0
    return min(max(float(s @ s) / curvature, STEP_MIN), STEP_MAX)


def _result(R, f, g, iterations, opts, trace=()) -> SolverResult:
    kkt = _kkt(g, f, opts.tol_grad)
    active = tuple(int(k) for k in np.flatnonzero(f <= 0))
    f = f + 0.0  # normalizes -0.0
    f.setflags(write=False)
    return SolverResult(
        f_opt=f,
        twr_value=float(domain.twr(R, f)),
        log_twr_mean_value=domain.log_twr_mean(R, f),
        risk_value=domain.risk(R, f),
        iterations=iterations,
        location=Location.ORTHANT_BOUNDARY if active else Location.INTERIOR,
        active_set=active,
        kkt=kkt,
        trace=trace,
    )


def refine_boundary(
    R: NormalizedReturns, result: SolverResult, opts: Optional[SolverOptions] = None
) -> SolverResult:
    """Cross-check a boundary optimum by eliminating its inactive systems one by one.

    Each active system is dropped in turn (highest index first) and the
    reduced problem is solved from scratch. Since the full optimum lies in the
    reduced subspace, the reduced optimum must coincide with it on the
    remaining components.

    Raises:
        InconsistentReduction: a reduced optimum differs by more than
            ``10 * tol_grad`` in some component.
    """
    opts = opts or SolverOptions()
    if not result.active_set:
        return result
    keep = list(range(R.n_systems))
    reduced = R
    chain = []
    for k in sorted(result.active_set, reverse=True):
        pos = keep.index(k)
        reduced = reduced.drop(pos)
        keep.pop(pos)
        chain.append(k)
        sub = optimize(reduced, opts, check=False)
        expected = result.f_opt[keep]
        gap = float(np.max(np.abs(sub.f_opt - expected)))
        if gap > 10 * opts.tol_grad:
            raise InconsistentReduction(
                f"after eliminating systems {chain} the reduced optimum differs by {gap:.3g}"
            )
    return replace(result, eliminated_chain=tuple(chain))


def solve(
    T: ReturnMatrix,
    opts: Optional[SolverOptions] = None,
    tol_rank: float = TOL_RANK,
    tol_cone: float = TOL_CONE,
):
    """Check, normalize, optimize and (for boundary optima) refine.

    Returns ``(report, result)``; ``result`` is None when the checks fail.
    """
    report = assumption_report(T, tol_rank, tol_cone)
    if not report.overall:
        return report, None
    R = normalize(T)
    result = optimize(R, opts, check=False)
    if result.certified and result.location is Location.ORTHANT_BOUNDARY:
        result = refine_boundary(R, result, opts)
    return report, result


def grid_oracle(R: NormalizedReturns, resolution: int):
    """Brute-force argmax of TWR over a lattice covering the admissible set.

    Axis ``k`` is sampled at ``0, h_k, ..., resolution * h_k`` where
    ``resolution * h_k`` is where the ruin set cuts that axis. Exact ties go
    to the lexicographically smallest lattice point. Intended for tests only.
    """
    m = R.n_systems
    if m > 4:
        raise TooManySystems(f"lattice search is limited to 4 systems, got {m}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    eye = np.eye(m)
    steps = np.array([domain.boundary_scale(R, eye[k]) for k in range(m)]) / resolution
    axis = np.arange(resolution + 1)

    # contributions of the trailing axes, shape (resolution+1,)*(m-1) + (N,)
    tail = np.zeros((1,) * (m - 1) + (R.n_periods,))
    for k in range(1, m):
        shape = [1] * (m - 1) + [1]
        shape[k - 1] = resolution + 1
        col = (axis * steps[k])[:, None] * R.rows[:, k]
        tail = tail + col.reshape(shape[:-1] + [R.n_periods])
    tail = np.broadcast_to(tail, (resolution + 1,) * (m - 1) + (R.n_periods,))

    best_val, best_idx = -math.inf, None
    for i0 in axis:
        dots = i0 * steps[0] * R.rows[:, 0] + tail
        inside = np.flatnonzero(np.all(dots > -1.0, axis=-1).ravel())
        if inside.size == 0:
            continue
        logs = np.sum(np.log1p(dots.reshape(-1, R.n_periods)[inside]), axis=-1)
        j = int(np.argmax(logs))
        if logs[j] > best_val:
            best_val = float(logs[j])
            best_idx = (int(i0),) + np.unravel_index(inside[j], dots.shape[:-1])
    if best_idx is None:
        best_idx = (0,) * m
    f_best = np.array(best_idx[:m], dtype=float) * steps
    return f_best, float(domain.twr(R, f_best))
