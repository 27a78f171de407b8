"""Machine-readable output: run reports as JSON and TWR surface grids as CSV."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import linprog

from . import __version__, domain
from .assumptions import AssumptionReport
from .errors import BadSlice
from .ingest import NormalizedReturns, ReturnMatrix
from .solver import SolverResult

GRID_HEADER = "f_a,f_b,twr,outside"


@dataclass(frozen=True)
class RunReport:
    input_digest: str
    assumptions: AssumptionReport
    solution: Optional[SolverResult] = None
    tool_version: str = __version__

    def __post_init__(self):
        if self.solution is not None and not self.assumptions.overall:
            raise ValueError("a solution cannot accompany failed assumptions")


def input_digest(T: ReturnMatrix) -> str:
    h = hashlib.sha256()
    h.update(repr(T.entries.shape).encode())
    h.update("\x1f".join(T.system_names).encode())
    h.update(np.ascontiguousarray(T.entries, dtype="<f8").tobytes())
    return "sha256:" + h.hexdigest()


def _floats(xs):
    return [float(x) for x in xs]


def assumptions_dict(report: AssumptionReport) -> dict:
    w = report.no_risk_free.witness
    return {
        "loss_per_column": {
            "passed": report.loss_per_column.passed,
            "failing_columns": list(report.loss_per_column.failing_columns),
        },
        "profitable": {
            "passed": report.profitable.passed,
            "means": _floats(report.profitable.means),
            "failing_columns": list(report.profitable.failing_columns),
        },
        "full_rank": {
            "passed": report.full_rank.passed,
            "rank": report.full_rank.rank,
            "smallest_singular_value": report.full_rank.smallest_singular_value,
        },
        "no_risk_free": {
            "passed": report.no_risk_free.passed,
            "witness": None if w is None else _floats(w),
            "diagnostic": report.no_risk_free.diagnostic,
        },
        "overall": report.overall,
    }


def solution_dict(result: SolverResult) -> dict:
    return {
        "f_opt": _floats(result.f_opt),
        "twr": result.twr_value,
        "log_twr_mean": result.log_twr_mean_value,
        "risk": result.risk_value,
        "iterations": result.iterations,
        "location": result.location.value,
        "active_set": list(result.active_set),
        "kkt": {
            "projected_grad_norm": result.kkt.projected_grad_norm,
            "certified": result.kkt.certified,
        },
        "eliminated_chain": list(result.eliminated_chain),
    }


def report_dict(report: RunReport) -> dict:
    return {
        "input_digest": report.input_digest,
        "tool_version": report.tool_version,
        "assumptions": assumptions_dict(report.assumptions),
        "solution": None if report.solution is None else solution_dict(report.solution),
    }


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = "%.17g" % x
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with insertion-ordered keys and 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    return json.dumps(obj)


def to_json(report) -> str:
    """Serialize a :class:`RunReport` (or :class:`AssumptionReport`) deterministically."""
    if isinstance(report, AssumptionReport):
        return dumps(assumptions_dict(report)) + "\n"
    return dumps(report_dict(report)) + "\n"


def _slice_extent(R: NormalizedReturns, free, base) -> list:
    """Largest value each free coordinate reaches on the admissible slice."""
    rows = R.rows[:, free]
    rhs = 1.0 + R.rows @ base
    upper = []
    for j in range(len(free)):
        c = np.zeros(len(free))
        c[j] = -1.0
        res = linprog(c, A_ub=-rows, b_ub=rhs, bounds=[(0, None)] * len(free), method="highs")
        if res.status == 0 and -res.fun > 0:
            upper.append(float(-res.fun))
        else:
            # empty or unbounded slice; fall back to the ruin point on the axis
            upper.append(1.0)
    return upper


def surface_grid(
    R: NormalizedReturns,
    resolution: int,
    fixed: Mapping[int, float],
    workers: int = 1,
    tol_ruin: float = domain.TOL_RUIN,
) -> str:
    """TWR on a ``resolution x resolution`` lattice over a 2-D slice of the admissible set.

    ``fixed`` maps 0-based system indices to their fixed fractions; exactly
    two systems must remain free. Lattice points outside the admissible set
    get ``twr = 0`` and ``outside = 1``.
    """
    m = R.n_systems
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    bad = [k for k in fixed if not 0 <= k < m]
    if bad:
        raise BadSlice(f"unknown system indices {bad}")
    free = [k for k in range(m) if k not in fixed]
    if len(free) != 2:
        raise BadSlice(f"need exactly two free systems, got {len(free)}")
    if any(v < 0 for v in fixed.values()):
        raise BadSlice("fixed fractions must be nonnegative")

    base = np.zeros(m)
    for k, v in fixed.items():
        base[k] = v
    ua, ub = _slice_extent(R, free, base)
    fa = np.linspace(0.0, ua, resolution)
    fb = np.linspace(0.0, ub, resolution)
    F = np.repeat(base[None], resolution * resolution, axis=0)
    F[:, free[0]] = np.repeat(fa, resolution)
    F[:, free[1]] = np.tile(fb, resolution)

    def evaluate(chunk):
        outside = np.min(domain.hprs(R, chunk), axis=-1) < -tol_ruin
        values = np.where(outside, 0.0, domain.twr(R, chunk, tol_ruin))
        return values, outside

    chunks = np.array_split(F, max(1, workers))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(evaluate, chunks))
    values = np.concatenate([p[0] for p in parts])
    outside = np.concatenate([p[1] for p in parts])

    lines = [GRID_HEADER]
    for f, v, o in zip(F, values, outside):
        lines.append(f"{float(f[free[0]])!r},{float(f[free[1]])!r},{float(v)!r},{int(o)}")
    return "\n".join(lines) + "\n"
