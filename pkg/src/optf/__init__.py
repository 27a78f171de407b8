"""Optimal fractions for several trading systems by maximizing the terminal wealth relative."""

__version__ = "0.1.0"

from .assumptions import AssumptionReport, assumption_report  # noqa: E402
from .domain import classify, hpr, log_twr_mean, risk, twr  # noqa: E402
from .ingest import NormalizedReturns, ReturnMatrix, normalize, parse_returns  # noqa: E402
from .solver import SolverOptions, SolverResult, optimize, solve  # noqa: E402

__all__ = [
    "AssumptionReport",
    "NormalizedReturns",
    "ReturnMatrix",
    "SolverOptions",
    "SolverResult",
    "assumption_report",
    "classify",
    "hpr",
    "log_twr_mean",
    "normalize",
    "optimize",
    "parse_returns",
    "risk",
    "solve",
    "twr",
]
