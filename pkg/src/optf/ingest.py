"""Reading trade returns from CSV and normalizing them by each system's biggest loss.

A return matrix holds absolute returns ``t[i, k]`` of system ``k`` in period
``i``. Normalizing divides column ``k`` by its biggest loss so that every
normalized column bottoms out at exactly -1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    LastSystem,
    NoLossInColumn,
    NonFiniteValue,
    NonNumericCell,
    RaggedRows,
)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ReturnMatrix:
    """Absolute trade returns, one row per period and one column per system.

    The per-column loss requirement is *not* enforced here so that data
    lacking a loss can still be loaded and reported on; it is enforced by
    :func:`biggest_losses` and everything downstream of it.
    """

    entries: np.ndarray
    system_names: tuple = ()

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError(f"need a non-empty 2-D matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            i, k = np.argwhere(~np.isfinite(entries))[0]
            raise NonFiniteValue(int(i) + 1, int(k) + 1, repr(entries[i, k]))
        names = tuple(self.system_names) or default_names(entries.shape[1])
        if len(names) != entries.shape[1]:
            raise ValueError(f"{len(names)} names for {entries.shape[1]} systems")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "system_names", tuple(str(n) for n in names))

    @property
    def n_periods(self) -> int:
        return self.entries.shape[0]

    @property
    def n_systems(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class NormalizedReturns:
    """Rows ``r_i = t_i / t_hat`` together with the biggest-loss vector ``t_hat``."""

    biggest_losses: np.ndarray
    rows: np.ndarray
    system_names: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "biggest_losses", _frozen(self.biggest_losses))
        object.__setattr__(self, "rows", _frozen(self.rows))
        if not self.system_names:
            object.__setattr__(self, "system_names", default_names(self.rows.shape[1]))

    @property
    def n_periods(self) -> int:
        return self.rows.shape[0]

    @property
    def n_systems(self) -> int:
        return self.rows.shape[1]

    def drop(self, k: int) -> "NormalizedReturns":
        """Remove system ``k``. The remaining columns need no renormalization."""
        if self.n_systems < 2:
            raise LastSystem("cannot eliminate the only remaining system")
        keep = [j for j in range(self.n_systems) if j != k]
        return NormalizedReturns(
            self.biggest_losses[keep],
            self.rows[:, keep],
            tuple(self.system_names[j] for j in keep),
        )


def default_names(m: int) -> tuple:
    return tuple(f"S{k + 1}" for k in range(m))


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_returns(text: str, header: Optional[bool] = None) -> ReturnMatrix:
    """Parse a comma-separated table of returns.

    Args:
        text: CSV document. LF or CRLF line endings; blank lines are skipped.
        header: ``True``/``False`` forces the presence/absence of a header row.
            ``None`` treats the first row as a header when its first field is
            not a number.

    Raises:
        EmptyInput, RaggedRows, NonNumericCell, NonFiniteValue
    """
    # (1-based line number, fields)
    records = [
        (n, [cell.strip() for cell in fields])
        for n, fields in enumerate(csv.reader(text.splitlines()), start=1)
        if fields and any(cell.strip() for cell in fields)
    ]
    if not records:
        raise EmptyInput("no rows in input")

    if header is None:
        header = not _is_number(records[0][1][0])
    names: Sequence[str] = ()
    if header:
        names = records[0][1]
        records = records[1:]
        if not records:
            raise EmptyInput("header row but no data rows")

    width = len(names) if header else len(records[0][1])
    values = []
    for line, fields in records:
        if len(fields) != width:
            raise RaggedRows(line, width, len(fields))
        row = []
        for col, cell in enumerate(fields, start=1):
            try:
                x = float(cell)
            except ValueError:
                raise NonNumericCell(line, col, cell) from None
            if not math.isfinite(x):
                raise NonFiniteValue(line, col, cell)
            row.append(x)
        values.append(row)
    return ReturnMatrix(np.array(values), tuple(names))


def serialize_returns(T: ReturnMatrix) -> str:
    """Write ``T`` as CSV with a header row; the inverse of :func:`parse_returns`."""
    lines = [",".join(T.system_names)]
    lines += [",".join(repr(float(x)) for x in row) for row in T.entries]
    return "\n".join(lines) + "\n"


def biggest_losses(T: ReturnMatrix) -> np.ndarray:
    """Absolute value of the worst (most negative) return of each system."""
    t = T.entries
    losses = np.where(t < 0, -t, 0.0).max(axis=0)
    for k, loss in enumerate(losses):
        if not loss > 0:
            raise NoLossInColumn(k + 1)
    return losses


def normalize(T: ReturnMatrix) -> NormalizedReturns:
    t_hat = biggest_losses(T)
    return NormalizedReturns(t_hat, T.entries / t_hat, T.system_names)


def eliminate_system(T: ReturnMatrix, k: int) -> ReturnMatrix:
    """Return ``T`` without column ``k`` (0-based)."""
    if T.n_systems < 2:
        raise LastSystem("cannot eliminate the only remaining system")
    if not 0 <= k < T.n_systems:
        raise IndexError(f"system index {k} out of range for {T.n_systems} systems")
    keep = [j for j in range(T.n_systems) if j != k]
    return ReturnMatrix(T.entries[:, keep], tuple(T.system_names[j] for j in keep))
