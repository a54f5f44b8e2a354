"""Multi-unit, multi-parameter degradation measurements and their CSV form."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError, ParseError


@dataclass(frozen=True, eq=False)
class DegradationDataset:
    """Measurements of ``k`` parameters on ``n`` units.

    Each unit holds an ``(m_i, k)`` block of values and its ``(m_i,)``
    measurement times.  Simulated data are rectangular (every unit shares one
    time grid); field data such as C-MAPSS may be ragged until windowed.
    """

    units: tuple[np.ndarray, ...]
    times: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    unit_ids: tuple[int, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        units = tuple(np.array(u, dtype=float) for u in self.units)
        times = tuple(np.array(t, dtype=float) for t in self.times)
        labels = tuple(self.labels)
        if len(units) != len(times):
            raise InputError("one time vector per unit is required")
        for u, t in zip(units, times):
            if u.ndim != 2 or u.shape[1] != len(labels) or u.shape[0] != t.shape[0]:
                raise InputError(
                    f"unit block of shape {u.shape} does not match {len(labels)} labels "
                    f"and {t.shape[0]} times")
            if not np.isfinite(u).all():
                raise InputError("dataset values must be finite")
            u.setflags(write=False)
            t.setflags(write=False)
        ids = tuple(int(i) for i in self.unit_ids) if self.unit_ids else tuple(range(1, len(units) + 1))
        if len(ids) != len(units):
            raise InputError("unit_ids length must match the number of units")
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "unit_ids", ids)

    @classmethod
    def from_array(cls, x: np.ndarray, times: Sequence[float], labels: Sequence[str],
                   seed: int | None = None, unit_ids: Sequence[int] = ()) -> "DegradationDataset":
        """Build from a ``(k, n, m)`` array indexed ``x[l, i, j]``."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 3:
            raise InputError(f"expected a (k, n, m) array, got shape {x.shape}")
        t = np.asarray(times, dtype=float)
        units = tuple(x[:, i, :].T for i in range(x.shape[1]))
        return cls(units, tuple(t for _ in units), tuple(labels), tuple(unit_ids), seed)

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.units)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.units)

    @property
    def is_rectangular(self) -> bool:
        if not self.units:
            return True
        t0 = self.times[0]
        return all(t.shape == t0.shape and np.array_equal(t, t0) for t in self.times)

    @property
    def values(self) -> np.ndarray:
        """The ``(k, n, m)`` array ``x[l, i, j]``; rectangular datasets only."""
        if not self.is_rectangular:
            raise InputError("dataset is ragged; extract a common window first")
        return np.stack([u.T for u in self.units], axis=1)

    def column(self, label: str) -> np.ndarray:
        """``(n, m)`` array of one parameter."""
        return self.values[self.labels.index(label)]

    def select_units(self, indices: Sequence[int]) -> "DegradationDataset":
        idx = list(indices)
        return DegradationDataset(
            tuple(self.units[i] for i in idx), tuple(self.times[i] for i in idx),
            self.labels, tuple(self.unit_ids[i] for i in idx), self.seed)

    def select_parameters(self, labels: Sequence[str]) -> "DegradationDataset":
        cols = [self.labels.index(lab) for lab in labels]
        return DegradationDataset(
            tuple(u[:, cols] for u in self.units), self.times, tuple(labels),
            self.unit_ids, self.seed)

    # -- long-form CSV: unit,time,<label1>,...,<labelk> ----------------------

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["unit", "time", *self.labels])
            for uid, block, t in zip(self.unit_ids, self.units, self.times):
                for row, tj in zip(block, t):
                    w.writerow([uid, repr(float(tj)), *(repr(float(v)) for v in row)])

    @classmethod
    def from_csv(cls, path: str | Path) -> "DegradationDataset":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: empty file") from None
            if header[:2] != ["unit", "time"] or len(header) < 3:
                raise ParseError(f"{path}: header must start with unit,time and name parameters")
            labels = tuple(header[2:])
            rows: dict[int, list[list[float]]] = {}
            order: list[int] = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != len(header):
                    raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
                try:
                    uid = int(rec[0])
                    vals = [float(v) for v in rec[1:]]
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc}") from None
                if uid not in rows:
                    rows[uid] = []
                    order.append(uid)
                rows[uid].append(vals)
        if not order:
            raise InputError(f"{path}: no data rows")
        blocks = [np.array(rows[u]) for u in order]
        return cls(tuple(b[:, 1:] for b in blocks), tuple(b[:, 0] for b in blocks),
                   labels, tuple(order))
