"""Observation matrices for causal discovery.

``S1`` stacks raw measurements; ``S2`` stacks per-unit increments
``x[j] - x[j-1]``.  Rows are unit-major, time-minor in both cases.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .dataset import DegradationDataset
from .errors import InputError, ParseError

Strategy = Literal["S1", "S2"]
STRATEGIES: tuple[str, ...] = ("S1", "S2")


@dataclass(frozen=True, eq=False)
class DataMatrix:
    values: np.ndarray
    labels: tuple[str, ...]
    strategy: str

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(self.labels):
            raise InputError(f"values of shape {v.shape} do not match {len(self.labels)} labels")
        if not np.isfinite(v).all():
            raise InputError("data matrix has missing or non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path: str | Path) -> None:
        """Write values with a label header plus a ``<path>.json`` sidecar."""
        path = Path(path)
        with open(path, "w") as fh:
            fh.write(",".join(self.labels) + "\n")
            for row in self.values:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        meta = {"strategy": self.strategy, "rows": self.rows, "labels": list(self.labels)}
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "DataMatrix":
        path = Path(path)
        lines = path.read_text().splitlines()
        if not lines:
            raise InputError(f"{path}: empty file")
        labels = tuple(lines[0].split(","))
        try:
            values = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:] if ln],
                              dtype=float).reshape(-1, len(labels))
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
        sidecar = path.with_suffix(path.suffix + ".json")
        strategy = json.loads(sidecar.read_text())["strategy"] if sidecar.exists() else "S1"
        return cls(values, labels, strategy)


def _standardized(v: np.ndarray) -> np.ndarray:
    sd = v.std(axis=0)
    sd[sd == 0] = 1.0
    return (v - v.mean(axis=0)) / sd


def build_s1(d: DegradationDataset, standardize: bool = False) -> DataMatrix:
    """Raw measurements, one row per (unit, time)."""
    if d.n == 0 or sum(d.lengths) == 0:
        raise InputError("dataset has no measurements")
    values = np.vstack(d.units)
    if standardize:
        values = _standardized(values)
    return DataMatrix(values, d.labels, "S1")


def build_s2(d: DegradationDataset, standardize: bool = False) -> DataMatrix:
    """Increments between consecutive measurements of each unit.

    Differences are taken inside each unit, so no row spans two units.
    """
    if d.n == 0:
        raise InputError("dataset has no units")
    short = [uid for uid, m in zip(d.unit_ids, d.lengths) if m < 2]
    if short:
        raise InputError(f"increments need >= 2 measurements per unit; units {short} have fewer")
    values = np.vstack([np.diff(u, axis=0) for u in d.units])
    if standardize:
        values = _standardized(values)
    return DataMatrix(values, d.labels, "S2")


def build_matrix(d: DegradationDataset, strategy: str, standardize: bool = False) -> DataMatrix:
    if strategy == "S1":
        return build_s1(d, standardize)
    if strategy == "S2":
        return build_s2(d, standardize)
    raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
