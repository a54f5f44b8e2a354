"""C-MAPSS turbofan files, end-of-life windows and unit bootstrap."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import DegradationDataset
from .errors import ConfigError, InputError, MappingValidationError, ParseError, WindowError
from .graph import CausalGraph

N_COLUMNS = 26  # unit, cycle, 3 operational settings, 21 sensors
EXCLUDED_SENSORS = (1, 5, 6, 10, 16, 18, 19)
CMAPSS_LABELS = ("T24", "T30", "T50", "P30", "Nf", "Nc", "Ps30", "phi",
                 "NRf", "NRc", "BPR", "htBleed", "W31", "W32")
KEPT_SENSORS = tuple(s for s in range(1, 22) if s not in EXCLUDED_SENSORS)


def _sensor_column(s: int) -> int:
    return 4 + s  # sensor 1 sits in column 5 (0-based)


def read_cmapss_table(path: str | Path) -> np.ndarray:
    """All records as an ``(rows, 26)`` float array, with line-numbered parse errors."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"C-MAPSS file not found: {path}")
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != N_COLUMNS:
                raise ParseError(f"{path}:{lineno}: expected {N_COLUMNS} columns, found {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no records")
    return np.array(rows)


def parse_cmapss(path: str | Path, constancy_rtol: float = 1e-9) -> DegradationDataset:
    """The 14 informative sensors of every unit, time = cycle.

    The excluded sensors must be constant within each unit: their standard
    deviation may not exceed ``constancy_rtol * |mean|``.
    """
    table = read_cmapss_table(path)
    ids = table[:, 0].astype(int)
    if not np.array_equal(ids, table[:, 0]) or not np.array_equal(table[:, 1].astype(int), table[:, 1]):
        raise ParseError(f"{path}: unit and cycle columns must be integers")
    order = list(dict.fromkeys(ids.tolist()))
    units, times = [], []
    kept = [_sensor_column(s) for s in KEPT_SENSORS]
    for uid in order:
        block = table[ids == uid]
        cycles = block[:, 1]
        if not np.array_equal(cycles, np.arange(1, len(block) + 1)):
            raise ParseError(f"{path}: unit {uid} cycles are not consecutive from 1")
        for s in EXCLUDED_SENSORS:
            col = block[:, _sensor_column(s)]
            if col.std(ddof=1 if len(col) > 1 else 0) > constancy_rtol * abs(col.mean()):
                raise MappingValidationError(
                    f"{path}: sensor {s} of unit {uid} is not constant "
                    f"(sd={col.std(ddof=1 if len(col) > 1 else 0):.3g}); "
                    f"the 14-sensor column mapping does not hold for this file "
                    f"(loosen constancy_rtol if the variation is storage precision)")
        units.append(block[:, kept])
        times.append(cycles)
    return DegradationDataset(tuple(units), tuple(times), CMAPSS_LABELS, tuple(order))


def extract_last_window(d: DegradationDataset, w: int) -> DegradationDataset:
    """Last ``w`` measurements of every unit on the common relative grid ``1..w``."""
    if int(w) != w or w < 1:
        raise WindowError(f"window length must be a positive integer, got {w}")
    w = int(w)
    short = [uid for uid, m in zip(d.unit_ids, d.lengths) if m < w]
    if short:
        raise WindowError(f"units {short} have fewer than {w} measurements")
    grid = np.arange(1, w + 1, dtype=float)
    return DegradationDataset(tuple(u[len(u) - w:] for u in d.units), tuple(grid for _ in d.units),
                              d.labels, d.unit_ids, d.seed)


def bootstrap_units(d: DegradationDataset, fraction: float = 0.8, repeats: int = 20,
                    seed: int = 0) -> list[DegradationDataset]:
    """``repeats`` subsets of ``floor(fraction * n)`` distinct units, in original order."""
    if not 0 < fraction <= 1:
        raise ConfigError(f"fraction must lie in (0, 1], got {fraction}")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    if d.n < 2:
        raise InputError("bootstrap needs at least two units")
    size = int(np.floor(fraction * d.n + 1e-12))
    if size < 1:
        raise ConfigError(f"fraction {fraction} of {d.n} units selects no unit")
    out = []
    for child in np.random.SeedSequence(seed).spawn(repeats):
        rng = np.random.default_rng(child)
        idx = np.sort(rng.choice(d.n, size=size, replace=False))
        out.append(d.select_units(idx.tolist()))
    return out


def majority_vote(graphs: Sequence[CausalGraph], share: float = 0.5) -> CausalGraph:
    """Keep each adjacency entry present in more than ``share`` of the graphs."""
    if not graphs:
        raise InputError("majority vote of no graphs")
    labels = graphs[0].labels
    if any(g.labels != labels for g in graphs):
        raise InputError("graphs must share labels")
    freq = np.mean([g.adj for g in graphs], axis=0)
    return CausalGraph((freq > share).astype(np.int8), labels)


def edge_frequencies(graphs: Sequence[CausalGraph]) -> np.ndarray:
    return np.mean([g.adj for g in graphs], axis=0)
