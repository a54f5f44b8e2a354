"""Structure-learning methods and a name-based dispatcher."""
from __future__ import annotations

import numpy as np

from ..dataset import DegradationDataset
from ..errors import ConfigError, InputError
from ..graph import CausalGraph
from ..strategy import build_matrix
from .config import (METHODS, NON_TEMPORAL, GESConfig, GrangerConfig, LiNGAMConfig, MethodConfig,
                     NotearsLinearConfig, NotearsMLPConfig, PCConfig)
from .ges import ges
from .granger import granger_pairwise
from .lingam import direct_lingam
from .notears import NotearsConvergenceWarning, acyclicity_h, notears_linear
from .notears_mlp import notears_mlp
from .pc import stable_pc

__all__ = [
    "METHODS", "NON_TEMPORAL", "MethodConfig", "PCConfig", "GESConfig", "LiNGAMConfig",
    "NotearsLinearConfig", "NotearsMLPConfig", "GrangerConfig", "NotearsConvergenceWarning",
    "stable_pc", "ges", "direct_lingam", "notears_linear", "notears_mlp", "granger_pairwise",
    "acyclicity_h", "discover",
]


def _increments(d: DegradationDataset) -> DegradationDataset:
    return DegradationDataset(tuple(np.diff(u, axis=0) for u in d.units),
                              tuple(t[1:] for t in d.times), d.labels, d.unit_ids, d.seed)


def discover(method: str, data, cfg: MethodConfig | None = None, seed: int = 0,
             strategy: str | None = None, strict: bool = False) -> CausalGraph:
    """Run ``method`` on a DataMatrix, or on a dataset transformed by ``strategy``.

    Granger needs the time structure, so it takes a dataset; with ``S2`` it
    runs on per-unit increments.  ``seed`` only affects NOTEARS-MLP.
    """
    cfg = cfg or MethodConfig()
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {list(METHODS)}")
    mcfg = cfg.for_method(method)
    if method == "granger":
        if not isinstance(data, DegradationDataset):
            raise InputError("granger needs a DegradationDataset (it uses the time order)")
        if strategy == "S2":
            data = _increments(data)
        return granger_pairwise(data, cfg=mcfg)
    if isinstance(data, DegradationDataset):
        data = build_matrix(data, strategy or "S1")
    if method == "stable-pc":
        return stable_pc(data, mcfg)
    if method == "ges":
        return ges(data, mcfg)
    if method == "direct-lingam":
        return direct_lingam(data, mcfg)
    if method == "notears-linear":
        return notears_linear(data, mcfg, strict=strict)
    return notears_mlp(data, mcfg, seed=seed, strict=strict)
