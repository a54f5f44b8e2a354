"""Hyperparameters of the discovery methods (defaults follow the benchmark setup)."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Literal

from ..errors import ConfigError

METHODS: tuple[str, ...] = (
    "stable-pc", "ges", "direct-lingam", "notears-linear", "notears-mlp", "granger",
)
NON_TEMPORAL: tuple[str, ...] = METHODS[:5]


@dataclass(frozen=True)
class PCConfig:
    alpha: float = 0.05
    ci_test: Literal["fisher_z"] = "fisher_z"

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"stable-pc alpha must lie in (0, 1), got {self.alpha}")
        if self.ci_test != "fisher_z":
            raise ConfigError(f"unsupported CI test {self.ci_test!r}")


@dataclass(frozen=True)
class GESConfig:
    score: Literal["bic"] = "bic"
    penalty: float = 1.0

    def __post_init__(self):
        if self.score != "bic":
            raise ConfigError(f"unsupported GES score {self.score!r}")
        if not self.penalty > 0:
            raise ConfigError("GES penalty must be > 0")


@dataclass(frozen=True)
class LiNGAMConfig:
    measure: Literal["pairwise_lr"] = "pairwise_lr"
    edge_threshold: float = 0.1
    prune: Literal["adaptive_lasso", "ols"] = "adaptive_lasso"

    def __post_init__(self):
        if self.measure != "pairwise_lr":
            raise ConfigError(f"unsupported LiNGAM measure {self.measure!r}")
        if self.edge_threshold < 0:
            raise ConfigError("edge_threshold must be >= 0")
        if self.prune not in ("adaptive_lasso", "ols"):
            raise ConfigError(f"unknown prune mode {self.prune!r}")


@dataclass(frozen=True)
class NotearsLinearConfig:
    l1: float = 0.1
    max_outer_iter: int = 100
    h_tol: float = 1e-8
    rho_max: float = 1e16
    edge_threshold: float = 0.1

    def __post_init__(self):
        _check_notears(self)


@dataclass(frozen=True)
class NotearsMLPConfig:
    l1: float = 0.01
    l2: float = 0.01
    max_outer_iter: int = 100
    h_tol: float = 1e-8
    rho_max: float = 1e16
    hidden_units: int = 10
    edge_threshold: float = 0.1

    def __post_init__(self):
        _check_notears(self)
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")
        if self.hidden_units < 1:
            raise ConfigError("hidden_units must be >= 1")


@dataclass(frozen=True)
class GrangerConfig:
    max_lag: int = 2
    alpha: float = 0.05
    lag_selection: Literal["fixed", "aic"] = "fixed"
    aic_max_lag: int = 5

    def __post_init__(self):
        if self.max_lag < 1 or self.aic_max_lag < 1:
            raise ConfigError("lags must be >= 1")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"granger alpha must lie in (0, 1), got {self.alpha}")
        if self.lag_selection not in ("fixed", "aic"):
            raise ConfigError(f"unknown lag_selection {self.lag_selection!r}")


def _check_notears(cfg) -> None:
    if cfg.l1 < 0 or cfg.edge_threshold < 0:
        raise ConfigError("l1 and edge_threshold must be >= 0")
    if not (cfg.h_tol > 0 and cfg.rho_max > 0):
        raise ConfigError("h_tol and rho_max must be > 0")
    if cfg.max_outer_iter < 1:
        raise ConfigError("max_outer_iter must be >= 1")


_SLOTS = {
    "stable-pc": ("stable_pc", PCConfig),
    "ges": ("ges", GESConfig),
    "direct-lingam": ("direct_lingam", LiNGAMConfig),
    "notears-linear": ("notears_linear", NotearsLinearConfig),
    "notears-mlp": ("notears_mlp", NotearsMLPConfig),
    "granger": ("granger", GrangerConfig),
}


@dataclass(frozen=True)
class MethodConfig:
    """Hyperparameters for every method, overridable per method."""

    stable_pc: PCConfig = field(default_factory=PCConfig)
    ges: GESConfig = field(default_factory=GESConfig)
    direct_lingam: LiNGAMConfig = field(default_factory=LiNGAMConfig)
    notears_linear: NotearsLinearConfig = field(default_factory=NotearsLinearConfig)
    notears_mlp: NotearsMLPConfig = field(default_factory=NotearsMLPConfig)
    granger: GrangerConfig = field(default_factory=GrangerConfig)

    def for_method(self, method: str):
        return getattr(self, _slot(method)[0])

    def override(self, method: str, **changes) -> "MethodConfig":
        attr, cls = _slot(method)
        known = {f.name for f in fields(cls)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigError(f"unknown {method} hyperparameter(s): {sorted(unknown)}")
        return replace(self, **{attr: replace(getattr(self, attr), **changes)})

    @classmethod
    def from_overrides(cls, overrides: dict | None) -> "MethodConfig":
        cfg = cls()
        for method, changes in (overrides or {}).items():
            cfg = cfg.override(method, **changes)
        return cfg

    def to_dict(self) -> dict:
        return {name: asdict(self.for_method(name)) for name in METHODS}


def _slot(method: str):
    try:
        return _SLOTS[method]
    except KeyError:
        raise ConfigError(f"unknown method {method!r}; choose from {list(METHODS)}") from None
