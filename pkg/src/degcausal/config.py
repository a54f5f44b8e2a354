"""Validated run configurations (JSON files) for the command-line runner."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .discovery.config import METHODS, NON_TEMPORAL, MethodConfig
from .errors import ChoiceError, ConfigError, DegCausalError
from .evaluation import FACTORS, SweepConfig
from .graph import CausalGraph
from .presets import dependent_system, independent_system, system_truth
from .simulate import SystemSpec

KINDS = ("simulate", "discover", "benchmark", "sweep", "cmapss", "filter-case")
DEFAULT_SEED = 0

MethodName = Literal[METHODS]  # type: ignore[valid-type]
StrategyName = Literal["S1", "S2"]

_DEFAULT_METHODS = {
    "simulate": (),
    "discover": NON_TEMPORAL,
    "benchmark": NON_TEMPORAL,
    "sweep": NON_TEMPORAL,
    "filter-case": NON_TEMPORAL,
    "cmapss": ("stable-pc", "ges"),
}
_DEFAULT_STRATEGIES = {
    "simulate": ("S1", "S2"),
    "discover": ("S2",),
    "benchmark": ("S1", "S2"),
    "sweep": ("S2",),
    "filter-case": ("S2",),
    "cmapss": ("S2",),
}
_DEFAULT_SYSTEM = {"simulate": "independent", "discover": "independent",
                   "benchmark": "independent", "sweep": "dependent"}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SweepSection(_Strict):
    factor: Literal[FACTORS]  # type: ignore[valid-type]
    levels: Optional[list[float]] = None


class FilterSection(_Strict):
    n_units: int = Field(20, ge=1)
    interval: float = Field(0.5, gt=0)
    horizon: float = Field(10.0, gt=0)
    performance_from: Literal["latent", "measured"] = "latent"
    replications: int = Field(1, ge=1)


class CmapssSection(_Strict):
    path: str
    window: int = Field(40, ge=1)
    fraction: float = Field(0.8, gt=0, le=1)
    repeats: int = Field(20, ge=1)
    constancy_rtol: float = Field(1e-9, ge=0)
    vote_share: float = Field(0.5, ge=0, lt=1)


class RunConfig(_Strict):
    """One experiment.  Sections irrelevant to ``kind`` must be omitted."""

    kind: Literal[KINDS]  # type: ignore[valid-type]
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2 ** 64)
    system: Optional[dict[str, Any]] = None
    truth: Optional[dict[str, Any]] = None
    n: int = Field(10, ge=1)
    n_range: list[int] = Field(default_factory=lambda: list(range(1, 11)))
    N: int = Field(20, ge=1)
    methods: Optional[list[MethodName]] = None
    strategies: Optional[list[StrategyName]] = None
    hyperparameters: dict[MethodName, dict[str, Any]] = Field(default_factory=dict)
    data: Optional[str] = None
    sweep: Optional[SweepSection] = None
    filter: Optional[FilterSection] = None
    cmapss: Optional[CmapssSection] = None
    jobs: int = Field(1, ge=1)
    timings: bool = False  # wall-clock seconds in results.csv (breaks byte-identical reruns)

    @model_validator(mode="after")
    def _fill_and_check(self):
        kind = self.kind
        if self.methods is None:
            self.methods = list(_DEFAULT_METHODS[kind])
        if self.strategies is None:
            self.strategies = list(_DEFAULT_STRATEGIES[kind])
        if not self.n_range or min(self.n_range) < 1:
            raise ValueError("n_range must list positive unit counts")
        if kind == "sweep" and self.sweep is None:
            raise ValueError("sweep runs need a 'sweep' section with a factor")
        if kind == "cmapss" and self.cmapss is None:
            raise ValueError("cmapss runs need a 'cmapss' section with the data file path")
        if kind == "filter-case" and self.filter is None:
            self.filter = FilterSection()
        if kind in ("cmapss", "filter-case") and self.system is not None:
            raise ValueError(f"{kind} runs take no 'system' section")
        if kind in _DEFAULT_SYSTEM and self.system is None and not (kind == "discover" and self.data):
            self.system = {"preset": _DEFAULT_SYSTEM[kind]}
        if kind == "discover" and self.data and self.system is not None:
            raise ValueError("discover takes either 'data' or 'system', not both")
        if kind in ("discover", "benchmark", "sweep") and not self.methods:
            raise ValueError("at least one method is required")
        return self

    # -- resolved objects ------------------------------------------------

    def system_spec(self) -> SystemSpec | None:
        return None if self.system is None else build_system(self.system)

    def truth_graph(self) -> CausalGraph | None:
        if self.truth is not None:
            return CausalGraph.from_dict(self.truth)
        spec = self.system_spec()
        return None if spec is None else system_truth(spec)

    def method_config(self) -> MethodConfig:
        return MethodConfig.from_overrides(self.hyperparameters)

    def sweep_config(self) -> SweepConfig:
        assert self.sweep is not None
        return SweepConfig(self.sweep.factor, self.system_spec(), tuple(self.sweep.levels or ()),
                           tuple(self.n_range), self.N, tuple(self.methods), tuple(self.strategies))

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)


def build_system(obj: dict) -> SystemSpec:
    """``{"preset": "independent"}``, ``{"preset": "dependent", "alpha": .., "beta": ..}`` or a full spec."""
    obj = dict(obj)
    if "preset" in obj:
        preset = obj.pop("preset")
        if preset == "independent":
            if obj:
                raise ConfigError(f"system: preset 'independent' takes no options, got {sorted(obj)}")
            return independent_system()
        if preset == "dependent":
            unknown = set(obj) - {"alpha", "beta"}
            if unknown:
                raise ConfigError(f"system: unknown option(s) {sorted(unknown)} for preset 'dependent'")
            return dependent_system(float(obj.get("alpha", 1.0)), float(obj.get("beta", 1.0)))
        raise ChoiceError(f"system.preset: {preset!r} is not one of ['independent', 'dependent']")
    unknown = set(obj) - {"labels", "params", "edges", "dt", "m", "coupling_input"}
    if unknown:
        raise ConfigError(f"system: unknown key(s) {sorted(unknown)}")
    return SystemSpec.from_dict(obj)


def _field(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def parse_config(obj: dict, kind: str | None = None) -> RunConfig:
    """Validate a config mapping; ``kind`` (from the subcommand) fills or must match ``obj['kind']``."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    obj = dict(obj)
    if kind is not None:
        if kind not in KINDS:
            raise ChoiceError(f"kind: {kind!r} is not one of {list(KINDS)}")
        if obj.setdefault("kind", kind) != kind:
            raise ConfigError(f"kind: config says {obj['kind']!r} but the command is {kind!r}")
    try:
        cfg = RunConfig.model_validate(obj)
    except ValidationError as exc:
        err = exc.errors()[0]
        where = _field(err["loc"])
        if err["type"] == "literal_error":
            raise ChoiceError(f"{where}: {err['msg']} (got {err.get('input')!r})") from None
        if err["type"] == "extra_forbidden":
            raise ConfigError(f"{where}: unknown key") from None
        raise ConfigError(f"{where}: {err['msg'].removeprefix('Value error, ')}") from None
    # resolve everything once so bad specs fail before any work starts
    try:
        cfg.system_spec()
        cfg.truth_graph()
        cfg.method_config()
        if cfg.kind == "sweep":
            cfg.sweep_config()
    except DegCausalError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value: {exc}") from None
    return cfg


def load_config(path: str | Path, kind: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(obj, kind)
