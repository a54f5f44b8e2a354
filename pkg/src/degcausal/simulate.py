"""Wiener-process degradation with causal coupling between parameters.

Each parameter ``l`` of unit ``i`` follows::

    L_l(t) = X0 + sum_p g_p(parent_p(t)) + a * t**gamma + sigma * B(t)
    x_l(t_j) = L_l(t_j) + eps_j

with ``X0 ~ N(mu_x0, sigma_x0**2)``, ``a ~ N(mu_a, (v_a * |mu_a|)**2)``, a
standard Brownian motion ``B`` and i.i.d. measurement errors
``eps_j ~ N(0, sigma_eps**2)``.  Couplings are ``g(x) = alpha * x**beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Literal, Mapping, Sequence

import numpy as np

from .dataset import DegradationDataset
from .errors import ConfigError, SimulationDomainError

CouplingInput = Literal["latent", "observed"]


@dataclass(frozen=True)
class WienerParams:
    mu_x0: float
    sigma_x0: float
    mu_a: float
    v_a: float
    sigma: float
    sigma_eps: float
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("sigma_x0", "v_a", "sigma", "sigma_eps"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")

    @property
    def sigma_a(self) -> float:
        # v_a is a coefficient of variation; |mu_a| keeps the sd nonnegative for decreasing paths
        return self.v_a * abs(self.mu_a)

    def replace(self, **changes) -> "WienerParams":
        return WienerParams(**{**asdict(self), **changes})


@dataclass(frozen=True)
class CausalEdgeFunction:
    """Coupling ``child += alpha * parent**beta``."""

    parent: int
    child: int
    alpha: float = 1.0
    beta: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.alpha * np.power(x, self.beta)

    @property
    def integer_exponent(self) -> bool:
        return float(self.beta).is_integer()


@dataclass(frozen=True)
class SystemSpec:
    params: tuple[WienerParams, ...]
    edges: tuple[CausalEdgeFunction, ...] = ()
    dt: float = 20.0
    m: int = 51
    labels: tuple[str, ...] = ()
    coupling_input: CouplingInput = "latent"

    def __post_init__(self):
        params = tuple(self.params)
        k = len(params)
        labels = tuple(self.labels) if self.labels else tuple(f"X{i + 1}" for i in range(k))
        if len(labels) != k:
            raise ConfigError(f"{len(labels)} labels for {k} parameters")
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if int(self.m) != self.m or self.m < 2:
            raise ConfigError(f"m must be an integer >= 2, got {self.m}")
        if self.coupling_input not in ("latent", "observed"):
            raise ConfigError(f"coupling_input must be 'latent' or 'observed', got {self.coupling_input!r}")
        edges = tuple(self.edges)
        for e in edges:
            if not (0 <= e.parent < k and 0 <= e.child < k) or e.parent == e.child:
                raise ConfigError(f"invalid edge {e.parent}->{e.child} for k={k}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "m", int(self.m))
        self.topological_order()  # raises on cycles

    @property
    def k(self) -> int:
        return len(self.params)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.m) * float(self.dt)

    def topological_order(self) -> list[int]:
        indeg = [0] * self.k
        for e in self.edges:
            indeg[e.child] += 1
        ready = [i for i in range(self.k) if indeg[i] == 0]
        order = []
        while ready:
            u = ready.pop(0)
            order.append(u)
            for e in self.edges:
                if e.parent == u:
                    indeg[e.child] -= 1
                    if indeg[e.child] == 0:
                        ready.append(e.child)
        if len(order) != self.k:
            raise ConfigError("causal edges must form a DAG")
        return order

    def truth_adjacency(self) -> np.ndarray:
        adj = np.zeros((self.k, self.k), dtype=np.int8)
        for e in self.edges:
            adj[e.parent, e.child] = 1
        return adj

    def replace(self, **changes) -> "SystemSpec":
        fields = dict(params=self.params, edges=self.edges, dt=self.dt, m=self.m,
                      labels=self.labels, coupling_input=self.coupling_input)
        fields.update(changes)
        return SystemSpec(**fields)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "params": [asdict(p) for p in self.params],
            "edges": [asdict(e) for e in self.edges],
            "dt": self.dt,
            "m": self.m,
            "coupling_input": self.coupling_input,
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "SystemSpec":
        try:
            params = tuple(WienerParams(**p) for p in obj["params"])
            edges = tuple(CausalEdgeFunction(**e) for e in obj.get("edges", ()))
            return cls(params, edges, dt=float(obj.get("dt", 20.0)), m=int(obj.get("m", 51)),
                       labels=tuple(obj.get("labels", ())),
                       coupling_input=obj.get("coupling_input", "latent"))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"invalid system spec: {exc}") from exc


def time_scale(t, gamma: float):
    """Power-law time transform ``t**gamma``."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise SimulationDomainError("time_scale is defined for t >= 0 only")
    out = np.power(arr, gamma)
    return float(out) if out.ndim == 0 else out


def _substream(seed: int, unit: int, param: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(unit, param))
    return np.random.Generator(np.random.PCG64(ss))


def _simulate(spec: SystemSpec, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Observed and latent ``(k, n, m)`` arrays."""
    if n < 1:
        raise ConfigError(f"unit count must be >= 1, got {n}")
    t = spec.times
    order = spec.topological_order()
    incoming = {l: [e for e in spec.edges if e.child == l] for l in range(spec.k)}
    latent = np.empty((spec.k, n, spec.m))
    observed = np.empty_like(latent)
    for i in range(n):
        for l in order:
            p = spec.params[l]
            rng = _substream(seed, i, l)
            x0 = rng.normal(p.mu_x0, p.sigma_x0)
            a = rng.normal(p.mu_a, p.sigma_a)
            steps = rng.normal(0.0, math.sqrt(spec.dt), spec.m - 1)
            eps = rng.normal(0.0, p.sigma_eps, spec.m)
            brownian = np.concatenate(([0.0], np.cumsum(steps)))
            path = x0 + a * time_scale(t, p.gamma) + p.sigma * brownian
            for e in incoming[l]:
                src = latent if spec.coupling_input == "latent" else observed
                xp = src[e.parent, i]
                if not e.integer_exponent and np.any(xp <= 0):
                    j = int(np.flatnonzero(xp <= 0)[0])
                    raise SimulationDomainError(
                        f"coupling {spec.labels[e.parent]}->{spec.labels[l]} with beta={e.beta} "
                        f"evaluated at non-positive value {xp[j]:.6g} (unit {i + 1}, time {t[j]:g})")
                path = path + e(xp)
            latent[l, i] = path
            observed[l, i] = path + eps
    return observed, latent


def simulate_system(spec: SystemSpec, n: int, seed: int) -> DegradationDataset:
    """Simulate ``n`` units of the coupled system; deterministic in ``(spec, n, seed)``.

    Every (unit, parameter) pair draws from its own seed substream, so a
    unit's path does not depend on how many other units are simulated.
    """
    observed, _ = _simulate(spec, n, seed)
    return DegradationDataset.from_array(observed, spec.times, spec.labels, seed=seed)


# -- band-pass filter case --------------------------------------------------

FILTER_COMPONENTS = ("R1", "R2", "R3", "C1", "C2")
FILTER_LABELS = FILTER_COMPONENTS + ("f0", "Gain")


def center_frequency(r1, r2, r3, c1, c2):
    """Centre frequency (Hz) of the multiple-feedback band-pass stage."""
    return np.sqrt((r1 + r2) / (r1 * r2 * r3 * c1 * c2)) / (2 * np.pi)


def peak_gain(r1, r3, c1, c2):
    """Peak gain (dB) of the multiple-feedback band-pass stage."""
    return 20 * np.log10(c2 * r3 / (r1 * (c1 + c2)))


@dataclass(frozen=True)
class FilterComponentSpec:
    components: tuple[WienerParams, ...]
    n_units: int = 20
    interval: float = 0.5
    horizon: float = 10.0
    performance_from: Literal["latent", "measured"] = "latent"

    def __post_init__(self):
        if len(self.components) != 5:
            raise ConfigError("filter case needs exactly five components (R1, R2, R3, C1, C2)")
        if self.n_units < 1 or not self.interval > 0 or not self.horizon > 0:
            raise ConfigError("n_units, interval and horizon must be positive")
        if self.performance_from not in ("measured", "latent"):
            raise ConfigError(f"unknown performance_from {self.performance_from!r}")

    @property
    def m(self) -> int:
        return int(round(self.horizon / self.interval)) + 1

    def system(self) -> SystemSpec:
        return SystemSpec(self.components, (), dt=self.interval, m=self.m, labels=FILTER_COMPONENTS)


def simulate_filter_case(spec: FilterComponentSpec, seed: int) -> DegradationDataset:
    """Component paths plus the derived centre frequency and peak gain.

    With ``performance_from="latent"`` (default) f0 and Gain are evaluated on
    the error-free component paths while the component columns carry
    measurement error; ``"measured"`` evaluates them on the emitted component
    values instead.
    """
    system = spec.system()
    observed, latent = _simulate(system, spec.n_units, seed)
    for arr in (observed, latent):
        bad = np.argwhere(arr <= 0)
        if bad.size:
            l, i, j = bad[0]
            raise SimulationDomainError(
                f"non-physical {FILTER_COMPONENTS[l]}={arr[l, i, j]:.6g} "
                f"(unit {i + 1}, time {system.times[j]:g})")
    src = observed if spec.performance_from == "measured" else latent
    r1, r2, r3, c1, c2 = src
    f0 = center_frequency(r1, r2, r3, c1, c2)
    gain = peak_gain(r1, r3, c1, c2)
    values = np.concatenate([observed, f0[None], gain[None]], axis=0)
    return DegradationDataset.from_array(values, system.times, FILTER_LABELS, seed=seed)
