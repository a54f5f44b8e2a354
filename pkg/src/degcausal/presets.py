"""Reference parameterisations of the numerical and filter experiments."""
from __future__ import annotations

from .errors import ConfigError
from .graph import CausalGraph
from .simulate import FILTER_LABELS, CausalEdgeFunction, FilterComponentSpec, SystemSpec, WienerParams

# degradation-nonlinearity levels: gamma -> (mu_a1, mu_a2)
GAMMA_DRIFTS = {
    0.5: (-0.8, -1.0),
    0.75: (-0.2, -0.25),
    1.0: (-0.04, -0.05),
    1.25: (-0.008, -0.01),
    1.5: (-0.0008, -0.001),
}

# causality-nonlinearity levels: beta -> alpha
BETA_ALPHAS = {
    0.2: 70.0,
    0.4: 24.0,
    0.6: 8.4,
    0.8: 2.9,
    1.0: 1.0,
    1.2: 0.345,
    1.4: 0.119,
    1.6: 0.042,
    1.8: 0.014,
}

V_A_LEVELS = (0.0, 0.025, 0.05, 0.1, 0.2)
SIGMA_EPS_LEVELS = (0.0, 0.2, 0.4, 0.8, 1.6)
SIGMA_LEVELS = (0.0, 0.05, 0.1, 0.2, 0.4)


def lookup_level(table: dict, level: float, name: str):
    for key, val in table.items():
        if abs(key - level) < 1e-9:
            return val
    raise ConfigError(f"{name}={level} has no paired setting; known levels: {sorted(table)}")


def independent_system() -> SystemSpec:
    """Two independent degradation paths (X1, X2), dt=20, m=51."""
    x1 = WienerParams(mu_x0=200, sigma_x0=1, mu_a=-0.04, v_a=0.05, sigma=0.1, sigma_eps=0.4, gamma=1)
    x2 = WienerParams(mu_x0=200, sigma_x0=1, mu_a=-0.05, v_a=0.05, sigma=0.1, sigma_eps=0.4, gamma=1)
    return SystemSpec((x1, x2), (), dt=20.0, m=51, labels=("X1", "X2"))


def dependent_system(alpha: float = 1.0, beta: float = 1.0) -> SystemSpec:
    """X1 -> X2 through ``alpha * X1**beta``; X2 starts at zero."""
    x1 = WienerParams(mu_x0=200, sigma_x0=1, mu_a=-0.04, v_a=0.05, sigma=0.1, sigma_eps=0.4, gamma=1)
    x2 = WienerParams(mu_x0=0, sigma_x0=0, mu_a=-0.05, v_a=0.05, sigma=0.1, sigma_eps=0.4, gamma=1)
    edge = CausalEdgeFunction(parent=0, child=1, alpha=alpha, beta=beta)
    return SystemSpec((x1, x2), (edge,), dt=20.0, m=51, labels=("X1", "X2"))


def filter_components() -> tuple[WienerParams, ...]:
    """R1, R2, R3 (ohm) and C1, C2 (farad); time in years."""
    return (
        WienerParams(5000, 250, 100, 0.01, 100, 25, 1),
        WienerParams(15000, 750, 300, 0.01, 300, 75, 1),
        WienerParams(25000, 1250, 500, 0.01, 500, 125, 1),
        WienerParams(8e-10, 8e-11, -2.4e-11, 0.01, 1.6e-11, 4e-12, 1),
        WienerParams(1.2e-9, 1.2e-10, -3.6e-11, 0.01, 2.4e-11, 6e-12, 1),
    )


def filter_case(n_units: int = 20) -> FilterComponentSpec:
    """20 units recorded every half year over ten years (21 measurements)."""
    return FilterComponentSpec(filter_components(), n_units=n_units, interval=0.5, horizon=10.0)


def filter_truth() -> CausalGraph:
    """All five components drive f0; every component except R2 drives Gain."""
    idx = {lab: i for i, lab in enumerate(FILTER_LABELS)}
    edges = [(idx[c], idx["f0"]) for c in ("R1", "R2", "R3", "C1", "C2")]
    edges += [(idx[c], idx["Gain"]) for c in ("R1", "R3", "C1", "C2")]
    return CausalGraph.from_edges(len(FILTER_LABELS), directed=edges, labels=FILTER_LABELS)


def system_truth(spec: SystemSpec) -> CausalGraph:
    return CausalGraph(spec.truth_adjacency(), spec.labels)


SYSTEMS = {
    "independent": independent_system,
    "dependent": dependent_system,
}
