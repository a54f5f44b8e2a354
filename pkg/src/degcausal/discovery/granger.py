"""Pairwise Granger-causality baseline pooled over units."""
from __future__ import annotations

import itertools

import numpy as np
from scipy import stats

from ..errors import TestInfeasibleError
from ..graph import CausalGraph
from .config import GrangerConfig


def _lagged(series: np.ndarray, p: int) -> np.ndarray:
    """Columns ``series[t-1], ..., series[t-p]`` for ``t = p .. m-1``."""
    m = len(series)
    return np.column_stack([series[p - lag:m - lag] for lag in range(1, p + 1)])


def _rss(design: np.ndarray, y: np.ndarray) -> float:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    r = y - design @ coef
    return float(r @ r)


def _fit_pair(cause: np.ndarray, effect: np.ndarray, p: int) -> tuple[float, float, int]:
    """Restricted RSS, unrestricted RSS and residual degrees of freedom for one unit."""
    y = effect[p:]
    ones = np.ones((len(y), 1))
    own = np.hstack([ones, _lagged(effect, p)])
    full = np.hstack([own, _lagged(cause, p)])
    return _rss(own, y), _rss(full, y), len(y) - full.shape[1]


def granger_f_test(cause: np.ndarray, effect: np.ndarray, p: int) -> tuple[float, float]:
    """F statistic and p-value for ``cause`` Granger-causing ``effect`` at lag ``p``."""
    rss_r, rss_u, dof = _fit_pair(np.asarray(cause, float), np.asarray(effect, float), p)
    if dof <= 0:
        raise TestInfeasibleError(f"lag {p} leaves no residual degrees of freedom")
    scale = max(rss_r, 1e-300)
    if rss_u <= 1e-14 * scale:
        return (np.inf, 0.0) if rss_r - rss_u > 1e-12 * scale else (0.0, 1.0)
    f = max(rss_r - rss_u, 0.0) / p / (rss_u / dof)
    return float(f), float(stats.f.sf(f, p, dof))


def _aic_lag(units, i: int, j: int, max_lag: int) -> int:
    best = None
    for p in range(1, max_lag + 1):
        aic = 0.0
        for u in units:
            y = u[max_lag:, j]  # common estimation sample across lags
            trimmed = u[max_lag - p:]
            design = np.hstack([np.ones((len(y), 1)), _lagged(trimmed[:, j], p), _lagged(trimmed[:, i], p)])
            rss = max(_rss(design, y), 1e-300)
            aic += len(y) * np.log(rss / len(y)) + 2 * design.shape[1]
        if best is None or aic < best[0]:
            best = (aic, p)
    return best[1]


def fisher_combine(p_values) -> float:
    """Fisher's method: ``-2 sum ln p`` against chi-square with ``2 * len`` dof."""
    p = np.clip(np.asarray(p_values, dtype=float), 1e-300, 1.0)
    return float(stats.chi2.sf(-2.0 * np.log(p).sum(), 2 * len(p)))


def granger_pairwise(d, max_lag: int = 2, alpha: float = 0.05,
                     cfg: GrangerConfig | None = None) -> CausalGraph:
    """Edge ``i -> j`` when pooled evidence that lags of ``i`` help predict ``j`` has p < alpha.

    Each unit is tested separately and the per-unit p-values are pooled with
    Fisher's method.  ``cfg`` (when given) overrides ``max_lag`` and
    ``alpha`` and may request per-pair AIC lag selection.
    """
    cfg = cfg or GrangerConfig(max_lag=max_lag, alpha=alpha)
    units = [np.asarray(u, dtype=float) for u in d.units]
    top = cfg.aic_max_lag if cfg.lag_selection == "aic" else cfg.max_lag
    short = [uid for uid, u in zip(d.unit_ids, units) if len(u) <= 3 * top]
    if short:
        raise TestInfeasibleError(
            f"granger with lag {top} needs more than {3 * top} measurements; units {short} are too short")
    k = d.k
    adj = np.zeros((k, k), dtype=np.int8)
    for i, j in itertools.permutations(range(k), 2):
        p = _aic_lag(units, i, j, top) if cfg.lag_selection == "aic" else cfg.max_lag
        pvals = [granger_f_test(u[:, i], u[:, j], p)[1] for u in units]
        if fisher_combine(pvals) < cfg.alpha:
            adj[i, j] = 1
    return CausalGraph(adj, d.labels)
