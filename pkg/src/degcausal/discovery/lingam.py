"""Direct-LiNGAM: causal order by repeated selection of the most exogenous variable."""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LassoLarsIC, LinearRegression

from ..errors import TestInfeasibleError
from ..graph import CausalGraph
from ..stats import _pairwise_lr_std, _standardize
from .config import LiNGAMConfig
from .notears import _labels


def causal_order(X: np.ndarray) -> list[int]:
    """Total order of the columns, most exogenous first.

    Each candidate ``i`` is scored by ``sum_j min(0, lr(i, j))**2`` over the
    remaining variables; the smallest score wins (lowest index on ties).  The
    chosen column is then regressed out of the others.
    """
    X = np.array(X, dtype=float)
    remaining = list(range(X.shape[1]))
    order = []
    while len(remaining) > 1:
        std = {i: _standardize(X[:, i], i) for i in remaining}
        scores = []
        for i in remaining:
            s = 0.0
            for j in remaining:
                if j != i:
                    s += min(0.0, _pairwise_lr_std(std[i], std[j])) ** 2
            scores.append(s)
        m = remaining[int(np.argmin(scores))]
        order.append(m)
        remaining.remove(m)
        xm = X[:, m] - X[:, m].mean()
        for j in remaining:
            xj = X[:, j] - X[:, j].mean()
            X[:, j] = xj - (xj @ xm) / (xm @ xm) * xm
    return order + remaining


def _adaptive_lasso(Z: np.ndarray, predictors: list[int], target: int) -> np.ndarray:
    """Adaptive lasso (BIC-tuned) on standardized data; returns the support mask."""
    ols = LinearRegression().fit(Z[:, predictors], Z[:, target])
    w = np.abs(ols.coef_)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        reg = LassoLarsIC(criterion="bic").fit(Z[:, predictors] * w, Z[:, target])
    return np.abs(reg.coef_ * w) > 0


def lingam_weights(X: np.ndarray, order: list[int], prune: str = "adaptive_lasso") -> np.ndarray:
    """``B[i, j]`` = coefficient of ``i`` in the regression of ``j`` on its predecessors.

    Coefficients are ordinary least squares on the original scale, restricted
    to the adaptive-lasso support when ``prune='adaptive_lasso'``.
    """
    X = np.asarray(X, dtype=float)
    k = X.shape[1]
    B = np.zeros((k, k))
    Z = (X - X.mean(axis=0)) / X.std(axis=0)
    for pos in range(1, k):
        target = order[pos]
        predictors = list(order[:pos])
        if prune == "adaptive_lasso":
            keep = _adaptive_lasso(Z, predictors, target)
            predictors = [p for p, kept in zip(predictors, keep) if kept]
        if not predictors:
            continue
        fit = LinearRegression().fit(X[:, predictors], X[:, target])
        B[predictors, target] = fit.coef_
    return B


def direct_lingam(M, cfg: LiNGAMConfig = LiNGAMConfig()) -> CausalGraph:
    """DAG consistent with the estimated order; edges where ``|B| > edge_threshold``."""
    X = np.asarray(getattr(M, "values", M), dtype=float)
    if X.shape[0] < 20:
        raise TestInfeasibleError(f"direct-lingam needs >= 20 rows, got {X.shape[0]}")
    for i in range(X.shape[1]):
        _standardize(X[:, i], i)  # zero-variance check
    order = causal_order(X)
    B = lingam_weights(X, order, cfg.prune)
    adj = (np.abs(B) > cfg.edge_threshold).astype(np.int8)
    return CausalGraph(adj, _labels(M))
