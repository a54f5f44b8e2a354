"""Continuous DAG learning with the trace-exponential acyclicity function.

Both variants solve ``min F(W) s.t. h(W) = 0`` with an augmented Lagrangian:
the penalty ``rho`` grows tenfold whenever an inner solve fails to shrink
``h`` to a quarter of its previous value, and the multiplier follows
``alpha += rho * h``.  Inner solves use bound-constrained L-BFGS with the
weights split into positive and negative parts so the L1 term is smooth.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from ..errors import ConvergenceError, NumericalError, TestInfeasibleError
from ..graph import CausalGraph, has_directed_cycle
from .config import NotearsLinearConfig


class NotearsConvergenceWarning(UserWarning):
    """Raised as a warning when rho_max is reached with h above tolerance."""


def acyclicity_h(W: np.ndarray) -> tuple[float, np.ndarray]:
    """``h(W) = tr(exp(W * W)) - k`` and its gradient ``exp(W * W).T * 2W``."""
    W = np.asarray(W, dtype=float)
    if not np.isfinite(W).all():
        raise NumericalError("acyclicity_h received non-finite weights")
    E = sla.expm(W * W)
    h = float(np.trace(E) - W.shape[0])
    return max(h, 0.0), E.T * W * 2


@dataclass(frozen=True)
class NotearsFit:
    weights: np.ndarray
    h: float
    rho: float
    outer_iterations: int
    converged: bool


def threshold_and_prune(W: np.ndarray, threshold: float) -> np.ndarray:
    """Keep ``|W| > threshold``; then drop the weakest edge on a cycle until acyclic."""
    W = np.asarray(W, dtype=float)
    adj = (np.abs(W) > threshold).astype(np.int8)
    np.fill_diagonal(adj, 0)
    while has_directed_cycle(adj):
        reach = _transitive_closure(adj)
        on_cycle = [(abs(W[i, j]), i, j) for i, j in zip(*np.nonzero(adj)) if reach[j, i]]
        _, i, j = min(on_cycle)
        adj[i, j] = 0
    return adj


def _transitive_closure(adj: np.ndarray) -> np.ndarray:
    reach = adj.astype(bool) | np.eye(adj.shape[0], dtype=bool)
    for m in range(adj.shape[0]):
        reach |= reach[:, [m]] & reach[[m], :]
    return reach


def augmented_lagrangian(solve, h_of, x0: np.ndarray, max_outer_iter: int, h_tol: float,
                         rho_max: float, restart_from_previous: bool = True):
    """Dual ascent shared by the linear and MLP variants.

    ``solve(x_start, rho, alpha)`` returns the inner minimiser; ``h_of(x)``
    evaluates the constraint.  With ``restart_from_previous`` a retry at a
    larger penalty starts from the last rejected solution instead of the
    last accepted one.
    """
    x, rho, alpha, h = x0, 1.0, 0.0, np.inf
    outer = 0
    for outer in range(1, max_outer_iter + 1):
        x_new, h_new = x, h
        start = x
        while rho < rho_max:
            x_new = solve(start, rho, alpha)
            h_new = h_of(x_new)
            if h_new > 0.25 * h:
                rho *= 10
                if restart_from_previous:
                    start = x_new
            else:
                break
        x, h = x_new, h_new
        alpha += rho * h
        if h <= h_tol or rho >= rho_max:
            break
    return x, h, rho, outer


def _split(w: np.ndarray, d: int) -> np.ndarray:
    return (w[:d * d] - w[d * d:]).reshape(d, d)


def linear_objective(w: np.ndarray, cov: np.ndarray, l1: float, rho: float,
                     alpha: float) -> tuple[float, np.ndarray]:
    """Augmented-Lagrangian objective of the linear model and its gradient.

    ``w`` stacks the positive and negative parts of ``W``; ``cov`` is the
    covariance ``X.T @ X / n`` of the centred data, through which the loss
    ``0.5/n * ||X - XW||^2`` is expanded.
    """
    d = cov.shape[0]
    W = _split(w, d)
    cW = cov @ W
    loss = 0.5 * (np.trace(cov) - 2 * np.trace(cW) + np.sum(W * cW))
    g_loss = cW - cov
    h, g_h = acyclicity_h(W)
    f = loss + 0.5 * rho * h * h + alpha * h + l1 * w.sum()
    g = g_loss + (rho * h + alpha) * g_h
    return f, np.concatenate([(g + l1).ravel(), (-g + l1).ravel()])


def fit_notears_linear(X: np.ndarray, cfg: NotearsLinearConfig = NotearsLinearConfig()) -> NotearsFit:
    """Raw (unthresholded) weights of the linear least-squares model.

    Columns are centred first; the model has no intercept.
    """
    X = np.asarray(getattr(X, "values", X), dtype=float)
    n, d = X.shape
    if n <= d:
        raise TestInfeasibleError(f"notears-linear needs rows > k ({n} <= {d})")
    X = X - X.mean(axis=0, keepdims=True)
    cov = X.T @ X / n
    l1 = cfg.l1

    def split(w):
        return _split(w, d)

    def make_obj(rho, alpha):
        return lambda w: linear_objective(w, cov, l1, rho, alpha)

    diag = np.eye(d, dtype=bool).ravel()
    ub = np.where(np.concatenate([diag, diag]), 0.0, np.inf)
    bounds = sopt.Bounds(np.zeros(2 * d * d), ub)

    def solve(w0, rho, alpha):
        return sopt.minimize(make_obj(rho, alpha), w0, jac=True, method="L-BFGS-B", bounds=bounds).x

    w, h, rho, outer = augmented_lagrangian(
        solve, lambda w: acyclicity_h(split(w))[0], np.zeros(2 * d * d),
        cfg.max_outer_iter, cfg.h_tol, cfg.rho_max, restart_from_previous=False)
    return NotearsFit(split(w), h, rho, outer, h <= cfg.h_tol)


def notears_linear(M, cfg: NotearsLinearConfig = NotearsLinearConfig(),
                   strict: bool = False) -> CausalGraph:
    """Linear NOTEARS; edges are weights above ``cfg.edge_threshold`` after cycle pruning.

    A fit that exhausts ``rho_max`` above ``h_tol`` is still thresholded but
    emits :class:`NotearsConvergenceWarning` (or raises with ``strict``).
    """
    fit = fit_notears_linear(getattr(M, "values", M), cfg)
    _report(fit, strict, "notears-linear")
    return CausalGraph(threshold_and_prune(fit.weights, cfg.edge_threshold), _labels(M))


def _report(fit: NotearsFit, strict: bool, name: str) -> None:
    if fit.converged:
        return
    msg = f"{name}: rho reached {fit.rho:.1e} with h={fit.h:.3e} above tolerance"
    if strict:
        raise ConvergenceError(msg)
    warnings.warn(msg, NotearsConvergenceWarning, stacklevel=3)


def _labels(M) -> tuple[str, ...]:
    return tuple(getattr(M, "labels", ()))
