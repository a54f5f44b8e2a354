"""Nonparametric NOTEARS with one sigmoid hidden layer per variable.

Network ``j`` predicts column ``j`` from all columns.  Its first-layer
weights ``W1[j, :, i]`` (input ``i`` into hidden units of network ``j``) define
the surrogate adjacency ``A[i, j] = ||W1[j, :, i]||``.  Gradients are
computed by hand; :func:`mlp_objective` exposes them for checking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize as sopt
from scipy.linalg import expm
from scipy.special import expit

from ..errors import NumericalError, TestInfeasibleError
from ..graph import CausalGraph
from .config import NotearsMLPConfig
from .notears import NotearsFit, _labels, _report, augmented_lagrangian, acyclicity_h, threshold_and_prune


@dataclass(frozen=True)
class MLPLayout:
    d: int
    hidden: int

    @property
    def n_w1(self) -> int:
        return self.d * self.hidden * self.d

    @property
    def size(self) -> int:
        # W1+, W1-, b1, W2, b2
        return 2 * self.n_w1 + 2 * self.d * self.hidden + self.d

    def unpack(self, theta: np.ndarray):
        d, m, n1 = self.d, self.hidden, self.n_w1
        w1 = (theta[:n1] - theta[n1:2 * n1]).reshape(d, m, d)  # [net j, hidden k, input i]
        off = 2 * n1
        b1 = theta[off:off + d * m].reshape(d, m)
        off += d * m
        w2 = theta[off:off + d * m].reshape(d, m)
        b2 = theta[off + d * m:]
        return w1, b1, w2, b2

    def bounds(self) -> sopt.Bounds:
        d, m = self.d, self.hidden
        diag = np.zeros((d, m, d), dtype=bool)
        for j in range(d):
            diag[j, :, j] = True
        ub1 = np.where(diag.ravel(), 0.0, np.inf)
        lb = np.concatenate([np.zeros(2 * self.n_w1), np.full(2 * d * m + d, -np.inf)])
        ub = np.concatenate([ub1, ub1, np.full(2 * d * m + d, np.inf)])
        return sopt.Bounds(lb, ub)

    def init(self, rng: np.random.Generator) -> np.ndarray:
        d, m = self.d, self.hidden
        b_in = 1.0 / np.sqrt(d)
        b_hid = 1.0 / np.sqrt(m)
        theta = np.concatenate([
            rng.uniform(-b_in, b_in, 2 * self.n_w1),
            rng.uniform(-b_in, b_in, d * m),
            rng.uniform(-b_hid, b_hid, d * m),
            rng.uniform(-b_hid, b_hid, d),
        ])
        bnd = self.bounds()
        return np.clip(theta, bnd.lb, bnd.ub)


def surrogate_adjacency(layout: MLPLayout, theta: np.ndarray) -> np.ndarray:
    w1 = layout.unpack(theta)[0]
    return np.sqrt((w1 ** 2).sum(axis=1)).T


def mlp_objective(theta: np.ndarray, X: np.ndarray, layout: MLPLayout, l1: float, l2: float,
                  rho: float, alpha: float) -> tuple[float, np.ndarray]:
    """Augmented-Lagrangian objective and its gradient with respect to ``theta``.

    ``0.5/n * sum((f(X) - X)**2) + 0.5*rho*h**2 + alpha*h
    + 0.5*l2*(|W1|^2 + |W2|^2) + l1*sum(W1+ + W1-)``
    """
    n, d = X.shape
    m = layout.hidden
    w1, b1, w2, b2 = layout.unpack(theta)
    z = np.einsum("ni,jki->njk", X, w1) + b1          # (n, d, m)
    s = expit(z)
    out = np.einsum("njk,jk->nj", s, w2) + b2          # (n, d)
    resid = out - X
    loss = 0.5 / n * np.sum(resid ** 2)

    A = (w1 ** 2).sum(axis=1).T                        # A[i, j]
    if not np.isfinite(A).all():
        raise NumericalError("notears-mlp weights are not finite")
    E = expm(A)
    h = max(float(np.trace(E)) - d, 0.0)
    l2_reg = 0.5 * l2 * (np.sum(w1 ** 2) + np.sum(w2 ** 2))
    n1 = layout.n_w1
    l1_reg = l1 * np.sum(theta[:2 * n1])
    f = loss + 0.5 * rho * h * h + alpha * h + l2_reg + l1_reg
    if not np.isfinite(f):
        raise NumericalError("notears-mlp objective is not finite")

    dout = resid / n                                   # (n, d)
    g_w2 = np.einsum("njk,nj->jk", s, dout) + l2 * w2
    g_b2 = dout.sum(axis=0)
    dz = dout[:, :, None] * w2[None] * s * (1 - s)     # (n, d, m)
    g_b1 = dz.sum(axis=0)
    g_w1 = np.einsum("njk,ni->jki", dz, X)
    # dh/dA = E.T and dA[i, j]/dw1[j, k, i] = 2 w1[j, k, i]
    g_w1 += (rho * h + alpha) * 2 * w1 * E[:, None, :]
    g_w1 += l2 * w1
    g_flat = g_w1.ravel()
    grad = np.concatenate([g_flat + l1, -g_flat + l1, g_b1.ravel(), g_w2.ravel(), g_b2])
    return f, grad


def fit_notears_mlp(X: np.ndarray, cfg: NotearsMLPConfig = NotearsMLPConfig(), seed: int = 0) -> NotearsFit:
    X = np.asarray(getattr(X, "values", X), dtype=float)
    n, d = X.shape
    if n <= d:
        raise TestInfeasibleError(f"notears-mlp needs rows > k ({n} <= {d})")
    layout = MLPLayout(d, cfg.hidden_units)
    bounds = layout.bounds()
    theta0 = layout.init(np.random.default_rng(seed))

    def solve(theta, rho, alpha):
        return sopt.minimize(mlp_objective, theta, args=(X, layout, cfg.l1, cfg.l2, rho, alpha),
                             jac=True, method="L-BFGS-B", bounds=bounds).x

    def h_of(theta):
        return acyclicity_h(surrogate_adjacency(layout, theta))[0]

    theta, h, rho, outer = augmented_lagrangian(
        solve, h_of, theta0, cfg.max_outer_iter, cfg.h_tol, cfg.rho_max, restart_from_previous=True)
    return NotearsFit(surrogate_adjacency(layout, theta), h, rho, outer, h <= cfg.h_tol)


def notears_mlp(M, cfg: NotearsMLPConfig = NotearsMLPConfig(), seed: int = 0,
                strict: bool = False) -> CausalGraph:
    """NOTEARS-MLP graph; deterministic given ``cfg`` and the initialisation ``seed``."""
    fit = fit_notears_mlp(getattr(M, "values", M), cfg, seed)
    _report(fit, strict, "notears-mlp")
    return CausalGraph(threshold_and_prune(fit.weights, cfg.edge_threshold), _labels(M))
