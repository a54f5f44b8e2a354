"""Statistical kernels used by the discovery algorithms.

All kernels work on correlation (standardized) moments, so results are
invariant to affine rescaling of columns.  This matters for field data where
columns differ by many orders of magnitude (ohms next to farads).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DegenerateInputError, NumericalError, TestInfeasibleError

_COND_LIMIT = 1e-10  # smallest eigenvalue tolerated in a conditioning block


def _as_array(M) -> np.ndarray:
    return np.asarray(getattr(M, "values", M), dtype=float)


def correlation_matrix(values: np.ndarray) -> np.ndarray:
    """Pearson correlation of the columns; zero-variance columns are rejected."""
    x = np.asarray(values, dtype=float)
    xc = x - x.mean(axis=0)
    sd = np.sqrt((xc ** 2).mean(axis=0))
    scale = np.maximum(np.abs(x).max(axis=0), 1e-300)
    dead = np.flatnonzero(sd <= 1e-12 * scale)
    if dead.size:
        raise DegenerateInputError(f"zero-variance column(s) {dead.tolist()}")
    z = xc / sd
    c = z.T @ z / x.shape[0]
    np.fill_diagonal(c, 1.0)
    return c


@dataclass(frozen=True)
class CITestResult:
    statistic: float
    p_value: float
    independent: bool


def partial_correlation_from_corr(corr: np.ndarray, i: int, j: int, S: Iterable[int] = ()) -> float:
    """Correlation of the residuals of ``i`` and ``j`` after regressing both on ``S``.

    Works from the correlation matrix (the residual covariance is the Schur
    complement of the ``S`` block).  If ``i`` or ``j`` is an exact linear
    function of ``S`` its residual is constant and 0 is returned.
    """
    S = [int(s) for s in S]
    if i == j or i in S or j in S:
        raise ValueError("i, j must differ and lie outside the conditioning set")
    if not S:
        r = corr[i, j]
    else:
        ab = np.ix_([i, j], [i, j])
        ss = corr[np.ix_(S, S)]
        if np.linalg.eigvalsh(ss).min() < _COND_LIMIT:
            raise NumericalError(f"conditioning set {S} is rank deficient")
        cross = corr[np.ix_([i, j], S)]
        resid = corr[ab] - cross @ np.linalg.solve(ss, cross.T)
        if resid[0, 0] <= 1e-12 or resid[1, 1] <= 1e-12:
            return 0.0
        r = resid[0, 1] / math.sqrt(resid[0, 0] * resid[1, 1])
    return float(min(1.0, max(-1.0, r)))


def partial_correlation(M, i: int, j: int, S: Iterable[int] = ()) -> float:
    """Partial correlation of columns ``i`` and ``j`` given columns ``S`` (with intercept)."""
    x = _as_array(M)
    S = list(S)
    if x.shape[0] <= len(S) + 2:
        raise TestInfeasibleError(f"{x.shape[0]} rows cannot support |S|={len(S)}")
    cols = [i, j, *S]
    corr = correlation_matrix(x[:, cols])
    return partial_correlation_from_corr(corr, 0, 1, range(2, len(cols)))


def fisher_z_test(r: float, rows: int, s_size: int, alpha: float = 0.05) -> CITestResult:
    """Fisher's z test of zero (partial) correlation.

    ``|r| >= 1`` is treated as certain dependence (p = 0) instead of an
    infinite statistic.
    """
    dof = rows - s_size - 3
    if dof <= 0:
        raise TestInfeasibleError(f"Fisher z needs rows - |S| - 3 > 0 (rows={rows}, |S|={s_size})")
    if abs(r) >= 1.0 - 1e-15:
        return CITestResult(math.copysign(math.inf, r), 0.0, False)
    z = math.atanh(r) * math.sqrt(dof)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return CITestResult(z, p, p > alpha)


class BICScore:
    """Decomposable Gaussian BIC with cached local scores.

    ``local(child, parents) = -rows * ln(RSS/rows) - |parents| * ln(rows)``,
    where RSS is measured on the standardized child (a per-child constant
    shift that cancels in every score difference).
    """

    def __init__(self, M, penalty: float = 1.0):
        x = _as_array(M)
        self.rows, self.k = x.shape
        self.corr = correlation_matrix(x)
        self.penalty = penalty
        self._cache: dict[tuple[int, frozenset], float] = {}

    def residual_variance(self, child: int, parents) -> float:
        P = sorted(int(p) for p in parents)
        if not P:
            return 1.0
        cpp = self.corr[np.ix_(P, P)]
        if np.linalg.eigvalsh(cpp).min() < _COND_LIMIT:
            raise NumericalError(f"singular regression for child {child} on parents {P}")
        cp = self.corr[child, P]
        return float(1.0 - cp @ np.linalg.solve(cpp, cp))

    def local(self, child: int, parents) -> float:
        key = (int(child), frozenset(int(p) for p in parents))
        hit = self._cache.get(key)
        if hit is None:
            if child in key[1]:
                raise ValueError(f"child {child} listed among its own parents")
            var = max(self.residual_variance(child, key[1]), 1e-300)
            hit = -self.rows * math.log(var) - self.penalty * len(key[1]) * math.log(self.rows)
            self._cache[key] = hit
        return hit

    def delta(self, child: int, before, after) -> float:
        return self.local(child, after) - self.local(child, before)


def bic_local_delta(M, child: int, parents_before, parents_after) -> float:
    """Change in the child's BIC local score when its parent set changes (higher is better)."""
    x = _as_array(M)
    if x.shape[0] <= max(len(set(parents_before)), len(set(parents_after))) + 2:
        raise TestInfeasibleError("too few rows for the requested parent sets")
    return BICScore(x).delta(child, parents_before, parents_after)


# -- pairwise likelihood ratio for linear non-Gaussian models -------------

_K1, _K2, _GAMMA = 79.047, 7.4129, 0.37457


def _entropy(u: np.ndarray) -> float:
    """Maximum-entropy approximation of differential entropy of a unit-variance sample."""
    logcosh = np.logaddexp(u, -u) - math.log(2.0)
    return ((1 + math.log(2 * math.pi)) / 2
            - _K1 * (logcosh.mean() - _GAMMA) ** 2
            - _K2 * (np.mean(u * np.exp(-u ** 2 / 2))) ** 2)


def _standardize(col: np.ndarray, index: int) -> np.ndarray:
    sd = col.std()
    if sd <= 1e-12 * max(np.abs(col).max(), 1e-300):
        raise DegenerateInputError(f"zero-variance column {index}")
    return (col - col.mean()) / sd


def _pairwise_lr_std(xi: np.ndarray, xj: np.ndarray) -> float:
    rho = float(np.mean(xi * xj))
    ri_j = xi - rho * xj
    rj_i = xj - rho * xi
    si, sj = ri_j.std(), rj_i.std()
    if si <= 1e-8 or sj <= 1e-8:
        return 0.0  # deterministic relation: direction unidentifiable
    return float((_entropy(xj) + _entropy(ri_j / si)) - (_entropy(xi) + _entropy(rj_i / sj)))


def pairwise_lr(M, i: int, j: int) -> float:
    """Entropy-based likelihood ratio; positive when the data favour ``i -> j``.

    Exactly antisymmetric: ``pairwise_lr(M, i, j) == -pairwise_lr(M, j, i)``.
    """
    x = _as_array(M)
    if x.shape[0] < 20:
        raise TestInfeasibleError(f"pairwise likelihood ratio needs >= 20 rows, got {x.shape[0]}")
    return _pairwise_lr_std(_standardize(x[:, i], i), _standardize(x[:, j], j))
