"""Random fields U(y) = N k(., y) indexed by a finite grid.

Mean and covariance follow from the moment formulas of N applied to the
sections f_y = k(., y). The functional principal components of the
covariance with respect to grid weights give a spectral decomposition
whose normalised eigenvalues act as sensitivity indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .anova import entropy
from .errors import ContractError, DegenerateVarianceError
from .measure import as_argument
from .stc import RandomMeasure, realize


@dataclass
class RandomField:
    """U(y) = sum over points of k(x, y) for y in ``index``.

    ``kernel(x, y)`` receives base points in the integrand convention and
    a single index value, and returns one value per base point.
    """

    measure: RandomMeasure
    kernel: Callable
    index: np.ndarray

    def __post_init__(self):
        self.index = np.asarray(self.index, float)
        if self.index.ndim == 0 or self.index.shape[0] == 0:
            raise ContractError("index grid must be non-empty")

    def sections(self, points: np.ndarray) -> np.ndarray:
        """Matrix k(x_i, y_j) with one row per base point."""
        arg = as_argument(points)
        cols = [np.asarray(self.kernel(arg, y), float).reshape(-1) for y in self.index]
        return np.stack(cols, axis=1)


def _moments(field: RandomField, nodes=None):
    pts, wts = field.measure.nu.quadrature(nodes)
    sec = field.sections(pts)
    first = wts @ sec
    second = (sec * wts[:, None]).T @ sec
    return first, second


def field_mean(field: RandomField, nodes=None) -> np.ndarray:
    first, _ = _moments(field, nodes)
    return field.measure.kappa.mean * first


def field_cov(field: RandomField, nodes=None) -> np.ndarray:
    """C(y, z) = c nu(f_y f_z) + (d2 - c) nu(f_y) nu(f_z) on the index grid."""
    first, second = _moments(field, nodes)
    k = field.measure.kappa
    cov = k.mean * second + k.overdispersion * np.outer(first, first)
    return 0.5 * (cov + cov.T)


def field_sample(field: RandomField, rng: np.random.Generator) -> np.ndarray:
    """One path of U on the index grid."""
    real = realize(field.measure, rng)
    if real.count == 0:
        return np.zeros(field.index.shape[0])
    return field.sections(real.points).sum(axis=0)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of the covariance operator, largest first.

    ``functions[:, k]`` is the k-th eigenfunction on the grid, orthonormal
    with respect to the grid weights.
    """

    values: np.ndarray
    functions: np.ndarray
    weights: np.ndarray
    trace: float

    def reconstruction_error(self, rank: int) -> float:
        """Weighted Frobenius norm of the covariance minus its rank-r truncation."""
        tail = np.clip(self.values[rank:], 0.0, None)
        return float(np.sqrt(np.sum(tail**2)))

    def truncated(self, rank: int) -> np.ndarray:
        phi = self.functions[:, :rank]
        return (phi * self.values[:rank]) @ phi.T


def fpca(cov: np.ndarray, weights: np.ndarray | None = None) -> EigenSystem:
    cov = np.asarray(cov, float)
    m = cov.shape[0]
    if cov.shape != (m, m):
        raise ContractError("covariance must be square")
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, float)
    if w.shape != (m,) or np.any(w <= 0):
        raise ContractError("weights must be positive, one per grid point")
    root = np.sqrt(w)
    op = root[:, None] * cov * root[None, :]
    vals, vecs = np.linalg.eigh(0.5 * (op + op.T))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    return EigenSystem(vals, vecs / root[:, None], w, float(np.trace(op)))


@dataclass(frozen=True)
class SpectralAnova:
    indices: np.ndarray
    entropy: float
    effective_dimension: int


def effective_dimension(indices: np.ndarray, level: float = 0.95) -> int:
    """Smallest r whose leading r indices account for ``level`` of the total."""
    cum = np.cumsum(indices)
    return int(np.searchsorted(cum, level - 1e-12) + 1)


def rf_anova(system: EigenSystem, level: float = 0.95) -> SpectralAnova:
    vals = np.clip(system.values, 0.0, None)
    total = vals.sum()
    if not total > 0:
        raise DegenerateVarianceError("covariance trace is zero")
    idx = vals / total
    return SpectralAnova(idx, entropy(idx), effective_dimension(idx, level))


def rbf_kernel(gamma: float) -> Callable:
    """k(x, y) = exp(-gamma (x - y)^2) on the real line."""
    if not gamma > 0:
        raise ContractError("kernel width must be positive")
    return lambda x, y: np.exp(-gamma * (np.asarray(x, float) - y) ** 2)
