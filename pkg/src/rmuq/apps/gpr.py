"""Gaussian-process regression with a radial basis kernel."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from ..errors import ContractError, IntegrationError, NumericalWarning

JITTER = 1e-10


def rbf_gram(x: np.ndarray, y: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma |x_i - y_j|^2) for row-stacked points."""
    sq = (x * x).sum(1)[:, None] + (y * y).sum(1)[None, :] - 2.0 * x @ y.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class GprModel:
    inputs: np.ndarray
    outputs: np.ndarray
    gamma: float
    noise: float
    chol: np.ndarray
    weights: np.ndarray
    jitter: float = 0.0

    def kernel(self, x: np.ndarray) -> np.ndarray:
        return rbf_gram(_points(x, self.inputs.shape[1]), self.inputs, self.gamma)

    def __call__(self, x) -> np.ndarray:
        return self.kernel(x) @ self.weights


def _points(x, dim: int) -> np.ndarray:
    x = np.asarray(x, float)
    if x.ndim == 1:
        x = x[:, None] if dim == 1 else x[None, :]
    if x.shape[1] != dim:
        raise ContractError(f"expected points of dimension {dim}")
    return x


def gpr_fit(inputs, outputs, gamma: float, noise: float = 0.0) -> GprModel:
    """Posterior of a zero-mean GP with kernel exp(-gamma |x - x'|^2).

    When the Gram matrix is numerically singular a jitter of 1e-10 is
    added to its diagonal once; a second failure is an error.
    """
    if not gamma > 0 or noise < 0:
        raise ContractError("need gamma > 0 and noise >= 0")
    x = np.asarray(inputs, float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(outputs, float).reshape(-1)
    if y.size != x.shape[0]:
        raise ContractError("one output per input required")
    gram = rbf_gram(x, x, gamma) + noise * np.eye(y.size)
    jitter = 0.0
    try:
        factor = cho_factor(gram, lower=True)
    except LinAlgError:
        jitter = JITTER
        try:
            factor = cho_factor(gram + jitter * np.eye(y.size), lower=True)
        except LinAlgError as err:
            raise IntegrationError("Gram matrix is not positive definite even with jitter") from err
        warnings.warn("Gram matrix jittered by 1e-10", NumericalWarning)
    weights = cho_solve(factor, y)
    chol = np.tril(factor[0])
    return GprModel(x, y, float(gamma), float(noise), chol, weights, jitter)


def gpr_predict(model: GprModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at ``x``."""
    kx = model.kernel(x)
    mean = kx @ model.weights
    v = solve_triangular(model.chol, kx.T, lower=True)
    var = 1.0 - (v * v).sum(0)
    if np.any(var < -1e-10):
        raise IntegrationError("negative posterior variance beyond round-off")
    return mean, np.maximum(var, 0.0)
