"""Maximum-entropy reconstruction of a law from its Laplace transform.

Given F(alpha_i) = E exp(-alpha_i X) for X = N f / C >= 0, the variable
Y = exp(-X) lives on [0, 1] and has generalised moments E Y^alpha_i =
F(alpha_i). The maximum-entropy density on [0, 1] under those
constraints is

    mu(y) = exp(-sum_i lambda_i y^alpha_i) / Z(lambda),

found by minimising the convex dual log Z(lambda) + sum_i lambda_i F_i
with damped Newton steps. All integrals are taken in the coordinate
x = -log y, where the mass of Y near zero is spread out on a composite
Gauss-Legendre grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import ContractError, ConvergenceError, DomainError, NumericalWarning
from .laplace import laplace_transform
from .measure import gauss_legendre, integrate
from .stc import RandomMeasure

STALL_TOLERANCE = 1e-6
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class MaxEntProblem:
    """Transform values at decreasing arguments for X = N f / scale."""

    alphas: np.ndarray
    targets: np.ndarray
    scale: float = 1.0
    log_targets: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.alphas, float)
        lt = (
            np.asarray(self.log_targets, float)
            if self.log_targets is not None
            else np.log(np.asarray(self.targets, float))
        )
        if a.ndim != 1 or a.size == 0 or lt.shape != a.shape:
            raise ContractError("need matching non-empty alpha and target vectors")
        if np.any(a <= 0) or np.unique(a).size != a.size:
            raise ContractError("alphas must be positive and distinct")
        if np.any(np.diff(a) > 0):
            raise ContractError("alphas must be sorted in decreasing order")
        if np.any(~np.isfinite(lt)) or np.any(lt > 1e-12):
            raise ContractError("targets must lie in (0, 1]")
        if np.any(np.diff(lt) < -1e-12):
            raise ContractError("transform values must decrease as alpha grows")
        if not self.scale > 0:
            raise ContractError("scale must be positive")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "log_targets", lt)
        object.__setattr__(self, "targets", np.exp(lt))

    @classmethod
    def from_transform(cls, transform: Callable, alphas: Sequence[float], scale: float = 1.0):
        a = np.sort(np.asarray(alphas, float))[::-1]
        return cls(a, np.array([transform(x) for x in a]), scale)

    def extended(self, alpha: float, target: float) -> "MaxEntProblem":
        """Problem with one more constraint inserted in order."""
        a = np.append(self.alphas, alpha)
        lt = np.append(self.log_targets, math.log(target))
        order = np.argsort(a)[::-1]
        return MaxEntProblem(a[order], np.exp(lt[order]), self.scale, lt[order])


def draw_alphas(n: int, seed: int, rate: float = 1.0) -> np.ndarray:
    """Exponentially distributed transform arguments, sorted decreasingly."""
    if n < 1:
        raise DomainError("need at least one argument")
    rng = np.random.default_rng(seed)
    return np.sort(rng.exponential(1.0 / rate, n))[::-1]


def generalized_moments(
    measure: RandomMeasure,
    f: Callable,
    alphas: Sequence[float],
    scale: float | str | None = None,
    **kw,
) -> MaxEntProblem:
    """Transform values of N f at ``alphas``.

    ``scale`` defaults to E N f so that X has unit mean; ``"nu"`` uses
    nu(f) instead, and a number is used as given.
    """
    nuf = integrate(measure.nu, f)
    if scale is None:
        scale = measure.kappa.mean * nuf
    elif scale == "nu":
        scale = nuf
    scale = float(scale)
    if not scale > 0:
        raise DomainError("scale must be positive; is f identically zero?")
    a = np.sort(np.asarray(alphas, float))[::-1]
    evals = laplace_transform(measure, f, a, scale, allow_underflow=True, **kw)
    lt = np.array([e.log_value for e in evals])
    return MaxEntProblem(a, np.exp(lt), scale, lt)


@dataclass
class MaxEntDensity:
    """Fitted density; ``pdf`` is on the original scale of N f."""

    problem: MaxEntProblem
    lambdas: np.ndarray
    log_partition: float
    x_nodes: np.ndarray
    x_weights: np.ndarray
    iterations: int
    gradient_norm: float
    regularized: bool = False
    stalled: bool = False
    _probs: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        lp = self._log_kernel(self.x_nodes) + np.log(self.x_weights) - self.log_partition
        self._probs = np.exp(lp)

    def _log_kernel(self, x):
        x = np.asarray(x, float)
        feats = np.exp(-np.multiply.outer(x, self.problem.alphas))
        return -x - feats @ self.lambdas

    def pdf_unit(self, y) -> np.ndarray:
        """Density of Y = exp(-X) on (0, 1]."""
        y = np.asarray(y, float)
        feats = np.power.outer(y, self.problem.alphas)
        return np.exp(-feats @ self.lambdas - self.log_partition)

    def pdf_scaled(self, x) -> np.ndarray:
        """Density of X = N f / scale."""
        return np.exp(self._log_kernel(x) - self.log_partition)

    def pdf(self, x) -> np.ndarray:
        c = self.problem.scale
        return self.pdf_scaled(np.asarray(x, float) / c) / c

    def expect(self, h: Callable) -> float:
        """E h(N f) under the fitted law."""
        return float(self._probs @ h(self.x_nodes * self.problem.scale))

    @property
    def mean(self) -> float:
        return self.problem.scale * float(self._probs @ self.x_nodes)

    @property
    def variance(self) -> float:
        m = float(self._probs @ self.x_nodes)
        return self.problem.scale**2 * float(self._probs @ (self.x_nodes - m) ** 2)

    def transform(self, alphas) -> np.ndarray:
        """Fitted E exp(-alpha X) for X on the scaled axis."""
        return np.exp(-np.multiply.outer(np.asarray(alphas, float), self.x_nodes)) @ self._probs

    def l1_distance(self, reference_pdf: Callable) -> float:
        """L1 distance to a reference density of N f."""
        c = self.problem.scale
        x = self.x_nodes * c
        return float(self.x_weights * c @ np.abs(self.pdf(x) - reference_pdf(x)))


def _grid(problem: MaxEntProblem, panels: int, nodes: int):
    reach = float(np.max(-problem.log_targets / problem.alphas))
    length = 4.0 * max(reach, 1.0) + 30.0
    breaks = np.linspace(0.0, length, panels + 1)[1:-1]
    x, w = gauss_legendre(0.0, length, nodes, breaks)
    return x, w * length


class _Dual:
    def __init__(self, x, w, alphas):
        self.log_w = np.log(w) - x
        self.feats = np.exp(-np.multiply.outer(alphas, x))

    def state(self, lam):
        lp = self.log_w - lam @ self.feats
        lz = logsumexp(lp)
        return lz, np.exp(lp - lz)


def _newton(dual, targets, lam, tol, max_iter):
    regularized = stalled = False
    grad_norm = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        lz, p = dual.state(lam)
        m = dual.feats @ p
        grad = targets - m
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < tol:
            return lam, it - 1, grad_norm, regularized, stalled
        hess = (dual.feats * p) @ dual.feats.T - np.outer(m, m)
        diag = np.sqrt(np.maximum(np.diag(hess), 1e-300))
        scaled = hess / np.outer(diag, diag)
        if np.linalg.cond(scaled) > CONDITION_LIMIT:
            regularized = True
        step = -np.linalg.lstsq(scaled, grad / diag, rcond=1.0 / CONDITION_LIMIT)[0] / diag
        base = lz + lam @ targets
        slope = grad @ step
        t = 1.0
        while t > 1e-14:
            trial = lam + t * step
            val = dual.state(trial)[0] + trial @ targets
            if val <= base + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            stalled = True
            break
        lam = trial
    lz, p = dual.state(lam)
    grad_norm = float(np.linalg.norm(targets - dual.feats @ p))
    return lam, it, grad_norm, regularized, stalled


def fit_maxent(
    problem: MaxEntProblem,
    tol: float = 1e-10,
    max_iter: int = 200,
    panels: int = 200,
    nodes: int = 32,
) -> MaxEntDensity:
    """Fit the maximum-entropy density.

    Constraints are introduced one at a time in increasing alpha, each
    solve warm-starting the next. Newton stops once the dual gradient
    norm drops below ``tol``. A solve that stalls at round-off level
    (gradient below 1e-6) is accepted with a NumericalWarning; anything
    worse raises ConvergenceError.
    """
    x, w = _grid(problem, panels, nodes)
    order = np.argsort(problem.alphas)
    lam = np.zeros(0)
    total_iter = 0
    regularized = False
    grad_norm = math.inf
    for k in range(1, order.size + 1):
        idx = order[:k]
        dual = _Dual(x, w, problem.alphas[idx])
        lam, it, grad_norm, reg, _ = _newton(
            dual, problem.targets[idx], np.append(lam, 0.0), tol, max_iter
        )
        total_iter += it
        regularized |= reg
    # earlier stages only provide warm starts; the full problem decides
    stalled = grad_norm >= tol
    if grad_norm >= STALL_TOLERANCE:
        full = np.zeros(problem.alphas.size)
        full[order] = lam
        raise ConvergenceError(f"maxent Newton stopped with gradient norm {grad_norm:.3g}", full)
    lambdas = np.zeros(problem.alphas.size)
    lambdas[order] = lam
    if regularized:
        warnings.warn("ill-conditioned Hessian; regularised Newton steps used", NumericalWarning)
    if stalled:
        warnings.warn(
            f"maxent stopped at gradient norm {grad_norm:.2e} (round-off floor)", NumericalWarning
        )
    dual = _Dual(x, w, problem.alphas)
    lz = dual.state(lambdas)[0]
    return MaxEntDensity(problem, lambdas, lz, x, w, total_iter, grad_norm, regularized, stalled)
