"""Moments and Laplace functionals of mixed binomial processes.

For N = (kappa, nu) with c = E K and d2 = Var K:

    E Nf          = c nu(f)
    Var Nf        = c nu(f^2) + (d2 - c) nu(f)^2
    Cov(Nf, Ng)   = c nu(fg) + (d2 - c) nu(f) nu(g)
    E exp(-Nf)    = pgf_kappa(nu(exp(-f)))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .counting import Binomial, CountingDistribution, NegativeBinomial, Poisson
from .errors import ContractError, DomainError, LaplaceUnderflowError
from .measure import MAX_TENSOR_POINTS, _evaluate, integrate, restrict
from .stc import RandomMeasure


def mean_nf(measure: RandomMeasure, f: Callable, **kw) -> float:
    return measure.kappa.mean * integrate(measure.nu, f, **kw)


def var_nf(measure: RandomMeasure, f: Callable, **kw) -> float:
    first = integrate(measure.nu, f, **kw)
    second = integrate(measure.nu, lambda x: np.asarray(f(x), float) ** 2, **kw)
    return moments_to_variance(measure.kappa, first, second)


def cov_nf(measure: RandomMeasure, f: Callable, g: Callable, **kw) -> float:
    nf = integrate(measure.nu, f, **kw)
    ng = integrate(measure.nu, g, **kw)
    nfg = integrate(measure.nu, lambda x: np.asarray(f(x), float) * np.asarray(g(x), float), **kw)
    return measure.kappa.mean * nfg + measure.kappa.overdispersion * nf * ng


def moments_to_variance(kappa: CountingDistribution, first: float, second: float) -> float:
    """Var Nf from nu(f) and nu(f^2)."""
    return kappa.mean * second + kappa.overdispersion * first * first


def pt_variance(kappa: CountingDistribution, first: float, second: float) -> float:
    """Family-specific closed form of Var Nf for Poisson, binomial and negative binomial."""
    if isinstance(kappa, Poisson):
        return kappa.rate * second
    if isinstance(kappa, Binomial):
        n, p = kappa.trials, kappa.prob
        return n * p * (second - p * first * first)
    if isinstance(kappa, NegativeBinomial):
        r, p = kappa.shape, kappa.prob
        q = p / (1.0 - p)
        return r * q * (second + q * first * first)
    raise DomainError(f"{type(kappa).__name__} is not a Poisson-type law")


def pt_covariance(
    kappa: CountingDistribution, first_f: float, first_g: float, cross: float
) -> float:
    """Family-specific closed form of Cov(Nf, Ng)."""
    if isinstance(kappa, Poisson):
        return kappa.rate * cross
    if isinstance(kappa, Binomial):
        n, p = kappa.trials, kappa.prob
        return n * p * (cross - p * first_f * first_g)
    if isinstance(kappa, NegativeBinomial):
        r, p = kappa.shape, kappa.prob
        q = p / (1.0 - p)
        return r * q * (cross + q * first_f * first_g)
    raise DomainError(f"{type(kappa).__name__} is not a Poisson-type law")


@dataclass(frozen=True)
class LaplaceEval:
    """One transform value F(alpha) = E exp(-alpha N f*) with f* = f / scale."""

    alpha: float
    value: float
    log_value: float
    integrand: float
    scale: float
    std_error: float = 0.0


def _log_integrals(measure, f, alphas, scale, nodes, reps, rng):
    """log nu(exp(-alpha f / scale)) for each alpha, plus MC standard errors."""
    nu = measure.nu
    if nu.quadrature_size(nodes) <= MAX_TENSOR_POINTS:
        pts, wts = nu.quadrature(nodes)
        vals = _evaluate(f, pts) / scale
        keep = wts > 0
        lw = np.log(wts[keep])
        vals = vals[keep]
        return np.array([logsumexp(lw - a * vals) for a in alphas]), np.zeros(len(alphas))
    rng = rng if rng is not None else np.random.default_rng(0)
    vals = _evaluate(f, nu.sample(rng, reps)) / scale
    logs, ses = [], []
    for a in alphas:
        e = np.exp(-a * vals)
        m = e.mean()
        logs.append(math.log(m) if m > 0 else -math.inf)
        ses.append(e.std(ddof=1) / math.sqrt(reps))
    return np.asarray(logs), np.asarray(ses)


def _log_pgf(kappa: CountingDistribution, log_t: float) -> float:
    t = min(math.exp(log_t), 1.0)
    if isinstance(kappa, Poisson):
        # exact in log space even when exp underflows
        return kappa.rate * math.expm1(min(log_t, 0.0))
    return float(kappa.log_pgf(t))


def laplace_transform(
    measure: RandomMeasure,
    f: Callable,
    alphas: Sequence[float],
    scale: float = 1.0,
    *,
    nodes: int | None = None,
    reps: int = 100_000,
    rng: np.random.Generator | None = None,
    allow_underflow: bool = False,
) -> list[LaplaceEval]:
    """F(alpha) = pgf(nu exp(-alpha f / scale)) evaluated in log space."""
    alphas = [float(a) for a in alphas]
    if any(a < 0 or not math.isfinite(a) for a in alphas):
        raise DomainError("transform arguments must be non-negative")
    if not scale > 0:
        raise DomainError("scale must be positive")
    logs, ses = _log_integrals(measure, f, alphas, scale, nodes, reps, rng)
    out = []
    for a, li, se in zip(alphas, logs, ses):
        lv = _log_pgf(measure.kappa, min(li, 0.0))
        value = math.exp(lv) if lv > -math.inf else 0.0
        if value == 0.0 and lv > -math.inf and not allow_underflow:
            raise LaplaceUnderflowError(
                f"F({a}) underflows (log value {lv:.4g}); increase the scale of f"
            )
        out.append(LaplaceEval(a, value, lv, math.exp(li), scale, float(se)))
    return out


def laplace_functional(measure: RandomMeasure, f: Callable, **kw) -> float:
    """E exp(-N f)."""
    return laplace_transform(measure, f, [1.0], **kw)[0].value


def restricted_laplace(measure: RandomMeasure, region, f: Callable, **kw) -> float:
    """E exp(-N_A f) = pgf(a nu_A(exp(-f)) + 1 - a) with a = nu(A)."""
    nu_a, a = restrict(measure.nu, region)
    inner = integrate(nu_a, lambda x: np.exp(-np.asarray(f(x), float)), **kw)
    return float(measure.kappa.pgf(min(a * inner + 1.0 - a, 1.0)))


def transform_moments(
    measure: RandomMeasure,
    f: Callable,
    scale: float = 1.0,
    step: float = 1e-5,
    second_step: float = 1e-3,
    nodes: int | None = None,
) -> tuple[float, float]:
    """Mean and variance of N f from one-sided differences of F at zero.

    Only alpha >= 0 is used, so the pgf is never evaluated outside
    [0, 1]; this matters for laws such as the zeta law whose pgf has
    radius of convergence one. ``f`` must be non-negative.
    """
    pts, wts = measure.nu.quadrature(nodes)
    vals = _evaluate(f, pts) / scale

    def transform(a):
        inner = float(wts @ np.exp(-a * vals))
        return float(measure.kappa.pgf(min(inner, 1.0)))

    h = step
    d1 = (-3.0 * transform(0.0) + 4.0 * transform(h) - transform(2 * h)) / (2.0 * h)
    h = second_step
    f0, f1, f2, f3 = (transform(k * h) for k in range(4))
    d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h)
    mean = -d1
    return mean * scale, (d2 - mean * mean) * scale * scale


def check_alphas_sorted(alphas: Sequence[float]) -> None:
    if any(b > a for a, b in zip(alphas, alphas[1:])):
        raise ContractError("transform arguments must be sorted in decreasing order")
