"""Particle systems driven by Brownian paths observed at a fixed time.

Particles are Wiener paths counted by a superposition of binomial,
Poisson and negative binomial laws. Observing at time t maps nu to the
Gaussian marginal mu_t, which carries the cos^2 "rent" functional and
the radial-basis interaction field. The closed forms here are checked
against quadrature in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..counting import Binomial, CountingDistribution, NegativeBinomial, Poisson, Superposition, restrict_count
from ..field import EigenSystem, SpectralAnova, fpca, rf_anova
from ..measure import UnivariateNormal, brownian_marginal
from ..stc import RandomMeasure


def wiener_law(t: float, **drift) -> UnivariateNormal:
    """Position law at time t; keyword arguments add a random start and drift."""
    return brownian_marginal(t, **drift)


def mixed_population(
    binomial: tuple = (20, 0.5), poisson: float = 85.0, negbin: tuple = (5.0, 0.5)
) -> Superposition:
    """Binomial + Poisson + negative binomial count.

    The defaults balance the binomial deficit against the negative
    binomial excess, so the sum is orthogonal with mean 100.
    """
    return Superposition((Binomial(*binomial), Poisson(poisson), NegativeBinomial(*negbin)))


def rent(x):
    return np.cos(np.asarray(x, float)) ** 2


@dataclass(frozen=True)
class RentMoments:
    """mu_t g, mu_t g^2, mu_t f and mu_t f^2 for g = cos^2, f = (g - mu_t g)^2."""

    t: float
    mean: float
    second: float
    loss_mean: float
    loss_second: float

    def total_mean(self, kappa: CountingDistribution) -> float:
        return kappa.mean * self.mean

    def total_variance(self, kappa: CountingDistribution) -> float:
        return kappa.mean * self.second + kappa.overdispersion * self.mean**2


def rent_moments(t: float) -> RentMoments:
    if not t > 0:
        raise ValueError("time must be positive")
    e = math.exp
    mean = e(-t) * math.cosh(t)
    second = (3 + 4 * e(-2 * t) + e(-8 * t)) / 8
    loss = e(-8 * t) * (e(4 * t) - 1) ** 2 / 8
    loss2 = (
        0.25
        * e(-16 * t)
        * math.sinh(2 * t) ** 4
        * (4 * math.sinh(4 * t) + math.sinh(8 * t) + 8 * math.cosh(4 * t) + 2 * math.cosh(8 * t) + 5)
    )
    return RentMoments(t, mean, second, loss, loss2)


def rent_image_density(y, t: float, kmax: int | None = None) -> np.ndarray:
    """Density of cos^2(X) for X ~ N(0, t), summing preimages with |k| <= kmax."""
    y = np.asarray(y, float)
    if kmax is None:
        kmax = int(math.ceil(6 * math.sqrt(t) / (2 * math.pi))) + 2
    root = np.sqrt(y)
    total = np.zeros_like(y)
    for k in range(-kmax, kmax + 1):
        shift = 2 * math.pi * k
        for inner in (root, -root):
            base = np.arccos(inner)
            for sign in (1.0, -1.0):
                total += np.exp(-((sign * base + shift) ** 2) / (2 * t))
    return total / (2 * np.sqrt(2 * math.pi * t * y * (1 - y)))


def rent_sensitivity_density(x, t: float) -> np.ndarray:
    """mu_t(dx) f^2(x) / mu_t f^2 as a Lebesgue density."""
    m = rent_moments(t)
    x = np.asarray(x, float)
    phi = np.exp(-x * x / (2 * t)) / math.sqrt(2 * math.pi * t)
    return phi * (rent(x) - m.mean) ** 4 / m.loss_second


def restricted_count(kappa: CountingDistribution, law: UnivariateNormal, low: float, high: float):
    """Count law of the particles inside [low, high] and the window mass."""
    a = float(law.cdf(high) - law.cdf(low))
    return restrict_count(kappa, a), a


def bone_mapping_gap(kappa: CountingDistribution, a: float, ts) -> float:
    """max |psi(a t + 1 - a) - psi_{h_a}(t)| over ``ts``."""
    ts = np.asarray(ts, float)
    thinned = restrict_count(kappa, a)
    return float(np.max(np.abs(kappa.pgf(a * ts + 1 - a) - thinned.pgf(ts))))


def interaction_mean(y, t: float, gamma: float) -> np.ndarray:
    """mu_t f_y for the kernel exp(-gamma (x - y)^2)."""
    y = np.asarray(y, float)
    s = 2 * gamma * t + 1
    return np.exp(-gamma * y * y / s) / math.sqrt(s)


def interaction_second(y, z, t: float, gamma: float) -> np.ndarray:
    """mu_t(f_y f_z)."""
    y, z = np.asarray(y, float), np.asarray(z, float)
    s = 4 * gamma * t + 1
    return np.exp(-gamma * (2 * gamma * t * (y - z) ** 2 + y * y + z * z) / s) / math.sqrt(s)


def interaction_cov(y, z, t: float, gamma: float, kappa: CountingDistribution) -> np.ndarray:
    y, z = np.asarray(y, float), np.asarray(z, float)
    s = 2 * gamma * t + 1
    cross = np.exp(-gamma * (y * y + z * z) / s) / s
    return kappa.mean * interaction_second(y, z, t, gamma) + kappa.overdispersion * cross


def interaction_time(y: float, gamma: float) -> tuple[float, float]:
    """Time of largest expected interaction at distance y, and that value."""
    t_hat = max(y * y - 1 / (2 * gamma), 0.0)
    if t_hat > 0:
        return t_hat, 1 / (abs(y) * math.sqrt(2 * math.e * gamma))
    return 0.0, math.exp(-gamma * y * y)


def interaction_time_search(y: float, gamma: float, tol: float = 1e-10) -> tuple[float, float]:
    upper = 2 * y * y + 1 / gamma + 1
    res = minimize_scalar(
        lambda t: -float(interaction_mean(y, t, gamma)),
        bounds=(0.0, upper),
        method="bounded",
        options={"xatol": tol},
    )
    return float(res.x), -float(res.fun)


def bivariate_kernel(x, y: float, z: float, sy: float, sz: float, rho: float) -> np.ndarray:
    x = np.asarray(x, float)
    u, v = (x - y) / sy, (x - z) / sz
    return np.exp(-(u * u - 2 * rho * u * v + v * v) / (2 * (1 - rho * rho)))


def bivariate_mean(y, z, t: float, sy: float, sz: float, rho: float) -> np.ndarray:
    """mu_t f_{yz} for the correlated bivariate kernel."""
    y, z = np.asarray(y, float), np.asarray(z, float)
    spread = sy * sy + sz * sz - 2 * rho * sy * sz
    num = t * (y - z) ** 2 + sy * sy * z * z + sz * sz * y * y - 2 * rho * sy * sz * y * z
    den = 2 * (1 - rho * rho) * sy * sy * sz * sz + 2 * t * spread
    return np.exp(-num / den) / np.sqrt(1 + t * spread / ((1 - rho * rho) * sy * sy * sz * sz))


def field_grid(low: float = -5.0, high: float = 5.0, points: int = 100) -> np.ndarray:
    return np.linspace(low, high, points)


def interaction_cov_grid(grid, t: float, gamma: float, kappa: CountingDistribution) -> np.ndarray:
    y, z = np.meshgrid(grid, grid, indexing="ij")
    return interaction_cov(y, z, t, gamma, kappa)


def field_spectrum(
    grid, t: float, gamma: float, kappa: CountingDistribution
) -> tuple[EigenSystem, SpectralAnova]:
    es = fpca(interaction_cov_grid(grid, t, gamma, kappa))
    return es, rf_anova(es)


def particle_measure(kappa: CountingDistribution, t: float, **drift) -> RandomMeasure:
    return RandomMeasure(kappa, wiener_law(t, **drift))
