"""Classical laws built from mixed binomial processes.

Every fixture carries a closed-form transform, the same transform
computed through the generic Laplace machinery, closed-form moments and
a sampler. :func:`check_construction` compares them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .counting import Binomial, CountingDistribution, Dirac, Poisson
from .errors import DomainError
from .laplace import laplace_transform, restricted_laplace
from .measure import (
    Box,
    Discrete,
    Exponential,
    Uniform,
    UnivariateNormal,
    bernoulli,
    product,
    uniform_box,
)
from .report import Verdict, close, within_se
from .stc import RandomMeasure, empirical_laplace, simulate_totals, summarize

DEFAULT_ALPHAS = (0.1, 0.3, 0.7, 1.5, 3.0)


@dataclass
class Construction:
    name: str
    closed_transform: Callable
    computed_transform: Callable
    sampler: Callable
    mean: float
    variance: float
    reference_pmf: Callable | None = None
    notes: dict = field(default_factory=dict)
    default_reps: int = 100_000


def logarithmic(p: float, tail: float = 1e-17) -> Discrete:
    """Logarithmic law P(k) = -p^k / (k log(1 - p)), truncated where the tail is negligible."""
    if not 0.0 < p < 1.0:
        raise DomainError("logarithmic parameter must lie in (0, 1)")
    kmax = 1
    while p**kmax / kmax > tail * (1.0 - p):
        kmax += 1
    ks = np.arange(1, kmax + 1, dtype=float)
    probs = -(p**ks) / (ks * math.log1p(-p))
    return Discrete(ks, probs / probs.sum())


def _totals_sampler(measure: RandomMeasure, f: Callable):
    def sample(size, rng):
        from .stc import _block_totals

        return _block_totals(measure, [f], size, rng)[:, 0]

    return sample


def _transform_values(measure, f, alphas, region=None, nodes=None):
    if region is None:
        return np.array([e.value for e in laplace_transform(measure, f, alphas, nodes=nodes)])
    return np.array(
        [restricted_laplace(measure, region, lambda x, a=a: a * np.asarray(f(x), float)) for a in alphas]
    )


def binomial_construction(trials: int = 10, prob: float = 0.3) -> Construction:
    """Dirac(n) points on a Bernoulli(p) space; N f with f(x) = x is Binomial(n, p)."""
    N = RandomMeasure(Dirac(trials), bernoulli(prob))
    f = lambda x: x  # noqa: E731
    return Construction(
        "binomial",
        lambda al: (1.0 - prob + prob * np.exp(-np.asarray(al, float))) ** trials,
        lambda al: _transform_values(N, f, al),
        _totals_sampler(N, f),
        trials * prob,
        trials * prob * (1.0 - prob),
        lambda k: stats.binom.pmf(k, trials, prob),
    )


def zero_inflation_construction(trials: int = 8, prob: float = 0.4) -> Construction:
    """Binomial(n, p) count of Uniform[0,1] points with f(x) = x^2.

    Equivalent to summing n independent f(X_i) Z_i with Z_i ~ Bernoulli(p).
    """
    N = RandomMeasure(Binomial(trials, prob), Uniform(0.0, 1.0))
    f = lambda x: np.asarray(x) ** 2  # noqa: E731

    def inner(al):
        al = np.asarray(al, float)
        safe = np.where(al > 0, al, 1.0)
        val = 0.5 * np.sqrt(np.pi / safe) * special.erf(np.sqrt(safe))
        return np.where(al > 0, val, 1.0)

    def explicit(size, rng):
        x = rng.random((size, trials))
        z = rng.random((size, trials)) < prob
        return (x**2 * z).sum(axis=1)

    c = Construction(
        "zero_inflation",
        lambda al: (1.0 - prob + prob * inner(al)) ** trials,
        lambda al: _transform_values(N, f, al),
        _totals_sampler(N, f),
        trials * prob / 3.0,
        trials * prob / 5.0 - trials * prob * prob / 9.0,
    )
    c.notes["explicit_sampler"] = explicit
    return c


def compound_poisson_construction(rate: float = 5.0, mark_rate: float = 2.0, length: float = 0.6) -> Construction:
    """Poisson(c) points on [0,1] with Exponential marks; L(A) sums marks in A = [0, length]."""
    nu = product(Uniform(0.0, 1.0), Exponential(mark_rate))
    N = RandomMeasure(Poisson(rate), nu)
    region = Box((0.0, 0.0), (length, math.inf))
    mark = lambda x: x[:, 1]  # noqa: E731
    in_a = lambda x: x[:, 1] * (x[:, 0] <= length)  # noqa: E731
    mark_transform = lambda al: mark_rate / (mark_rate + np.asarray(al, float))  # noqa: E731
    c = Construction(
        "compound_poisson",
        lambda al: np.exp(-rate * length * (1.0 - mark_transform(al))),
        lambda al: _transform_values(N, mark, al, region),
        _totals_sampler(N, in_a),
        rate * length / mark_rate,
        rate * length * 2.0 / mark_rate**2,
    )
    # disjoint sets carry independent totals
    c.notes["disjoint"] = (N, in_a, lambda x: x[:, 1] * (x[:, 0] > length))
    return c


def negative_binomial_construction(shape: float = 3.0, prob: float = 0.4, length: float = 0.5) -> Construction:
    """Poisson(r log(1/(1-p))) points with Logarithmic(p) marks; the marks in A are NB(r mu(A), p)."""
    marks = logarithmic(prob)
    rate = shape * math.log(1.0 / (1.0 - prob))
    N = RandomMeasure(Poisson(rate), product(Uniform(0.0, 1.0), marks))
    region = Box((0.0, 0.0), (length, math.inf))
    r = shape * length
    in_a = lambda x: x[:, 1] * (x[:, 0] <= length)  # noqa: E731

    def closed(al):
        t = np.exp(-np.asarray(al, float))
        return ((1.0 - prob) / (1.0 - prob * t)) ** r

    return Construction(
        "negative_binomial",
        closed,
        lambda al: _transform_values(N, lambda x: x[:, 1], al, region),
        _totals_sampler(N, in_a),
        r * prob / (1.0 - prob),
        r * prob / (1.0 - prob) ** 2,
        lambda k: stats.nbinom.pmf(k, r, 1.0 - prob),
    )


def gamma_construction(shape: float = 2.0, rate: float = 1.5, horizon: float = 10.0) -> Construction:
    """Poisson(shape * horizon) points on [0, horizon] x (0, inf) with f = exp(-x) w / rate.

    The second coordinate is Exponential(1), the law of log(1/U). As the
    horizon grows N f converges to Gamma(shape, rate).
    """
    nu = product(Uniform(0.0, horizon), Exponential(1.0))
    N = RandomMeasure(Poisson(shape * horizon), nu)
    f = lambda x: np.exp(-x[:, 0]) * x[:, 1] / rate  # noqa: E731
    tail = math.exp(-horizon)

    def closed(al):
        al = np.asarray(al, float)
        return ((rate + tail * al) / (rate + al)) ** shape

    c = Construction(
        "gamma",
        closed,
        lambda al: _transform_values(N, f, al),
        _totals_sampler(N, f),
        shape * (1.0 - tail) / rate,
        shape * (1.0 - tail**2) / rate**2,
        default_reps=20_000,
    )
    c.notes["limit"] = lambda al: (rate / (rate + np.asarray(al, float))) ** shape
    return c


def gamma_limit_distance(shape: float, rate: float, horizon: float, alphas: Sequence[float]) -> float:
    """sup over ``alphas`` of |F_horizon - F_gamma|."""
    c = gamma_construction(shape, rate, horizon)
    al = np.asarray(alphas, float)
    return float(np.max(np.abs(c.closed_transform(al) - c.notes["limit"](al))))


def wiener_construction(rate: float = 10_000.0, horizon: float = 1.0, times=(0.25, 0.5, 1.0)) -> Construction:
    """Centred, scaled Poisson counts on [0, t] approximate Brownian motion."""
    N = RandomMeasure(Poisson(rate), Uniform(0.0, horizon))
    intensity = rate / horizon
    times = tuple(float(t) for t in times)
    t0 = times[-1]

    def closed(al):
        # transform of the raw count N[0, t0]
        return np.exp(intensity * t0 * (np.exp(-np.asarray(al, float)) - 1.0))

    def computed(al):
        return _transform_values(N, lambda x: np.ones_like(x), al, Box((0.0,), (t0,)))

    def sample(size, rng):
        counts = rng.poisson(rate, size)
        owner = np.repeat(np.arange(size), counts)
        pts = rng.random(counts.sum()) * horizon
        out = np.empty((size, len(times)))
        for j, t in enumerate(times):
            raw = np.bincount(owner, weights=(pts <= t).astype(float), minlength=size)
            out[:, j] = (raw - t * intensity) / math.sqrt(intensity)
        return out

    c = Construction("wiener", closed, computed, sample, 0.0, t0, default_reps=4_000)
    c.notes["times"] = times
    c.notes["covariance"] = np.minimum.outer(np.asarray(times), np.asarray(times))
    return c


def wiener_covariance(rate: float, horizon: float, s: float, t: float) -> float:
    """Cov of the scaled counts at s and t from the Poisson covariance formula."""
    nu = Uniform(0.0, horizon)
    lo = min(s, t)
    overlap = nu.restrict(Box((0.0,), (lo,)))[1] if lo > 0 else 0.0
    intensity = rate / horizon
    return rate * overlap / intensity


def gaussian_construction(mean: float = 1.0, var: float = 2.0, rate: float = 10_000.0) -> Construction:
    """mean + (K - c var) / sqrt(c) with K ~ Poisson(c var) approaches Normal(mean, var)."""
    lam = rate * var

    def sample(size, rng):
        return mean + (rng.poisson(lam, size) - lam) / math.sqrt(rate)

    def closed(al):
        al = np.asarray(al, float)
        s = al / math.sqrt(rate)
        return np.exp(-al * mean + lam * (np.expm1(-s) + s))

    counts = RandomMeasure(Poisson(lam), Uniform(0.0, 1.0))
    step = 1.0 / math.sqrt(rate)

    def computed(al):
        al = np.asarray(al, float)
        evals = laplace_transform(counts, lambda x: np.full_like(x, step), al)
        # undo the centring shift: X = mean - lam * step + K * step
        return np.exp(-al * (mean - lam * step) + np.array([e.log_value for e in evals]))

    return Construction("gaussian", closed, computed, sample, mean, var)


def denoise_forward(transform_h: Callable, noise_var: float) -> Callable:
    """Transform of (sqrt(h) + Z)^2, Z ~ Normal(0, noise_var), from the transform of h."""

    def forward(alpha):
        a = np.asarray(alpha, float)
        s = 1.0 + 2.0 * noise_var * a
        return transform_h(a / s) / np.sqrt(s)

    return forward


def denoise_inverse(transform_f: Callable, noise_var: float) -> Callable:
    """Transform of h recovered from the noisy transform, for beta < 1 / (2 noise_var)."""

    def inverse(beta):
        b = np.asarray(beta, float)
        if np.any(2.0 * noise_var * b >= 1.0):
            raise DomainError("inverse denoising needs beta < 1 / (2 sigma^2)")
        a = b / (1.0 - 2.0 * noise_var * b)
        return np.sqrt(1.0 + 2.0 * noise_var * a) * transform_f(a)

    return inverse


def denoise_construction(noise_var: float = 1.0, center: float = 0.5, kappa: CountingDistribution | None = None) -> Construction:
    """g(x) = x on Uniform[0,1], response fixed at ``center``, Gaussian measurement noise.

    f(x, z) = (x - center + z)^2 with z ~ Normal(0, noise_var).
    """
    kappa = kappa or Dirac(1)
    nu = product(Uniform(0.0, 1.0), UnivariateNormal(0.0, math.sqrt(noise_var)))
    N = RandomMeasure(kappa, nu)
    f = lambda x: (x[:, 0] - center + x[:, 1]) ** 2  # noqa: E731

    def transform_h(al):
        al = np.asarray(al, float)
        safe = np.where(al > 0, al, 1.0)
        lo, hi = -center, 1.0 - center
        val = 0.5 * np.sqrt(np.pi / safe) * (special.erf(np.sqrt(safe) * hi) - special.erf(np.sqrt(safe) * lo))
        return np.where(al > 0, val, 1.0)

    single = denoise_forward(transform_h, noise_var)
    mh = ((1.0 - center) ** 3 + center**3) / 3.0
    mh2 = ((1.0 - center) ** 5 + center**5) / 5.0
    first = noise_var + mh
    second = 3.0 * noise_var**2 + 6.0 * noise_var * mh + mh2
    c = Construction(
        "denoise",
        lambda al: np.asarray(kappa.pgf(np.clip(single(al), 0.0, 1.0))),
        # the noise integrand is a narrow Gaussian at large alpha; 128 Hermite nodes resolve it
        lambda al: _transform_values(N, f, al, nodes=128),
        _totals_sampler(N, f),
        kappa.mean * first,
        kappa.mean * second + kappa.overdispersion * first**2,
    )
    c.notes["single"] = single
    c.notes["transform_h"] = transform_h
    return c


def chi_square_transform(dof: int, alphas, nodes: int = 128) -> np.ndarray:
    """Dirac(dof) points of pure N(0,1) noise: (1 + 2 alpha)^(-dof/2).

    exp(-alpha x^2) is not polynomial, so the Hermite rule needs more
    nodes than the default to reach round-off for alpha up to a few.
    """
    nu = UnivariateNormal(0.0, 1.0)
    N = RandomMeasure(Dirac(dof), nu)
    return _transform_values(N, lambda x: np.asarray(x) ** 2, alphas, nodes=nodes)


@dataclass
class ClusterSetup:
    """Parents N = (kappa, Uniform[0,1]^2); offspring Normal(x, sigma^2 I) with count law xi."""

    kappa: CountingDistribution
    offspring: CountingDistribution
    sigma: float
    corner: float = 0.5


def cluster_hit_mass(setup: ClusterSetup, nodes: int = 64):
    """Quadrature of the parent plane and a_x = P(offspring of x lands in A)."""
    breaks = [(setup.corner - 5 * setup.sigma, setup.corner, setup.corner + 5 * setup.sigma)] * 2
    nu = uniform_box([0.0, 0.0], [1.0, 1.0], breaks)
    pts, wts = nu.quadrature(nodes)
    hit = np.prod(stats.norm.cdf((setup.corner - pts) / setup.sigma), axis=1)
    return pts, wts, hit


def cluster_moments(setup: ClusterSetup, exact: bool = True) -> dict:
    """Means and variances of the total count and of the count in A.

    With ``exact=False`` the offspring second moment in A is taken as
    (c_x^2 + d_x^2) a_x, which is exact only when a_x is 0 or 1.
    """
    c, over = setup.kappa.mean, setup.kappa.overdispersion
    cx, dx2 = setup.offspring.mean, setup.offspring.variance
    _, wts, a = cluster_hit_mass(setup)
    mean_a = cx * float(wts @ a)
    if exact:
        second_a = float(wts @ (a * a * (dx2 + cx * cx - cx) + a * cx))
    else:
        second_a = (cx * cx + dx2) * float(wts @ a)
    return {
        "mean_total": c * cx,
        "var_total": c * (cx * cx + dx2) + over * cx * cx,
        "mean_a": c * mean_a,
        "var_a": c * second_a + over * mean_a**2,
    }


def cluster_transform(setup: ClusterSetup, alphas, restricted: bool) -> np.ndarray:
    """F(alpha) = pgf_kappa(nu phi_x(beta)), restricted to A when asked."""
    _, wts, a = cluster_hit_mass(setup)
    out = []
    for al in np.asarray(alphas, float):
        beta = math.exp(-al)
        t = a * beta + 1.0 - a if restricted else np.full_like(a, beta)
        inner = float(wts @ setup.offspring.pgf(t))
        out.append(setup.kappa.pgf(min(inner, 1.0)))
    return np.asarray(out)


def cluster_sampler(setup: ClusterSetup):
    """Nested sampler of (total count, count in A) per replicate."""

    def sample(size, rng):
        parents = np.asarray(setup.kappa.sample(rng, size), dtype=np.int64)
        owner = np.repeat(np.arange(size), parents)
        centers = rng.random((owner.size, 2))
        kids = np.asarray(setup.offspring.sample(rng, owner.size), dtype=np.int64)
        kid_owner = np.repeat(owner, kids)
        pos = np.repeat(centers, kids, axis=0) + setup.sigma * rng.standard_normal((kid_owner.size, 2))
        in_a = np.all(pos <= setup.corner, axis=1).astype(float)
        total = np.bincount(kid_owner, minlength=size).astype(float)
        hits = np.bincount(kid_owner, weights=in_a, minlength=size)
        return np.stack([total, hits], axis=1)

    return sample


def check_construction(
    c: Construction,
    reps: int = 100_000,
    seed: int = 0,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    threads: int = 1,
) -> list[Verdict]:
    """Transform identity, moment and transform agreement with simulation."""
    al = np.asarray(alphas, float)
    out = []
    closed = np.asarray(c.closed_transform(al), float)
    computed = np.asarray(c.computed_transform(al), float)
    gap = np.abs(closed - computed) / np.maximum(1.0, np.abs(closed))
    out.append(close(f"{c.name}: transform identity", float(np.max(gap)), 0.0, 1e-10))
    draws = simulate_totals(None, [], reps, seed, threads, sampler=c.sampler)
    first = draws[:, -1] if draws.shape[1] > 1 else draws[:, 0]
    st = summarize(first)
    out.append(within_se(f"{c.name}: mean", float(st.mean[0]), c.mean, float(st.mean_se[0])))
    out.append(within_se(f"{c.name}: variance", float(st.cov[0, 0]), c.variance, float(st.cov_se[0, 0])))
    if c.name not in ("gaussian", "wiener"):
        est, se = empirical_laplace(first, al)
        for a, e, s, cl in zip(al, est, se, closed):
            out.append(within_se(f"{c.name}: F({a:g})", float(e), float(cl), float(s)))
    return out


def pmf_chi_square(values: np.ndarray, pmf: Callable, min_expected: float = 5.0) -> float:
    """p-value of a chi-square goodness-of-fit test with pooled sparse cells."""
    v = np.asarray(values).astype(np.int64)
    top = int(v.max())
    ks = np.arange(top + 1)
    obs = np.bincount(v, minlength=top + 1).astype(float)
    exp = pmf(ks) * v.size
    exp[-1] += v.size - exp.sum()
    obs_b, exp_b = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_b.append(acc_o)
            exp_b.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and obs_b:
        obs_b[-1] += acc_o
        exp_b[-1] += acc_e
    return float(stats.chisquare(obs_b, exp_b).pvalue)


ALL_FIXTURES = {
    "binomial": binomial_construction,
    "zero_inflation": zero_inflation_construction,
    "compound_poisson": compound_poisson_construction,
    "negative_binomial": negative_binomial_construction,
    "gamma": gamma_construction,
    "wiener": wiener_construction,
    "gaussian": gaussian_construction,
    "denoise": denoise_construction,
}
