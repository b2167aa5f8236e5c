"""Probability measures with quadrature and Monte Carlo integration.

Integrands are vectorised callables. For a one-dimensional measure they
receive a 1-D array of points; otherwise an ``(n, dim)`` array. They
must return one value per point.

Quadrature is used whenever a measure can produce a tensor rule of at
most ``MAX_TENSOR_POINTS`` nodes; otherwise integration falls back to
Monte Carlo with a standard-error estimate.
"""

from __future__ import annotations

import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .errors import ContractError, DomainError, IntegrationError, NullRestrictionError

MAX_TENSOR_POINTS = 300_000
DEFAULT_MC_REPS = 100_000


def default_nodes() -> int:
    """Nodes per axis; overridable through ``RMUQ_QUAD_NODES``."""
    raw = os.environ.get("RMUQ_QUAD_NODES")
    if raw is None:
        return 64
    try:
        n = int(raw)
    except ValueError as exc:
        raise ContractError(f"RMUQ_QUAD_NODES must be an integer, got {raw!r}") from exc
    if n < 2:
        raise ContractError("RMUQ_QUAD_NODES must be at least 2")
    return n


def gauss_legendre(low: float, high: float, n: int, breaks: Sequence[float] = ()):
    """Composite Gauss-Legendre rule on [low, high] normalised to unit mass."""
    edges = np.unique(np.concatenate([[low], np.asarray(breaks, float), [high]]))
    edges = edges[(edges >= low) & (edges <= high)]
    x, w = np.polynomial.legendre.leggauss(n)
    pts, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        pts.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        wts.append(0.5 * (b - a) * w)
    return np.concatenate(pts), np.concatenate(wts) / (high - low)


def as_argument(points: np.ndarray):
    """Shape convention for integrands: 1-D measures get flat arrays."""
    return points[:, 0] if points.shape[1] == 1 else points


def _evaluate(f: Callable, points: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(as_argument(points)), dtype=float)
    if vals.ndim == 0:
        vals = np.full(points.shape[0], float(vals))
    vals = vals.reshape(points.shape[0], -1)
    if vals.shape[1] != 1:
        raise ContractError("integrand must return one value per point")
    vals = vals[:, 0]
    bad = np.isnan(vals)
    if np.any(bad):
        where = points[np.argmax(bad)]
        raise IntegrationError(f"integrand returned NaN at point {where.tolist()}")
    return vals


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; also usable as a vectorised indicator function."""

    low: tuple
    high: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.low))
        hi = tuple(float(v) for v in np.atleast_1d(self.high))
        if len(lo) != len(hi):
            raise ContractError("box bounds must have equal length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ContractError("box low bound exceeds high bound")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, self.dim)
        lo, hi = np.asarray(self.low), np.asarray(self.high)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def __call__(self, x) -> np.ndarray:
        return self.contains(x).astype(float)


class Measure(ABC):
    """Probability measure on a subset of R^dim."""

    dim: int

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Independent draws as an ``(size, dim)`` array."""

    def quadrature(self, nodes: int | None = None):
        """Points ``(n, dim)`` and weights summing to one.

        Raises IntegrationError when no rule is available.
        """
        raise IntegrationError(f"{type(self).__name__} has no quadrature rule")

    def quadrature_size(self, nodes: int | None = None) -> float:
        return math.inf

    def components(self) -> list | None:
        """One-dimensional factors when the measure is a product, else None."""
        return None

    def restrict(self, region) -> tuple["Measure", float]:
        """Normalised restriction to ``region`` and the mass of ``region``."""
        return masked(self, region)


class Univariate(Measure):
    """One-dimensional measure with density, cdf and quantile function."""

    dim = 1
    support: tuple

    @abstractmethod
    def pdf(self, x): ...

    @abstractmethod
    def cdf(self, x): ...

    @abstractmethod
    def ppf(self, u): ...

    def sample(self, rng, size):
        return self.ppf(rng.random(size)).reshape(size, 1)

    def components(self):
        return [self]

    def restrict(self, region):
        box = region if isinstance(region, Box) else None
        if box is None:
            return masked(self, region)
        lo = max(box.low[0], self.support[0])
        hi = min(box.high[0], self.support[1])
        mass = float(self.cdf(hi) - self.cdf(lo)) if hi > lo else 0.0
        if mass <= 0.0:
            raise NullRestrictionError("restriction to a null interval")
        if mass >= 1.0 - 1e-15 and lo <= self.support[0] and hi >= self.support[1]:
            return self, 1.0
        return Truncated(self, lo, hi, mass), mass


@dataclass(frozen=True, eq=False)
class Uniform(Univariate):
    """Uniform law on [low, high], optionally with quadrature break points."""

    low: float
    high: float
    breaks: tuple = ()

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise IntegrationError("uniform quadrature needs a bounded interval")
        if not self.high > self.low:
            raise DomainError("uniform interval must have positive length")
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))

    @property
    def support(self):
        return (self.low, self.high)

    def pdf(self, x):
        x = np.asarray(x, float)
        return np.where((x >= self.low) & (x <= self.high), 1.0 / (self.high - self.low), 0.0)

    def cdf(self, x):
        return np.clip((np.asarray(x, float) - self.low) / (self.high - self.low), 0.0, 1.0)

    def ppf(self, u):
        return self.low + (self.high - self.low) * np.asarray(u, float)

    def quadrature(self, nodes=None):
        n = nodes or default_nodes()
        pts, wts = gauss_legendre(self.low, self.high, n, self.breaks)
        return pts[:, None], wts

    def quadrature_size(self, nodes=None):
        return (nodes or default_nodes()) * (len(self.breaks) + 1)

    def restrict(self, region):
        if isinstance(region, Box):
            lo = max(region.low[0], self.low)
            hi = min(region.high[0], self.high)
            if hi <= lo:
                raise NullRestrictionError("restriction to a null interval")
            inner = tuple(b for b in self.breaks if lo < b < hi)
            return Uniform(lo, hi, inner), (hi - lo) / (self.high - self.low)
        return super().restrict(region)


@dataclass(frozen=True, eq=False)
class Exponential(Univariate):
    """Exponential law with the given rate, shifted to start at ``shift``."""

    rate: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.rate > 0.0:
            raise DomainError("exponential rate must be positive")

    @property
    def support(self):
        return (self.shift, math.inf)

    def pdf(self, x):
        return stats.expon.pdf(x, loc=self.shift, scale=1.0 / self.rate)

    def cdf(self, x):
        return stats.expon.cdf(x, loc=self.shift, scale=1.0 / self.rate)

    def ppf(self, u):
        return stats.expon.ppf(u, loc=self.shift, scale=1.0 / self.rate)

    def quadrature(self, nodes=None):
        n = nodes or default_nodes()
        x, w = special.roots_laguerre(n)
        return (self.shift + x / self.rate)[:, None], w / w.sum()

    def quadrature_size(self, nodes=None):
        return nodes or default_nodes()


@dataclass(frozen=True, eq=False)
class Truncated(Univariate):
    """Univariate law conditioned on [low, high]."""

    base: Univariate
    low: float
    high: float
    mass: float

    @property
    def support(self):
        return (self.low, self.high)

    def pdf(self, x):
        x = np.asarray(x, float)
        inside = (x >= self.low) & (x <= self.high)
        return np.where(inside, self.base.pdf(x) / self.mass, 0.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, float), self.low, self.high)
        return (self.base.cdf(x) - self.base.cdf(self.low)) / self.mass

    def ppf(self, u):
        lo = self.base.cdf(self.low)
        return self.base.ppf(lo + np.asarray(u, float) * self.mass)

    def _finite_window(self):
        lo, hi = self.low, self.high
        if not math.isfinite(lo):
            lo = float(self.base.ppf(1e-17)) if math.isfinite(self.base.ppf(1e-17)) else -40.0
        if not math.isfinite(hi):
            hi = float(self.base.ppf(1.0 - 1e-16))
        return lo, hi

    def quadrature(self, nodes=None):
        n = nodes or default_nodes()
        lo, hi = self._finite_window()
        pts, wts = gauss_legendre(lo, hi, n)
        wts = wts * (hi - lo) * self.base.pdf(pts)
        return pts[:, None], wts / wts.sum()

    def quadrature_size(self, nodes=None):
        return nodes or default_nodes()


class Normal(Measure):
    """Gaussian law; tensor Gauss-Hermite rule mapped through the Cholesky factor."""

    def __init__(self, mean, cov):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.asarray(cov, dtype=float)
        if cov.ndim == 0:
            cov = cov.reshape(1, 1)
        elif cov.ndim == 1:
            cov = np.diag(cov)
        if cov.shape != (self.mean.size, self.mean.size):
            raise ContractError("covariance shape does not match mean")
        if not np.allclose(cov, cov.T):
            raise ContractError("covariance must be symmetric")
        self.cov = cov
        self.dim = self.mean.size
        try:
            self.chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise DomainError("covariance must be positive definite") from exc

    def sample(self, rng, size):
        z = rng.standard_normal((size, self.dim))
        return self.mean + z @ self.chol.T

    def quadrature(self, nodes=None):
        n = nodes or default_nodes()
        if n**self.dim > MAX_TENSOR_POINTS:
            raise IntegrationError("tensor Gauss-Hermite rule too large; use Monte Carlo")
        z, w = np.polynomial.hermite_e.hermegauss(n)
        w = w / w.sum()
        grids = np.meshgrid(*([z] * self.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        wts = np.ones(1)
        for _ in range(self.dim):
            wts = np.multiply.outer(wts, w).ravel()
        return self.mean + pts @ self.chol.T, wts

    def quadrature_size(self, nodes=None):
        return (nodes or default_nodes()) ** self.dim

    def components(self):
        if self.dim == 1:
            return [UnivariateNormal(float(self.mean[0]), math.sqrt(self.cov[0, 0]))]
        if np.count_nonzero(self.cov - np.diag(np.diag(self.cov))) == 0:
            return [
                UnivariateNormal(float(m), math.sqrt(v))
                for m, v in zip(self.mean, np.diag(self.cov))
            ]
        return None

    def restrict(self, region):
        comps = self.components()
        if comps is not None and isinstance(region, Box):
            return Product(comps).restrict(region)
        return masked(self, region)


@dataclass(frozen=True, eq=False)
class UnivariateNormal(Univariate):
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0.0:
            raise DomainError("normal scale must be positive")

    @property
    def support(self):
        return (-math.inf, math.inf)

    def pdf(self, x):
        return stats.norm.pdf(x, self.loc, self.scale)

    def cdf(self, x):
        return stats.norm.cdf(x, self.loc, self.scale)

    def ppf(self, u):
        return stats.norm.ppf(u, self.loc, self.scale)

    def sample(self, rng, size):
        return (self.loc + self.scale * rng.standard_normal(size)).reshape(size, 1)

    def quadrature(self, nodes=None):
        n = nodes or default_nodes()
        z, w = np.polynomial.hermite_e.hermegauss(n)
        return (self.loc + self.scale * z)[:, None], w / w.sum()

    def quadrature_size(self, nodes=None):
        return nodes or default_nodes()


class Discrete(Measure):
    """Finitely supported law with exact integration."""

    def __init__(self, points, probs):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size != pts.shape[0]:
            raise ContractError("one probability per support point required")
        if np.any(p < 0.0) or not math.isclose(p.sum(), 1.0, abs_tol=1e-12):
            raise ContractError("probabilities must be non-negative and sum to one")
        self.points = pts
        self.probs = p
        self.dim = pts.shape[1]

    def sample(self, rng, size):
        idx = rng.choice(self.probs.size, size=size, p=self.probs)
        return self.points[idx]

    def quadrature(self, nodes=None):
        return self.points, self.probs

    def quadrature_size(self, nodes=None):
        return self.probs.size

    def components(self):
        return [self] if self.dim == 1 else None

    def pmf(self, x):
        x = np.asarray(x, float).reshape(-1, self.dim)
        out = np.zeros(x.shape[0])
        for pt, p in zip(self.points, self.probs):
            out += p * np.all(x == pt, axis=1)
        return out


def bernoulli(p: float) -> Discrete:
    if not 0.0 <= p <= 1.0:
        raise DomainError("Bernoulli probability must lie in [0, 1]")
    return Discrete([0.0, 1.0], [1.0 - p, p])


class Product(Measure):
    """Independent product of measures; coordinates are concatenated."""

    def __init__(self, parts: Sequence[Measure]):
        if len(parts) == 0:
            raise ContractError("product needs at least one factor")
        self.parts = list(parts)
        self.dim = sum(p.dim for p in self.parts)

    def sample(self, rng, size):
        return np.concatenate([p.sample(rng, size) for p in self.parts], axis=1)

    def quadrature_size(self, nodes=None):
        return float(np.prod([p.quadrature_size(nodes) for p in self.parts]))

    def quadrature(self, nodes=None):
        if self.quadrature_size(nodes) > MAX_TENSOR_POINTS:
            raise IntegrationError("tensor rule too large; use Monte Carlo")
        rules = [p.quadrature(nodes) for p in self.parts]
        pts, wts = rules[0]
        for q, v in rules[1:]:
            pts = np.concatenate(
                [np.repeat(pts, q.shape[0], axis=0), np.tile(q, (pts.shape[0], 1))], axis=1
            )
            wts = np.multiply.outer(wts, v).ravel()
        return pts, wts

    def components(self):
        out = []
        for p in self.parts:
            c = p.components()
            if c is None:
                return None
            out.extend(c)
        return out

    def restrict(self, region):
        comps = self.components()
        if comps is None or not isinstance(region, Box) or region.dim != self.dim:
            return masked(self, region)
        new, mass = [], 1.0
        for i, c in enumerate(comps):
            r, m = c.restrict(Box((region.low[i],), (region.high[i],)))
            new.append(r)
            mass *= m
        return Product(new), mass


def uniform_box(low, high, breaks=None) -> Measure:
    """Product of uniforms on the box [low, high]."""
    low = np.atleast_1d(np.asarray(low, float))
    high = np.atleast_1d(np.asarray(high, float))
    if breaks is None:
        breaks = [()] * low.size
    parts = [Uniform(float(a), float(b), tuple(br)) for a, b, br in zip(low, high, breaks)]
    return parts[0] if len(parts) == 1 else Product(parts)


class Image(Measure):
    """Push-forward of ``base`` under a vectorised map."""

    def __init__(self, base: Measure, transform: Callable, dim: int):
        self.base = base
        self.transform = transform
        self.dim = dim

    def _map(self, pts):
        out = np.asarray(self.transform(as_argument(pts)), dtype=float)
        return out.reshape(pts.shape[0], self.dim)

    def sample(self, rng, size):
        return self._map(self.base.sample(rng, size))

    def quadrature(self, nodes=None):
        pts, wts = self.base.quadrature(nodes)
        return self._map(pts), wts

    def quadrature_size(self, nodes=None):
        return self.base.quadrature_size(nodes)


class Masked(Measure):
    """Restriction to a predicate region, normalised by its mass."""

    def __init__(self, base: Measure, indicator: Callable, mass: float):
        self.base = base
        self.indicator = indicator
        self.mass = mass
        self.dim = base.dim

    def sample(self, rng, size):
        out = []
        have = 0
        batch = max(64, int(2 * size / max(self.mass, 1e-3)))
        while have < size:
            pts = self.base.sample(rng, batch)
            keep = pts[np.asarray(self.indicator(as_argument(pts)), bool).ravel()]
            out.append(keep)
            have += keep.shape[0]
        return np.concatenate(out)[:size]

    def quadrature(self, nodes=None):
        pts, wts = self.base.quadrature(nodes)
        ind = np.asarray(self.indicator(as_argument(pts)), float).ravel()
        keep = ind > 0
        return pts[keep], wts[keep] * ind[keep] / self.mass

    def quadrature_size(self, nodes=None):
        return self.base.quadrature_size(nodes)


def masked(base: Measure, indicator: Callable) -> tuple[Measure, float]:
    mass = integrate(base, lambda x: np.asarray(indicator(x), float))
    if mass <= 0.0:
        raise NullRestrictionError("restriction to a set of zero mass")
    return Masked(base, indicator, mass), mass


def restrict(measure: Measure, region) -> tuple[Measure, float]:
    """Normalised restriction and its mass. Boxes are handled exactly."""
    return measure.restrict(region)


def mass(measure: Measure, region) -> float:
    return restrict(measure, region)[1]


class Kernel(ABC):
    """Transition kernel Q(x, dy) from the base space to a target space."""

    target_dim: int

    @abstractmethod
    def sample(self, rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
        """One draw y ~ Q(x, .) per row of ``x``; shape ``(n, target_dim)``."""

    @abstractmethod
    def quadrature(self, x: np.ndarray, nodes: int | None = None):
        """Rule for Q(x, .) at one base point: points ``(m, target_dim)``, weights."""


class DeterministicKernel(Kernel):
    """Q(x, .) is the point mass at h(x)."""

    def __init__(self, transform: Callable, target_dim: int = 1):
        self.transform = transform
        self.target_dim = target_dim

    def _map(self, x):
        return np.asarray(self.transform(as_argument(x)), float).reshape(x.shape[0], -1)

    def sample(self, rng, x):
        return self._map(x)

    def quadrature(self, x, nodes=None):
        return self._map(x.reshape(1, -1)), np.ones(1)


class AdditiveNoiseKernel(Kernel):
    """y = h(x) + noise with a fixed univariate noise law."""

    def __init__(self, noise: Univariate, transform: Callable | None = None):
        self.noise = noise
        self.transform = transform
        self.target_dim = 1

    def _center(self, x):
        if self.transform is None:
            return x[:, :1]
        return np.asarray(self.transform(as_argument(x)), float).reshape(x.shape[0], 1)

    def sample(self, rng, x):
        return self._center(x) + self.noise.sample(rng, x.shape[0])

    def quadrature(self, x, nodes=None):
        pts, wts = self.noise.quadrature(nodes)
        return self._center(x.reshape(1, -1)) + pts, wts


class Joint(Measure):
    """Measure nu(dx) Q(x, dy) on the product space; points are (x, y)."""

    def __init__(self, base: Measure, kernel: Kernel):
        self.base = base
        self.kernel = kernel
        self.dim = base.dim + kernel.target_dim

    def sample(self, rng, size):
        x = self.base.sample(rng, size)
        return np.concatenate([x, self.kernel.sample(rng, x)], axis=1)

    def quadrature_size(self, nodes=None):
        probe = self.kernel.quadrature(np.zeros(self.base.dim), nodes)[1].size
        return self.base.quadrature_size(nodes) * probe

    def quadrature(self, nodes=None):
        if self.quadrature_size(nodes) > MAX_TENSOR_POINTS:
            raise IntegrationError("joint rule too large; use Monte Carlo")
        xs, wx = self.base.quadrature(nodes)
        pts, wts = [], []
        for x, w in zip(xs, wx):
            ys, wy = self.kernel.quadrature(x, nodes)
            pts.append(np.concatenate([np.tile(x, (ys.shape[0], 1)), ys], axis=1))
            wts.append(w * wy)
        return np.concatenate(pts), np.concatenate(wts)


def with_kernel(base: Measure, kernel: Kernel) -> Joint:
    return Joint(base, kernel)


def image(base: Measure, transform: Callable, dim: int = 1) -> Image:
    return Image(base, transform, dim)


def product(*parts: Measure) -> Product:
    return Product(parts)


def brownian_marginal(
    t: float,
    start_mean: float = 0.0,
    start_sd: float = 0.0,
    drift_mean: float = 0.0,
    drift_sd: float = 0.0,
    corr: float = 0.0,
) -> UnivariateNormal:
    """Law of W_t for Brownian motion with random start and random drift.

    W_t = X0 + D t + B_t with (X0, D) jointly normal and B standard.
    """
    if t < 0:
        raise DomainError("time must be non-negative")
    var = start_sd**2 + t + drift_sd**2 * t * t + 2.0 * start_sd * drift_sd * t * corr
    if var <= 0.0:
        raise DomainError("degenerate marginal at t = 0 with a fixed start")
    return UnivariateNormal(start_mean + drift_mean * t, math.sqrt(var))


def integrate_with_error(
    measure: Measure,
    f: Callable,
    *,
    region=None,
    strategy: str = "auto",
    nodes: int | None = None,
    reps: int = DEFAULT_MC_REPS,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Integral of ``f`` against ``measure`` (over ``region``) and its standard error.

    The standard error is zero for quadrature.
    """
    if strategy not in ("auto", "quadrature", "mc"):
        raise ContractError(f"unknown strategy {strategy!r}")
    scale = 1.0
    if region is not None:
        measure, scale = restrict(measure, region)
    use_quad = strategy == "quadrature" or (
        strategy == "auto" and measure.quadrature_size(nodes) <= MAX_TENSOR_POINTS
    )
    if use_quad:
        try:
            pts, wts = measure.quadrature(nodes)
        except IntegrationError:
            if strategy == "quadrature":
                raise
        else:
            return scale * float(wts @ _evaluate(f, pts)), 0.0
    rng = rng if rng is not None else np.random.default_rng(0)
    vals = _evaluate(f, measure.sample(rng, reps))
    return scale * float(vals.mean()), scale * float(vals.std(ddof=1) / math.sqrt(reps))


def integrate(measure: Measure, f: Callable, **kwargs) -> float:
    return integrate_with_error(measure, f, **kwargs)[0]


def node_values(measure: Measure, f: Callable, nodes: int | None = None):
    """Quadrature points, weights and integrand values, reused across transforms."""
    pts, wts = measure.quadrature(nodes)
    return pts, wts, _evaluate(f, pts)


@dataclass
class Partition:
    """Measurable partition of a measure's support into labelled cells."""

    cells: list
    labels: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.cells) == 0:
            raise ContractError("partition needs at least one cell")
        if not self.labels:
            self.labels = [str(i) for i in range(len(self.cells))]
        if len(self.labels) != len(self.cells):
            raise ContractError("one label per cell required")

    def masses(self, measure: Measure) -> np.ndarray:
        out = []
        for cell in self.cells:
            try:
                out.append(mass(measure, cell))
            except NullRestrictionError:
                out.append(0.0)
        return np.asarray(out)

    def validate(self, measure: Measure, tol: float = 1e-12) -> np.ndarray:
        """Cell masses after checking that they sum to one."""
        m = self.masses(measure)
        if abs(m.sum() - 1.0) > tol:
            raise ContractError(f"partition masses sum to {m.sum():.15g}, not 1")
        return m


def coordinate_partition(low, high, axis: int, bins: int) -> Partition:
    """Equal-width slabs along one axis of the box [low, high]."""
    low = np.atleast_1d(np.asarray(low, float))
    high = np.atleast_1d(np.asarray(high, float))
    edges = np.linspace(low[axis], high[axis], bins + 1)
    cells, labels = [], []
    for i in range(bins):
        lo, hi = low.copy(), high.copy()
        lo[axis], hi[axis] = edges[i], edges[i + 1]
        cells.append(Box(tuple(lo), tuple(hi)))
        labels.append(f"x{axis + 1}[{edges[i]:.6g},{edges[i + 1]:.6g}]")
    return Partition(cells, labels)
