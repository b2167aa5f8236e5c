"""Counting distributions for mixed binomial processes.

Each law exposes its mean, variance, overdispersion ``variance - mean``,
probability generating function (pgf) and a sampler. Thinning a law by
an independent Bernoulli(a) mark is handled by :func:`restrict_count`,
which maps Poisson, binomial and negative binomial laws to the same
family and falls back to a generic thinned pgf otherwise.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError, MomentUndefinedError, NullRestrictionError


def _check_unit_interval(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("pgf argument must lie in [0, 1]")
    return arr


class CountingDistribution(ABC):
    """Law of the total count K of a mixed binomial process."""

    @property
    @abstractmethod
    def mean(self) -> float: ...

    @property
    @abstractmethod
    def variance(self) -> float: ...

    @property
    def overdispersion(self) -> float:
        """Variance minus mean; zero exactly for orthogonal laws."""
        return self.variance - self.mean

    @property
    def second_factorial_moment(self) -> float:
        """E[K(K-1)] = variance + mean^2 - mean."""
        return self.variance + self.mean**2 - self.mean

    @property
    def is_orthogonal(self) -> bool:
        return math.isclose(self.variance, self.mean, rel_tol=1e-12, abs_tol=1e-12)

    @property
    def in_pt_family(self) -> bool:
        """Closed under thinning within its own family."""
        return False

    def pgf(self, t):
        """E[t^K] for t in [0, 1]; vectorised over ``t``."""
        arr = _check_unit_interval(t)
        out = self._pgf(arr)
        return float(out) if np.ndim(t) == 0 else out

    @abstractmethod
    def _pgf(self, t: np.ndarray) -> np.ndarray:
        """pgf without domain checks; analytic where the law allows."""

    def log_pgf(self, t):
        """log E[t^K]; overridden where a stable closed form exists."""
        with np.errstate(divide="ignore"):
            return np.log(self.pgf(t))

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int | None = None): ...


@dataclass(frozen=True)
class Dirac(CountingDistribution):
    """Deterministic count K = count."""

    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise DomainError("Dirac count must be a positive integer")

    @property
    def mean(self):
        return float(self.count)

    @property
    def variance(self):
        return 0.0

    def _pgf(self, t):
        return np.power(t, self.count)

    def log_pgf(self, t):
        arr = _check_unit_interval(t)
        with np.errstate(divide="ignore"):
            out = self.count * np.log(arr)
        return float(out) if np.ndim(t) == 0 else out

    def sample(self, rng, size=None):
        if size is None:
            return int(self.count)
        return np.full(size, self.count, dtype=np.int64)


@dataclass(frozen=True)
class Binomial(CountingDistribution):
    trials: int
    prob: float

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("binomial trials must be a positive integer")
        if not 0.0 < self.prob <= 1.0:
            raise DomainError("binomial probability must lie in (0, 1]")

    @property
    def mean(self):
        return self.trials * self.prob

    @property
    def variance(self):
        return self.trials * self.prob * (1.0 - self.prob)

    @property
    def in_pt_family(self):
        return True

    def _pgf(self, t):
        return np.power(1.0 - self.prob + self.prob * t, self.trials)

    def log_pgf(self, t):
        arr = _check_unit_interval(t)
        with np.errstate(divide="ignore"):
            out = self.trials * np.log1p(self.prob * (arr - 1.0))
        return float(out) if np.ndim(t) == 0 else out

    def sample(self, rng, size=None):
        return rng.binomial(self.trials, self.prob, size=size)


@dataclass(frozen=True)
class Poisson(CountingDistribution):
    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise DomainError("Poisson rate must be positive and finite")

    @property
    def mean(self):
        return float(self.rate)

    @property
    def variance(self):
        return float(self.rate)

    @property
    def is_orthogonal(self):
        return True

    @property
    def in_pt_family(self):
        return True

    def _pgf(self, t):
        return np.exp(self.rate * (t - 1.0))

    def log_pgf(self, t):
        arr = _check_unit_interval(t)
        out = self.rate * (arr - 1.0)
        return float(out) if np.ndim(t) == 0 else out

    def sample(self, rng, size=None):
        return rng.poisson(self.rate, size=size)


@dataclass(frozen=True)
class NegativeBinomial(CountingDistribution):
    """Failures before the r-th success with failure probability ``prob``.

    Mean r p / (1 - p); pgf ((1 - p) / (1 - p t))^r.
    """

    shape: float
    prob: float

    def __post_init__(self):
        if not self.shape > 0.0:
            raise DomainError("negative binomial shape must be positive")
        if not 0.0 < self.prob < 1.0:
            raise DomainError("negative binomial probability must lie in (0, 1)")

    @property
    def mean(self):
        return self.shape * self.prob / (1.0 - self.prob)

    @property
    def variance(self):
        return self.shape * self.prob / (1.0 - self.prob) ** 2

    @property
    def in_pt_family(self):
        return True

    def _pgf(self, t):
        return np.power((1.0 - self.prob) / (1.0 - self.prob * t), self.shape)

    def log_pgf(self, t):
        arr = _check_unit_interval(t)
        out = self.shape * (np.log1p(-self.prob) - np.log1p(-self.prob * arr))
        return float(out) if np.ndim(t) == 0 else out

    def sample(self, rng, size=None):
        # numpy counts failures with success probability 1 - prob
        return rng.negative_binomial(self.shape, 1.0 - self.prob, size=size)


@dataclass(frozen=True)
class UniformCount(CountingDistribution):
    """K uniform on the integers low..high."""

    low: int
    high: int

    def __post_init__(self):
        if int(self.low) != self.low or int(self.high) != self.high:
            raise DomainError("uniform count bounds must be integers")
        if self.low < 0 or self.high < self.low or self.high < 1:
            raise DomainError("need 0 <= low <= high and high >= 1")

    @property
    def sides(self) -> int:
        return self.high - self.low + 1

    @property
    def mean(self):
        return (self.low + self.high) / 2.0

    @property
    def variance(self):
        return (self.sides**2 - 1) / 12.0

    @property
    def is_orthogonal(self):
        return (self.sides**2 - 1) == 6 * (self.low + self.high)

    def _pgf(self, t):
        ks = np.arange(self.low, self.high + 1)
        tt = np.asarray(t, dtype=float)
        return np.power.outer(tt, ks).mean(axis=-1)

    def sample(self, rng, size=None):
        return rng.integers(self.low, self.high + 1, size=size)


class OrthogonalDie(UniformCount):
    """Uniform count whose variance equals its mean."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_orthogonal:
            raise DomainError(
                f"uniform count on {self.low}..{self.high} is not orthogonal"
            )


@dataclass(frozen=True)
class Zeta(CountingDistribution):
    """P(K = k) proportional to k^-(s+1) on k = 1, 2, ...

    The mean is finite for s > 1 and the variance for s > 2.
    """

    s: float
    tail_mass: float = 1e-12
    max_table: int = 10_000_000

    def __post_init__(self):
        if not self.s > 0.0:
            raise DomainError("zeta exponent must be positive")

    @cached_property
    def _norm(self) -> float:
        return float(special.zeta(self.s + 1.0))

    @property
    def mean(self):
        if self.s <= 1.0:
            raise MomentUndefinedError("zeta mean requires s > 1")
        return float(special.zeta(self.s)) / self._norm

    @property
    def second_moment(self) -> float:
        if self.s <= 2.0:
            raise MomentUndefinedError("zeta variance requires s > 2")
        return float(special.zeta(self.s - 1.0)) / self._norm

    @property
    def variance(self):
        return self.second_moment - self.mean**2

    @property
    def overdispersion(self):
        if self.s <= 2.0:
            raise MomentUndefinedError("zeta variance requires s > 2")
        z_lo = float(special.zeta(self.s - 1.0))
        z0 = float(special.zeta(self.s))
        z1 = self._norm
        return (z_lo * z1 - z0 * (z0 + z1)) / z1**2

    def _pgf(self, t):
        order = self.s + 1.0
        flat = np.atleast_1d(np.asarray(t, dtype=float))
        vals = [float(mpmath.polylog(order, x)) for x in flat]
        return np.asarray(vals).reshape(np.shape(t)) / self._norm

    @cached_property
    def _table(self):
        cutoff = (self.tail_mass * self.s * self._norm) ** (-1.0 / self.s)
        size = int(min(max(math.ceil(cutoff), 16), self.max_table))
        ks = np.arange(1, size + 1, dtype=float)
        cdf = np.cumsum(ks ** -(self.s + 1.0)) / self._norm
        return cdf

    def sample(self, rng, size=None):
        cdf = self._table
        n = 1 if size is None else size
        u = rng.random(n)
        idx = np.searchsorted(cdf, u, side="right")
        out = (idx + 1).astype(np.int64)
        beyond = idx >= cdf.size
        if np.any(beyond):
            # continuous Pareto approximation of the remaining tail
            top = float(cdf.size)
            tail = 1.0 - cdf[-1]
            frac = np.clip((1.0 - u[beyond]) / tail, 1e-300, 1.0)
            out[beyond] = np.floor(top * frac ** (-1.0 / self.s)).astype(np.int64) + 1
        return int(out[0]) if size is None else out


@dataclass(frozen=True)
class Superposition(CountingDistribution):
    """Sum of independent counts."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise DomainError("superposition needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def mean(self):
        return float(sum(p.mean for p in self.parts))

    @property
    def variance(self):
        return float(sum(p.variance for p in self.parts))

    @property
    def in_pt_family(self):
        return all(p.in_pt_family for p in self.parts)

    def _pgf(self, t):
        out = np.ones_like(np.asarray(t, dtype=float))
        for p in self.parts:
            out = out * p._pgf(t)
        return out

    def sample(self, rng, size=None):
        total = 0
        for p in self.parts:
            total = total + np.asarray(p.sample(rng, size))
        return int(total) if size is None else total.astype(np.int64)


@dataclass(frozen=True)
class ThinnedCount(CountingDistribution):
    """Count of a base law after independent Bernoulli(keep) thinning."""

    base: CountingDistribution
    keep: float

    def __post_init__(self):
        if not 0.0 < self.keep <= 1.0:
            raise DomainError("thinning probability must lie in (0, 1]")

    @property
    def mean(self):
        return self.keep * self.base.mean

    @property
    def variance(self):
        a = self.keep
        return a * a * self.base.variance + a * (1.0 - a) * self.base.mean

    @property
    def in_pt_family(self):
        return self.base.in_pt_family

    def _pgf(self, t):
        return self.base._pgf(self.keep * t + 1.0 - self.keep)

    def sample(self, rng, size=None):
        k = self.base.sample(rng, size)
        return rng.binomial(k, self.keep)


def restrict_count(kappa: CountingDistribution, keep: float) -> CountingDistribution:
    """Law of the count falling in a set of probability ``keep``.

    Poisson, binomial, negative binomial and Dirac laws map to closed
    families; any other law is returned as a :class:`ThinnedCount`.
    """
    if not 0.0 <= keep <= 1.0:
        raise DomainError("restriction mass must lie in [0, 1]")
    if keep == 0.0:
        raise NullRestrictionError("restriction to a null set")
    if keep == 1.0:
        return kappa
    if isinstance(kappa, Poisson):
        return Poisson(keep * kappa.rate)
    if isinstance(kappa, Binomial):
        return Binomial(kappa.trials, keep * kappa.prob)
    if isinstance(kappa, NegativeBinomial):
        p = kappa.prob
        return NegativeBinomial(kappa.shape, keep * p / (1.0 - (1.0 - keep) * p))
    if isinstance(kappa, Dirac):
        return Binomial(kappa.count, keep)
    if isinstance(kappa, Superposition):
        return Superposition(tuple(restrict_count(p, keep) for p in kappa.parts))
    return ThinnedCount(kappa, keep)


@dataclass(frozen=True)
class DieEntry:
    index: int
    low: int
    high: int
    mean: float
    sides: int

    def distribution(self) -> OrthogonalDie:
        return OrthogonalDie(self.low, self.high)


def enumerate_orthogonal_dice(count: int) -> list[DieEntry]:
    """First ``count`` orthogonal dice, ordered by index k not divisible by 3."""
    if count < 1:
        raise DomainError("count must be positive")
    out = []
    k = 0
    while len(out) < count:
        k += 1
        if k % 3 == 0:
            continue
        low = (k * k - 1) // 3
        high = 2 * k + low + 2
        out.append(DieEntry(k, low, high, (low + high) / 2.0, high - low + 1))
    return out


def first_die_at_least(low_bound: int) -> DieEntry:
    """First orthogonal die whose lower face is at least ``low_bound``."""
    k = 0
    while True:
        k += 1
        if k % 3 == 0:
            continue
        low = (k * k - 1) // 3
        if low >= low_bound:
            high = 2 * k + low + 2
            return DieEntry(k, low, high, (low + high) / 2.0, high - low + 1)


def poisson_limit_distances(count: int, rate: float = 2.0, points: int = 11) -> np.ndarray:
    """sup_t |pgf of die thinned to mean ``rate`` - exp(rate (t - 1))| along the dice sequence.

    Dice whose mean is below ``rate`` cannot be thinned to it and get NaN.
    """
    t = np.linspace(0.0, 1.0, points)
    target = np.exp(rate * (t - 1.0))
    out = []
    for entry in enumerate_orthogonal_dice(count):
        if entry.mean < rate:
            out.append(math.nan)
            continue
        thinned = restrict_count(entry.distribution(), rate / entry.mean)
        out.append(float(np.max(np.abs(thinned.pgf(t) - target))))
    return np.asarray(out)
