"""Sampling of mixed binomial random measures.

A realization draws K ~ kappa and then K independent points from nu.
Replicated runs are split into fixed-size blocks, each with its own
stream derived from ``(seed, block index)``, so results do not depend
on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .counting import CountingDistribution, restrict_count
from .errors import ContractError, DomainError
from .measure import Measure, _evaluate, as_argument, restrict
from .rng import stream_rng

BLOCK_SIZE = 2048
JACKKNIFE_GROUPS = 100


@dataclass(frozen=True)
class RandomMeasure:
    """Mixed binomial process N = (kappa, nu)."""

    kappa: CountingDistribution
    nu: Measure

    def restrict(self, region) -> "RandomMeasure":
        """Trace of N on ``region``: thinned count law and conditioned nu."""
        nu_a, a = restrict(self.nu, region)
        return RandomMeasure(restrict_count(self.kappa, a), nu_a)


@dataclass(frozen=True)
class Realization:
    points: np.ndarray

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def evaluate(self, f: Callable) -> float:
        """N f = sum of f over the realized points (zero when empty)."""
        if self.count == 0:
            return 0.0
        vals = _evaluate(f, self.points)
        if np.any(vals < 0):
            raise DomainError("test function must be non-negative on the realized points")
        return float(vals.sum())

    def restrict(self, indicator: Callable) -> "Realization":
        if self.count == 0:
            return self
        keep = np.asarray(indicator(as_argument(self.points)), bool).reshape(-1)
        return Realization(self.points[keep])

    def counting_path(self, times: Sequence[float]) -> np.ndarray:
        """N_t = number of points at or before t, for points on the half-line."""
        if self.points.shape[1] != 1:
            raise ContractError("counting paths need one-dimensional points")
        ordered = np.sort(self.points[:, 0], kind="stable")
        if ordered.size and ordered[0] < 0:
            raise DomainError("counting paths need points on the half-line")
        return np.searchsorted(ordered, np.asarray(times, float), side="right")


def realize(measure: RandomMeasure, rng: np.random.Generator) -> Realization:
    k = int(measure.kappa.sample(rng))
    return Realization(measure.nu.sample(rng, k) if k > 0 else np.empty((0, measure.nu.dim)))


def counting_process(measure: RandomMeasure, times: Sequence[float], rng: np.random.Generator):
    """One realization and its counting path on ``times``."""
    real = realize(measure, rng)
    return real, real.counting_path(times)


def realize_replicate(measure: RandomMeasure, seed: int, index: int) -> Realization:
    """Realization number ``index`` of a run with base ``seed``."""
    return realize(measure, stream_rng(seed, index))


def _block_totals(measure: RandomMeasure, fs: Sequence[Callable], size: int, rng) -> np.ndarray:
    counts = np.asarray(measure.kappa.sample(rng, size), dtype=np.int64)
    total = int(counts.sum())
    out = np.zeros((size, len(fs)))
    if total == 0:
        return out
    pts = measure.nu.sample(rng, total)
    owner = np.repeat(np.arange(size), counts)
    for j, f in enumerate(fs):
        out[:, j] = np.bincount(owner, weights=_evaluate(f, pts), minlength=size)
    return out


def simulate_totals(
    measure: RandomMeasure,
    fs: Sequence[Callable],
    reps: int,
    seed: int,
    threads: int = 1,
    sampler: Callable | None = None,
) -> np.ndarray:
    """Matrix of N f_j over ``reps`` replicates, shape ``(reps, len(fs))``.

    ``sampler(size, rng)`` may replace the default block sampler; it must
    return the same shape.
    """
    if reps < 2:
        raise ContractError("need at least two replicates")
    nblocks = math.ceil(reps / BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, reps - b * BLOCK_SIZE) for b in range(nblocks)]

    def run(b):
        rng = stream_rng(seed, b)
        if sampler is not None:
            return np.asarray(sampler(sizes[b], rng), float).reshape(sizes[b], -1)
        return _block_totals(measure, fs, sizes[b], rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(nblocks)))
    else:
        blocks = [run(b) for b in range(nblocks)]
    return np.concatenate(blocks, axis=0)


def _grouped_jackknife(samples: np.ndarray, stat: Callable, groups: int) -> float:
    n = samples.shape[0]
    groups = min(groups, n)
    idx = np.array_split(np.arange(n), groups)
    full = np.ones(n, bool)
    vals = []
    for g in idx:
        full[g] = False
        vals.append(stat(samples[full]))
        full[g] = True
    vals = np.asarray(vals)
    return float(np.sqrt((groups - 1) / groups * ((vals - vals.mean(axis=0)) ** 2).sum(axis=0)))


@dataclass(frozen=True)
class EmpiricalStats:
    """Moments of replicated totals with standard errors.

    ``cov`` is the sample covariance matrix; ``cov_se`` its jackknife
    standard errors entry by entry.
    """

    mean: np.ndarray
    mean_se: np.ndarray
    cov: np.ndarray
    cov_se: np.ndarray
    reps: int

    @property
    def var(self) -> np.ndarray:
        return np.diag(self.cov).copy()

    @property
    def var_se(self) -> np.ndarray:
        return np.diag(self.cov_se).copy()


def summarize(samples: np.ndarray, groups: int = JACKKNIFE_GROUPS) -> EmpiricalStats:
    """Means, covariances and grouped-jackknife standard errors of the rows."""
    x = np.asarray(samples, float)
    if x.ndim == 1:
        x = x[:, None]
    n, k = x.shape
    mean = x.mean(axis=0)
    cov = np.atleast_2d(np.cov(x, rowvar=False))
    cov_se = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            def stat(s, i=i, j=j):
                return np.cov(s[:, i], s[:, j])[0, 1]

            cov_se[i, j] = cov_se[j, i] = _grouped_jackknife(x, stat, groups)
    return EmpiricalStats(mean, x.std(axis=0, ddof=1) / math.sqrt(n), cov, cov_se, n)


def empirical_stats(
    measure: RandomMeasure,
    fs: Sequence[Callable],
    reps: int,
    seed: int,
    threads: int = 1,
) -> EmpiricalStats:
    return summarize(simulate_totals(measure, fs, reps, seed, threads))


def empirical_laplace(values: np.ndarray, alphas: Sequence[float]):
    """Monte Carlo estimate of E exp(-alpha X) and its standard error."""
    v = np.asarray(values, float).ravel()
    est, se = [], []
    for a in alphas:
        e = np.exp(-a * v)
        est.append(e.mean())
        se.append(e.std(ddof=1) / math.sqrt(v.size))
    return np.asarray(est), np.asarray(se)
