import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rmuq.counting import (
    Binomial,
    Dirac,
    NegativeBinomial,
    OrthogonalDie,
    Poisson,
    Superposition,
    ThinnedCount,
    UniformCount,
    Zeta,
    enumerate_orthogonal_dice,
    first_die_at_least,
    poisson_limit_distances,
    restrict_count,
)
from rmuq.errors import DomainError, MomentUndefinedError, NullRestrictionError

T = np.linspace(0.0, 1.0, 9)


def pgf_from_pmf(pmf, t, kmax=400):
    ks = np.arange(kmax)
    return np.power.outer(t, ks) @ pmf(ks)


@pytest.mark.parametrize(
    "law, pmf",
    [
        (Binomial(12, 0.35), lambda k: stats.binom.pmf(k, 12, 0.35)),
        (Poisson(3.5), lambda k: stats.poisson.pmf(k, 3.5)),
        (NegativeBinomial(2.5, 0.6), lambda k: stats.nbinom.pmf(k, 2.5, 0.4)),
        (Dirac(7), lambda k: (k == 7).astype(float)),
        (UniformCount(3, 9), lambda k: ((k >= 3) & (k <= 9)) / 7.0),
    ],
)
def test_pgf_matches_pmf(law, pmf):
    np.testing.assert_allclose(law.pgf(T), pgf_from_pmf(pmf, T), atol=1e-12)


@pytest.mark.parametrize(
    "law, dist",
    [
        (Binomial(12, 0.35), stats.binom(12, 0.35)),
        (Poisson(3.5), stats.poisson(3.5)),
        (NegativeBinomial(2.5, 0.6), stats.nbinom(2.5, 0.4)),
        (UniformCount(3, 9), stats.randint(3, 10)),
    ],
)
def test_moments_match_scipy(law, dist):
    assert law.mean == pytest.approx(dist.mean(), rel=1e-12)
    assert law.variance == pytest.approx(dist.var(), rel=1e-12)
    assert law.overdispersion == pytest.approx(dist.var() - dist.mean(), abs=1e-12)


def test_samples_follow_moments():
    rng = np.random.default_rng(3)
    for law in (Binomial(12, 0.35), Poisson(3.5), NegativeBinomial(2.5, 0.6), OrthogonalDie(5, 15)):
        x = law.sample(rng, 200_000)
        se = math.sqrt(law.variance / x.size) if law.variance else 1e-12
        assert abs(x.mean() - law.mean) < 5 * se


def test_invalid_parameters():
    with pytest.raises(DomainError):
        Dirac(0)
    with pytest.raises(DomainError):
        Binomial(3, 1.5)
    with pytest.raises(DomainError):
        Poisson(-1.0)
    with pytest.raises(DomainError):
        NegativeBinomial(1.0, 1.0)
    with pytest.raises(DomainError):
        OrthogonalDie(0, 5)
    with pytest.raises(DomainError):
        Poisson(1.0).pgf(1.5)


def test_orthogonality_flags():
    assert Poisson(2.0).is_orthogonal
    assert OrthogonalDie(0, 4).is_orthogonal
    assert not Binomial(5, 0.5).is_orthogonal
    assert Dirac(4).overdispersion == -4.0


def test_zeta_moments_and_domain():
    z = Zeta(5.0)
    ks = np.arange(1, 200_000, dtype=float)
    p = ks**-6.0 / np.sum(ks**-6.0)
    assert z.mean == pytest.approx(p @ ks, rel=1e-10)
    assert z.variance == pytest.approx(p @ ks**2 - (p @ ks) ** 2, rel=1e-9)
    assert z.overdispersion == pytest.approx(z.variance - z.mean, rel=1e-10)
    assert z.pgf(0.5) == pytest.approx(p @ 0.5**ks, rel=1e-12)
    with pytest.raises(MomentUndefinedError):
        Zeta(1.0).mean
    with pytest.raises(MomentUndefinedError):
        Zeta(1.5).variance


def test_zeta_sampler_tail():
    z = Zeta(1.5)
    x = z.sample(np.random.default_rng(0), 100_000)
    assert x.min() >= 1
    assert np.mean(x == 1) == pytest.approx(1.0 / z._norm, abs=5e-3)


def test_superposition_and_thinning():
    parts = (Binomial(20, 0.5), Poisson(5.0), NegativeBinomial(5.0, 0.5))
    s = Superposition(parts)
    np.testing.assert_allclose(s.pgf(T), np.prod([p.pgf(T) for p in parts], axis=0), rtol=1e-13)
    assert s.mean == sum(p.mean for p in parts)
    die = OrthogonalDie(1, 7)
    th = ThinnedCount(die, 0.6)
    x = th.sample(np.random.default_rng(1), 200_000)
    assert abs(x.var() - th.variance) < 0.05 * th.variance
    np.testing.assert_allclose(th.pgf(T), die.pgf(0.6 * T + 0.4), rtol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1.0), st.floats(0.0, 1.0))
def test_bone_mapping(a, t):
    for kappa in (Binomial(12, 0.35), Poisson(3.5), NegativeBinomial(2.5, 0.6), Dirac(9)):
        assert abs(kappa.pgf(a * t + 1 - a) - restrict_count(kappa, a).pgf(t)) < 1e-12


def test_restriction_families():
    assert isinstance(restrict_count(Poisson(4.0), 0.25), Poisson)
    assert isinstance(restrict_count(Dirac(4), 0.25), Binomial)
    assert isinstance(restrict_count(OrthogonalDie(0, 4), 0.5), ThinnedCount)
    assert restrict_count(Poisson(4.0), 1.0) == Poisson(4.0)
    with pytest.raises(NullRestrictionError):
        restrict_count(Poisson(4.0), 0.0)


def test_dice_enumeration():
    dice = enumerate_orthogonal_dice(40)
    for d in dice:
        assert 6 * (d.low + d.high) == d.sides**2 - 1
        assert math.gcd(d.sides, 6) == 1
        assert d.distribution().is_orthogonal
    assert [d.index for d in dice[:6]] == [1, 2, 4, 5, 7, 8]
    assert first_die_at_least(5).low == 5
    with pytest.raises(DomainError):
        enumerate_orthogonal_dice(0)


def test_poisson_limit_monotone():
    d = poisson_limit_distances(15)
    assert np.isnan(d[0]) or d[0] >= d[1]
    v = d[~np.isnan(d)]
    assert np.all(np.diff(v) < 0)
    assert v[-1] < 1e-2
