import math

import numpy as np
import pytest

from rmuq.counting import Dirac, Poisson
from rmuq.errors import ContractError, DegenerateVarianceError
from rmuq.field import RandomField, effective_dimension, field_cov, field_mean, field_sample, fpca, rbf_kernel, rf_anova
from rmuq.measure import UnivariateNormal
from rmuq.stc import RandomMeasure

C, T, GAMMA = 3.0, 1.0, 0.7
GRID = np.linspace(-2, 2, 5)


def field(kappa=Poisson(C)):
    return RandomField(RandomMeasure(kappa, UnivariateNormal(0.0, math.sqrt(T))), rbf_kernel(GAMMA), GRID)


def test_mean_closed_form():
    s = 1 + 2 * GAMMA * T
    np.testing.assert_allclose(field_mean(field(), 128), C / math.sqrt(s) * np.exp(-GAMMA * GRID**2 / s), rtol=1e-10)


def test_covariance_closed_form():
    y, z = np.meshgrid(GRID, GRID, indexing="ij")
    m = (y + z) / 2
    s = 1 + 4 * GAMMA * T
    exact = C / math.sqrt(s) * np.exp(-GAMMA * (y - z) ** 2 / 2 - 2 * GAMMA * m**2 / s)
    np.testing.assert_allclose(field_cov(field(), 128), exact, atol=1e-10)


def test_dirac_covariance_has_negative_part():
    cov_p = field_cov(field(), 64)
    cov_d = field_cov(field(Dirac(3)), 64)
    mean = field_mean(field(), 64) / C
    np.testing.assert_allclose(cov_p - cov_d, 3 * np.outer(mean, mean), atol=1e-12)


def test_sample_mean():
    f = field()
    rng = np.random.default_rng(0)
    paths = np.array([field_sample(f, rng) for _ in range(4000)])
    se = paths.std(axis=0) / math.sqrt(4000)
    assert np.all(np.abs(paths.mean(axis=0) - field_mean(f)) < 5 * se)


def test_fpca_properties():
    x = np.linspace(0, 1, 60)
    cov = np.minimum.outer(x, x)
    w = np.full(60, 1 / 60)
    es = fpca(cov, w)
    assert np.all(es.values >= -1e-12)
    assert es.values.sum() == pytest.approx(es.trace, abs=1e-12)
    phi = es.functions
    np.testing.assert_allclose(phi.T @ (w[:, None] * phi), np.eye(60), atol=1e-10)
    err = [es.reconstruction_error(r) for r in range(1, 11)]
    assert np.all(np.diff(err) < 0)
    # Brownian covariance: eigenvalues 1 / ((k - 1/2) pi)^2
    assert es.values[0] == pytest.approx(4 / math.pi**2, rel=2e-2)
    np.testing.assert_allclose(es.truncated(60), cov, atol=1e-10)


def test_rf_anova():
    es = fpca(np.diag([4.0, 3.0, 2.0, 1.0]), np.ones(4))
    sa = rf_anova(es)
    np.testing.assert_allclose(sa.indices, [0.4, 0.3, 0.2, 0.1])
    assert sa.effective_dimension == 4
    assert effective_dimension(np.array([0.5, 0.45, 0.05])) == 2
    with pytest.raises(DegenerateVarianceError):
        rf_anova(fpca(np.zeros((3, 3))))


def test_contracts():
    with pytest.raises(ContractError):
        rbf_kernel(0.0)
    with pytest.raises(ContractError):
        fpca(np.ones((2, 3)))
    with pytest.raises(ContractError):
        RandomField(RandomMeasure(Poisson(1.0), UnivariateNormal()), rbf_kernel(1.0), [])
