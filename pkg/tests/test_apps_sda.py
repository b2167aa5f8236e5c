import math

import numpy as np
import pytest
from scipy.integrate import simpson

from rmuq.apps import sda
from rmuq.counting import Poisson
from rmuq.field import RandomField, field_cov, field_mean, rbf_kernel
from rmuq.measure import UnivariateNormal, integrate


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_rent_moments_by_quadrature(t):
    nu = UnivariateNormal(0.0, math.sqrt(t))
    m = sda.rent_moments(t)
    g = sda.rent
    assert integrate(nu, g, nodes=128) == pytest.approx(m.mean, abs=1e-12)
    assert integrate(nu, lambda x: g(x) ** 2, nodes=128) == pytest.approx(m.second, abs=1e-12)
    assert integrate(nu, lambda x: (g(x) - m.mean) ** 2, nodes=128) == pytest.approx(m.loss_mean, abs=1e-12)
    assert integrate(nu, lambda x: (g(x) - m.mean) ** 4, nodes=128) == pytest.approx(m.loss_second, abs=1e-12)


def test_rent_totals_at_t1():
    m = sda.rent_moments(1.0)
    assert m.total_mean(Poisson(100.0)) == pytest.approx(56.7668, abs=1e-3)
    assert m.total_variance(Poisson(100.0)) == pytest.approx(44.2710, abs=1e-3)
    mix = sda.mixed_population()
    assert mix.is_orthogonal and mix.mean == pytest.approx(100.0)


def test_densities_normalised():
    y = np.linspace(1e-6, 1 - 1e-6, 200_001)
    assert simpson(sda.rent_image_density(y, 1.0), x=y) == pytest.approx(1.0, abs=2e-3)
    x = np.linspace(-12, 12, 4001)
    assert simpson(sda.rent_sensitivity_density(x, 1.0), x=x) == pytest.approx(1.0, abs=1e-8)


def test_interaction_closed_forms():
    t, gamma, kappa = 1.0, 0.8, sda.mixed_population()
    grid = np.linspace(-2, 2, 5)
    rf = RandomField(sda.particle_measure(kappa, t), rbf_kernel(gamma), grid)
    np.testing.assert_allclose(field_mean(rf, 128), kappa.mean * sda.interaction_mean(grid, t, gamma), atol=1e-10)
    np.testing.assert_allclose(field_cov(rf, 128), sda.interaction_cov_grid(grid, t, gamma, kappa), atol=1e-8)
    for y in (0.2, 0.5, 1.0, 2.0):
        assert sda.interaction_time(y, gamma)[0] == pytest.approx(sda.interaction_time_search(y, gamma)[0], abs=1e-6)


def test_bivariate_kernel_mean():
    t, sy, sz, rho = 1.5, 0.8, 1.2, 0.3
    nu = UnivariateNormal(0.0, math.sqrt(t))
    got = integrate(nu, lambda x: sda.bivariate_kernel(x, 0.4, -0.3, sy, sz, rho), nodes=128)
    assert got == pytest.approx(float(sda.bivariate_mean(0.4, -0.3, t, sy, sz, rho)), abs=1e-12)


def test_bone_mapping_and_spectrum():
    kappa = sda.mixed_population()
    assert sda.bone_mapping_gap(kappa, 0.37, np.linspace(0, 1, 11)) < 1e-12
    es, sa = sda.field_spectrum(sda.field_grid(points=40), 1.0, 1.0, Poisson(1.0))
    assert sa.indices.sum() == pytest.approx(1.0)
    assert np.all(es.values > -1e-10)
