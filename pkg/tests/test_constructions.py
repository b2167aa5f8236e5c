import math

import numpy as np
import pytest

from rmuq.constructions import (
    ALL_FIXTURES,
    ClusterSetup,
    binomial_construction,
    check_construction,
    chi_square_transform,
    cluster_moments,
    cluster_sampler,
    cluster_transform,
    denoise_construction,
    denoise_forward,
    denoise_inverse,
    gamma_limit_distance,
    logarithmic,
    pmf_chi_square,
    wiener_covariance,
)
from rmuq.counting import Dirac, Poisson
from rmuq.errors import DomainError
from rmuq.stc import simulate_totals

ALPHAS = np.array([0.1, 0.3, 0.7, 1.5, 3.0])


def test_logarithmic_law():
    law = logarithmic(0.4)
    mean = float(law.quadrature()[1] @ law.quadrature()[0][:, 0])
    assert mean == pytest.approx(-0.4 / (0.6 * math.log(0.6)), rel=1e-12)
    with pytest.raises(DomainError):
        logarithmic(1.0)


@pytest.mark.parametrize("name", sorted(ALL_FIXTURES))
def test_transform_identity(name):
    c = ALL_FIXTURES[name]()
    closed = np.asarray(c.closed_transform(ALPHAS))
    computed = np.asarray(c.computed_transform(ALPHAS))
    assert np.max(np.abs(closed - computed) / np.maximum(1.0, np.abs(closed))) < 1e-10


def test_binomial_simulation_and_pmf():
    c = binomial_construction()
    assert all(v.passed for v in check_construction(c, reps=20_000, seed=1))
    draws = simulate_totals(None, [], 20_000, 2, sampler=c.sampler)[:, 0]
    assert pmf_chi_square(draws, c.reference_pmf) > 1e-4


def test_zero_inflation_samplers_agree():
    c = ALL_FIXTURES["zero_inflation"]()
    a = simulate_totals(None, [], 20_000, 3, sampler=c.sampler)[:, 0]
    b = simulate_totals(None, [], 20_000, 4, sampler=c.notes["explicit_sampler"])[:, 0]
    se = math.sqrt(a.var() / a.size + b.var() / b.size)
    assert abs(a.mean() - b.mean()) < 4 * se


def test_gamma_limit():
    d = [gamma_limit_distance(2.0, 1.5, h, ALPHAS) for h in (1.0, 3.0, 10.0)]
    assert d[0] > d[1] > d[2]
    assert d[2] < 1e-3


def test_wiener_covariance():
    assert wiener_covariance(10_000, 1.0, 0.25, 0.5) == pytest.approx(0.25)
    assert wiener_covariance(10_000, 1.0, 0.0, 0.5) == 0.0


def test_denoise_round_trip():
    c = denoise_construction()
    inverse = denoise_inverse(c.notes["single"], 1.0)
    beta = np.array([0.05, 0.2, 0.45])
    np.testing.assert_allclose(inverse(beta), c.notes["transform_h"](beta), rtol=1e-12)
    forward = denoise_forward(lambda a: np.ones_like(a), 1.0)
    # pure noise: chi-square with one degree of freedom
    np.testing.assert_allclose(forward(ALPHAS), (1 + 2 * ALPHAS) ** -0.5)
    with pytest.raises(DomainError):
        inverse(np.array([0.6]))


def test_chi_square_remark():
    for dof in (1, 3, 5):
        np.testing.assert_allclose(chi_square_transform(dof, ALPHAS), (1 + 2 * ALPHAS) ** (-dof / 2), atol=1e-10)


def test_cluster_formulas():
    pois = ClusterSetup(Poisson(20.0), Poisson(10.0), 0.01)
    approx = cluster_moments(pois, exact=False)
    assert approx == pytest.approx({"mean_total": 200, "var_total": 2200, "mean_a": 50, "var_a": 550}, rel=1e-9)
    exact = cluster_moments(pois)
    assert exact["var_a"] < approx["var_a"]
    dirac = cluster_moments(ClusterSetup(Dirac(20), Poisson(10.0), 0.01), exact=False)
    assert dirac["var_total"] == pytest.approx(200)
    assert dirac["var_a"] == pytest.approx(425)


def test_cluster_transform_mean():
    setup = ClusterSetup(Poisson(20.0), Poisson(10.0), 0.01)
    h = 1e-6
    for restricted, target in ((False, 200.0), (True, 50.0)):
        f1, f2 = cluster_transform(setup, [h, 2 * h], restricted)
        assert (3.0 - 4.0 * f1 + f2) / (2 * h) == pytest.approx(target, rel=1e-6)


def test_cluster_sampler_exact_moments():
    setup = ClusterSetup(Poisson(20.0), Poisson(10.0), 0.01)
    draws = simulate_totals(None, [], 20_000, 5, sampler=cluster_sampler(setup))
    exact = cluster_moments(setup)
    se = math.sqrt(2 / draws.shape[0]) * exact["var_a"]
    assert abs(draws[:, 1].var() - exact["var_a"]) < 4 * se
