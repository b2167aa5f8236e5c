import math
import warnings

import numpy as np
import pytest

from rmuq.counting import Poisson
from rmuq.errors import ContractError, DomainError
from rmuq.maxent import MaxEntProblem, draw_alphas, fit_maxent, generalized_moments
from rmuq.measure import Uniform
from rmuq.stc import RandomMeasure


def gamma_transform(a, k=2, lam=1.0):
    return (lam / (lam + a)) ** k


def test_problem_contracts():
    with pytest.raises(ContractError):
        MaxEntProblem(np.array([1.0, 2.0]), np.array([0.5, 0.3]))
    with pytest.raises(ContractError):
        MaxEntProblem(np.array([2.0, 1.0]), np.array([0.3, 1.5]))
    with pytest.raises(ContractError):
        MaxEntProblem(np.array([2.0, 1.0]), np.array([0.6, 0.3]))
    with pytest.raises(ContractError):
        MaxEntProblem(np.array([-1.0]), np.array([0.3]))


def test_draw_alphas():
    a = draw_alphas(10, 0)
    assert np.all(np.diff(a) < 0) and np.all(a > 0)
    np.testing.assert_array_equal(a, draw_alphas(10, 0))
    with pytest.raises(DomainError):
        draw_alphas(0, 0)


def test_gamma_reconstruction():
    prob = MaxEntProblem.from_transform(gamma_transform, draw_alphas(10, 0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = fit_maxent(prob)
    assert fit.mean == pytest.approx(2.0, rel=2e-2)
    assert fit.variance == pytest.approx(2.0, rel=2e-2)
    assert fit.l1_distance(lambda x: x * np.exp(-x)) < 0.05
    np.testing.assert_allclose(fit.transform(prob.alphas), prob.targets, atol=1e-8)


def test_single_constraint_is_exponential_family():
    # one constraint E y^a = F gives mu(y) proportional to exp(-lambda y^a)
    prob = MaxEntProblem(np.array([1.0]), np.array([0.5]))
    fit = fit_maxent(prob)
    assert fit.transform([1.0])[0] == pytest.approx(0.5, abs=1e-9)
    y = np.linspace(0.01, 1, 50)
    assert fit.lambdas[0] == pytest.approx(0.0, abs=1e-8)
    np.testing.assert_allclose(fit.pdf_unit(y), 1.0, atol=1e-7)


def test_generalized_moments_scale():
    N = RandomMeasure(Poisson(5.0), Uniform(0.0, 1.0))
    prob = generalized_moments(N, lambda x: x, [0.5, 1.0])
    assert prob.scale == pytest.approx(2.5)
    assert prob.alphas[0] == 1.0
    inner = (1 - math.exp(-1.0 / 2.5)) * 2.5
    assert prob.targets[0] == pytest.approx(math.exp(-5 * (1 - inner)), rel=1e-12)
    assert generalized_moments(N, lambda x: x, [1.0], scale="nu").scale == pytest.approx(0.5)
    with pytest.raises(DomainError):
        generalized_moments(N, lambda x: 0 * x, [1.0])
