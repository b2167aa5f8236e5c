import numpy as np
import pytest

from rmuq.apps.gpr import gpr_fit, gpr_predict, rbf_gram
from rmuq.apps.risk import classification_risk, regression_risk, squared_loss
from rmuq.counting import Dirac, Poisson
from rmuq.errors import ContractError, DegenerateVarianceError
from rmuq.measure import Product, Uniform, UnivariateNormal, bernoulli, coordinate_partition
from rmuq.stc import RandomMeasure


def test_gpr_interpolates():
    x = np.linspace(0, 1, 12)
    y = np.sin(4 * x)
    model = gpr_fit(x, y, gamma=10.0)
    mean, var = gpr_predict(model, x)
    np.testing.assert_allclose(mean, y, atol=1e-7)
    np.testing.assert_allclose(var, 0.0, atol=1e-8)
    xm = np.linspace(0.05, 0.95, 7)
    m2, v2 = gpr_predict(model, xm)
    assert np.max(np.abs(m2 - np.sin(4 * xm))) < 1e-3
    assert np.all((v2 >= 0) & (v2 <= 1))


def test_gram_and_contracts():
    x = np.random.default_rng(0).random((5, 2))
    k = rbf_gram(x, x, 2.0)
    np.testing.assert_allclose(np.diag(k), 1.0)
    assert np.linalg.eigvalsh(k).min() > 0
    with pytest.raises(ContractError):
        gpr_fit(x, np.zeros(5), gamma=0.0)
    with pytest.raises(ContractError):
        gpr_fit(x, np.zeros(4), gamma=1.0)


def test_noise_regularises():
    x = np.zeros(3)
    model = gpr_fit(x, np.array([1.0, 2.0, 3.0]), gamma=1.0, noise=0.5)
    mean, _ = gpr_predict(model, np.zeros(1))
    assert mean[0] == pytest.approx(6.0 / 3.5)


def test_regression_risk_pure_noise():
    # y = x + eps, eps ~ N(0, 0.25) independent; the exact model has risk 0.25
    nu = Product([Uniform(0.0, 1.0), UnivariateNormal(0.0, 0.5)])
    joint = RandomMeasure(Poisson(10.0), nu)
    loss = lambda z: z[:, 1] ** 2  # noqa: E731
    rep = regression_risk(joint, lambda x: x, loss=loss, partition=coordinate_partition([0, -np.inf], [1, np.inf], 0, 2))
    assert rep.risk == pytest.approx(0.25)
    assert rep.variance == pytest.approx(10 * 3 * 0.25**2)
    np.testing.assert_allclose(rep.anova.first, [0.5, 0.5])
    f = squared_loss(lambda x: np.zeros_like(x))
    assert f(np.array([[0.3, 2.0]]))[0] == pytest.approx(4.0)
    with pytest.raises(ContractError):
        f(np.array([1.0, 2.0]))


def test_classification_risk():
    # x ~ Bernoulli(0.5), label equals x; the constant classifier 1 errs when x = 0
    nu = Product([bernoulli(0.5), bernoulli(0.5)])
    joint = RandomMeasure(Poisson(20.0), nu)
    rep = classification_risk(joint, lambda x: np.ones_like(x), [0, 1])
    assert rep.risk == pytest.approx(0.5)
    assert rep.mean == pytest.approx(10.0)
    assert rep.indices.sum() == pytest.approx(1.0)
    with pytest.raises(DegenerateVarianceError):
        classification_risk(RandomMeasure(Dirac(5), Product([bernoulli(1.0), bernoulli(1.0)])), lambda x: np.ones_like(x), [0, 1])
