import numpy as np
import pytest

from rmuq.errors import ContractError, IntegrationError, NullRestrictionError
from rmuq.measure import (
    Box,
    Exponential,
    Normal,
    Product,
    Uniform,
    UnivariateNormal,
    bernoulli,
    brownian_marginal,
    coordinate_partition,
    default_nodes,
    gauss_legendre,
    integrate,
    integrate_with_error,
    mass,
    restrict,
)


def test_gauss_legendre_breaks():
    x, w = gauss_legendre(0.0, 2.0, 8, [0.5, 1.0])
    assert w.sum() == pytest.approx(1.0)
    assert (w @ x**15) == pytest.approx(2.0**15 / 16, rel=1e-13)


def test_default_nodes_env(monkeypatch):
    monkeypatch.setenv("RMUQ_QUAD_NODES", "17")
    assert default_nodes() == 17
    monkeypatch.setenv("RMUQ_QUAD_NODES", "x")
    with pytest.raises(ContractError):
        default_nodes()


@pytest.mark.parametrize(
    "nu, f, exact",
    [
        (Uniform(0.0, 1.0), lambda x: x**2, 1 / 3),
        (Exponential(2.0), lambda x: x**2, 0.5),
        (UnivariateNormal(1.0, 2.0), lambda x: x**2, 5.0),
        (bernoulli(0.3), lambda x: x + 1, 1.3),
        (Product([Uniform(0, 1), Uniform(0, 2)]), lambda x: x[:, 0] * x[:, 1], 0.5),
    ],
)
def test_quadrature_exact(nu, f, exact):
    assert integrate(nu, f) == pytest.approx(exact, rel=1e-12)


def test_correlated_normal():
    nu = Normal([0.0, 1.0], [[1.0, 0.5], [0.5, 2.0]])
    assert integrate(nu, lambda x: x[:, 0] * x[:, 1]) == pytest.approx(0.5, rel=1e-12)


def test_monte_carlo_fallback():
    nu = Uniform(0.0, 1.0)
    val, se = integrate_with_error(nu, lambda x: x, strategy="mc", reps=50_000)
    assert se > 0
    assert abs(val - 0.5) < 5 * se
    with pytest.raises(ContractError):
        integrate_with_error(nu, lambda x: x, strategy="bogus")


def test_restriction():
    nu = UnivariateNormal(0.0, 1.0)
    sub, m = restrict(nu, Box((0.0,), (np.inf,)))
    assert m == pytest.approx(0.5)
    assert integrate(sub, lambda x: x) == pytest.approx(np.sqrt(2 / np.pi), rel=1e-8)
    with pytest.raises(NullRestrictionError):
        restrict(Uniform(0, 1), Box((2.0,), (3.0,)))
    assert mass(Product([Uniform(0, 1), Uniform(0, 1)]), Box((0, 0), (0.5, 0.5))) == pytest.approx(0.25)


def test_partition_validation():
    nu = Product([Uniform(-1, 1), Uniform(0, 1)])
    part = coordinate_partition([-1, 0], [1, 1], 0, 4)
    np.testing.assert_allclose(part.validate(nu), 0.25)
    bad = coordinate_partition([-1, 0], [0.5, 1], 0, 3)
    with pytest.raises(ContractError):
        bad.validate(nu)


def test_brownian_marginal():
    assert brownian_marginal(2.0).scale ** 2 == pytest.approx(2.0)
    law = brownian_marginal(1.0, start_sd=1.0, drift_mean=0.5, drift_sd=1.0, corr=0.5)
    assert law.scale**2 == pytest.approx(4.0)
    assert law.loc == pytest.approx(0.5)


def test_sampling_shapes():
    rng = np.random.default_rng(0)
    assert Product([Uniform(0, 1), bernoulli(0.5)]).sample(rng, 7).shape == (7, 2)
    assert UnivariateNormal(0, 1).sample(rng, 5).shape == (5, 1)


def test_no_rule_raises():
    class Opaque(Uniform):
        def quadrature(self, nodes=None):
            raise IntegrationError("none")

    with pytest.raises(IntegrationError):
        integrate_with_error(Opaque(0, 1), lambda x: x, strategy="quadrature")
