import math

import numpy as np
import pytest
from scipy import integrate as sint

from rmuq.apps import examples as ex
from rmuq.counting import Dirac, Poisson
from rmuq.errors import DegenerateVarianceError, DomainError
from rmuq.measure import Product, Uniform, integrate


def test_sympoly_orders_sum_and_match_hdmr():
    for rho in (0.5, 1.0, 2.0):
        s = ex.sympoly_order_indices(6, rho)
        assert s.sum() == pytest.approx(1.0, abs=1e-13)
        np.testing.assert_allclose(ex.sympoly_hdmr_orders(6, rho), s, atol=1e-8)
    summary = ex.sympoly_summary(100, 1.0)
    assert summary["mean"] == pytest.approx(100 / (2 - 2.0**-99), rel=1e-14)
    assert summary["mean_summed"] == pytest.approx(summary["mean"], rel=1e-10)
    with pytest.raises(DomainError):
        ex.sympoly_order_indices(3, 0.0)


def test_bernoulli_closed_forms():
    for p in (0.2, 0.7):
        cl = ex.bernoulli_closed(p)
        rep = ex.bernoulli_rm(p, Poisson(10.0))
        # cell a is the atom {0}, where f = p^2
        np.testing.assert_allclose(rep.first, [cl["orth_Sa"], cl["orth_Sb"]], rtol=1e-12)
        dirac = ex.bernoulli_rm(p, Dirac(10))
        assert dirac.first.sum() + dirac.cross.sum() == pytest.approx(1.0)
    with pytest.raises(DegenerateVarianceError):
        ex.bernoulli_rm(0.5, Dirac(10))


def test_ishigami_variance_independent():
    a, b = 7.0, 0.1
    var = a * a / 8 + b * math.pi**4 / 5 + b * b * math.pi**8 / 18 + 0.5
    cl = ex.ishigami_closed(a, b)
    assert cl["var"] == pytest.approx(var, rel=1e-12)
    assert cl["var"] == pytest.approx(13.8446, rel=1e-3)
    g = ex.ishigami(a, b)
    nu = ex.ishigami_measure()
    mean = integrate(nu, g, nodes=32)
    assert integrate(nu, lambda x: (g(x) - mean) ** 2, nodes=32) == pytest.approx(var, rel=1e-10)


def test_ishigami_densities_integrate_to_one():
    x = np.linspace(-math.pi, math.pi, 2001)
    for axis in range(3):
        assert sint.simpson(ex.ishigami_density(axis, x), x=x) == pytest.approx(1.0, abs=1e-8)


def test_corrpoly():
    rhos = np.linspace(-0.9, 0.9, 19)
    np.testing.assert_allclose(ex.corrpoly_closed(rhos)["index_total"], 1.0, atol=1e-12)
    for rho in (-0.5, 0.3):
        q = ex.corrpoly_quadrature(rho)
        cl = ex.corrpoly_closed(rho)
        assert q["var"] == pytest.approx(cl["var"], abs=1e-10)
        assert q["var"] == pytest.approx(3 + 2 * rho + rho * rho, abs=1e-10)
        assert q["reconstruction"] < 1e-10
    assert ex.corrpoly_extremum() == pytest.approx(-0.106, abs=1e-3)
    with pytest.raises(DomainError):
        ex.correlated_normal_rule(1.0)


def test_graph_gaps():
    gaps = ex.spectral_gap_table(4)
    assert gaps[0] == 0.0
    assert gaps[-1] == pytest.approx(4.0)
    # a single edge leaves the graph disconnected
    assert gaps[1] == pytest.approx(0.0, abs=1e-12)
    an = ex.graph_hdmr(0.5, n=4, table=gaps)
    assert sum(an.indices.values()) == pytest.approx(1.0, abs=1e-10)
    assert an.order_shares.sum() == pytest.approx(1.0, abs=1e-10)


def test_ising_closed_forms():
    model = ex.IsingModel(2, 2)
    g = model.magnetization()
    nu = ex.ising_measure()
    for gy in np.unique(g):
        assert integrate(nu, lambda x: ex.ising_kernel(x, gy)) == pytest.approx(ex.ising_nu_f(gy), abs=1e-12)
        for gz in np.unique(g):
            got = integrate(nu, lambda x: ex.ising_kernel(x, gy) * ex.ising_kernel(x, gz))
            assert got == pytest.approx(ex.ising_nu_ff(gy, gz), abs=1e-12)
    assert model.gibbs(0.0) == pytest.approx(np.full(16, 1 / 16))
    assert np.linalg.eigvalsh(ex.ising_cov(model, Poisson(50.0))).min() > -1e-9
