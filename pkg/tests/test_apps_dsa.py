import math

import numpy as np
import pytest

from rmuq.apps.dsa import (
    DsaParams,
    dsa_solve,
    dsa_uq,
    final_size,
    final_size_lambert,
    final_size_residual,
    series_moments,
    solve_full,
    solve_reduced,
    window_indices,
    window_indices_closed,
)
from rmuq.errors import ContractError, DomainError

P = DsaParams(beta=0.5, gamma=1.5, rho=1e-3, kappa=1.0, mu=8.0)


def test_r0_and_final_size():
    assert P.r0 == pytest.approx(2.0)
    tau = final_size(P)
    assert abs(final_size_residual(P, tau)) < 1e-14
    assert final_size_lambert(P) == pytest.approx(1 - tau, abs=1e-10)
    # classical final-size relation S_inf = exp(-R0 (1 - S_inf + rho))
    s = 1 - tau
    assert s == pytest.approx(math.exp(-P.r0 * (1 - s + P.rho)), abs=1e-12)


def test_non_poisson_final_size():
    q = DsaParams(beta=0.5, gamma=1.5, rho=1e-3, kappa=1.3, mu=8.0)
    tau = final_size(q)
    assert abs(final_size_residual(q, tau)) < 1e-12
    long = solve_reduced(q, [400.0])[0]
    assert long == pytest.approx(1 - tau, abs=1e-6)
    with pytest.raises(ContractError):
        final_size_lambert(q)


def test_reduced_matches_full():
    t = np.linspace(0, 30, 31)
    np.testing.assert_allclose(solve_reduced(P, t), solve_full(P, t)[:, 0], atol=1e-8)


def test_window_identity_and_n_invariance():
    sol = dsa_solve(P, [5.0, 10.0, 20.0])
    for tt in sol.tau:
        closed = window_indices_closed(tt, sol.tau_inf)
        assert closed["S_a^a"] + closed["S_b^a"] + 2 * closed["S^b"] == pytest.approx(1.0, abs=1e-12)
        a = window_indices(tt, sol.tau_inf, 1000)
        b = window_indices(tt, sol.tau_inf, 10**6)
        np.testing.assert_allclose(a.first, b.first, atol=1e-12)
        np.testing.assert_allclose(a.first, [closed["S_a^a"], closed["S_b^a"]], atol=1e-12)


def test_series_and_population():
    sol = dsa_solve(P, [10.0])
    m, v = series_moments(sol, lambda t: np.ones_like(t), 1000)
    assert m == pytest.approx(1000 * sol.tau_inf, rel=1e-6)
    assert v == pytest.approx(1000 * sol.tau_inf * (1 - sol.tau_inf), rel=1e-5)
    out = dsa_uq(sol, 0, k_t=50)
    assert out["population"]["n"] == pytest.approx(50 / sol.tau[0])
    with pytest.raises(ContractError):
        dsa_uq(sol, 0)


def test_parameter_checks():
    with pytest.raises(DomainError):
        DsaParams(beta=0.5, gamma=1.5, rho=0.0)
    with pytest.raises(DomainError):
        DsaParams(beta=-1, gamma=1.5, rho=0.1)
