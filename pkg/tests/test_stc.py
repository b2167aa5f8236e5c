import numpy as np
import pytest

from rmuq.counting import Dirac, Poisson
from rmuq.errors import ContractError, DomainError
from rmuq.measure import Uniform
from rmuq.rng import stream_seed
from rmuq.stc import (
    BLOCK_SIZE,
    RandomMeasure,
    Realization,
    counting_process,
    empirical_laplace,
    realize_replicate,
    simulate_totals,
    summarize,
)

N = RandomMeasure(Poisson(4.0), Uniform(0.0, 1.0))


def test_realization_evaluate():
    r = Realization(np.array([[0.2], [0.5], [0.9]]))
    assert r.count == 3
    assert r.evaluate(lambda x: x) == pytest.approx(1.6)
    assert r.restrict(lambda x: x < 0.6).count == 2
    np.testing.assert_array_equal(r.counting_path([0.0, 0.5, 1.0]), [0, 2, 3])
    assert Realization(np.empty((0, 1))).evaluate(lambda x: x) == 0.0
    with pytest.raises(DomainError):
        r.evaluate(lambda x: x - 1.0)


def test_counting_process_is_monotone():
    real, path = counting_process(N, np.linspace(0, 1, 11), np.random.default_rng(1))
    assert path[-1] == real.count
    assert np.all(np.diff(path) >= 0)


def test_replicates_are_addressable():
    a = realize_replicate(N, 7, 3)
    b = realize_replicate(N, 7, 3)
    np.testing.assert_array_equal(a.points, b.points)
    assert stream_seed(7, 3) != stream_seed(7, 4)


def test_threads_do_not_change_draws():
    reps = 3 * BLOCK_SIZE + 17
    one = simulate_totals(N, [lambda x: x, lambda x: x**2], reps, 11, threads=1)
    two = simulate_totals(N, [lambda x: x, lambda x: x**2], reps, 11, threads=3)
    assert one.shape == (reps, 2)
    np.testing.assert_array_equal(one, two)


def test_dirac_total_count():
    d = simulate_totals(RandomMeasure(Dirac(5), Uniform(0, 1)), [lambda x: np.ones_like(x)], 100, 0)
    np.testing.assert_array_equal(d[:, 0], 5.0)


def test_summary_standard_errors():
    x = np.random.default_rng(0).normal(size=(40_000, 2))
    st = summarize(x)
    assert st.mean_se[0] == pytest.approx(1 / 200, rel=0.05)
    # Var of a sample variance of N(0,1) is 2/n
    assert st.cov_se[0, 0] == pytest.approx(np.sqrt(2 / 40_000), rel=0.25)
    assert st.var.shape == (2,)


def test_empirical_laplace():
    est, se = empirical_laplace(np.zeros(10), [0.5, 1.0])
    np.testing.assert_array_equal(est, 1.0)
    np.testing.assert_array_equal(se, 0.0)


def test_minimum_reps():
    with pytest.raises(ContractError):
        simulate_totals(N, [lambda x: x], 1, 0)
