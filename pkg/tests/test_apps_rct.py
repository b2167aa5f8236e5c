import math

import numpy as np
import pytest

from rmuq.apps.rct import (
    ArmLaw,
    efficacy_entropy,
    plan_stage_one,
    preset_design,
    rct_adapt,
    rct_analyze,
    restricted_indices,
    simulate_adaptive,
    two_proportion_size,
)
from rmuq.counting import Dirac, OrthogonalDie, Poisson
from rmuq.errors import ContractError, DegenerateVarianceError, DomainError


def binary_entropy(p):
    return -(p * math.log(p) + (1 - p) * math.log(1 - p))


def test_preset_entropies():
    assert efficacy_entropy(5, 90) == pytest.approx(binary_entropy(5 / 95), rel=1e-14)
    assert efficacy_entropy(5, 90) == pytest.approx(0.206, abs=1e-3)
    assert efficacy_entropy(8, 162) == pytest.approx(0.190, abs=1e-3)
    d = preset_design("moderna")
    an = rct_analyze(d.kappa, d.treatment, d.control)
    assert an.orthogonal
    assert an.covariance == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ContractError):
        preset_design("unknown")


def test_dirac_correlation():
    t, c = ArmLaw.infection(0.1), ArmLaw.infection(0.2)
    an = rct_analyze(Dirac(1000), t, c)
    assert an.covariance == pytest.approx(-1000 * 0.05 * 0.1)
    assert not an.orthogonal
    with pytest.raises(DegenerateVarianceError):
        rct_analyze(Poisson(10.0), ArmLaw(0, 0), ArmLaw(0, 0))


def test_sample_size():
    n = two_proportion_size(0.6, 0.5)
    assert n % 2 == 0
    assert 700 < n < 900
    assert two_proportion_size(0.7, 0.5) < n
    with pytest.raises(DomainError):
        two_proportion_size(0.5, 0.5)


def test_adaptation():
    stage_one = OrthogonalDie(5, 15)
    done = rct_adapt(stage_one, 20, 10)
    assert done.die is None and done.kappa is stage_one
    more = rct_adapt(stage_one, 10, 14.5)
    assert more.die.low >= 5
    assert more.kappa.is_orthogonal
    assert plan_stage_one(100).low >= 50
    run = simulate_adaptive(0.3, 0.6, 80, np.random.default_rng(0))
    assert run.total >= min(run.required, run.stage_one_size)


def test_restricted_indices():
    out = restricted_indices([0.1, 0.2], [0.3, 0.2])
    np.testing.assert_allclose(out.sum(axis=1), 1.0)
    np.testing.assert_allclose(out[1], [0.5, 0.5])
