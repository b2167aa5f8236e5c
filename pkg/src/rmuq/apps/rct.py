"""Randomized controlled trials as random measures on {treatment, control}.

Each enrollee lands in either arm with probability 1/2 and yields a
non-negative measurement. With an orthogonal count law the arm totals
are uncorrelated and their normalised variances form a two-point
sensitivity distribution. Adaptive designs superpose independent
orthogonal dice, which stays orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from ..anova import anova_from_moments, entropy
from ..counting import CountingDistribution, DieEntry, Superposition, first_die_at_least
from ..errors import ContractError, DegenerateVarianceError, DomainError


def two_proportion_size(p_treat: float, p_control: float, alpha: float = 0.05, power: float = 0.8) -> int:
    """Total enrolment for a two-sided two-proportion z-test with equal arms."""
    if not (0 < p_treat < 1 and 0 < p_control < 1) or p_treat == p_control:
        raise DomainError("need distinct rates in (0, 1)")
    za = norm.ppf(1 - alpha / 2)
    zb = norm.ppf(power)
    pbar = 0.5 * (p_treat + p_control)
    num = za * math.sqrt(2 * pbar * (1 - pbar)) + zb * math.sqrt(
        p_treat * (1 - p_treat) + p_control * (1 - p_control)
    )
    per_arm = math.ceil((num / (p_treat - p_control)) ** 2)
    return 2 * per_arm


@dataclass(frozen=True)
class ArmLaw:
    """Mean and variance of the measurement in one arm."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.mean < 0 or self.variance < 0:
            raise DomainError("arm mean and variance must be non-negative")

    @classmethod
    def infection(cls, prob: float) -> "ArmLaw":
        """Indicator of infection with probability ``prob``."""
        if not 0 <= prob <= 1:
            raise DomainError("infection probability must lie in [0, 1]")
        return cls(prob, prob * (1 - prob))

    @property
    def second_moment(self) -> float:
        return self.mean**2 + self.variance


@dataclass
class RctDesign:
    stage_one: CountingDistribution
    treatment: ArmLaw
    control: ArmLaw
    stage_two: CountingDistribution | None = None
    power_analysis: Callable = two_proportion_size

    @property
    def kappa(self) -> CountingDistribution:
        if self.stage_two is None:
            return self.stage_one
        return Superposition((self.stage_one, self.stage_two))


@dataclass(frozen=True)
class RctAnalysis:
    mean_treatment: float
    mean_control: float
    var_treatment: float
    var_control: float
    covariance: float
    index_treatment: float
    index_control: float
    orthogonal: bool

    @property
    def entropy(self) -> float:
        return entropy([self.index_treatment, self.index_control])


def rct_analyze(kappa: CountingDistribution, treatment: ArmLaw, control: ArmLaw) -> RctAnalysis:
    """Arm means, variances, covariance and sensitivity indices.

    The indices are the structural shares of Var M(f_T + f_C); for an
    orthogonal law they reduce to the arm second moments over their sum.
    """
    first = [treatment.mean / 2, control.mean / 2]
    second = [treatment.second_moment / 2, control.second_moment / 2]
    if sum(second) == 0:
        raise DegenerateVarianceError("both arms have zero measurements")
    c, over = kappa.mean, kappa.overdispersion
    rep = anova_from_moments(kappa, first, second, ("T", "C"))
    if kappa.is_orthogonal:
        idx_t, idx_c = float(rep.first[0]), float(rep.first[1])
    else:
        total = sum(second)
        idx_t, idx_c = second[0] / total, second[1] / total
    return RctAnalysis(
        c * first[0],
        c * first[1],
        c * second[0] + over * first[0] ** 2,
        c * second[1] + over * first[1] ** 2,
        over * first[0] * first[1],
        idx_t,
        idx_c,
        kappa.is_orthogonal,
    )


def efficacy_indices(events_treatment: float, events_control: float) -> tuple[float, float]:
    """(S_T, S_C) = P(T), P(C) normalised; equal arm sizes cancel."""
    total = events_treatment + events_control
    if not total > 0:
        raise DegenerateVarianceError("no events in either arm")
    return events_treatment / total, events_control / total


def efficacy_entropy(events_treatment: float, events_control: float) -> float:
    return entropy(efficacy_indices(events_treatment, events_control))


def restricted_indices(p_treatment: Sequence[float], p_control: Sequence[float]) -> np.ndarray:
    """Per-stratum (S_T, S_C) from stratum infection rates; one row per stratum."""
    pt = np.asarray(p_treatment, float)
    pc = np.asarray(p_control, float)
    tot = pt + pc
    if np.any(tot <= 0):
        raise DegenerateVarianceError("a stratum has no events")
    return np.stack([pt / tot, pc / tot], axis=1)


@dataclass(frozen=True)
class TrialPreset:
    name: str
    enrolled: int
    events_treatment: int
    events_control: int
    entropy_target: float


PRESETS = {
    "moderna": TrialPreset("moderna", 30400, 5, 90, 0.206),
    "pfizer": TrialPreset("pfizer", 44000, 8, 162, 0.190),
}


def preset_design(name: str, kappa: CountingDistribution | None = None) -> RctDesign:
    """Design with arm infection rates implied by a preset's event counts."""
    if name not in PRESETS:
        raise ContractError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    p = PRESETS[name]
    arm = p.enrolled / 2
    if kappa is None:
        kappa = first_die_at_least(p.enrolled).distribution()
    return RctDesign(
        kappa, ArmLaw.infection(p.events_treatment / arm), ArmLaw.infection(p.events_control / arm)
    )


@dataclass(frozen=True)
class StageTwo:
    """Second-stage decision; ``die`` is None when no enrolment is needed."""

    shortfall: int
    die: DieEntry | None
    kappa: CountingDistribution = field(repr=False)


def rct_adapt(stage_one: CountingDistribution, enrolled: int, required: float) -> StageTwo:
    """Pick the first orthogonal die whose lower face covers the shortfall.

    When ``required <= enrolled`` the trial is already powered and no
    second stage is run.
    """
    if enrolled < 0:
        raise DomainError("stage-one enrolment must be non-negative")
    shortfall = int(math.ceil(required - enrolled))
    if shortfall <= 0:
        return StageTwo(0, None, stage_one)
    die = first_die_at_least(shortfall)
    return StageTwo(shortfall, die, Superposition((stage_one, die.distribution())))


def plan_stage_one(initial_size: float, fraction: float = 0.5) -> DieEntry:
    """First orthogonal die with lower face at least ``fraction * initial_size``."""
    if not 0 < fraction <= 1:
        raise DomainError("fraction must lie in (0, 1]")
    return first_die_at_least(int(math.ceil(fraction * initial_size)))


@dataclass(frozen=True)
class AdaptiveRun:
    stage_one_size: int
    events: tuple
    required: int
    stage_two: StageTwo
    stage_two_size: int

    @property
    def total(self) -> int:
        return self.stage_one_size + self.stage_two_size


def simulate_adaptive(
    p_treatment: float,
    p_control: float,
    initial_size: float,
    rng: np.random.Generator,
    fraction: float = 0.5,
    power_analysis: Callable = two_proportion_size,
) -> AdaptiveRun:
    """One two-stage trial: stage-one die, interim power analysis, stage-two die."""
    k1 = int(plan_stage_one(initial_size, fraction).distribution().sample(rng))
    arms = rng.binomial(k1, 0.5)
    ev_t = int(rng.binomial(arms, p_treatment))
    ev_c = int(rng.binomial(k1 - arms, p_control))
    rate_t = (ev_t + 0.5) / (arms + 1.0)
    rate_c = (ev_c + 0.5) / (k1 - arms + 1.0)
    try:
        required = power_analysis(rate_t, rate_c)
    except DomainError:
        required = k1
    decision = rct_adapt(plan_stage_one(initial_size, fraction).distribution(), k1, required)
    k2 = 0 if decision.die is None else int(decision.die.distribution().sample(rng))
    return AdaptiveRun(k1, (ev_t, ev_c), int(required), decision, k2)
