"""Uncertainty of regression and classification risk under a random measure.

The data-generating law is a joint measure on inputs and outputs whose
last coordinate is the output. The risk of a model is the mean of the
loss under that law, and the random measure M = (kappa, law) turns it
into a random variable M f with the usual moment formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..anova import SensitivityReport, anova_from_moments, entropy, rm_anova, sensitivity_density
from ..errors import ContractError, DegenerateVarianceError
from ..measure import Partition, as_argument, integrate
from ..stc import RandomMeasure


def squared_loss(g_theta: Callable) -> Callable:
    """f(x, y) = (y - g_theta(x))^2 with y the last coordinate."""

    def loss(z):
        z = np.asarray(z, float)
        if z.ndim != 2 or z.shape[1] < 2:
            raise ContractError("regression loss needs (input, output) points")
        pred = np.asarray(g_theta(as_argument(z[:, :-1])), float).reshape(-1)
        return (z[:, -1] - pred) ** 2

    return loss


@dataclass
class RiskReport:
    risk: float
    mean: float
    variance: float
    anova: SensitivityReport | None = None
    densities: dict = field(default_factory=dict)


def regression_risk(
    measure: RandomMeasure,
    g_theta: Callable,
    partition: Partition | None = None,
    density_axes: Sequence[Sequence[int]] = (),
    loss: Callable | None = None,
    nodes: int | None = None,
) -> RiskReport:
    """Risk mu f_theta, the moments of M f_theta and optional decompositions.

    ``loss`` overrides the squared loss; it receives full points. With
    ``density_axes`` the sensitivity densities over those coordinate
    groups are returned (orthogonal count laws only).
    """
    f = loss if loss is not None else squared_loss(g_theta)
    k = measure.kappa
    first = integrate(measure.nu, f, nodes=nodes)
    second = integrate(measure.nu, lambda z: np.asarray(f(z), float) ** 2, nodes=nodes)
    mean = k.mean * first
    var = k.mean * second + k.overdispersion * first * first
    report = RiskReport(first, mean, var)
    if partition is not None:
        report.anova = rm_anova(measure, f, partition, nodes=nodes)
    for axes in density_axes:
        axes = tuple(axes)
        report.densities[axes] = sensitivity_density(measure, f, axes, nodes=nodes)
    return report


@dataclass
class ClassificationReport:
    """Error decomposition of a classifier.

    ``false_pos[j]`` is the probability of predicting j wrongly and
    ``false_neg[j]`` of missing a true j. For two classes the indices
    split Var M f over the false-positive and false-negative cells;
    otherwise they are the per-class shares (FP_j + FN_j) / sum.
    """

    labels: tuple
    risk: float
    false_pos: np.ndarray
    false_neg: np.ndarray
    mean: float
    variance: float
    indices: np.ndarray
    anova: SensitivityReport

    @property
    def entropy(self) -> float:
        return entropy(self.indices)


def classification_risk(
    measure: RandomMeasure,
    g: Callable,
    labels: Sequence,
    nodes: int | None = None,
) -> ClassificationReport:
    """Misclassification risk P(y != g(x)) and its per-class structure."""
    labels = tuple(labels)
    if len(labels) < 2:
        raise ContractError("need at least two classes")
    pts, wts = measure.nu.quadrature(nodes)
    if pts.shape[1] < 2:
        raise ContractError("classification needs (input, label) points")
    pred = np.asarray(g(as_argument(pts[:, :-1])), float).reshape(-1)
    truth = pts[:, -1]
    wrong = pred != truth
    fp = np.array([wts @ (wrong & (pred == j)) for j in labels])
    fn = np.array([wts @ (wrong & (truth == j)) for j in labels])
    risk = float(wts @ wrong)
    k = measure.kappa
    mean = k.mean * risk
    var = k.mean * risk + k.overdispersion * risk * risk
    if not risk > 0:
        raise DegenerateVarianceError("classifier makes no errors; indices are undefined")
    if len(labels) == 2:
        # cells: predicted positive on a true negative, and the reverse
        cells = np.array([fp[1], fn[1]])
        anova = anova_from_moments(k, cells, cells, ("FP", "FN"))
        idx = cells / cells.sum()
    else:
        per_class = fp + fn
        anova = anova_from_moments(k, fp, fp, tuple(str(j) for j in labels))
        idx = per_class / per_class.sum()
    return ClassificationReport(labels, risk, fp, fn, mean, var, idx, anova)
