"""Variance decompositions driven by random measures.

``rm_anova`` splits Var Nf over the cells of a partition of the base
space. With an orthogonal count law (variance equal to mean) the cell
shares are non-negative and sum to one; otherwise cross-cell
covariances appear. ``hdmr_product`` builds the functional ANOVA
decomposition of a function of independent inputs on a tensor grid,
and ``mm_anova`` turns it into a random-measure decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .counting import CountingDistribution
from .errors import ContractError, DegenerateVarianceError, DomainError
from .measure import (
    MAX_TENSOR_POINTS,
    Discrete,
    Measure,
    Partition,
    Product,
    as_argument,
    integrate,
    restrict,
)
from .stc import RandomMeasure


def entropy(probs: Sequence[float], tol: float = 1e-9) -> float:
    """Shannon entropy in nats of a probability vector."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ContractError("entropy needs a probability vector")
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


@dataclass(frozen=True)
class SensitivityReport:
    """Cell-wise shares of Var Nf.

    ``first[d]`` is Var Nf_d / Var Nf and ``cross[d]`` the sum of the
    covariances of Nf_d with the other cells, over Var Nf. Together they
    sum to one. ``pairwise[i, j]`` holds the individual cross shares.
    """

    labels: tuple
    first: np.ndarray
    cross: np.ndarray
    pairwise: np.ndarray
    total_variance: float
    orthogonal: bool

    @property
    def entropy(self) -> float | None:
        if not self.orthogonal:
            return None
        return entropy(self.first)

    def as_rows(self):
        return [
            (lab, float(a), float(b))
            for lab, a, b in zip(self.labels, self.first, self.cross)
        ]


def _variance_floor(kappa, first, second) -> float:
    scale = abs(kappa.mean) * float(np.sum(np.abs(second))) + abs(kappa.overdispersion) * float(
        np.sum(np.abs(first))
    ) ** 2
    return 1e-13 * scale


def anova_from_moments(
    kappa: CountingDistribution,
    first: Sequence[float],
    second: Sequence[float],
    labels: Sequence[str] | None = None,
) -> SensitivityReport:
    """RM-ANOVA from the cell integrals nu(f 1_D) and nu(f^2 1_D)."""
    a = np.asarray(first, dtype=float)
    b = np.asarray(second, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractError("first and second cell moments must be matching vectors")
    c, over = kappa.mean, kappa.overdispersion
    cell_var = c * b + over * a * a
    pair = over * np.outer(a, a)
    np.fill_diagonal(pair, 0.0)
    total = float(cell_var.sum() + pair.sum())
    if not total > max(_variance_floor(kappa, a, b), 0.0):
        raise DegenerateVarianceError("Var Nf is zero; indices are undefined")
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(a.size))
    return SensitivityReport(
        labels,
        cell_var / total,
        pair.sum(axis=1) / total,
        pair / total,
        total,
        kappa.is_orthogonal,
    )


def cell_moments(nu: Measure, f: Callable, partition: Partition, **kw):
    """Vectors nu(f 1_D) and nu(f^2 1_D) over the cells D."""
    first, second = [], []
    sq = lambda x: np.asarray(f(x), float) ** 2  # noqa: E731
    for cell in partition.cells:
        sub, m = restrict(nu, cell)
        first.append(m * integrate(sub, f, **kw))
        second.append(m * integrate(sub, sq, **kw))
    return np.asarray(first), np.asarray(second)


def coordinate_cell_moments(
    nu: Measure,
    f: Callable,
    axis: int,
    edges: Sequence[float],
    cell_nodes: int = 8,
    nodes: int | None = None,
):
    """Cell moments for slabs ``edges[i] <= x_axis < edges[i+1]`` of a product measure.

    Each slab gets its own Gauss-Legendre rule on the chosen axis, weighted
    by that coordinate's density; the other axes use their quadrature.
    Much cheaper than restricting the full tensor grid once per cell.
    """
    comps = nu.components()
    if comps is None:
        raise ContractError("slab moments need a product measure")
    edges = np.asarray(edges, float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ContractError("edges must be strictly increasing")
    comp = comps[axis]
    if not hasattr(comp, "pdf"):
        raise ContractError("slab axis needs a density")
    z, w = np.polynomial.legendre.leggauss(cell_nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    ax_pts = (mid[:, None] + half[:, None] * z[None, :]).ravel()
    ax_wts = (half[:, None] * w[None, :]).ravel() * comp.pdf(ax_pts)
    rest = [c for i, c in enumerate(comps) if i != axis]
    if rest:
        r_pts, r_wts = Product(rest).quadrature(nodes)
    else:
        r_pts, r_wts = np.zeros((1, 0)), np.ones(1)
    dim = len(comps)
    full = np.empty((ax_pts.size, r_pts.shape[0], dim))
    full[:, :, axis] = ax_pts[:, None]
    others = [i for i in range(dim) if i != axis]
    for j, ax in enumerate(others):
        full[:, :, ax] = r_pts[None, :, j]
    vals = np.asarray(f(as_argument(full.reshape(-1, dim))), float).reshape(ax_pts.size, -1)
    inner1 = vals @ r_wts
    inner2 = (vals * vals) @ r_wts
    cells = edges.size - 1
    first = (ax_wts * inner1).reshape(cells, cell_nodes).sum(1)
    second = (ax_wts * inner2).reshape(cells, cell_nodes).sum(1)
    return first, second


def rm_anova(measure: RandomMeasure, f: Callable, partition: Partition, **kw) -> SensitivityReport:
    partition.validate(measure.nu, tol=1e-10)
    first, second = cell_moments(measure.nu, f, partition, **kw)
    return anova_from_moments(measure.kappa, first, second, partition.labels)


def _density_factor(comp, x):
    if isinstance(comp, Discrete):
        return comp.pmf(x)
    return comp.pdf(x)


@dataclass
class SensitivityDensity:
    """Marginal of nu(dx) f(x)^2 / nu(f^2) on a subset of coordinates.

    For continuous coordinates the values are Lebesgue densities; for
    finite coordinates they are probabilities.
    """

    axes: tuple
    components: list
    f: Callable
    normaliser: float
    nodes: int | None = None
    _rest: tuple = field(init=False, repr=False)

    def __post_init__(self):
        rest = [i for i in range(len(self.components)) if i not in self.axes]
        if rest:
            pts, wts = Product([self.components[i] for i in rest]).quadrature(self.nodes)
        else:
            pts, wts = np.zeros((1, 0)), np.ones(1)
        self._rest = (rest, pts, wts)

    def __call__(self, x) -> np.ndarray:
        rest, pts, wts = self._rest
        q = np.asarray(x, float).reshape(-1, len(self.axes))
        dim = len(self.components)
        out = np.empty(q.shape[0])
        chunk = max(1, 2_000_000 // max(pts.shape[0], 1))
        for start in range(0, q.shape[0], chunk):
            qq = q[start : start + chunk]
            full = np.empty((qq.shape[0], pts.shape[0], dim))
            for j, ax in enumerate(self.axes):
                full[:, :, ax] = qq[:, j : j + 1]
            for j, ax in enumerate(rest):
                full[:, :, ax] = pts[None, :, j]
            flat = full.reshape(-1, dim)
            vals = np.asarray(self.f(as_argument(flat)), float).reshape(qq.shape[0], -1) ** 2
            out[start : start + chunk] = vals @ wts
        dens = np.ones(q.shape[0])
        for j, ax in enumerate(self.axes):
            dens *= _density_factor(self.components[ax], q[:, j])
        return dens * out / self.normaliser


def sensitivity_density(
    measure: RandomMeasure, f: Callable, axes: Sequence[int], nodes: int | None = None
) -> SensitivityDensity:
    """Density of the variance share of Nf over the coordinates ``axes``."""
    if not measure.kappa.is_orthogonal:
        raise ContractError("sensitivity densities need an orthogonal count law")
    comps = measure.nu.components()
    if comps is None:
        raise ContractError("sensitivity densities need a product base measure")
    axes = tuple(int(a) for a in axes)
    if not axes or any(a < 0 or a >= len(comps) for a in axes):
        raise ContractError("axes out of range")
    norm = integrate(measure.nu, lambda x: np.asarray(f(x), float) ** 2, nodes=nodes)
    if not norm > 0:
        raise DegenerateVarianceError("nu(f^2) is zero")
    return SensitivityDensity(axes, comps, f, norm, nodes)


def _axis_rule(comp, nodes):
    pts, wts = comp.quadrature(nodes)
    return pts[:, 0], wts


class HdmrModel:
    """Functional ANOVA of g on a tensor grid of a product measure.

    ``components[u]`` stores g_u on the grid of the coordinates in ``u``;
    ``variances[u]`` its variance. Off-grid values are obtained by
    barycentric interpolation on continuous axes and lookup on finite ones.
    """

    def __init__(self, axes_nodes, axes_weights, finite, grid_values, max_order):
        self.nodes = axes_nodes
        self.weights = axes_weights
        self.finite = finite
        self.dim = len(axes_nodes)
        self.max_order = max_order
        self.components: dict[tuple, np.ndarray] = {}
        self.variances: dict[tuple, float] = {}
        self._build(grid_values)
        self._interp = {}

    def _mean_over(self, values, keep):
        out = values
        # contract axes from the last one so indices stay valid
        for ax in reversed(range(self.dim)):
            if ax not in keep:
                out = np.tensordot(out, self.weights[ax], axes=([ax], [0]))
        return out

    def _embed(self, arr, sub, sup):
        shape = [self.nodes[i].size if i in sub else 1 for i in sup]
        return arr.reshape(shape)

    def _build(self, grid):
        self.mean = float(self._mean_over(grid, ()))
        self.total_variance = float(self._mean_over((grid - self.mean) ** 2, ()))
        self.components[()] = np.asarray(self.mean)
        for order in range(1, self.max_order + 1):
            for u in itertools.combinations(range(self.dim), order):
                comp = np.array(self._mean_over(grid, u), dtype=float)
                for k in range(order):
                    for v in itertools.combinations(u, k):
                        comp = comp - self._embed(self.components[v], v, u)
                self.components[u] = comp
                w = self.weights[u[0]]
                for ax in u[1:]:
                    w = np.multiply.outer(w, self.weights[ax])
                self.variances[u] = float((w * comp * comp).sum())

    def indices(self) -> dict[tuple, float]:
        if not self.total_variance > 0:
            raise DegenerateVarianceError("Var g is zero; indices are undefined")
        return {u: v / self.total_variance for u, v in self.variances.items()}

    def inner(self, u: tuple, v: tuple) -> float:
        """<g_u, g_v> under the product measure."""
        both = tuple(sorted(set(u) | set(v)))
        a = self._embed(self.components[u], u, both)
        b = self._embed(self.components[v], v, both)
        prod = a * b
        w = np.ones(())
        for ax in both:
            w = np.multiply.outer(w, self.weights[ax])
        return float((w * prod).sum())

    def _basis(self, ax, x):
        x = np.asarray(x, float)
        if self.finite[ax]:
            idx = np.searchsorted(self.nodes[ax], x)
            idx = np.clip(idx, 0, self.nodes[ax].size - 1)
            if not np.allclose(self.nodes[ax][idx], x):
                raise DomainError("query outside the finite support")
            basis = np.zeros((x.size, self.nodes[ax].size))
            basis[np.arange(x.size), idx] = 1.0
            return basis
        if ax not in self._interp:
            self._interp[ax] = BarycentricInterpolator(self.nodes[ax], rng=0).wi
        # scipy shuffles nodes at random for the weights, hence rng=0; the
        # elementwise column sum avoids BLAS so evaluation is reproducible
        nodes, wi = self.nodes[ax], self._interp[ax]
        diff = x[:, None] - nodes[None, :]
        hit = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = wi[None, :] / diff
        exact = hit.any(axis=1)
        terms[exact] = hit[exact].astype(float)
        total = terms[:, 0].copy()
        for j in range(1, nodes.size):
            total += terms[:, j]
        return terms / total[:, None]

    def evaluate(self, u: tuple, x) -> np.ndarray:
        """g_u at points given as ``(n, len(u))`` coordinates of ``u``."""
        u = tuple(u)
        if u == ():
            return np.full(np.asarray(x).shape[0], self.mean)
        q = np.asarray(x, float).reshape(-1, len(u))
        out = self.components[u]
        letters = "abcdefghijklmnop"
        expr = letters[: len(u)]
        ops = [out] + [self._basis(ax, q[:, j]) for j, ax in enumerate(u)]
        spec = expr + "," + ",".join("z" + letters[j] for j in range(len(u))) + "->z"
        return np.einsum(spec, *ops)

    def reconstruct(self, x) -> np.ndarray:
        """Sum of all stored components at full points ``(n, dim)``."""
        q = np.asarray(x, float).reshape(-1, self.dim)
        total = np.full(q.shape[0], self.mean)
        for u in self.components:
            if u:
                total += self.evaluate(u, q[:, list(u)])
        return total


def hdmr_product(
    g: Callable,
    nu: Measure,
    max_order: int | None = None,
    nodes: int | Sequence[int] | None = None,
) -> HdmrModel:
    """Functional ANOVA of ``g`` under a product measure with quadrature factors."""
    comps = nu.components()
    if comps is None:
        raise ContractError("HDMR needs a product measure with independent coordinates")
    dim = len(comps)
    order = dim if max_order is None else int(max_order)
    if not 1 <= order <= dim:
        raise ContractError("max_order must lie in 1..dim")
    per_axis = list(nodes) if isinstance(nodes, (list, tuple)) else [nodes] * dim
    rules = [_axis_rule(c, n) for c, n in zip(comps, per_axis)]
    size = float(np.prod([r[0].size for r in rules]))
    if size > 4 * MAX_TENSOR_POINTS:
        raise ContractError("HDMR tensor grid too large; lower the nodes per axis")
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=1)
    vals = np.asarray(g(as_argument(pts)), float).reshape(grids[0].shape)
    finite = [isinstance(c, Discrete) for c in comps]
    return HdmrModel([r[0] for r in rules], [r[1] for r in rules], finite, vals, order)


@dataclass(frozen=True)
class MMAnova:
    """E Nf for f = (g - nu g)^2 split over ANOVA components of g."""

    total: float
    parts: dict
    indices: dict

    @property
    def entropy(self) -> float:
        return entropy(list(self.indices.values()), tol=1e-8)


def mm_anova(
    kappa: CountingDistribution,
    g: Callable,
    nu: Measure,
    nodes: int | Sequence[int] | None = None,
) -> MMAnova:
    model = hdmr_product(g, nu, None, nodes)
    idx = model.indices()
    c = kappa.mean
    return MMAnova(
        c * model.total_variance,
        {u: c * v for u, v in model.variances.items()},
        idx,
    )


def classifier_lift(g: Callable, labels: Sequence) -> list[Callable]:
    """Indicator functions x -> 1{g(x) = j}, one per label.

    Raises DomainError when g produces a value outside ``labels``.
    """
    labels = list(labels)
    known = np.asarray(labels, dtype=float)

    def make(j):
        def indicator(x):
            vals = np.asarray(g(x), float)
            if not np.all(np.isin(vals, known)):
                raise DomainError("classifier produced an unknown label")
            return (vals == j).astype(float)

        return indicator

    return [make(j) for j in labels]
