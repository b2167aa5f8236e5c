"""Worked test functions with closed-form decompositions.

Each block pairs the closed forms of a classic test function with a
construction from the generic machinery (HDMR on tensor grids,
RM-ANOVA over partitions) so the two can be compared.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from ..anova import anova_from_moments, coordinate_cell_moments, entropy, hdmr_product, rm_anova
from ..counting import CountingDistribution
from ..errors import ContractError, DomainError
from ..measure import Product, Uniform, bernoulli, coordinate_partition, integrate
from ..stc import RandomMeasure

# ---------------------------------------------------------------- product monomial


def sympoly_order_indices(n: int, rho: float) -> np.ndarray:
    """Share of Var g carried by interaction order k = 1..n for g = prod x_i."""
    if n < 1 or rho == 0:
        raise DomainError("need n >= 1 and a non-zero coefficient of variation")
    k = np.arange(1, n + 1)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    growth = n * math.log1p(rho * rho)
    log_den = growth + math.log(-math.expm1(-growth))
    return np.exp(log_binom + 2 * k * math.log(abs(rho)) - log_den)


def sympoly_summary(n: int, rho: float) -> dict:
    """Mean, variance and entropy of the order distribution, closed form and summed."""
    s = sympoly_order_indices(n, rho)
    k = np.arange(1, n + 1)
    r2 = rho * rho
    q = (1 + r2) ** n - 1
    mean = n * r2 * (1 + r2) ** (n - 1) / q
    var = n * r2 * (1 + r2) ** (n - 2) * ((1 + r2) ** n - n * r2 - 1) / q**2
    return {
        "mean": mean,
        "var": var,
        "mean_summed": float(k @ s),
        "var_summed": float((k * k) @ s - (k @ s) ** 2),
        "entropy": entropy(s),
    }


def sympoly_measure(n: int, rho: float, mean: float = 1.0) -> Product:
    """iid uniforms with the given mean and coefficient of variation."""
    half = math.sqrt(3) * abs(rho) * mean
    return Product([Uniform(mean - half, mean + half) for _ in range(n)])


def sympoly_hdmr_orders(n: int, rho: float, mean: float = 1.0) -> np.ndarray:
    """Order shares of prod x_i from an HDMR built on a tensor grid."""
    nu = sympoly_measure(n, rho, mean)
    model = hdmr_product(lambda x: np.prod(np.atleast_2d(x), axis=1), nu, nodes=3)
    idx = model.indices()
    out = np.zeros(n)
    for u, v in idx.items():
        out[len(u) - 1] += v
    return out


# ---------------------------------------------------------------- Bernoulli monomial


def bernoulli_closed(p: float) -> dict:
    """Printed closed forms for g(x) = x, x ~ Bernoulli(p), cells {0} and {1}."""
    q = 1 - p
    out = {
        "nu_fa2": p**4 * q,
        "nu_fb2": q**4 * p,
        "nu_f2": p**4 * q + q**4 * p,
        "orth_Sa": p**3 / (3 * p * p - 3 * p + 1),
        "orth_Sb": q**3 / (3 * p * p - 3 * p + 1),
        "nu_fa": p * p * q,
        "nu_fb": q * q * p,
        "var_fa": p**5 * q,
        "var_fb": q**5 * p,
        "var_f": p * q * (1 - 2 * p) ** 2,
    }
    out["orth_H"] = entropy([out["orth_Sa"], out["orth_Sb"]])
    if p != 0.5:
        d = (1 - 2 * p) ** 2
        out.update({"dirac_Sa": p**4 / d, "dirac_Sb": q**4 / d, "dirac_Sab": -p * p * q * q / d})
    return out


def bernoulli_rm(p: float, kappa: CountingDistribution):
    """RM-ANOVA of f = (x - p)^2 over the atoms of Bernoulli(p)."""
    nu = bernoulli(p)
    f = lambda x: (np.asarray(x, float) - p) ** 2  # noqa: E731
    part = coordinate_partition([-0.5], [1.5], 0, 2)
    return rm_anova(RandomMeasure(kappa, nu), f, part)


# ---------------------------------------------------------------- Ishigami


def ishigami(a: float = 7.0, b: float = 0.1):
    def g(x):
        x = np.atleast_2d(x)
        return np.sin(x[:, 0]) + a * np.sin(x[:, 1]) ** 2 + b * x[:, 2] ** 4 * np.sin(x[:, 0])

    return g


def ishigami_measure() -> Product:
    return Product([Uniform(-math.pi, math.pi) for _ in range(3)])


def ishigami_closed(a: float = 7.0, b: float = 0.1) -> dict:
    pi4 = math.pi**4
    den = 45 * a * a + 20 * math.pi**8 * b * b + 72 * pi4 * b + 180
    return {
        "mean": a / 2,
        "var": a * a / 8 + math.pi**8 * b * b / 18 + pi4 * b / 5 + 0.5,
        "var_1": (pi4 * b + 5) ** 2 / 50,
        "var_2": a * a / 8,
        "var_13": 8 * math.pi**8 * b * b / 225,
        "S_1": 36 * (pi4 * b + 5) ** 2 / (5 * den),
        "S_2": 45 * a * a / den,
        "S_13": 64 * math.pi**8 * b * b / (5 * den),
        "nu_f2": (
            math.pi**8 * (a * a + 6) * b * b / 24
            + 3 * pi4 * (a * a + 2) * b / 20
            + 3 * (a**4 + 16 * a * a + 16) / 128
            + 3 * math.pi**16 * b**4 / 136
            + 3 * math.pi**12 * b**3 / 26
        ),
    }


def ishigami_components(a: float = 7.0, b: float = 0.1) -> dict:
    pi4 = math.pi**4
    return {
        (0,): lambda x1: (1 + b * pi4 / 5) * np.sin(x1),
        (1,): lambda x2: -a / 2 * np.cos(2 * x2),
        (0, 2): lambda x1, x3: b * (x3**4 - pi4 / 5) * np.sin(x1),
    }


def ishigami_density(axis: int, x, a: float = 7.0, b: float = 0.1) -> np.ndarray:
    """Printed sensitivity density of f = (g - E g)^2 along one coordinate."""
    x = np.asarray(x, float)
    pi = math.pi
    xi = 2 * pi * ishigami_closed(a, b)["nu_f2"]
    mix = a * a * (5 * pi**8 * b * b + 18 * pi**4 * b + 45) / 60
    tail = 3 * pi**16 * b**4 / 136 + 3 * pi**12 * b**3 / 26 + pi**8 * b * b / 4 + 3 * pi**4 * b / 10 + 3 / 8
    if axis == 0:
        gam = pi**16 * b**4 / 17 + 4 * pi**12 * b**3 / 13 + 2 * pi**8 * b * b / 3 + 4 * pi**4 * b / 5 + 1
        s2 = np.sin(x) ** 2
        val = 3 * a**4 / 128 + mix * s2 + gam * s2 * s2
    elif axis == 1:
        c2 = np.cos(2 * x) ** 2
        val = tail + mix * c2 + a**4 / 16 * c2 * c2
    elif axis == 2:
        q = b * x**4 + 1
        val = 3 / 128 * (a**4 + 16 * (a * q) ** 2 + 16 * q**4)
    else:
        raise ContractError("Ishigami has three coordinates")
    return val / xi


def ishigami_loss(a: float = 7.0, b: float = 0.1):
    g = ishigami(a, b)
    return lambda x: (g(x) - a / 2) ** 2


def ishigami_profiles(
    a: float, b: float, kappa: CountingDistribution, bins: int = 100, nodes: int = 40
) -> list:
    """Per-coordinate slab moments and RM-ANOVA reports for f = (g - a/2)^2."""
    nu = ishigami_measure()
    f = ishigami_loss(a, b)
    edges = np.linspace(-math.pi, math.pi, bins + 1)
    out = []
    for axis in range(3):
        first, second = coordinate_cell_moments(nu, f, axis, edges, nodes=nodes)
        out.append((first, second, anova_from_moments(kappa, first, second)))
    return out


# ---------------------------------------------------------------- correlated polynomial


def corrpoly(x):
    x = np.atleast_2d(x)
    return 1 + x[:, 0] + x[:, 1] + x[:, 0] * x[:, 1]


def corrpoly_components(rho: float) -> dict:
    r = rho
    lin = r / (r * r + 1)
    return {
        (0,): lambda x1, x2: x1 + lin * (x1 * x1 - 1),
        (1,): lambda x1, x2: x2 + lin * (x2 * x2 - 1),
        (0, 1): lambda x1, x2: (r * r * x1 * x2 - r * (x1 * x1 + x2 * x2 - 1) + x1 * x2 - r**3) / (r * r + 1),
    }


def corrpoly_closed(rho) -> dict:
    r = np.asarray(rho, float)
    d = (r * r + 1) ** 2
    total = 3 + r * (r + 2)
    out = {
        "mean": 1 + r,
        "var": total,
        "var_printed": 3 + 2 * (r + 1),
        "var_1": (r**4 + 4 * r * r + 1) / d,
        "cov_12": r * (r * r * (r * (r + 2) + 2) + 1) / d,
        "var_12": (1 - r * r) ** 2 / (r * r + 1),
        "S_1a": (r**4 + 4 * r * r + 1) / (d * total),
        "S_1b": r * (r * r * (r * (r + 2) + 2) + 1) / (d * total),
        "S_12a": (1 - r * r) ** 2 / ((r * r + 1) * total),
        "ED": 2 * (r**4 + r**3 + r * r + r + 2) / ((r * r + 1) * total),
        "nu_f2": 3 * r * (r * (3 * r * (r + 4) + 46) + 36) + 57,
    }
    out["index_total"] = 2 * out["S_1a"] + 2 * out["S_1b"] + out["S_12a"]
    return out


def correlated_normal_rule(rho: float, nodes: int = 40):
    """Gauss-Hermite points (n, 2) and weights for N(0, [[1, rho], [rho, 1]])."""
    if not -1 < rho < 1:
        raise DomainError("correlation must lie in (-1, 1)")
    z, w = hermegauss(nodes)
    w = w / w.sum()
    z1, z2 = np.meshgrid(z, z, indexing="ij")
    x1 = z1.ravel()
    x2 = rho * x1 + math.sqrt(1 - rho * rho) * z2.ravel()
    return np.stack([x1, x2], axis=1), np.outer(w, w).ravel()


def corrpoly_quadrature(rho: float, nodes: int = 40) -> dict:
    """Moments of g and of the printed components by 2-D Gauss-Hermite."""
    pts, w = correlated_normal_rule(rho, nodes)
    x1, x2 = pts[:, 0], pts[:, 1]
    comps = {u: fn(x1, x2) for u, fn in corrpoly_components(rho).items()}
    g = corrpoly(pts)
    mean = w @ g
    c1, c2, c12 = comps[(0,)], comps[(1,)], comps[(0, 1)]
    return {
        "mean": mean,
        "var": w @ (g - mean) ** 2,
        "var_1": w @ (c1 * c1),
        "cov_12": w @ (c1 * c2),
        "var_12": w @ (c12 * c12),
        "cov_12_1": w @ (c12 * c1),
        "nu_f2": w @ (g - mean) ** 4,
        "reconstruction": float(np.max(np.abs(mean + c1 + c2 + c12 - g))),
    }


def corrpoly_extremum(low: float = -0.5, high: float = 0.3, points: int = 8001) -> float:
    """Location of the interior extremum of the interaction share S_12."""
    grid = np.linspace(low, high, points)
    vals = corrpoly_closed(grid)["S_12a"]
    turn = np.where(np.diff(np.sign(np.diff(vals))) != 0)[0]
    if turn.size == 0:
        raise DomainError("no interior extremum on the grid")
    i = int(turn[0]) + 1
    sign = 1.0 if vals[i] < vals[i - 1] else -1.0
    res = minimize_scalar(
        lambda r: sign * float(corrpoly_closed(r)["S_12a"]),
        bounds=(grid[i - 1], grid[i + 1]),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x)


def corrpoly_coordinate_density(rho: float, axis: int, x, nodes: int = 60) -> np.ndarray:
    """Marginal density of nu(dx) f^2 / nu f^2 along one coordinate."""
    x = np.asarray(x, float)
    z, w = hermegauss(nodes)
    w = w / w.sum()
    other = rho * x[:, None] + math.sqrt(1 - rho * rho) * z[None, :]
    pair = (x[:, None], other) if axis == 0 else (other, x[:, None])
    g = 1 + pair[0] + pair[1] + pair[0] * pair[1]
    f2 = (g - (1 + rho)) ** 4
    phi = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    return phi * (f2 @ w) / corrpoly_closed(rho)["nu_f2"]


# ---------------------------------------------------------------- graph spectral gap


def graph_edges(n: int) -> list:
    return list(itertools.combinations(range(n), 2))


def spectral_gap_table(n: int = 5) -> np.ndarray:
    """Second-smallest Laplacian eigenvalue of every graph on n labelled vertices.

    Entry i corresponds to the edge indicator vector given by the bits of
    i (edge j present when bit j is set); the empty graph maps to 0.
    """
    edges = graph_edges(n)
    m = len(edges)
    states = (np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1
    lap = np.zeros((2**m, n, n))
    for j, (u, v) in enumerate(edges):
        on = states[:, j].astype(float)
        lap[:, u, u] += on
        lap[:, v, v] += on
        lap[:, u, v] -= on
        lap[:, v, u] -= on
    gaps = np.linalg.eigvalsh(lap)[:, 1]
    gaps = np.where(np.abs(gaps) < 1e-12, 0.0, gaps)
    gaps[0] = 0.0
    return gaps


def graph_function(table: np.ndarray):
    m = int(round(math.log2(table.size)))
    powers = 2 ** np.arange(m)

    def g(x):
        x = np.atleast_2d(np.asarray(x, float))
        return table[(np.rint(x).astype(np.int64) @ powers)]

    return g


def graph_measure(n: int, p: float) -> Product:
    return Product([bernoulli(p) for _ in range(n * (n - 1) // 2)])


@dataclass
class GraphAnalysis:
    p: float
    mean: float
    variance: float
    indices: dict
    entropy: float
    order_shares: np.ndarray


def graph_hdmr(p: float, n: int = 5, table: np.ndarray | None = None) -> GraphAnalysis:
    """Exact HDMR of the spectral gap over the edge-indicator cube."""
    table = spectral_gap_table(n) if table is None else table
    nu = graph_measure(n, p)
    model = hdmr_product(graph_function(table), nu)
    idx = model.indices()
    orders = np.zeros(nu.dim)
    for u, v in idx.items():
        orders[len(u) - 1] += v
    return GraphAnalysis(p, model.mean, model.total_variance, idx, entropy(list(idx.values()), tol=1e-8), orders)


def graph_rm(p: float, kappa: CountingDistribution, axis: int = 0, n: int = 5, table=None):
    """RM-ANOVA of f = (g - E g)^2 over the cells {x_axis = 0}, {x_axis = 1}."""
    table = spectral_gap_table(n) if table is None else table
    nu = graph_measure(n, p)
    g = graph_function(table)
    mean = integrate(nu, g)
    f = lambda x: (g(x) - mean) ** 2  # noqa: E731
    m = nu.dim
    part = coordinate_partition([-0.5] * m, [1.5] * m, axis, 2)
    return rm_anova(RandomMeasure(kappa, nu), f, part)


# ---------------------------------------------------------------- Ising field


def lattice_edges(rows: int, cols: int) -> list:
    """Nearest-neighbour bonds of a free-boundary lattice."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return edges


@dataclass
class IsingModel:
    rows: int = 2
    cols: int = 2

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.rows * self.cols > 16:
            raise ContractError("lattice must have between 1 and 16 sites")
        n = self.rows * self.cols
        self.sites = n
        self.states = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1)
        self.edges = lattice_edges(self.rows, self.cols)

    def energy(self) -> np.ndarray:
        s = self.states
        return -sum(s[:, i] * s[:, j] for i, j in self.edges).astype(float)

    def gibbs(self, beta: float) -> np.ndarray:
        logw = -beta * self.energy()
        logw -= logw.max()
        w = np.exp(logw)
        return w / w.sum()

    def magnetization(self) -> np.ndarray:
        return self.states.mean(axis=1)


def ising_nu_f(g) -> np.ndarray:
    g = np.asarray(g, float)
    return g * g + 1 / 3


def ising_nu_ff(gy, gz) -> np.ndarray:
    gy, gz = np.asarray(gy, float), np.asarray(gz, float)
    return (5 * gy * gy * (3 * gz * gz + 1) + 20 * gy * gz + 5 * gz * gz + 3) / 15


def ising_kernel(x, gy):
    """k(x, y) = (x - g(y))^2 with g(y) the magnetization of y."""
    return (np.asarray(x, float) - gy) ** 2


def ising_cov(model: IsingModel, kappa: CountingDistribution) -> np.ndarray:
    g = model.magnetization()
    gy, gz = np.meshgrid(g, g, indexing="ij")
    return kappa.mean * ising_nu_ff(gy, gz) + kappa.overdispersion * np.outer(ising_nu_f(g), ising_nu_f(g))


def ising_averaged(model: IsingModel, beta: float):
    """f_beta(x) = sum over spin states of lambda_beta(y) k(x, y)."""
    lam = model.gibbs(beta)
    g = model.magnetization()

    def f(x):
        x = np.asarray(x, float).reshape(-1)
        return ((x[:, None] - g[None, :]) ** 2) @ lam

    return f


def ising_measure() -> Uniform:
    return Uniform(-1.0, 1.0)
