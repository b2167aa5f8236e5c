"""Dynamic survival analysis of an SIR epidemic on a configuration network.

The susceptible fraction S_t is read as an improper survival function:
infection times of the eventually infected form the probability law
nu(dt) = -S'_t dt / tau_inf, and a binomial random measure with
Binomial(n, tau_inf) individuals carries the uncertainty of counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq
from scipy.special import lambertw

from ..anova import SensitivityReport, anova_from_moments
from ..counting import Binomial
from ..errors import ContractError, ConvergenceError, DegenerateVarianceError, DomainError

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class DsaParams:
    """Infection, recovery and drop rates, initial infected fraction and network shape."""

    beta: float
    gamma: float
    rho: float
    kappa: float = 1.0
    mu: float = 4.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("beta", "gamma", "kappa", "mu"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.delta < 0:
            raise DomainError("delta must be non-negative")
        if not 0 < self.rho < 1:
            raise DomainError("rho must lie in (0, 1)")

    @property
    def a(self) -> float:
        return self.beta + self.gamma + self.delta

    @property
    def b(self) -> float:
        return self.beta * self.mu

    @property
    def c(self) -> float:
        return self.beta * self.mu * self.rho

    @property
    def r0(self) -> float:
        return self.kappa * self.b / self.a


def infection_rate(p: DsaParams, s: float) -> float:
    """-dS/dt of the reduced one-equation system."""
    if s <= 0:
        return 0.0
    k = p.kappa
    if k == 1.0:
        return p.a * s * math.log(s) + p.b * (s - s * s) + p.c * s
    sk = s**k
    return p.a / (1 - k) * (s - sk) + p.b * (1 - sk) * sk + p.c * sk


def _rk4_scalar(rate: Callable, s0: float, times: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty(times.size)
    s = s0
    t_prev = 0.0
    for i, t in enumerate(times):
        span = t - t_prev
        steps = max(1, math.ceil(span / dt - 1e-9)) if span > 0 else 0
        if steps:
            h = span / steps
            for _ in range(steps):
                k1 = -rate(s)
                k2 = -rate(s + 0.5 * h * k1)
                k3 = -rate(s + 0.5 * h * k2)
                k4 = -rate(s + h * k3)
                s += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        out[i] = s
        t_prev = t
    return out


def solve_reduced(p: DsaParams, times: Sequence[float], dt: float = DEFAULT_STEP) -> np.ndarray:
    """S_t on ``times`` (non-decreasing, starting at or after 0) by RK4."""
    t = np.asarray(times, float)
    if t.ndim != 1 or np.any(np.diff(t) < 0) or (t.size and t[0] < 0):
        raise ContractError("times must be a non-decreasing grid on the half-line")
    return _rk4_scalar(lambda s: infection_rate(p, s), 1.0, t, dt)


def solve_full(p: DsaParams, times: Sequence[float], dt: float = DEFAULT_STEP) -> np.ndarray:
    """(S, I, D) on ``times`` from the three-equation system; rows are times."""
    t = np.asarray(times, float)
    beta, gam, k, mu = p.beta, p.gamma, p.kappa, p.mu

    def rhs(y):
        s, i, d = y
        ds = -beta * d * s
        di = beta * d * s - gam * i
        dd = beta * (1 - k) * d * d + (k * mu * beta * s ** (2 * k - 1) - p.a) * d
        return np.array([ds, di, dd])

    y = np.array([1.0, p.rho, mu * p.rho])
    out = np.empty((t.size, 3))
    t_prev = 0.0
    for n, tn in enumerate(t):
        span = tn - t_prev
        steps = max(1, math.ceil(span / dt - 1e-9)) if span > 0 else 0
        if steps:
            h = span / steps
            for _ in range(steps):
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * h * k1)
                k3 = rhs(y + 0.5 * h * k2)
                k4 = rhs(y + h * k3)
                y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        out[n] = y
        t_prev = tn
    return out


def final_size_residual(p: DsaParams, tau: float) -> float:
    """Residual of the final-size equation at tau (zero at tau_inf)."""
    s = 1.0 - tau
    k = p.kappa
    if k == 1.0:
        return tau - 1.0 + math.exp(-p.r0 * (tau + p.rho))
    return k / (k - 1) * (s ** (1 - k) - 1) - p.r0 * ((1 + p.rho) - s**k)


def final_size(p: DsaParams, scan: int = 4000) -> float:
    """tau_inf: the first root of the final-size equation below S = 1.

    The susceptible fraction decreases from 1 and stops at the first
    equilibrium it meets, so the root is bracketed by scanning S down
    from 1 and refined with Brent's method.
    """
    near_one = 1.0 - np.geomspace(1e-14, 1e-2, scan // 4)
    grid = np.unique(np.concatenate([near_one, np.linspace(0.0, 1.0, scan + 1)]))[::-1]
    prev_s, prev_v = 1.0, infection_rate(p, 1.0)
    for s in grid[1:]:
        v = infection_rate(p, s) if s > 0 else -1.0
        if prev_v > 0 >= v:
            lo, hi = 1.0 - prev_s, 1.0 - max(s, 1e-300)
            try:
                return brentq(lambda tau: final_size_residual(p, tau), lo, hi, xtol=1e-15)
            except ValueError as err:
                raise ConvergenceError(f"final-size bracket [{lo}, {hi}] failed", None) from err
        prev_s, prev_v = s, v
    raise ConvergenceError("no final-size root in (0, 1): the epidemic infects everyone", None)


def final_size_lambert(p: DsaParams) -> float:
    """S_inf = -W(-R0 exp(-R0 (1 + rho))) / R0 for a Poisson network."""
    if p.kappa != 1.0:
        raise ContractError("closed form holds for kappa = 1 only")
    r0 = p.r0
    w = lambertw(-r0 * math.exp(-r0 * (1 + p.rho)), 0)
    return float(-w.real / r0)


@dataclass
class DsaSolution:
    params: DsaParams
    times: np.ndarray
    susceptible: np.ndarray
    tau_inf: float
    richardson_error: float
    fine_times: np.ndarray
    fine_rate: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return 1.0 - self.susceptible

    @property
    def s_inf(self) -> float:
        return 1.0 - self.tau_inf

    @property
    def r0(self) -> float:
        return self.params.r0

    def density(self, t) -> np.ndarray:
        """Infection-time density -S'_t / tau_inf."""
        return np.interp(t, self.fine_times, self.fine_rate) / self.tau_inf

    def nu_integral(self, f: Callable, low: float = 0.0, high: float = math.inf) -> float:
        """Integral of f against nu over (low, high]."""
        sel = (self.fine_times >= low) & (self.fine_times <= min(high, self.fine_times[-1]))
        t = self.fine_times[sel]
        if t.size < 3:
            return 0.0
        vals = np.asarray(f(t), float) * self.fine_rate[sel] / self.tau_inf
        return float(simpson(vals, x=t))


def _horizon(p: DsaParams, tau_inf: float) -> float:
    # growth from rho plus decay into the endemic equilibrium, with margin
    s_inf = 1.0 - tau_inf
    h = 1e-7
    slope = (infection_rate(p, s_inf + h) - infection_rate(p, s_inf - h)) / (2 * h)
    grow = max(p.kappa * p.b - p.a, 1e-3)
    return 2.0 * math.log(1 / p.rho) / grow + 30.0 / max(slope, 1e-3)


def dsa_solve(p: DsaParams, times: Sequence[float], dt: float = DEFAULT_STEP) -> DsaSolution:
    """S_t on ``times`` with the final size and the infection-time law."""
    t = np.asarray(times, float)
    tau_inf = final_size(p)
    s = solve_reduced(p, t, dt)
    s_half = solve_reduced(p, t, dt / 2)
    richardson = float(np.max(np.abs(s - s_half)) / 15.0) if t.size else 0.0
    horizon = max(_horizon(p, tau_inf), float(t.max()) if t.size else 0.0)
    fine = np.linspace(0.0, horizon, int(horizon / (10 * dt)) + 1)
    s_fine = _rk4_scalar(lambda x: infection_rate(p, x), 1.0, fine, dt)
    rate = np.array([infection_rate(p, x) for x in s_fine])
    return DsaSolution(p, t, s, tau_inf, richardson, fine, rate)


def window_indices(tau_t: float, tau_inf: float, n: int = 1000) -> SensitivityReport:
    """RM-ANOVA of N(E) over the windows (0, T] and (T, inf)."""
    if not 0 < tau_inf < 1:
        raise DegenerateVarianceError("tau_inf must lie strictly between 0 and 1")
    share = tau_t / tau_inf
    first = [share, 1.0 - share]
    return anova_from_moments(Binomial(int(n), tau_inf), first, first, ("(0,T]", "(T,inf)"))


def window_indices_closed(tau_t: float, tau_inf: float) -> dict:
    den = tau_inf * (1 - tau_inf)
    return {
        "S_a^a": tau_t * (1 - tau_t) / den,
        "S_b^a": (tau_inf - tau_t) * (1 + tau_t - tau_inf) / den,
        "S^b": -tau_t * (tau_inf - tau_t) / den,
    }


@dataclass(frozen=True)
class DsaCounts:
    n: float
    mean_total: float
    var_total: float
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    cov_ab: float


def dsa_counts(tau_t: float, tau_inf: float, n: float) -> DsaCounts:
    return DsaCounts(
        n,
        n * tau_inf,
        n * tau_inf * (1 - tau_inf),
        n * tau_t,
        n * (tau_inf - tau_t),
        n * tau_t * (1 - tau_t),
        n * (tau_inf - tau_t) * (1 + tau_t - tau_inf),
        -n * tau_t * (tau_inf - tau_t),
    )


def population_from_count(k_t: float, tau_t: float, tau_inf: float) -> dict:
    """Unobserved population quantities implied by k_T infections by time T."""
    if not tau_t > 0:
        raise DegenerateVarianceError("no infections by time T")
    n = k_t / tau_t
    return {"n": n, "s_T": n - k_t, "k_inf": tau_inf * n, "s_inf": (1 - tau_inf) * n}


def series_moments(sol: DsaSolution, f: Callable, n: float, low: float = 0.0, high: float = math.inf):
    """Mean and variance of N(f 1_(low, high]) under Binomial(n, tau_inf)."""
    ti = sol.tau_inf
    m1 = sol.nu_integral(f, low, high)
    m2 = sol.nu_integral(lambda t: np.asarray(f(t), float) ** 2, low, high)
    return n * ti * m1, n * ti * m2 - n * ti * ti * m1 * m1


def dsa_uq(sol: DsaSolution, t_index: int, n: int | None = None, k_t: float | None = None) -> dict:
    """Counts, window indices and population quantities at times[t_index]."""
    tau_t = float(sol.tau[t_index])
    if n is None and k_t is None:
        raise ContractError("give the population size n or the observed count k_T")
    pop = population_from_count(k_t, tau_t, sol.tau_inf) if k_t is not None else None
    size = n if n is not None else pop["n"]
    out = {
        "T": float(sol.times[t_index]),
        "tau_T": tau_t,
        "counts": dsa_counts(tau_t, sol.tau_inf, size),
        "indices": window_indices(tau_t, sol.tau_inf, max(int(round(size)), 1)),
    }
    if pop is not None:
        out["population"] = pop
    return out
