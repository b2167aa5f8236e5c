"""Example suites: each builds a Report with verdicts and plot tables.

A suite is a function ``(config, seed, threads) -> Report`` registered
with its default configuration. Unknown configuration keys are rejected.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from ..anova import anova_from_moments, coordinate_cell_moments, entropy, hdmr_product, mm_anova, sensitivity_density
from ..constructions import ClusterSetup, cluster_moments, cluster_sampler
from ..counting import (
    Binomial,
    Dirac,
    NegativeBinomial,
    Poisson,
    enumerate_orthogonal_dice,
)
from ..errors import ConfigError, DegenerateVarianceError, NumericalWarning
from ..field import RandomField, field_cov, rbf_kernel
from ..laplace import mean_nf, var_nf
from ..maxent import draw_alphas, fit_maxent, generalized_moments
from ..measure import Image, bernoulli, integrate
from ..report import Report, at_least, at_most, close, emit_plot_data, within_se
from ..stc import RandomMeasure, simulate_totals, summarize
from . import dsa, examples, gpr, rct, sda
from .risk import classification_risk, regression_risk

SUITES: dict[str, tuple[dict, Callable]] = {}


def suite(name: str, **defaults):
    def register(fn):
        SUITES[name] = (defaults, fn)
        return fn

    return register


def resolve_config(defaults: dict, config: dict | None) -> dict:
    config = dict(config or {})
    unknown = sorted(set(config) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    out = dict(defaults)
    out.update(config)
    return out


def example_suites(name: str, config: dict | None = None, seed: int | None = 0, threads: int = 1) -> Report:
    """Run one example suite; ``seed`` may be None for deterministic suites."""
    if name not in SUITES:
        raise ConfigError(f"unknown example {name!r}; choose from {', '.join(sorted(SUITES))}")
    defaults, fn = SUITES[name]
    cfg = resolve_config(defaults, config)
    return fn(cfg, None if seed is None else int(seed), int(threads))


def _count_law(spec) -> object:
    """Count law from a config entry such as ["poisson", 100] or ["dirac", 20]."""
    kind, *args = spec
    laws = {
        "poisson": Poisson,
        "dirac": Dirac,
        "binomial": Binomial,
        "negbin": NegativeBinomial,
    }
    if kind == "mixed":
        return sda.mixed_population()
    if kind not in laws:
        raise ConfigError(f"unknown count law {kind!r}")
    return laws[kind](*args)


def _golden(rep: Report, name, value, target, tol, relative=False, note=""):
    rep.scalar(name, value, "golden", target=target, tolerance=tol, relative=relative)
    rep.add(close(name, value, target, tol, relative, note))


def _raises(rep: Report, name: str, fn: Callable, error=DegenerateVarianceError):
    try:
        fn()
    except error:
        rep.add(close(name, 1.0, 1.0, 0.0, note="raised " + error.__name__))
        return
    rep.add(close(name, 0.0, 1.0, 0.0, note="no error raised"))


def _table(rep: Report, name: str, kind: str, rows, extra=()):
    t = emit_plot_data(kind, rows, extra)
    rep.tables[name] = t
    return t


def _corr(a, b) -> float:
    return float(np.corrcoef(np.ravel(a), np.ravel(b))[0, 1])


# ---------------------------------------------------------------- sympoly


@suite("sympoly", n=6, rhos=[0.5, 1.0, 2.0], large_n=100, entropy_n=10, entropy_rhos=31)
def run_sympoly(cfg, seed, threads):
    rep = Report("example sympoly", None, cfg)
    n = int(cfg["n"])
    rows = []
    for rho in cfg["rhos"]:
        closed = examples.sympoly_order_indices(n, rho)
        built = examples.sympoly_hdmr_orders(n, rho)
        _golden(rep, f"order indices rho={rho:g}", float(np.max(np.abs(built - closed))), 0.0, 1e-8)
        rows += [[k + 1, float(closed[k]), float(built[k])] for k in range(n)]
    rep.table("order_indices", ["k", "closed", "hdmr"], rows)
    big = int(cfg["large_n"])
    s = examples.sympoly_summary(big, 1.0)
    _golden(rep, "E P at rho=1", s["mean"], big / (2 - 2.0 ** (1 - big)), 1e-12, relative=True)
    _golden(rep, "E P summed", s["mean_summed"], s["mean"], 1e-9, relative=True)
    _golden(rep, "Var P summed", s["var_summed"], s["var"], 1e-9, relative=True)
    rep.scalar("H at rho=1", s["entropy"])
    curve = []
    for rho in np.linspace(0.1, 3.0, int(cfg["entropy_rhos"])):
        curve.append([float(rho), examples.sympoly_summary(int(cfg["entropy_n"]), rho)["entropy"]])
    _table(rep, "entropy_curve", "line", curve)
    return rep


# ---------------------------------------------------------------- bernoulli


@suite("bernoulli", probs=[0.1, 0.3, 0.7, 0.9], count=20)
def run_bernoulli(cfg, seed, threads):
    rep = Report("example bernoulli", None, cfg)
    c = int(cfg["count"])
    rows = []
    for p in cfg["probs"]:
        cl = examples.bernoulli_closed(p)
        orth = examples.bernoulli_rm(p, Poisson(float(c)))
        dirac = examples.bernoulli_rm(p, Dirac(c))
        _golden(rep, f"orthogonal S_a p={p:g}", float(orth.first[0]), cl["orth_Sa"], 1e-12)
        _golden(rep, f"orthogonal S_b p={p:g}", float(orth.first[1]), cl["orth_Sb"], 1e-12)
        _golden(rep, f"Dirac S_a p={p:g}", float(dirac.first[0]), cl["dirac_Sa"], 1e-12)
        _golden(rep, f"Dirac S_b p={p:g}", float(dirac.first[1]), cl["dirac_Sb"], 1e-12)
        _golden(rep, f"Dirac S_ab p={p:g}", float(dirac.cross[0]), cl["dirac_Sab"], 1e-12)
        nu = bernoulli(p)
        f = lambda x, p=p: (np.asarray(x) - p) ** 2  # noqa: E731
        var_f = integrate(nu, lambda x: f(x) ** 2) - integrate(nu, f) ** 2
        _golden(rep, f"Var f p={p:g}", var_f, cl["var_f"], 1e-14)
        mm = mm_anova(Poisson(float(c)), lambda x: np.asarray(x, float).reshape(-1), nu)
        _golden(rep, f"MM-ANOVA E Nf p={p:g}", mm.total, c * p * (1 - p), 1e-12)
        rows.append([p, cl["orth_Sa"], cl["orth_Sb"], cl["orth_H"], cl["dirac_Sa"], cl["dirac_Sb"], cl["dirac_Sab"]])
    rep.table("indices", ["p", "orth_Sa", "orth_Sb", "orth_H", "dirac_Sa", "dirac_Sb", "dirac_Sab"], rows)
    _raises(rep, "Dirac at p=1/2 is degenerate", lambda: examples.bernoulli_rm(0.5, Dirac(c)))
    return rep


# ---------------------------------------------------------------- ishigami


@suite(
    "ishigami",
    a=7.0,
    b=0.1,
    rate=100.0,
    hdmr_nodes=24,
    nodes=40,
    bins=100,
    profile_bs=[0.01, 0.05, 0.1, 0.15, 0.2],
    dirac_count=100,
    maxent_n=10,
    maxent_seed=None,
)
def run_ishigami(cfg, seed, threads):
    rep = Report("example ishigami", seed, cfg)
    a, b = float(cfg["a"]), float(cfg["b"])
    cl = examples.ishigami_closed(a, b)
    nu = examples.ishigami_measure()
    g = examples.ishigami(a, b)
    f = examples.ishigami_loss(a, b)
    nodes = int(cfg["nodes"])

    _golden(rep, "Var g closed form", cl["var"], 13.8446, 1e-3, relative=True)
    var_quad = integrate(nu, lambda x: (g(x) - cl["mean"]) ** 2, nodes=nodes)
    _golden(rep, "Var g quadrature", var_quad, cl["var"], 1e-6, relative=True)
    _golden(rep, "nu f^2 closed vs quadrature", integrate(nu, lambda x: f(x) ** 2, nodes=nodes), cl["nu_f2"], 1e-8, relative=True)

    model = hdmr_product(g, nu, max_order=2, nodes=int(cfg["hdmr_nodes"]))
    for u, key in (((0,), "var_1"), ((1,), "var_2"), ((0, 2), "var_13")):
        _golden(rep, f"HDMR Var g_{u}", model.variances[u], cl[key], 1e-3, relative=True)
    worst = max(
        abs(model.inner(u, v)) for u in model.variances for v in model.variances if u < v
    )
    rep.add(at_most("HDMR components mutually orthogonal", worst, 1e-6))
    full = hdmr_product(g, nu, nodes=int(cfg["hdmr_nodes"]))
    _golden(rep, "HDMR index total", sum(full.indices().values()), 1.0, 1e-9)
    s_rows = [["S_1", cl["S_1"]], ["S_2", cl["S_2"]], ["S_13", cl["S_13"]]]
    rep.table("table2", ["index", "value"], s_rows)
    rep.scalar("Var g", cl["var"])

    N = RandomMeasure(Poisson(float(cfg["rate"])), nu)
    mean = mean_nf(N, f, nodes=nodes)
    var = var_nf(N, f, nodes=nodes)
    _golden(rep, "E Nf", mean, 1384.5, 1e-3, relative=True)
    _golden(rep, "Var Nf", var, 67223.4, 1e-3, relative=True)

    mseed = seed if cfg["maxent_seed"] is None else int(cfg["maxent_seed"])
    prob = generalized_moments(N, f, draw_alphas(int(cfg["maxent_n"]), mseed), nodes=nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        fit = fit_maxent(prob)
    _golden(rep, "maxent mean", fit.mean, mean, 1e-2, relative=True)
    _golden(rep, "maxent variance", fit.variance, var, 5e-2, relative=True)
    xs = np.linspace(0.2 * mean, 1.8 * mean, 161)
    _table(rep, "maxent_density", "density", [[x, d] for x, d in zip(xs, fit.pdf(xs))])

    grid = np.linspace(-math.pi, math.pi, 121)
    dens_rows = []
    Nunit = RandomMeasure(Poisson(1.0), nu)
    for axis in range(3):
        closed = examples.ishigami_density(axis, grid, a, b)
        numeric = sensitivity_density(Nunit, f, (axis,), nodes=nodes)(grid)
        _golden(rep, f"sensitivity density x{axis + 1}", float(np.max(np.abs(numeric - closed))), 0.0, 1e-8)
        dens_rows += [[x, d, axis + 1] for x, d in zip(grid, closed)]
    _table(rep, "sensitivity_density", "density", dens_rows, ["axis"])

    edges = np.linspace(-math.pi, math.pi, int(cfg["bins"]) + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    prof_rows, ent_rows = [], []
    orth, dirac = Poisson(float(cfg["rate"])), Dirac(int(cfg["dirac_count"]))
    for bb in cfg["profile_bs"]:
        loss = examples.ishigami_loss(a, bb)
        for axis in range(3):
            first, second = coordinate_cell_moments(nu, loss, axis, edges, nodes=nodes)
            ro = anova_from_moments(orth, first, second)
            rd = anova_from_moments(dirac, first, second)
            _golden(rep, f"profile b={bb:g} x{axis + 1} orthogonal total", float(ro.first.sum()), 1.0, 1e-9)
            _golden(
                rep,
                f"profile b={bb:g} x{axis + 1} Dirac total",
                float(rd.first.sum() + rd.cross.sum()),
                1.0,
                1e-9,
            )
            prof_rows += [[m, s, bb, axis + 1] for m, s in zip(mids, ro.first)]
            ent_rows.append([bb, entropy(ro.first), axis + 1])
    _table(rep, "coordinate_profiles", "density", prof_rows, ["b", "axis"])
    _table(rep, "profile_entropy", "line", ent_rows, ["axis"])
    return rep


# ---------------------------------------------------------------- GPR


def _ishigami_gpr(cfg, seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-math.pi, math.pi, (int(cfg["n"]), 3))
    g = examples.ishigami(float(cfg["a"]), float(cfg["b"]))
    return gpr.gpr_fit(x, g(x), float(cfg["gamma"]), float(cfg["noise"])), g


@suite("gpr", n=100, gamma=0.1, noise=0.0, a=7.0, b=0.1, nodes=40, hdmr_nodes=24, cod_bound=0.4, corr_bound=0.8)
def run_gpr(cfg, seed, threads):
    rep = Report("example gpr", seed, cfg)
    model, g = _ishigami_gpr(cfg, seed)
    a, b = float(cfg["a"]), float(cfg["b"])
    nu = examples.ishigami_measure()
    nodes = int(cfg["nodes"])

    mean_tr, var_tr = gpr.gpr_predict(model, model.inputs)
    if float(cfg["noise"]) == 0.0:
        rep.add(at_most("interpolates training outputs", float(np.max(np.abs(mean_tr - model.outputs))), 1e-6))
        rep.add(at_most("posterior variance at training points", float(np.max(var_tr)), 1e-8))

    N = RandomMeasure(Poisson(1.0), nu)
    err = regression_risk(N, model, loss=lambda x: (model(x) - g(x)) ** 2, nodes=nodes)
    var_g = examples.ishigami_closed(a, b)["var"]
    cod = 1.0 - err.risk / var_g
    rep.scalar("MSE", err.risk)
    rep.add(at_least("COD", cod, float(cfg["cod_bound"])))
    rep.scalar("COD", cod)

    hd = hdmr_product(model, nu, max_order=2, nodes=int(cfg["hdmr_nodes"]))
    truth = examples.ishigami_components(a, b)
    x = np.linspace(-math.pi, math.pi, 201)
    for u in ((0,), (1,)):
        r = _corr(hd.evaluate(u, x[:, None]), truth[u](x))
        rep.scalar(f"component correlation {u}", r)
        rep.add(at_least(f"component correlation g{u[0] + 1}", r, float(cfg["corr_bound"])))
    x1, x3 = np.meshgrid(x[::5], x[::5], indexing="ij")
    r13 = _corr(hd.evaluate((0, 2), np.stack([x1.ravel(), x3.ravel()], 1)), truth[(0, 2)](x1, x3))
    rep.scalar("component correlation (0, 2)", r13)

    mean_hat = integrate(nu, model, nodes=nodes)
    f_hat = lambda z: (model(z) - mean_hat) ** 2  # noqa: E731
    rows = []
    for axis in range(3):
        est = sensitivity_density(N, f_hat, (axis,), nodes=24)(x)
        ref = examples.ishigami_density(axis, x, a, b)
        r = _corr(est, ref)
        rep.scalar(f"sensitivity density correlation x{axis + 1}", r)
        rep.add(at_least(f"sensitivity density correlation x{axis + 1}", r, float(cfg["corr_bound"])))
        rows += [[xx, e, axis + 1, rr] for xx, e, rr in zip(x, est, ref)]
    _table(rep, "gpr_density", "density", rows, ["axis", "reference"])
    return rep


# ---------------------------------------------------------------- classifier


@suite("classifier", n=100, gamma=0.1, noise=0.0, a=7.0, b=0.1, nodes=30, count=100, thresholds=41)
def run_classifier(cfg, seed, threads):
    rep = Report("example classifier", seed, cfg)
    model, g = _ishigami_gpr(cfg, seed)
    cut = float(cfg["a"]) / 2
    nu = examples.ishigami_measure()

    def labelled(x):
        return np.concatenate([x, (g(x) > cut).astype(float)[:, None]], axis=1)

    law = Image(nu, labelled, 4)
    c = int(cfg["count"])
    nodes = int(cfg["nodes"])
    rows, best = [], None
    for theta in np.linspace(cut - 3, cut + 3, int(cfg["thresholds"])):
        clf = lambda x, th=theta: (model(x) > th).astype(float)  # noqa: E731
        rp = classification_risk(RandomMeasure(Poisson(float(c)), law), clf, (0, 1), nodes=nodes)
        gap = abs(rp.false_pos[1] - rp.false_neg[1])
        rows.append([float(theta), rp.entropy, rp.risk, float(rp.indices[0]), float(rp.indices[1])])
        if best is None or gap < best[0]:
            best = (gap, rp.entropy)
    rep.table("threshold_sweep", ["threshold", "entropy", "risk", "S_FP", "S_FN"], rows)
    rep.add(close("balanced errors maximise entropy", best[1], max(r[1] for r in rows), 1e-12))

    clf = lambda x: (model(x) > cut).astype(float)  # noqa: E731
    orth = classification_risk(RandomMeasure(Poisson(float(c)), law), clf, (0, 1), nodes=nodes)
    dirac = classification_risk(RandomMeasure(Dirac(c), law), clf, (0, 1), nodes=nodes)
    rep.scalar("misclassification risk", orth.risk)
    rep.scalar("S_FP", float(orth.indices[0]))
    rep.scalar("S_FN", float(orth.indices[1]))
    _golden(rep, "orthogonal indices sum", float(orth.anova.first.sum()), 1.0, 1e-12)
    _golden(rep, "Dirac Var Mf", dirac.variance, c * dirac.risk * (1 - dirac.risk), 1e-9, relative=True)
    _raises(
        rep,
        "perfect classifier is degenerate",
        lambda: classification_risk(
            RandomMeasure(Poisson(1.0), law), lambda x: (g(x) > cut).astype(float), (0, 1), nodes=nodes
        ),
    )
    return rep


# ---------------------------------------------------------------- cluster


@suite("cluster", parents=20, offspring=10.0, sigma=0.01, reps=100_000)
def run_cluster(cfg, seed, threads):
    rep = Report("example cluster", seed, cfg)
    reps = int(cfg["reps"])
    keys = ("mean_total", "var_total", "mean_a", "var_a")
    printed = {"poisson": (200.0, 2200.0, 50.0, 550.0), "dirac": (200.0, 200.0, 50.0, 425.0)}
    rows = []
    for label, kappa in (("poisson", Poisson(float(cfg["parents"]))), ("dirac", Dirac(int(cfg["parents"])))):
        setup = ClusterSetup(kappa, Poisson(float(cfg["offspring"])), float(cfg["sigma"]))
        analytic = cluster_moments(setup, exact=False)
        exact = cluster_moments(setup, exact=True)
        if label == "poisson" and (cfg["parents"], cfg["offspring"]) == (20, 10.0):
            for k, target in zip(keys, printed[label]):
                _golden(rep, f"{label} analytic {k}", analytic[k], target, 1e-6)
        draws = simulate_totals(None, [], reps, seed, threads, sampler=cluster_sampler(setup))
        st = summarize(draws)
        sims = (st.mean[0], st.cov[0, 0], st.mean[1], st.cov[1, 1])
        ses = (st.mean_se[0], st.cov_se[0, 0], st.mean_se[1], st.cov_se[1, 1])
        for k, v, s in zip(keys, sims, ses):
            rep.add(within_se(f"{label} simulated {k}", float(v), analytic[k], float(s)))
            if k == "var_a":
                rep.add(within_se(f"{label} simulated {k} vs exact boundary term", float(v), exact[k], float(s)))
            rep.scalar(f"{label} simulated {k}", float(v), se=float(s), analytic=analytic[k], exact=exact[k])
            rows.append([label, k, analytic[k], exact[k], float(v), float(s)])
    rep.table("cluster", ["kappa", "statistic", "analytic", "exact", "simulated", "se"], rows)
    rep.scalar("table3 Dirac row var_total", 2000.0, "printed", note="inconsistent with delta^2 = 0 substitution")
    rep.scalar("table3 Dirac row var_a", 500.0, "printed", note="inconsistent with delta^2 = 0 substitution")
    return rep


# ---------------------------------------------------------------- wiener particles


@suite(
    "wiener",
    t=1.0,
    count=["poisson", 100.0],
    gamma=1.0,
    maxent_n=10,
    maxent_seed=None,
    field_times=[0.5, 1.0, 2.0, 5.0],
    probe_nodes=128,
)
def run_wiener(cfg, seed, threads):
    rep = Report("example wiener", seed, cfg)
    t = float(cfg["t"])
    kappa = _count_law(cfg["count"])
    mom = sda.rent_moments(t)
    if t == 1.0 and kappa.mean == 100 and kappa.is_orthogonal:
        _golden(rep, "E M_t g", mom.total_mean(kappa), 56.7668, 1e-3)
        _golden(rep, "Var M_t g", mom.total_variance(kappa), 44.2710, 1e-3)
    law = sda.wiener_law(t)
    _golden(rep, "mu_t g quadrature", integrate(law, sda.rent), mom.mean, 1e-12)
    _golden(rep, "mu_t f quadrature", integrate(law, lambda x: (sda.rent(x) - mom.mean) ** 2), mom.loss_mean, 1e-12)
    _golden(
        rep, "mu_t f^2 quadrature", integrate(law, lambda x: (sda.rent(x) - mom.mean) ** 4), mom.loss_second, 1e-12
    )
    _golden(rep, "mu_t f large-t limit", sda.rent_moments(20.0).loss_mean, 0.125, 1e-12)

    y = np.linspace(0.0, 1.0, 20001)[1:-1]
    img = sda.rent_image_density(y, t)
    rep.scalar("image density mass", float(simpson(img, x=y)))
    xs = np.linspace(-8 * math.sqrt(t), 8 * math.sqrt(t), 801)
    sens = sda.rent_sensitivity_density(xs, t)
    _golden(rep, "sensitivity density mass", float(simpson(sens, x=xs)), 1.0, 1e-8)
    _table(rep, "rent_sensitivity_density", "density", [[x, d] for x, d in zip(xs, sens)])
    _table(rep, "rent_image_density", "density", [[v, d] for v, d in zip(y[::100], img[::100])])

    mixed = sda.mixed_population()
    gaps = [sda.bone_mapping_gap(mixed, a, np.linspace(0, 1, 11)) for a in (0.1, 0.5, 0.9)]
    rep.add(at_most("restricted superposition bone mapping", max(gaps), 1e-12))

    gamma = float(cfg["gamma"])
    worst = 0.0
    for yy in (0.2, 0.5, 1.0, 2.0):
        t_hat, _ = sda.interaction_time(yy, gamma)
        t_num, _ = sda.interaction_time_search(yy, gamma)
        worst = max(worst, abs(t_hat - t_num))
    rep.add(at_most("interaction-time law", worst, 1e-6))
    rep.add(
        at_most("no interaction inside 1/sqrt(2 gamma)", sda.interaction_time(0.99 / math.sqrt(2 * gamma), gamma)[0], 0.0)
    )

    field_checks(rep, kappa, t, gamma, int(cfg["probe_nodes"]))
    spec_rows = []
    for tt in cfg["field_times"]:
        for label, kk in (("orthogonal", kappa), ("dirac", Dirac(int(round(kappa.mean))))):
            es, sa = sda.field_spectrum(sda.field_grid(), tt, gamma, kk)
            rep.scalar(f"effective dimension t={tt:g} {label}", sa.effective_dimension)
            spec_rows += [[k + 1, float(es.values[k]), float(sa.indices[k]), tt, label] for k in range(10)]
    _table(rep, "spectrum", "spectrum", spec_rows, ["t", "kappa"])

    mseed = seed if cfg["maxent_seed"] is None else int(cfg["maxent_seed"])
    N = RandomMeasure(kappa, law)
    prob = generalized_moments(N, sda.rent, draw_alphas(int(cfg["maxent_n"]), mseed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        fit = fit_maxent(prob)
    _golden(rep, "maxent mean", fit.mean, mom.total_mean(kappa), 1e-2, relative=True)
    _golden(rep, "maxent variance", fit.variance, mom.total_variance(kappa), 5e-2, relative=True)
    grid = np.linspace(0.5 * fit.mean, 1.5 * fit.mean, 201)
    _table(rep, "maxent_density", "density", [[x, d] for x, d in zip(grid, fit.pdf(grid))])
    return rep


def field_checks(rep: Report, kappa, t: float, gamma: float, probe_nodes: int = 128) -> None:
    """Closed-form covariance on a probe grid and fPCA properties on the 100-point grid."""
    probe = np.linspace(-2.0, 2.0, 5)
    rf = RandomField(sda.particle_measure(kappa, t), rbf_kernel(gamma), probe)
    quad = field_cov(rf, nodes=probe_nodes)
    yy, zz = np.meshgrid(probe, probe, indexing="ij")
    closed = sda.interaction_cov(yy, zz, t, gamma, kappa)
    rep.add(at_most("field covariance closed form vs quadrature", float(np.max(np.abs(quad - closed))), 1e-8))
    grid = sda.field_grid()
    cov = sda.interaction_cov_grid(grid, t, gamma, kappa)
    es, sa = sda.field_spectrum(grid, t, gamma, kappa)
    rep.add(at_least("fPCA eigenvalues non-negative", float(es.values.min()), -1e-10))
    w = es.weights
    rep.add(at_most("fPCA trace preserved", abs(float(es.values.sum()) - float(w @ np.diag(cov))), 1e-8))
    errs = [es.reconstruction_error(r) for r in range(1, 11)]
    rep.add(at_most("reconstruction error strictly decreasing", float(max(np.diff(errs))), -1e-300))
    heat = interaction_rows(grid[::4], t, gamma, kappa)
    _table(rep, "covariance_heatmap", "heatmap", heat)


def interaction_rows(grid, t, gamma, kappa):
    cov = sda.interaction_cov_grid(grid, t, gamma, kappa)
    return [[float(a), float(b), float(cov[i, j])] for i, a in enumerate(grid) for j, b in enumerate(grid)]


# ---------------------------------------------------------------- RCT


@suite("rct", preset="both", shortfall=3, count=400)
def run_rct(cfg, seed, threads):
    rep = Report("example rct", seed, cfg)
    names = sorted(rct.PRESETS) if cfg["preset"] == "both" else [cfg["preset"]]
    rows = []
    for name in names:
        if name not in rct.PRESETS:
            raise ConfigError(f"unknown preset {name!r}")
        pre = rct.PRESETS[name]
        h = rct.efficacy_entropy(pre.events_treatment, pre.events_control)
        _golden(rep, f"{name} entropy", h, pre.entropy_target, 1e-3)
        design = rct.preset_design(name)
        an = rct.rct_analyze(design.kappa, design.treatment, design.control)
        rep.scalar(f"{name} S_T", an.index_treatment)
        rep.scalar(f"{name} structural entropy", an.entropy)
        rows.append([name, pre.events_treatment, pre.events_control, h, an.index_treatment, an.entropy])
    rep.table("presets", ["preset", "events_T", "events_C", "H_efficacy", "S_T", "H_structural"], rows)

    c = int(cfg["count"])
    arm_t, arm_c = rct.ArmLaw(10.0, 4.0), rct.ArmLaw(15.0, 9.0)
    dirac = rct.rct_analyze(Dirac(c), arm_t, arm_c)
    _golden(rep, "Dirac covariance", dirac.covariance, -c / 4 * arm_t.mean * arm_c.mean, 1e-9)
    _golden(rep, "symmetric arms entropy", rct.efficacy_entropy(7, 7), math.log(2), 1e-15)
    stage_one = enumerate_orthogonal_dice(2)[0].distribution()
    step = rct.rct_adapt(stage_one, 10, 10 + int(cfg["shortfall"]))
    if int(cfg["shortfall"]) == 3:
        _golden(rep, "stage-two die lower face", step.die.low, 5, 0)
        _golden(rep, "stage-two die upper face", step.die.high, 15, 0)
    rep.add(close("superposed dice orthogonal", float(step.kappa.overdispersion), 0.0, 1e-12))
    skip = rct.rct_adapt(stage_one, 20, 15)
    rep.add(close("already powered skips stage two", float(skip.die is None), 1.0, 0.0))
    if seed is None:
        return rep
    rng = np.random.default_rng(seed)
    runs = [rct.simulate_adaptive(0.02, 0.06, 800, rng) for _ in range(200)]
    powered = np.mean([r.total >= r.required for r in runs])
    rep.add(close("adaptive runs reach required size", float(powered), 1.0, 0.0))
    rep.table(
        "adaptive_runs",
        ["stage_one", "events_T", "events_C", "required", "stage_two"],
        [[r.stage_one_size, r.events[0], r.events[1], r.required, r.stage_two_size] for r in runs],
    )
    return rep


# ---------------------------------------------------------------- DSA


@suite(
    "dsa",
    beta=1.0,
    gamma=0.5,
    delta=0.5,
    mu=4.0,
    kappa=1.0,
    rho=1e-3,
    times=[2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0],
    sizes=[1000, 1000000],
    dt=1e-3,
)
def run_dsa(cfg, seed, threads):
    rep = Report("example dsa", None, cfg)
    p = dsa.DsaParams(
        beta=float(cfg["beta"]),
        gamma=float(cfg["gamma"]),
        rho=float(cfg["rho"]),
        kappa=float(cfg["kappa"]),
        mu=float(cfg["mu"]),
        delta=float(cfg["delta"]),
    )
    rep.scalar("R0", p.r0)
    root = dsa.final_size(p)
    rep.scalar("tau_inf", root)
    if p.kappa == 1:
        _golden(rep, "Lambert-W final size vs root", 1 - dsa.final_size_lambert(p), root, 1e-10)
    times = np.asarray(cfg["times"], float)
    sol = dsa.dsa_solve(p, times, float(cfg["dt"]))
    long_run = dsa.solve_reduced(p, [sol.fine_times[-1]], float(cfg["dt"]))[0]
    _golden(rep, "long-time ODE limit", long_run, sol.s_inf, 1e-6)
    rep.scalar("Richardson error", sol.richardson_error)
    full = dsa.solve_full(p, times, float(cfg["dt"]))[:, 0]
    rep.add(at_most("reduced and full systems agree", float(np.max(np.abs(full - sol.susceptible))), 1e-6))
    ident, spread = 0.0, 0.0
    rows = []
    for tau_t, tt in zip(sol.tau, times):
        reps = [dsa.window_indices(tau_t, sol.tau_inf, n) for n in cfg["sizes"]]
        r = reps[0]
        total = float(r.first[0] + r.first[1] + 2 * r.pairwise[0, 1])
        ident = max(ident, abs(total - 1))
        for other in reps[1:]:
            spread = max(spread, float(np.max(np.abs(other.first - r.first))), abs(other.pairwise[0, 1] - r.pairwise[0, 1]))
        closed = dsa.window_indices_closed(tau_t, sol.tau_inf)
        ident = max(ident, abs(closed["S_a^a"] + closed["S_b^a"] + 2 * closed["S^b"] - 1))
        rows.append([tt, tau_t, float(r.first[0]), float(r.first[1]), float(r.pairwise[0, 1])])
    rep.add(at_most("window identity", ident, 1e-12))
    rep.add(at_most("indices free of n", spread, 1e-12))
    rep.table("windows", ["T", "tau_T", "S_a^a", "S_b^a", "S^b"], rows)
    dens = sol.density(np.linspace(0, sol.fine_times[-1], 400))
    _table(rep, "infection_time_density", "density", list(zip(np.linspace(0, sol.fine_times[-1], 400), dens)))
    _golden(rep, "infection-time law mass", sol.nu_integral(lambda t: np.ones_like(t)), 1.0, 1e-8)
    return rep


# ---------------------------------------------------------------- graph


@suite("graph", vertices=5, probs=[0.1, 0.3, 0.5, 0.7, 0.9], count=100, curve_points=19)
def run_graph(cfg, seed, threads):
    rep = Report("example graph", None, cfg)
    n = int(cfg["vertices"])
    table = examples.spectral_gap_table(n)
    rep.add(close("empty graph has zero gap", float(table[0]), 0.0, 0.0))
    rows = []
    c = int(cfg["count"])
    for p in cfg["probs"]:
        ga = examples.graph_hdmr(p, n, table)
        _golden(rep, f"index total p={p:g}", sum(ga.indices.values()), 1.0, 1e-10)
        orth = examples.graph_rm(p, Poisson(float(c)), 0, n, table)
        dirac = examples.graph_rm(p, Dirac(c), 0, n, table)
        _golden(rep, f"orthogonal edge partition p={p:g}", float(orth.first.sum()), 1.0, 1e-10)
        _golden(rep, f"Dirac edge partition p={p:g}", float(dirac.first.sum() + dirac.cross.sum()), 1.0, 1e-10)
        rows.append([p, ga.mean, ga.variance, ga.entropy] + [float(v) for v in ga.order_shares[:4]])
    rep.table("hdmr", ["p", "mean", "variance", "entropy", "order1", "order2", "order3", "order4"], rows)
    curve = []
    for p in np.linspace(0.05, 0.95, int(cfg["curve_points"])):
        curve.append([float(p), examples.graph_hdmr(float(p), n, table).entropy])
    _table(rep, "entropy_curve", "line", curve)
    _raises(rep, "p=0 is degenerate", lambda: examples.graph_hdmr(0.0, n, table))
    return rep


# ---------------------------------------------------------------- Ising


@suite("ising", rows=2, cols=2, betas=[0.2, 0.5, 1.0], count=100)
def run_ising(cfg, seed, threads):
    rep = Report("example ising", None, cfg)
    model = examples.IsingModel(int(cfg["rows"]), int(cfg["cols"]))
    nu = examples.ising_measure()
    mags = np.unique(model.magnetization())
    err_f = max(abs(integrate(nu, lambda x: examples.ising_kernel(x, m)) - examples.ising_nu_f(m)) for m in mags)
    rep.add(at_most("nu f_y closed form", float(err_f), 1e-12))
    err_ff = max(
        abs(
            integrate(nu, lambda x: examples.ising_kernel(x, m1) * examples.ising_kernel(x, m2))
            - examples.ising_nu_ff(m1, m2)
        )
        for m1 in mags
        for m2 in mags
    )
    rep.add(at_most("nu f_y f_z closed form", float(err_ff), 1e-12))
    c = int(cfg["count"])
    heat = []
    for label, kappa in (("orthogonal", Poisson(float(c))), ("dirac", Dirac(c))):
        gy, gz = np.meshgrid(mags, mags, indexing="ij")
        cov = kappa.mean * examples.ising_nu_ff(gy, gz) + kappa.overdispersion * np.outer(
            examples.ising_nu_f(mags), examples.ising_nu_f(mags)
        )
        heat += [[float(a), float(b), float(cov[i, j]), label] for i, a in enumerate(mags) for j, b in enumerate(mags)]
        full = examples.ising_cov(model, kappa)
        if label == "orthogonal":
            rep.add(at_least("orthogonal covariance positive semidefinite", float(np.linalg.eigvalsh(full).min()), -1e-9))
    _table(rep, "covariance", "heatmap", heat, ["kappa"])
    rows = []
    for beta in cfg["betas"]:
        lam = model.gibbs(beta)
        g = model.magnetization()
        fb = examples.ising_averaged(model, beta)
        closed_mean = float(lam @ examples.ising_nu_f(g))
        _golden(rep, f"nu f_beta beta={beta:g}", integrate(nu, fb), closed_mean, 1e-12)
        gy, gz = np.meshgrid(g, g, indexing="ij")
        second = float(lam @ examples.ising_nu_ff(gy, gz) @ lam)
        N = RandomMeasure(Poisson(float(c)), nu)
        _golden(rep, f"Var N f_beta beta={beta:g}", var_nf(N, fb), c * second, 1e-9, relative=True)
        rows.append([beta, float(lam @ np.abs(g)), closed_mean, c * second])
    rep.table("beta", ["beta", "mean_abs_magnetization", "nu_f_beta", "var_orthogonal"], rows)
    return rep


# ---------------------------------------------------------------- correlated polynomial


@suite("corrpoly", grid=41, quad_rhos=[-0.9, -0.5, -0.106, 0.0, 0.3, 0.8], nodes=40)
def run_corrpoly(cfg, seed, threads):
    rep = Report("example corrpoly", None, cfg)
    rhos = np.linspace(-1.0, 1.0, int(cfg["grid"]))
    cl = examples.corrpoly_closed(rhos)
    rep.add(at_most("index total on grid", float(np.max(np.abs(cl["index_total"] - 1))), 1e-10))
    rep.table(
        "indices",
        ["rho", "S_1a", "S_1b", "S_12a", "ED", "H"],
        [
            [float(r), float(a), float(b), float(s), float(e), entropy([a, a, b, b, s], tol=1e-8) if min(a, b, s) >= 0 else math.nan]
            for r, a, b, s, e in zip(rhos, cl["S_1a"], cl["S_1b"], cl["S_12a"], cl["ED"])
        ],
    )
    worst = {k: 0.0 for k in ("var", "var_1", "cov_12", "var_12", "nu_f2", "decomposition", "reconstruction")}
    for rho in cfg["quad_rhos"]:
        q = examples.corrpoly_quadrature(rho, int(cfg["nodes"]))
        c1 = examples.corrpoly_closed(rho)
        for k in ("var", "var_1", "cov_12", "var_12"):
            worst[k] = max(worst[k], abs(q[k] - float(c1[k])))
        worst["nu_f2"] = max(worst["nu_f2"], abs(q["nu_f2"] - float(c1["nu_f2"])) / float(c1["nu_f2"]))
        worst["decomposition"] = max(
            worst["decomposition"], abs(q["var"] - (2 * q["var_1"] + 2 * q["cov_12"] + q["var_12"]))
        )
        worst["reconstruction"] = max(worst["reconstruction"], q["reconstruction"])
    for k, v in worst.items():
        rep.add(at_most(f"quadrature {k}", v, 1e-10))
    printed = examples.corrpoly_closed(0.5)
    rep.scalar("printed Var g at rho=0.5", float(printed["var_printed"]), "printed", true_value=float(printed["var"]))
    loc = examples.corrpoly_extremum()
    _golden(rep, "interaction extremum location", loc, -0.106, 1e-3)
    x = np.linspace(-8, 8, 1601)
    rows = []
    for rho in (-0.5, 0.5):
        d = examples.corrpoly_coordinate_density(rho, 0, x)
        _golden(rep, f"coordinate density mass rho={rho:g}", float(simpson(d, x=x)), 1.0, 1e-6)
        rows += [[xx, dd, rho] for xx, dd in zip(x[::8], d[::8])]
    _table(rep, "coordinate_density", "density", rows, ["rho"])
    return rep
