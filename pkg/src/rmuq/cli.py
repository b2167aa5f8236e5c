"""Command-line entry point ``rmuq``.

Every command builds a :class:`~rmuq.report.Report`, prints one
PASS/FAIL line per verdict and writes ``report.json`` plus one table
file per named table into ``--out``. Exit status: 0 when every verdict
passes, 1 on a verdict failure, 2 on a configuration error and 3 on a
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .apps.sda import interaction_time, interaction_time_search
from .apps.suites import SUITES, example_suites, field_checks, resolve_config
from .constructions import ALL_FIXTURES, DEFAULT_ALPHAS, check_construction, chi_square_transform
from .counting import (
    Binomial,
    Dirac,
    NegativeBinomial,
    OrthogonalDie,
    Poisson,
    Superposition,
    ThinnedCount,
    UniformCount,
    Zeta,
    enumerate_orthogonal_dice,
    poisson_limit_distances,
    restrict_count,
)
from .errors import ConfigError, RmuqError
from .laplace import cov_nf, mean_nf, transform_moments, var_nf
from .maxent import MaxEntProblem, draw_alphas, fit_maxent
from .measure import Product, Uniform, UnivariateNormal, bernoulli
from .report import Report, at_most, close, dump, svg_heatmap, svg_lines, within_se
from .stc import RandomMeasure, empirical_stats

HALF = Uniform(0.0, 1.0, (0.5,))
EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
RUN_KEYS = {"seed", "reps", "nodes", "out", "format", "svg", "threads", "params"}
# (k, low, high, mean, sides) of the first fifteen orthogonal dice
REFERENCE_DICE = [
    (1, 0, 4, 2, 5), (2, 1, 7, 4, 7), (4, 5, 15, 10, 11), (5, 8, 20, 14, 13),
    (7, 16, 32, 24, 17), (8, 21, 39, 30, 19), (10, 33, 55, 44, 23), (11, 40, 64, 52, 25),
    (13, 56, 84, 70, 29), (14, 65, 95, 80, 31), (16, 85, 119, 102, 35), (17, 96, 132, 114, 37),
    (19, 120, 160, 140, 41), (20, 133, 175, 154, 43), (22, 161, 207, 184, 47),
]
STOCHASTIC = {
    "construct",
    "laplace",
    "maxent",
    "example:gpr",
    "example:classifier",
    "example:cluster",
    "example:ishigami",
    "example:wiener",
}


# ---------------------------------------------------------------- core commands


def run_dice(params: dict, seed, reps, threads) -> Report:
    cfg = resolve_config({"count": 15, "rate": 2.0, "pairs": 50, "pair_seed": 0}, params)
    rep = Report("dice", seed, cfg)
    dice = enumerate_orthogonal_dice(int(cfg["count"]))
    rep.table("dice", ["index", "low", "high", "mean", "sides"], [[d.index, d.low, d.high, d.mean, d.sides] for d in dice])
    bad = sum(6 * (d.low + d.high) != (d.high - d.low + 1) ** 2 - 1 for d in dice)
    rep.add(close("orthogonality identity", float(bad), 0.0, 0.0))
    rows = [(d.index, d.low, d.high, d.mean, d.sides) for d in dice]
    known = min(len(rows), len(REFERENCE_DICE))
    mismatched = sum(r != ref for r, ref in zip(rows[:known], REFERENCE_DICE))
    rep.add(close(f"first {known} dice match the reference table", float(mismatched), 0.0, 0.0))
    coprime = all(math.gcd(d.sides, 6) == 1 for d in dice)
    rep.add(close("sides coprime to 6", float(coprime), 1.0, 0.0))

    dist = poisson_limit_distances(int(cfg["count"]), float(cfg["rate"]))
    valid = dist[~np.isnan(dist)]
    rep.table("poisson_limit", ["index", "sup_distance"], [[d.index, float(x)] for d, x in zip(dice, dist)])
    rep.add(at_most("thinned dice approach Poisson monotonically", float(np.max(np.diff(valid))), 0.0))
    if len(dice) >= 15:
        rep.add(at_most("distance at the 15th die", float(dist[14]), 1e-2))

    rng = np.random.default_rng(int(cfg["pair_seed"]))
    members = [Binomial(12, 0.35), Poisson(3.5), NegativeBinomial(2.5, 0.6), Dirac(9)]
    worst = 0.0
    for kappa in members:
        for a, t in rng.uniform(0.0, 1.0, (int(cfg["pairs"]), 2)):
            a = max(a, 1e-9)
            worst = max(worst, abs(kappa.pgf(a * t + 1 - a) - restrict_count(kappa, a).pgf(t)))
    rep.add(at_most("bone mapping over thinning family", worst, 1e-12))
    return rep


def run_construct(params: dict, seed, reps, threads) -> Report:
    cfg = resolve_config({"names": sorted(ALL_FIXTURES), "alphas": list(DEFAULT_ALPHAS), "chi_dof": 3}, params)
    rep = Report("construct", seed, cfg)
    for name in cfg["names"]:
        if name not in ALL_FIXTURES:
            raise ConfigError(f"unknown fixture {name!r}; choose from {', '.join(sorted(ALL_FIXTURES))}")
        fixture = ALL_FIXTURES[name]()
        rep.add(check_construction(fixture, reps or fixture.default_reps, seed, cfg["alphas"], threads))
    dof = int(cfg["chi_dof"])
    al = np.asarray(cfg["alphas"], float)
    gap = np.max(np.abs(chi_square_transform(dof, al) - (1 + 2 * al) ** (-dof / 2)))
    rep.add(at_most("chi-square transform", float(gap), 1e-10))
    return rep


def moment_fixtures() -> list:
    """(name, random measure, f, split point) covering every count law.

    Split points sit on quadrature breaks or symmetry axes so that the
    disjoint pieces are integrated exactly.
    """
    sq = lambda x: np.asarray(x, float) ** 2  # noqa: E731
    ident = lambda x: np.asarray(x, float)  # noqa: E731
    return [
        ("dirac", RandomMeasure(Dirac(5), HALF), sq, 0.5),
        ("binomial", RandomMeasure(Binomial(10, 0.3), HALF), ident, 0.5),
        ("poisson", RandomMeasure(Poisson(4.0), Uniform(0.0, 2.0, (1.0,))), lambda x: np.exp(-x), 1.0),
        ("negative binomial", RandomMeasure(NegativeBinomial(3.0, 0.4), HALF), np.exp, 0.5),
        ("uniform count", RandomMeasure(UniformCount(2, 8), Uniform(-1.0, 1.0)), sq, 0.0),
        ("orthogonal die", RandomMeasure(OrthogonalDie(0, 4), HALF), lambda x: np.sin(np.pi * x), 0.5),
        ("zeta", RandomMeasure(Zeta(5.0), HALF), ident, 0.5),
        (
            "superposition",
            RandomMeasure(Superposition((Binomial(20, 0.5), Poisson(5.0), NegativeBinomial(5.0, 0.5))), UnivariateNormal(0.0, 1.0)),
            lambda x: np.cos(x) ** 2,
            0.0,
        ),
        ("thinned die", RandomMeasure(ThinnedCount(OrthogonalDie(1, 7), 0.6), HALF), ident, 0.5),
        ("dirac normal", RandomMeasure(Dirac(3), UnivariateNormal(0.0, 1.0)), sq, 0.0),
        ("poisson plane", RandomMeasure(Poisson(2.0), Product([HALF, Uniform(0.0, 1.0)])), lambda x: x[:, 0] * x[:, 1], 0.5),
        ("binomial atoms", RandomMeasure(Binomial(6, 0.5), bernoulli(0.3)), lambda x: np.asarray(x, float) + 1, 0.5),
    ]


def _split(f: Callable, cut: float, low: bool) -> Callable:
    """f restricted to the part of the space below (or above) ``cut`` in the first coordinate."""

    def part(x):
        coord = x if np.ndim(x) == 1 else x[:, 0]
        return np.where(coord < cut if low else coord >= cut, f(x), 0.0)

    return part


def run_laplace(params: dict, seed, reps, threads) -> Report:
    cfg = resolve_config({"fixtures": None, "nodes": None}, params)
    rep = Report("laplace", seed, cfg)
    reps = reps or 100_000
    rows = []
    for i, (name, N, f, cut) in enumerate(moment_fixtures()):
        if cfg["fixtures"] is not None and name not in cfg["fixtures"]:
            continue
        lo, hi = _split(f, cut, True), _split(f, cut, False)
        m, v = mean_nf(N, f, nodes=cfg["nodes"]), var_nf(N, f, nodes=cfg["nodes"])
        cv = cov_nf(N, lo, hi, nodes=cfg["nodes"])
        st = empirical_stats(N, [f, lo, hi], reps, seed + i, threads)
        rep.add(within_se(f"{name}: mean", float(st.mean[0]), m, float(st.mean_se[0])))
        rep.add(within_se(f"{name}: variance", float(st.cov[0, 0]), v, float(st.cov_se[0, 0])))
        rep.add(within_se(f"{name}: disjoint covariance", float(st.cov[1, 2]), cv, float(st.cov_se[1, 2])))
        tm, _ = transform_moments(N, f, nodes=cfg["nodes"])
        rep.add(close(f"{name}: transform derivative mean", tm, m, 1e-4, relative=True))
        rows.append([name, m, float(st.mean[0]), v, float(st.cov[0, 0]), cv, float(st.cov[1, 2])])
    rep.table("battery", ["fixture", "mean", "mean_sim", "variance", "variance_sim", "cov", "cov_sim"], rows)
    return rep


def run_maxent(params: dict, seed, reps, threads) -> Report:
    cfg = resolve_config({"n": 10, "shape": 2, "rate": 1.0}, params)
    rep = Report("maxent", seed, cfg)
    k, lam = int(cfg["shape"]), float(cfg["rate"])
    alphas = draw_alphas(int(cfg["n"]), seed)
    prob = MaxEntProblem.from_transform(lambda a: (lam / (lam + a)) ** k, alphas)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = fit_maxent(prob)
    mean, var = k / lam, k / lam**2
    rep.add(close("gamma mean", fit.mean, mean, 2e-2, relative=True))
    rep.add(close("gamma variance", fit.variance, var, 2e-2, relative=True))
    ref = lambda x: lam**k * x ** (k - 1) * np.exp(-lam * x) / math.gamma(k)  # noqa: E731
    rep.add(at_most("L1 density error", fit.l1_distance(ref), 0.05))
    rep.scalar("iterations", fit.iterations)
    x = np.linspace(0.0, 10.0 / lam, 201)
    rep.table("density", ["x", "density", "reference"], [[a, b, c] for a, b, c in zip(x, fit.pdf(x), ref(x))])
    return rep


def run_field(params: dict, seed, reps, threads) -> Report:
    cfg = resolve_config({"t": 1.0, "gamma": 1.0, "rate": 1.0, "probe_nodes": 128}, params)
    rep = Report("field", seed, cfg)
    field_checks(rep, Poisson(float(cfg["rate"])), float(cfg["t"]), float(cfg["gamma"]), int(cfg["probe_nodes"]))
    worst = 0.0
    for y in (0.2, 0.5, 1.0, 2.0):
        worst = max(worst, abs(interaction_time(y, cfg["gamma"])[0] - interaction_time_search(y, cfg["gamma"])[0]))
    rep.add(at_most("interaction-time law", worst, 1e-6))
    return rep


COMMANDS = {
    "dice": run_dice,
    "construct": run_construct,
    "laplace": run_laplace,
    "maxent": run_maxent,
    "field": run_field,
}


# ---------------------------------------------------------------- plumbing


def _write_tables(rep: Report, out: Path, fmt: str, svg: bool) -> None:
    for name, table in rep.tables.items():
        if fmt == "csv":
            (out / f"{name}.csv").write_text(table.to_csv())
        else:
            (out / f"{name}.json").write_text(dump({"columns": table.columns, "rows": table.rows}))
        if not svg or not table.rows:
            continue
        if table.columns[:3] == ["y", "z", "value"]:
            ys = sorted({r[0] for r in table.rows})
            zs = sorted({r[1] for r in table.rows})
            grid = {(r[0], r[1]): r[2] for r in table.rows}
            (out / f"{name}.svg").write_text(svg_heatmap([[grid.get((y, z), 0.0) for z in zs] for y in ys]))
        elif all(isinstance(v, (int, float)) for v in table.rows[0][:2]):
            (out / f"{name}.svg").write_text(svg_lines(table))


def load_run_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--reps", type=int, help="Monte Carlo replicates")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=["csv", "json"], help="table format")
    common.add_argument("--threads", type=int, help="worker cap; results do not depend on it")
    common.add_argument("--svg", action="store_true", default=None, help="also write SVG sketches")
    common.add_argument("--config", help="JSON run configuration")
    p = argparse.ArgumentParser(prog="rmuq", description="Random-measure uncertainty quantification")
    p.add_argument("--version", action="version", version=f"rmuq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    dice = sub.add_parser("dice", parents=[common], help="orthogonal dice table and Poisson limit")
    dice.add_argument("--count", type=int)
    cons = sub.add_parser("construct", parents=[common], help="construction fixtures")
    cons.add_argument("--name", help="fixture name or 'all'")
    sub.add_parser("laplace", parents=[common], help="moment and transform battery")
    me = sub.add_parser("maxent", parents=[common], help="maxent reconstruction of Gamma(k, rate)")
    me.add_argument("--n", type=int, help="number of transform arguments")
    sub.add_parser("field", parents=[common], help="random-field covariance and fPCA checks")
    ex = sub.add_parser("example", parents=[common], help="worked example suites")
    ex.add_argument("name", choices=sorted(SUITES))
    ex.add_argument("--preset", help="RCT preset name")
    return p


def _params(args, file_params: dict) -> dict:
    params = dict(file_params)
    if args.command == "dice" and args.count is not None:
        params["count"] = args.count
    if args.command == "construct" and args.name not in (None, "all"):
        params["names"] = [args.name]
    if args.command == "maxent" and args.n is not None:
        params["n"] = args.n
    if args.command == "example" and args.preset is not None:
        params["preset"] = args.preset
    return params


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        file_cfg = load_run_config(args.config)
        seed = args.seed if args.seed is not None else file_cfg.get("seed")
        reps = args.reps if args.reps is not None else file_cfg.get("reps")
        threads = args.threads if args.threads is not None else int(file_cfg.get("threads", 1))
        fmt = args.format or file_cfg.get("format", "csv")
        svg = bool(args.svg if args.svg is not None else file_cfg.get("svg", False))
        out = Path(args.out or file_cfg.get("out") or ".")
        if fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if seed is not None and not 0 <= int(seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        key = f"example:{args.name}" if args.command == "example" else args.command
        if key in STOCHASTIC and seed is None:
            raise ConfigError(f"{key} is stochastic; pass --seed")
        if threads < 1:
            raise ConfigError("threads must be positive")
        if "nodes" in file_cfg:
            os.environ["RMUQ_QUAD_NODES"] = str(int(file_cfg["nodes"]))
        params = _params(args, file_cfg.get("params", {}))
        if args.command == "example":
            if reps is not None and "reps" in SUITES[args.name][0]:
                params.setdefault("reps", reps)
            rep = example_suites(args.name, params, seed, threads)
        else:
            rep = COMMANDS[args.command](params, None if seed is None else int(seed), reps, threads)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RmuqError) as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(rep.to_json())
    _write_tables(rep, out, fmt, svg)
    for v in rep.verdicts:
        print(v.line())
    return EXIT_OK if rep.passed else EXIT_VERDICT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
