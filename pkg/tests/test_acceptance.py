"""Numbered acceptance criteria, one test each, at their stated tolerances.

Every test records a PASS/FAIL line that is repeated in the terminal
summary. A failing criterion fails its test; nothing is loosened.
"""

import functools
import time
import warnings

import numpy as np

from rmuq import cli
from rmuq.apps.suites import SUITES, example_suites
from rmuq.counting import enumerate_orthogonal_dice


@functools.lru_cache(maxsize=None)
def suite(name, seed=0):
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = example_suites(name, None, seed, 1)
    return rep, time.perf_counter() - start


@functools.lru_cache(maxsize=None)
def command(name, seed=0):
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = cli.COMMANDS[name]({}, seed, None, 1)
    return rep, time.perf_counter() - start


def pick(rep, *prefixes):
    out = [v for v in rep.verdicts if v.name.startswith(prefixes)]
    assert out, f"no verdicts named {prefixes}"
    return out


def settle(criterion, number, title, verdicts, elapsed=None, limit=None):
    failed = [v.line() for v in verdicts if not v.passed]
    detail = f"{len(verdicts) - len(failed)}/{len(verdicts)} checks"
    if limit is not None:
        detail += f", {elapsed:.2f} s (limit {limit:g} s)"
        if elapsed >= limit:
            failed.append(f"runtime {elapsed:.2f} s >= {limit} s")
    if failed:
        detail += "; failing: " + " | ".join(failed)
    criterion(number, title, not failed, detail)
    assert not failed, "\n".join(failed)


def test_01_orthogonal_dice(criterion):
    rep, _ = command("dice")
    timings = []
    for _ in range(50):
        start = time.perf_counter()
        enumerate_orthogonal_dice(15)
        timings.append(time.perf_counter() - start)
    best = min(timings)
    verdicts = pick(rep, "orthogonality identity", "first 15 dice")
    settle(criterion, 1, "orthogonal dice table", verdicts, best, 1e-3)


def test_02_bone_mapping(criterion):
    rep, _ = command("dice")
    settle(criterion, 2, "bone mapping", pick(rep, "bone mapping"))


def test_03_cluster_process(criterion):
    rep, elapsed = suite("cluster")
    settle(criterion, 3, "cluster process", rep.verdicts, elapsed, 30)


def test_04_ishigami(criterion):
    rep, elapsed = suite("ishigami")
    verdicts = pick(rep, "Var g closed form", "Var g quadrature", "E Nf", "Var Nf", "maxent mean", "maxent variance")
    settle(criterion, 4, "Ishigami moments and maxent", verdicts, elapsed, 60)


def test_05_gamma_maxent(criterion):
    rep, elapsed = command("maxent")
    settle(criterion, 5, "Gamma maxent oracle", rep.verdicts, elapsed, 10)


def test_06_wiener_particles(criterion):
    rep, elapsed = suite("wiener")
    verdicts = pick(rep, "E M_t g", "Var M_t g", "maxent mean", "maxent variance")
    settle(criterion, 6, "Wiener particle suite", verdicts, elapsed, 30)


def test_07_rct_entropies(criterion):
    rep, elapsed = suite("rct")
    settle(criterion, 7, "RCT entropies", pick(rep, "moderna entropy", "pfizer entropy"), elapsed, 1)


def test_08_dsa(criterion):
    rep, elapsed = suite("dsa")
    settle(criterion, 8, "DSA final size and window indices", rep.verdicts, elapsed, 10)


def test_09_hdmr(criterion):
    ish, t1 = suite("ishigami")
    sym, t2 = suite("sympoly")
    verdicts = pick(ish, "HDMR") + sym.verdicts
    settle(criterion, 9, "HDMR properties", verdicts, t1 + t2, 60)


def test_10_laplace_battery(criterion):
    rep, elapsed = command("laplace")
    settle(criterion, 10, "moment battery over 12 fixtures", rep.verdicts, elapsed, 120)


def test_11_poisson_limit(criterion):
    rep, _ = command("dice")
    settle(criterion, 11, "Poisson limit of thinned dice", pick(rep, "thinned dice", "distance at the 15th"))


def test_12_random_field(criterion):
    rep, elapsed = command("field")
    settle(criterion, 12, "random field covariance and fPCA", rep.verdicts, elapsed, 60)


def test_13_constructions(criterion):
    rep, elapsed = command("construct")
    settle(criterion, 13, "constructions battery", rep.verdicts, elapsed, 120)


def test_14_appendix_suites(criterion):
    verdicts, elapsed = [], 0.0
    for name in ("corrpoly", "graph", "ising"):
        rep, dt = suite(name)
        verdicts += rep.verdicts
        elapsed += dt
    settle(criterion, 14, "correlated polynomial, graph and Ising suites", verdicts, elapsed, 120)


def _artifacts(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_15_determinism(criterion, tmp_path):
    runs = [["dice"], ["construct", "--seed", "7"], ["laplace", "--seed", "7"], ["maxent", "--seed", "7"], ["field"]]
    runs += [["example", name, "--seed", "7"] for name in sorted(SUITES)]
    differing = []
    for i, args in enumerate(runs):
        outs = []
        for threads in ("1", "2"):
            out = tmp_path / f"{i}-{threads}"
            cli.run([*args, "--threads", threads, "--out", str(out)])
            outs.append(_artifacts(out))
        if not outs[0] or outs[0] != outs[1]:
            differing.append(" ".join(args))
    detail = f"{len(runs) - len(differing)}/{len(runs)} commands byte-identical across --threads 1 and 2"
    if differing:
        detail += "; differing: " + ", ".join(differing)
    criterion(15, "determinism", not differing, detail)
    assert not differing


def test_gpr_property(criterion):
    rep, _ = suite("gpr")
    verdicts = pick(rep, "COD", "component correlation")
    failed = [v.line() for v in verdicts if not v.passed]
    detail = ", ".join(f"{v.name}={v.value:.4f}" for v in verdicts)
    criterion(16, "GPR property (COD > 0.4, component correlation >= 0.8)", not failed, detail)
    assert not failed
