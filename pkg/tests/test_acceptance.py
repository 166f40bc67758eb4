"""Acceptance suite.

One test per acceptance criterion, in order.  Each test prints a single
pass/fail line (visible with ``pytest -s``) and then asserts, so a plain
``pytest`` run enforces every criterion while ``pytest -s
tests/test_acceptance.py`` doubles as a human-readable report.
"""

import time

import numpy as np
import pytest

from graphtv import (SWITCHING_EDGE, PhiCatalog, Tolerances, cartesian_graph,
                     demonstrate_isotropic_failure, flow_backward_euler,
                     flow_reference, flow_solve, jump_set,
                     nonequivalence_instance, path_graph,
                     random_connected_graph, random_vertex_field,
                     regularization_reference, rof_path, rof_solve,
                     subdifferential_membership, taut_string_1d,
                     two_vertex_graph, verify_universal_minimality)
from graphtv.cli import main

SEED = 20240824
V22 = 1
V32 = 2


def report(num: int, ok: bool, name: str, detail: str) -> None:
    mark = "PASS" if ok else "FAIL"
    print("criterion %02d %s: %s (%s)" % (num, mark, name, detail))
    assert ok, "criterion %d failed: %s (%s)" % (num, name, detail)


@pytest.fixture(scope="module")
def figure():
    return nonequivalence_instance()


@pytest.fixture(scope="module")
def figure_flow(figure):
    g, f = figure
    return flow_solve(g, f)


@pytest.fixture(scope="module")
def figure_path(figure):
    g, f = figure
    return rof_path(g, f)


def test_criterion_01_regularization_panels(figure):
    g, f = figure
    worst = 0.0
    slowest = 0.0
    spot = []
    for alpha in (0.2, 1.0, 3.0):
        t0 = time.perf_counter()
        u = rof_solve(g, f, alpha).u
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, float(np.abs(u - regularization_reference(alpha)).max()))
        if alpha == 1.0:
            spot.append(abs(u[V22] - 20.5))
            spot.append(abs(u[V32] - 20.5))
        if alpha == 3.0:
            spot.append(abs(u[V22] - 24.0))
            spot.append(abs(u[V32] - 23.0))
    ok = worst <= 1e-6 and max(spot) <= 1e-6 and slowest < 1.0
    report(1, ok, "regularized values at alpha in {0.2, 1, 3}",
           "max err %.2e, slowest solve %.3fs" % (worst, slowest))


def test_criterion_02_flow_panels(figure_flow):
    traj = figure_flow
    worst = 0.0
    for t in (0.2, 1.0, 3.0):
        worst = max(worst, float(np.abs(traj.value_at(t) - flow_reference(t)).max()))
    spot = traj.value_at(1.0)
    values_ok = (worst <= 1e-6 and abs(spot[V22] - 20.8) <= 1e-6
                 and abs(spot[V32] - 20.2) <= 1e-6)
    dual_worst = 0.0
    for t in (0.1, 0.2, 0.4, 0.7, 1.0, 3.0):
        expected = t if t <= 0.4 else 0.8 - t
        got = float(traj.antiderivative_at(t)[SWITCHING_EDGE])
        dual_worst = max(dual_worst, abs(got - expected))
    ok = values_ok and dual_worst <= 1e-6
    report(2, ok, "flow values and switching-edge antiderivative",
           "max value err %.2e, max F err %.2e" % (worst, dual_worst))


def test_criterion_03_breakpoints(figure_path, figure_flow):
    rb = figure_path.breakpoints
    fb = figure_flow.breakpoints
    e1 = float(np.abs(rb - 0.4).min())
    e2 = float(np.abs(rb - 2.0).min())
    e3 = float(np.abs(fb - 0.4).min())
    ok = e1 <= 1e-4 and e2 <= 1e-4 and e3 <= 1e-4
    report(3, ok, "breakpoints 2/5 and 2 (path), 2/5 (flow)",
           "errors %.2e, %.2e, %.2e" % (e1, e2, e3))


def test_criterion_04_nonequivalence(figure, figure_flow):
    g, f = figure
    u1 = rof_solve(g, f, 1.0).u
    v1 = figure_flow.value_at(1.0)
    gap = float(np.abs(u1 - v1).max())
    at_v22 = abs(abs(u1[V22] - v1[V22]) - 0.3)
    small = 0.0
    for alpha in (0.1, 0.25, 0.4):
        d = float(np.abs(rof_solve(g, f, alpha).u
                         - figure_flow.value_at(alpha)).max())
        small = max(small, d)
    ok = gap >= 0.25 and at_v22 <= 1e-6 and small <= 1e-6
    report(4, ok, "methods split at alpha=1, agree for alpha <= 2/5",
           "gap %.4f, v22 dev %.2e, early diff %.2e" % (gap, at_v22, small))


def test_criterion_05_jump_sets(figure, figure_flow):
    g, f = figure
    scale = float(f.max() - f.min())
    j1 = jump_set(g, rof_solve(g, f, 1.0).u, scale=scale)
    j3 = jump_set(g, rof_solve(g, f, 3.0).u, scale=scale)
    reg_ok = j1 < j3 and (j3 - j1) == {SWITCHING_EDGE}
    before = SWITCHING_EDGE in jump_set(g, figure_flow.value_at(0.2), scale=scale)
    at = SWITCHING_EDGE in jump_set(g, figure_flow.value_at(0.4), scale=scale)
    after = SWITCHING_EDGE in jump_set(g, figure_flow.value_at(1.0), scale=scale)
    flow_ok = before and not at and after
    ok = reg_ok and flow_ok
    report(5, ok, "jump set grows in alpha, flow transition at t=2/5",
           "missing edge %s, flow open/flat/open %s/%s/%s"
           % (sorted(j3 - j1), before, not at, after))


def test_criterion_06_universal_minimality(figure):
    g, f = figure
    rng = np.random.default_rng(SEED)
    cases = [(g, f, a) for a in (0.2, 1.0, 3.0)]
    for _ in range(20):
        h = random_connected_graph(rng, max_vertices=12)
        data = random_vertex_field(rng, h.vertex_count)
        for a in (0.15, 0.75, 2.5):
            cases.append((h, data, a))
    worst = 0.0
    checked = 0
    for gg, ff, alpha in cases:
        for r in verify_universal_minimality(gg, ff, alpha):
            assert r.report.converged
            worst = max(worst, abs(r.relative_gap))
            checked += 1
    ok = worst <= 1e-5
    report(6, ok, "phi-minimality on figure instance and 20 random graphs",
           "%d phi checks, worst relative gap %.2e" % (checked, worst))


def test_criterion_07_isotropic_failure():
    g = cartesian_graph(3, 3)
    rng = np.random.default_rng(SEED + 1)
    batch = [rng.uniform(0.0, 10.0, g.vertex_count) for _ in range(20)]
    iso = demonstrate_isotropic_failure(g, batch, 1.0, coupled=True)
    box = demonstrate_isotropic_failure(g, batch, 1.0, coupled=False)
    margin = iso.witness.margin if iso.witness is not None else 0.0
    ok = (iso.witness_found and margin > 1e-4
          and not box.witness_found and box.checked == len(batch) * 6)
    report(7, ok, "coupled model fails phi-minimality, box control clean",
           "witness margin %.3e, control checks %d, control witnesses 0=%s"
           % (margin, box.checked, not box.witness_found))


def test_criterion_08_one_dimensional_equivalence():
    rng = np.random.default_rng(SEED + 2)
    alphas = np.linspace(0.1, 3.0, 10)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 51))
        g = path_graph(n)
        f = rng.uniform(0.0, 10.0, n)
        traj = flow_solve(g, f)
        for alpha in alphas:
            a = float(alpha)
            ts = taut_string_1d(f, a)
            ur = rof_solve(g, f, a).u
            uf = traj.value_at(a)
            worst = max(worst,
                        float(np.abs(ts - ur).max()),
                        float(np.abs(ts - uf).max()),
                        float(np.abs(ur - uf).max()))
    ok = worst <= 1e-6
    report(8, ok, "taut string, regularization and flow agree on 50 paths",
           "worst pairwise gap %.2e" % worst)


def test_criterion_09_eigenfunctions():
    cases = [
        (two_vertex_graph(), np.array([1.0, -1.0]), 1.0),
        (path_graph(4), np.array([1.0, 1.0, -1.0, -1.0]), 0.5),
    ]
    worst = 0.0
    for g, f, lam in cases:
        ms = subdifferential_membership(g, f, lam * f)
        assert ms.member, "lam*f must lie in the subdifferential at f"
        for alpha in (0.1, 0.5, 1.0, 1.5, 1.0 / lam, 1.2 / lam, 3.0 / lam):
            u = rof_solve(g, f, float(alpha)).u
            expected = max(0.0, 1.0 - alpha * lam) * f
            worst = max(worst, float(np.abs(u - expected).max()))
    ok = worst <= 1e-7
    report(9, ok, "eigenfunction shrinkage law on two constructions",
           "max deviation %.2e" % worst)


def test_criterion_10_flow_properties():
    rng = np.random.default_rng(SEED + 3)
    worst_mean = 0.0
    worst_mono = 0.0
    worst_exp = 0.0
    worst_semi = 0.0
    strict = True
    for _ in range(20):
        g = random_connected_graph(rng, max_vertices=12)
        f = random_vertex_field(rng, g.vertex_count)
        traj = flow_solve(g, f)
        tm = traj.t_max
        samples = np.linspace(0.0, 1.1 * tm, 7)
        mbar = float(f.mean())
        norms = []
        for t in samples:
            u = traj.value_at(float(t))
            worst_mean = max(worst_mean,
                             abs(float(u.mean()) - mbar) / (1.0 + abs(mbar)))
            norms.append(float(np.linalg.norm(u)))
        for a, b in zip(norms, norms[1:]):
            worst_mono = max(worst_mono, b - a)
        dnorms = [float(np.linalg.norm(d)) for d in traj.directions]
        for a, b in zip(dnorms, dnorms[1:]):
            if b > 0.0 and not b < a:
                strict = False
        f2 = f + rng.normal(0.0, 0.5, f.size)
        traj2 = flow_solve(g, f2)
        base = float(np.linalg.norm(f - f2))
        for t in (0.2 * tm, 0.6 * tm, 1.2 * tm):
            d = float(np.linalg.norm(traj.value_at(t) - traj2.value_at(t)))
            worst_exp = max(worst_exp, d - base)
        s, t = 0.3 * tm, 0.5 * tm
        resumed = flow_solve(g, traj.value_at(s)).value_at(t)
        worst_semi = max(worst_semi,
                         float(np.abs(resumed - traj.value_at(s + t)).max()))
    ok = (worst_mean <= 1e-8 and worst_mono <= 1e-9 and strict
          and worst_exp <= 1e-7 and worst_semi <= 1e-7)
    report(10, ok, "flow property suite on 20 random instances",
           "mean %.1e, mono %.1e, strict %s, nonexp %.1e, semigroup %.1e"
           % (worst_mean, worst_mono, strict, worst_exp, worst_semi))


def test_criterion_11_backward_euler(figure, figure_flow):
    g, f = figure
    target = figure_flow.value_at(1.0)
    errs = []
    for h in (0.02, 0.01, 0.005):
        u = flow_backward_euler(g, f, 1.0, h)
        errs.append(float(np.abs(u - target).max()))
    # On this instance every step size divides the sole breakpoint before
    # t=1, so the discretization error vanishes and only roundoff remains;
    # the monotonicity comparison needs a roundoff-sized allowance.
    ok = (errs[0] >= errs[1] - 1e-10 and errs[1] >= errs[2] - 1e-10
          and errs[2] <= 0.05)
    report(11, ok, "implicit stepping converges to the flow at t=1",
           "errors %.2e >= %.2e >= %.2e" % tuple(errs))


def test_criterion_12_norm_ordering(figure, figure_path, figure_flow):
    g, f = figure
    rng = np.random.default_rng(SEED + 4)
    instances = [(g, f, figure_path, figure_flow)]
    for _ in range(4):
        h = cartesian_graph(3, 3)
        data = rng.uniform(0.0, 50.0, h.vertex_count)
        instances.append((h, data, rof_path(h, data), flow_solve(h, data)))
    worst_chain = -np.inf
    worst_stat = -np.inf
    for gg, ff, path, traj in instances:
        lo = float(np.linalg.norm(np.full(ff.size, ff.mean())))
        hi = float(np.linalg.norm(ff))
        slack = 1e-9 * (1.0 + hi)
        for alpha in (0.5, 2.0, 8.0, 1.5 * traj.t_max):
            a = float(alpha)
            nu = float(np.linalg.norm(rof_solve(gg, ff, a).u))
            nv = float(np.linalg.norm(traj.value_at(a)))
            worst_chain = max(worst_chain, lo - nu, nu - nv, nv - hi)
            assert lo - slack <= nu <= nv + slack <= hi + 2 * slack
        alpha_n = float(path.breakpoints[-1])
        worst_stat = max(worst_stat, alpha_n - traj.t_max)
    ok = worst_chain <= 1e-9 * 51.0 and worst_stat <= 1e-4
    report(12, ok, "norm chain and stationarity ordering on all grids",
           "worst chain violation %.1e, worst alpha_N - t_M %.1e"
           % (worst_chain, worst_stat))


def test_criterion_13_cli_determinism(tmp_path):
    out1 = tmp_path / "one.txt"
    out2 = tmp_path / "two.txt"
    code1 = main(["verify", "--mode", "counterexample", "--output", str(out1)])
    code2 = main(["verify", "--mode", "counterexample", "--output", str(out2)])
    identical = out1.read_bytes() == out2.read_bytes()
    ok = code1 == 0 and code2 == 0 and identical
    report(13, ok, "counterexample verification is deterministic",
           "exit codes %d/%d, byte-identical %s" % (code1, code2, identical))
