import numpy as np
import pytest

from graphtv import (ValidationError, flow_backward_euler, flow_solve,
                     minimal_section, subdifferential_membership)
from graphtv.instances import (SWITCHING_EDGE, flow_dual_switching_reference,
                               flow_reference, nonequivalence_instance,
                               nonequivalence_variant_datum, path_graph,
                               random_connected_graph, random_vertex_field,
                               two_vertex_graph, variant_reference)

SEED = 20240820
VALUE_TOL = 1e-6
MIN_SECTION = np.array([-1.0, -4.0, 1.0, 1.0, -1.0, 2.0, 2.0, 2.0, -2.0])


def test_minimal_section_frozen():
    g, f = nonequivalence_instance()
    assert np.abs(minimal_section(g, f) - MIN_SECTION).max() < 1e-7


def test_minimal_section_is_member():
    rng = np.random.default_rng(SEED)
    for _ in range(8):
        g = random_connected_graph(rng)
        u = random_vertex_field(rng, g.vertex_count)
        d = minimal_section(g, u)
        assert subdifferential_membership(g, u, d).member


def test_minimal_section_has_smallest_norm():
    # any other member of dJ(u) must be at least as long
    from graphtv import divergence, pattern_box, sign_pattern
    rng = np.random.default_rng(SEED + 1)
    for _ in range(8):
        g = random_connected_graph(rng)
        u = random_vertex_field(rng, g.vertex_count)
        d = minimal_section(g, u)
        box = pattern_box(sign_pattern(g, u))
        for _ in range(20):
            other = divergence(g, box.random_point(rng))
            assert np.linalg.norm(other) >= np.linalg.norm(d) - 1e-7


def test_flow_closed_form():
    g, f = nonequivalence_instance()
    traj = flow_solve(g, f)
    for t in (0.2, 1.0, 3.0):
        assert np.abs(traj.value_at(t) - flow_reference(t)).max() < VALUE_TOL
        got = traj.antiderivative_at(t)[SWITCHING_EDGE]
        assert abs(got - flow_dual_switching_reference(t)) < VALUE_TOL
    assert np.abs(traj.breakpoints - 0.4).min() < 1e-4


def test_flow_terminates_at_mean():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(10):
        g = random_connected_graph(rng)
        f = random_vertex_field(rng, g.vertex_count)
        traj = flow_solve(g, f)
        assert np.abs(traj.path.terminal_value - f.mean()).max() < 1e-8
        assert np.isfinite(traj.t_max)


def test_flow_two_vertex_exact():
    g = two_vertex_graph()
    f = np.array([0.0, 10.0])
    traj = flow_solve(g, f)
    # values move together at unit speed and meet at the mean at t = 5
    assert abs(traj.t_max - 5.0) < 1e-9
    for t in (0.0, 1.0, 2.5, 4.0):
        assert np.abs(traj.value_at(t) - np.array([t, 10.0 - t])).max() < 1e-9
    assert np.abs(traj.value_at(7.0) - 5.0).max() < 1e-9


def test_direction_norm_strictly_decreases():
    rng = np.random.default_rng(SEED + 3)
    for _ in range(10):
        g = random_connected_graph(rng)
        f = random_vertex_field(rng, g.vertex_count)
        traj = flow_solve(g, f)
        norms = [np.linalg.norm(d) for d in traj.directions]
        for a, b in zip(norms, norms[1:]):
            assert b < a + 1e-9


def test_l2_norm_monotone_along_flow():
    rng = np.random.default_rng(SEED + 4)
    g = random_connected_graph(rng)
    f = random_vertex_field(rng, g.vertex_count)
    traj = flow_solve(g, f)
    ts = np.linspace(0.0, traj.t_max * 1.1, 40)
    ns = [np.linalg.norm(traj.value_at(t)) for t in ts]
    for a, b in zip(ns, ns[1:]):
        assert b <= a + 1e-9


def test_mean_preserved_along_flow():
    rng = np.random.default_rng(SEED + 5)
    g = random_connected_graph(rng)
    f = random_vertex_field(rng, g.vertex_count)
    traj = flow_solve(g, f)
    for t in np.linspace(0.0, traj.t_max, 17):
        assert abs(traj.value_at(t).mean() - f.mean()) < 1e-10 * (1 + abs(f.mean()))


def test_semigroup_property():
    g, f = nonequivalence_instance()
    traj = flow_solve(g, f)
    s = 0.7
    traj2 = flow_solve(g, traj.value_at(s))
    for t in (0.1, 1.3, 4.0):
        assert np.abs(traj2.value_at(t) - traj.value_at(s + t)).max() < 1e-7


def test_nonexpansive_in_datum():
    rng = np.random.default_rng(SEED + 6)
    g = random_connected_graph(rng)
    f1 = random_vertex_field(rng, g.vertex_count)
    f2 = f1 + rng.normal(0, 0.2, g.vertex_count)
    t1 = flow_solve(g, f1)
    t2 = flow_solve(g, f2)
    base = np.linalg.norm(f1 - f2)
    prev = base
    for t in (0.05, 0.2, 0.8, 3.0):
        gap = np.linalg.norm(t1.value_at(t) - t2.value_at(t))
        assert gap <= prev + 1e-7
        prev = gap


def test_flow_antiderivative_consistency():
    # u(t) = f + div F(t) at every sampled time
    from graphtv import divergence
    g, f = nonequivalence_instance()
    traj = flow_solve(g, f)
    for t in (0.1, 0.4, 1.7, 10.0):
        lhs = traj.value_at(t)
        rhs = f + divergence(g, traj.antiderivative_at(t))
        assert np.abs(lhs - rhs).max() < 1e-9


def test_variant_flow_matches_regularization():
    g, _ = nonequivalence_instance()
    fv = nonequivalence_variant_datum()
    traj = flow_solve(g, fv)
    for t in (0.2, 1.0, 2.0, 3.0):
        assert np.abs(traj.value_at(t) - variant_reference(t)).max() < 1e-6


def test_backward_euler_two_vertex():
    g = two_vertex_graph()
    f = np.array([0.0, 10.0])
    traj = flow_solve(g, f)
    for h in (0.5, 0.25):
        u = flow_backward_euler(g, f, 2.0, h)
        assert np.abs(u - traj.value_at(2.0)).max() < 1e-9


def test_backward_euler_error_decreases():
    g, f = nonequivalence_instance()
    exact = flow_solve(g, f).value_at(1.0)
    errs = [np.abs(flow_backward_euler(g, f, 1.0, h) - exact).max()
            for h in (0.02, 0.01, 0.005)]
    assert errs[-1] <= 0.05
    for a, b in zip(errs, errs[1:]):
        assert b <= a + 1e-12


def test_path_graph_flow_equals_regularization():
    # 1-D equivalence: on path graphs the flow at t equals the solution at
    # alpha = t
    from graphtv import rof_solve
    rng = np.random.default_rng(SEED + 7)
    g = path_graph(7)
    f = random_vertex_field(rng, 7)
    traj = flow_solve(g, f)
    for t in (0.05, 0.2, 0.6):
        assert np.abs(traj.value_at(t) - rof_solve(g, f, t).u).max() < 1e-6


def test_invalid_inputs():
    g, f = nonequivalence_instance()
    with pytest.raises(ValidationError):
        flow_backward_euler(g, f, -1.0, 0.1)
    with pytest.raises(ValidationError):
        flow_backward_euler(g, f, 1.0, 0.0)
