import numpy as np
import pytest

from graphtv import (PathError, PiecewiseAffinePath, ValidationError,
                     isotropic_rof_solve, rof_path, rof_solve,
                     subdifferential_membership, total_variation)
from graphtv.instances import (nonequivalence_instance,
                               nonequivalence_variant_datum,
                               random_connected_graph, random_vertex_field,
                               regularization_dual_reference,
                               regularization_reference, two_vertex_graph,
                               variant_reference)

SEED = 20240819
VALUE_TOL = 1e-6
BREAK_TOL = 1e-4


def test_closed_form_panels():
    g, f = nonequivalence_instance()
    for alpha in (0.2, 1.0, 3.0):
        sol = rof_solve(g, f, alpha)
        assert sol.report.converged
        assert np.abs(sol.u - regularization_reference(alpha)).max() < VALUE_TOL
        assert np.abs(sol.dual_flow
                      - regularization_dual_reference(alpha)).max() < VALUE_TOL


def test_solution_consistency():
    # u = f + div(dual_flow) and dual flow feasible
    g, f = nonequivalence_instance()
    sol = rof_solve(g, f, 1.0)
    from graphtv import divergence
    assert np.abs(sol.u - (f + divergence(g, sol.dual_flow))).max() < 1e-12
    assert np.abs(sol.dual_flow).max() <= 1.0 + 1e-12


def test_alpha_zero_returns_datum():
    g, f = nonequivalence_instance()
    sol = rof_solve(g, f, 0.0)
    assert np.abs(sol.u - f).max() == 0.0


def test_mean_preservation():
    rng = np.random.default_rng(SEED)
    for _ in range(10):
        g = random_connected_graph(rng)
        f = random_vertex_field(rng, g.vertex_count)
        sol = rof_solve(g, f, float(rng.uniform(0.05, 1.0)))
        assert abs(sol.u.mean() - f.mean()) < 1e-9 * (1 + abs(f.mean()))


def test_optimality_membership():
    # (f - u)/alpha must lie in the subdifferential at u
    rng = np.random.default_rng(SEED + 1)
    g = random_connected_graph(rng)
    f = random_vertex_field(rng, g.vertex_count)
    alpha = 0.3
    sol = rof_solve(g, f, alpha)
    res = subdifferential_membership(g, sol.u, (f - sol.u) / alpha)
    assert res.member


def test_objective_against_random_competitors():
    rng = np.random.default_rng(SEED + 2)
    g = random_connected_graph(rng)
    f = random_vertex_field(rng, g.vertex_count)
    alpha = 0.21
    sol = rof_solve(g, f, alpha)

    def objective(u):
        return 0.5 * float(np.sum((f - u) ** 2)) + alpha * total_variation(g, u)

    base = objective(sol.u)
    for _ in range(100):
        w = sol.u + rng.normal(0, 0.1, g.vertex_count)
        assert objective(w) >= base - 1e-7


def test_path_breakpoints_figure_instance():
    g, f = nonequivalence_instance()
    path = rof_path(g, f)
    bps = path.breakpoints
    for target in (0.4, 2.0):
        assert np.abs(bps - target).min() < BREAK_TOL
    # terminal state is the mean field
    assert np.abs(path.terminal_value - f.mean()).max() < 1e-6


def test_path_matches_pointwise_solves():
    g, f = nonequivalence_instance()
    path = rof_path(g, f)
    rng = np.random.default_rng(SEED + 3)
    alphas = rng.uniform(0.05, float(path.breakpoints[-1]) * 1.05, size=12)
    for alpha in alphas:
        # skip queries within localization slack of a kink
        if np.abs(path.breakpoints - alpha).min() < 1e-3:
            continue
        direct = rof_solve(g, f, float(alpha)).u
        # breakpoints are localized to 1e-4, which bounds the interpolation
        # drift between the path and a fresh solve
        assert np.abs(path.value_at(float(alpha)) - direct).max() < 1e-4


def test_path_two_vertex():
    g = two_vertex_graph()
    f = np.array([0.0, 10.0])
    path = rof_path(g, f)
    # single kink where both values meet the mean: alpha = 5
    assert path.segment_count == 1
    assert abs(path.breakpoints[-1] - 5.0) < BREAK_TOL
    assert np.abs(path.value_at(2.0) - np.array([2.0, 8.0])).max() < 1e-6


def test_variant_datum_path_has_no_early_kink():
    g, _ = nonequivalence_instance()
    fv = nonequivalence_variant_datum()
    path = rof_path(g, fv)
    inside = (path.breakpoints > 0) & (path.breakpoints <= 3.0)
    assert not inside.any()
    for alpha in (0.2, 1.0, 2.0, 3.0):
        assert np.abs(path.value_at(alpha) - variant_reference(alpha)).max() < 1e-5


def test_norm_sandwich():
    rng = np.random.default_rng(SEED + 4)
    g, f = nonequivalence_instance()
    lo = np.linalg.norm(np.full(g.vertex_count, f.mean()))
    hi = np.linalg.norm(f)
    for alpha in (0.2, 1.0, 3.0, 10.0):
        nu = np.linalg.norm(rof_solve(g, f, alpha).u)
        assert lo - 1e-9 <= nu <= hi + 1e-9


def test_isotropic_differs_from_box():
    g, f = nonequivalence_instance()
    u_box = rof_solve(g, f, 1.0).u
    sol = isotropic_rof_solve(g, f, 1.0)
    assert sol.report.converged
    assert np.abs(sol.u - u_box).max() > 1e-3
    # coupled constraint is symmetric, so the mean is still preserved
    assert abs(sol.u.mean() - f.mean()) < 1e-9 * (1 + abs(f.mean()))


def test_isotropic_requires_grid():
    rng = np.random.default_rng(SEED + 5)
    g = random_connected_graph(rng)
    if g.cartesian is None:
        with pytest.raises(ValidationError):
            isotropic_rof_solve(g, random_vertex_field(rng, g.vertex_count), 1.0)


def test_piecewise_affine_path_validation():
    with pytest.raises(ValidationError):
        PiecewiseAffinePath(np.array([0.5, 1.0]), np.zeros((1, 2)),
                            np.zeros((1, 2)), np.zeros(2))
    with pytest.raises(ValidationError):
        PiecewiseAffinePath(np.array([0.0, 1.0, 1.0]), np.zeros((2, 2)),
                            np.zeros((2, 2)), np.zeros(2))


def test_invalid_alpha_rejected():
    g, f = nonequivalence_instance()
    with pytest.raises(ValidationError):
        rof_solve(g, f, -1.0)
    with pytest.raises(ValidationError):
        rof_solve(g, f, float("nan"))
