"""Small hand-checkable input/output pairs for each public operation."""

import math

import numpy as np
import pytest

from polyapprox.benson_dual import (
    coupling_phi,
    dual_point_Dstar,
    dual_to_primal_inner,
    initialize_dual_outer,
    run_dual,
    weight_map_w,
)
from polyapprox.benson_primal import initialize_outer, run_primal
from polyapprox.convexprog import (
    Affine,
    Max,
    Norm2,
    ProblemInstance,
    Quad,
    evaluate,
    find_slater_point,
    restore_feasibility,
    solve_p1,
    solve_p2,
    subgradient,
)
from polyapprox.errors import EmptyPolyhedron, NoInteriorPoint
from polyapprox.geometry import (
    Halfspace,
    Polyhedron,
    VRep,
    contains_point,
    dd_add_halfspace,
    dd_h_to_v,
    project_drop_last,
    slice_by_hyperplane,
)
from polyapprox.instances import (
    gen_dual_tight_cpp,
    gen_dual_tight_mocp,
    gen_primal_tight_cpp,
    gen_primal_tight_mocp,
)
from polyapprox.linprog import LpProblem, LpStatus, solve_lp
from polyapprox.metrics import dist_point_to_polytope, hausdorff_nested, hausdorff_sampled
from polyapprox.projection import (
    approximate_body,
    build_mocp,
    extract_Y,
    feasible_set_polytope,
    polyhedral_image,
)
from polyapprox.result import error_bound


def pts(X, digits=8):
    return {tuple(np.round(r, digits) + 0.0) for r in np.atleast_2d(X)}


def orthant(apex):
    k = len(apex)
    return Polyhedron(k, np.eye(k), np.asarray(apex, dtype=float), VRep.make([apex], np.eye(k)))


def singleton(x0):
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    cons = [Affine(np.eye(n)[i], -x0[i]) for i in range(n)] + [Affine(-np.eye(n)[i], x0[i]) for i in range(n)]
    return ProblemInstance("cpp", n, n, cons, x0 - 1, x0 + 1, G=np.eye(n))


# geometry


def test_orthant_h_to_v():
    v = dd_h_to_v([Halfspace.make([1, 0], 0), Halfspace.make([0, 1], 0)], 2)
    assert pts(v.vertices) == {(0, 0)}
    assert pts(v.rays) == {(1, 0), (0, 1)}


def test_dual_start_set_h_to_v():
    hs = [
        Halfspace.make([1, 0, 0], 0),
        Halfspace.make([0, 1, 0], 0),
        Halfspace.make([-1, -1, 0], -1),
        Halfspace.make([1, 1, -1], 2 / 3),
    ]
    v = dd_h_to_v(hs, 3)
    assert pts(v.vertices) == pts([[1, 0, 1 / 3], [0, 1, 1 / 3], [0, 0, -2 / 3]])
    assert pts(v.rays) == {(0, 0, -1)}


def test_cube_has_eight_vertices():
    hs = [Halfspace.make(s * np.eye(3)[i], -1) for i in range(3) for s in (1, -1)]
    v = dd_h_to_v(hs, 3)
    assert len(v.vertices) == 8 and len(v.rays) == 0


def test_orthant_truncation():
    cut = dd_add_halfspace(orthant([0.0, 0.0]), Halfspace.make([1, 1], 1))
    assert pts(cut.vertices) == {(1, 0), (0, 1)}
    assert pts(cut.rays) == {(1, 0), (0, 1)}


def test_cut_by_zero_sum_plane():
    cut = dd_add_halfspace(orthant(np.full(3, -1 / 3)), Halfspace.make(np.ones(3), 0))
    want = np.eye(3) - 1 / 3
    assert pts(cut.vertices) == pts(want)
    assert pts(cut.rays) == pts(np.eye(3))


def test_redundant_cut_changes_nothing():
    P = orthant([0.0, 0.0])
    assert pts(dd_add_halfspace(P, Halfspace.make([1, 1], -3)).vertices) == {(0, 0)}


def test_slices():
    s = slice_by_hyperplane(orthant(np.zeros(3)), np.ones(3), 0)
    assert pts(s.vertices) == {(0, 0, 0)} and len(s.rays) == 0
    with pytest.raises(EmptyPolyhedron):
        slice_by_hyperplane(orthant(np.zeros(3)), np.ones(3), -1)


def test_outer_slice_of_tight_primal_family():
    inst, eps = gen_primal_tight_cpp(2)
    res = approximate_body(inst, eps, "primal", selection="lexmin")
    s = slice_by_hyperplane(res.p_level, np.ones(3), 0)
    assert pts(s.vertices) == pts([[0, 0, 0], [1, 0, -1], [0, 1, -1]])


def test_projection_examples():
    v = project_drop_last(VRep.make([[0, 0, 0], [1, 0, -1], [0, 1, -1]]))
    assert pts(v.vertices) == {(0, 0), (1, 0), (0, 1)}
    v = project_drop_last(VRep.make([[1 / 3, 1 / 3, -2 / 3]]))
    assert pts(v.vertices) == pts([[1 / 3, 1 / 3]])
    v = project_drop_last(VRep.make(np.zeros((0, 3)), dim=3))
    assert len(v.vertices) == 0


def test_membership_examples():
    R2 = orthant([0.0, 0.0])
    assert contains_point(R2, [0, 0], 1e-9)
    assert not contains_point(R2, [-1e-6, 0], 1e-9)
    inst, _ = gen_primal_tight_cpp(2)
    assert contains_point(polyhedral_image(inst), [0.25, 0.5], 1e-9)


# linear programs


def test_lp_examples():
    s = solve_lp(LpProblem([-1, -2], [[1, 1]], [1], ["<="]))
    assert s.status == LpStatus.OPTIMAL
    assert np.allclose(s.x, [0, 1]) and s.objective == pytest.approx(-2)
    assert solve_lp(LpProblem([1], [[1]], [-1], ["<="])).status == LpStatus.INFEASIBLE
    assert solve_lp(LpProblem([-1], np.zeros((0, 1)), [], [])).status == LpStatus.UNBOUNDED


def test_lp_complementary_slackness():
    rng = np.random.default_rng(4)
    for _ in range(30):
        A = rng.normal(size=(6, 3))
        b = A @ rng.uniform(0, 1, 3) + rng.uniform(0.1, 1, 6)
        c = rng.normal(size=3)
        s = solve_lp(LpProblem(c, A, b, ["<="] * 6, lb=-5 * np.ones(3), ub=5 * np.ones(3)))
        assert s.status == LpStatus.OPTIMAL
        slack = b - A @ s.x
        assert np.all(slack >= -1e-8)
        assert np.max(np.abs(slack * s.y_dual)) <= 1e-7


# convex expressions and scalarizations


def test_expression_values():
    assert evaluate(Affine([1, 1], -1), [0, 0]) == -1
    assert evaluate(Norm2(np.eye(2), [0, 0], 1), [3, 4]) == pytest.approx(4)
    assert evaluate(Max((Affine([1], -1), Affine([-1]))), [2]) == pytest.approx(1)


def test_expression_subgradients():
    c = np.array([2.0, -1.0])
    assert np.allclose(subgradient(Affine(c, 3), [7, 7]), c)
    Q = np.array([[2.0, 1], [1, 3]])
    x = np.array([1.0, -2])
    assert np.allclose(subgradient(Quad(Q, c), x), Q @ x + c)
    assert np.allclose(subgradient(Norm2(np.eye(2), [0, 0], 1), [3, 4]), [0.6, 0.8])


def test_weighted_sum_examples():
    inst, _, _ = gen_dual_tight_cpp(2)
    m = build_mocp(inst)
    sol = solve_p1(m, np.full(3, 1 / 3))
    assert sol.value == pytest.approx(0, abs=1e-9)
    assert np.allclose(sol.x, [1 / 3, 1 / 3])
    assert solve_p1(m, [1, 0, 0]).value == pytest.approx(0, abs=1e-9)
    ball = build_mocp(ProblemInstance("cpp", 2, 2, [Norm2(np.eye(2), np.zeros(2), 1.0)],
                                      -1.5 * np.ones(2), 1.5 * np.ones(2), G=np.eye(2)))
    sol = solve_p1(ball, [1, 0, 0], gap=1e-8)
    assert sol.value == pytest.approx(-1, abs=1e-7)
    assert np.allclose(sol.x, [-1, 0], atol=1e-3)


def test_translative_examples():
    inst, _ = gen_primal_tight_cpp(2)
    m = build_mocp(inst)
    assert solve_p2(m, [0, 0, -1]).z == pytest.approx(1 / 3, abs=1e-7)
    x0 = np.array([0.3, 0.1])
    assert solve_p2(m, m.gamma(x0)).z <= 1e-9
    d, _, _ = gen_dual_tight_cpp(2)
    assert solve_p2(build_mocp(d), [1, 0, -1]).z == pytest.approx(0, abs=1e-7)


def test_interior_point_examples():
    simplex, _, _ = gen_dual_tight_cpp(2)
    plain = ProblemInstance("cpp", 2, 2, simplex.constraints, simplex.box_lo, simplex.box_hi, G=np.eye(2))
    assert plain.max_violation(find_slater_point(plain)) < 0
    given = ProblemInstance("cpp", 2, 2, simplex.constraints, simplex.box_lo, simplex.box_hi,
                            G=np.eye(2), interior_point=[0.1, 0.1])
    assert np.allclose(find_slater_point(given), [0.1, 0.1])
    flat = ProblemInstance("cpp", 2, 2, [Affine([1, 0]), Affine([-1, 0])], -np.ones(2), np.ones(2), G=np.eye(2))
    with pytest.raises(NoInteriorPoint):
        find_slater_point(flat)


def test_restoration_examples():
    simplex, _, _ = gen_dual_tight_cpp(2)
    x = np.array([0.2, 0.3])
    assert np.allclose(restore_feasibility(simplex, x, np.array([0.1, 0.1])), x)
    y = restore_feasibility(simplex, np.array([0.6, 0.6]), np.array([0.1, 0.1]))
    assert abs(y.sum() - 1) <= 1e-12
    disc = ProblemInstance("cpp", 2, 2, [Norm2(np.eye(2), np.zeros(2), 1.0)], -1.5 * np.ones(2),
                           1.5 * np.ones(2), G=np.eye(2))
    z = restore_feasibility(disc, np.array([1.01, 0.0]), np.zeros(2))
    assert np.linalg.norm(z) <= 1 + 1e-12


# primal loop


def test_primal_start_sets():
    inst, _ = gen_primal_tight_cpp(2)
    P0, _ = initialize_outer(build_mocp(inst))
    assert pts(P0.vertices) == {(0, 0, -1)}
    inst, _ = gen_primal_tight_mocp(2)
    P0, _ = initialize_outer(inst)
    assert pts(P0.vertices) == pts([np.full(3, -1 / 3)])
    P0, _ = initialize_outer(build_mocp(singleton([0.2, 0.4])))
    assert pts(P0.vertices) == pts([[0.2, 0.4, -0.6]])


def test_primal_runs():
    inst, eps = gen_primal_tight_mocp(2)
    res = run_primal(inst, eps)
    assert res.cuts == 0 and pts(res.p_level.vertices) == pts([np.full(3, -1 / 3)])
    inst, eps = gen_primal_tight_cpp(2)
    res = run_primal(build_mocp(inst), eps, selection="lexmin")
    assert res.cuts == 1
    assert pts(res.p_level.vertices) == pts([[0, 0, 0], [1, 0, -1], [0, 1, -1]])
    res = run_primal(build_mocp(singleton([0.2, 0.4])), 0.01)
    assert res.cuts == 0 and pts(res.p_level.vertices) == pts([[0.2, 0.4, -0.6]])


# dual loop


def test_coupling_identity():
    assert coupling_phi([1, 0, -1], [1 / 3, 1 / 3, 0]) == pytest.approx(0)
    assert np.allclose(weight_map_w([0, 0, 5]), [0, 0, 1])
    assert np.allclose(weight_map_w([1, 0, 5]), [1, 0, 0])
    assert np.allclose(weight_map_w([1 / 3, 1 / 3, 1 / 3]), [1 / 3] * 3)


def test_dual_points():
    inst, _, _ = gen_dual_tight_cpp(2)
    m = build_mocp(inst)
    assert np.allclose(dual_point_Dstar(m, [1 / 3, 1 / 3, 0]), [1 / 3, 1 / 3, 0], atol=1e-9)
    assert np.allclose(dual_point_Dstar(m, [0, 0, 0]), [0, 0, -1], atol=1e-9)


def test_dual_start_sets():
    inst, _, _ = gen_dual_tight_cpp(2)
    D0, _ = initialize_dual_outer(build_mocp(inst), wbar=np.full(3, 1 / 3))
    assert pts(D0.vertices) == pts([[1, 0, 1 / 3], [0, 1, 1 / 3], [0, 0, -2 / 3]])
    stair, _ = gen_dual_tight_mocp(2, 1e-3)
    D0, ybar = initialize_dual_outer(stair)
    assert np.allclose(ybar, [1 / 3] * 3)
    assert pts(D0.vertices, 6) == pts([[1, 0, 1 / 3], [0, 1, 1 / 3], [0, 0, 1 / 3]], 6)


def test_dual_runs():
    inst, eps, _ = gen_dual_tight_cpp(2)
    res = run_dual(build_mocp(inst), eps)
    assert res.cuts == 0 and pts(res.p_level.vertices) == pts([[1 / 3, 1 / 3, -2 / 3]])
    res = run_dual(build_mocp(singleton([0.2, 0.4])), 0.01)
    assert res.cuts == 0 and pts(res.p_level.vertices) == pts([[0.2, 0.4, -0.6]])


def test_dual_to_inner_examples():
    D0 = Polyhedron.from_vrep([[1, 0, 1 / 3], [0, 1, 1 / 3], [0, 0, -2 / 3]], [[0, 0, -1]])
    assert pts(dual_to_primal_inner(D0).vertices) == pts([[1 / 3, 1 / 3, -2 / 3]])
    D = Polyhedron.from_vrep([[0, 0], [1, 0]], [[0, -1]])
    inner = dual_to_primal_inner(D)
    assert pts(inner.vertices) == {(0, 0)} and pts(inner.rays) == {(1, 0), (0, 1)}
    stair, _ = gen_dual_tight_mocp(2, 1e-3)
    res = run_dual(stair, 1e-3, selection="lexmin")
    assert pts(res.p_level.vertices, 6) == pts(np.array([[1, 0, 0], [0.5, 0.5, 0], [1 / 3] * 3]), 6)


# projection and bounds


def test_lifting_matrix():
    inst = ProblemInstance("cpp", 2, 2, [Affine([1, 1], -1)], -np.ones(2), np.ones(2), G=np.eye(2))
    assert np.allclose(build_mocp(inst).C, [[1, 0], [0, 1], [-1, -1]])
    G = np.array([[1.0, 0, 0], [0, 1, 0]])
    inst = ProblemInstance("cpp", 3, 2, [Affine([1, 1, 1], -1)], -np.ones(3), np.ones(3), G=G)
    assert np.allclose(build_mocp(inst).C, [[1, 0, 0], [0, 1, 0], [-1, -1, 0]])


def test_body_extraction_examples():
    inst, _, _ = gen_dual_tight_cpp(2)
    Y = extract_Y(orthant(np.zeros(3)), 2)
    assert pts(Y.vertices) == {(0, 0)}
    res = approximate_body(inst, 1 / 3, "dual")
    assert pts(res.y_level.vertices) == pts([[1 / 3, 1 / 3]])
    assert res.certified_bound == pytest.approx(math.sqrt(5) / 3)
    for alg in ("primal", "dual"):
        assert pts(approximate_body(singleton([0.2, 0.4]), 0.01, alg).y_level.vertices) == {(0.2, 0.4)}


def test_bound_values():
    assert error_bound(2, 0.25, "y") == pytest.approx(0.559017, abs=1e-6)
    assert error_bound(1, 0.7, "y") == pytest.approx(0.7)
    assert error_bound(3, 0.25, "p") == pytest.approx(0.5)


# distances


def test_distance_examples():
    S = np.array([[0, 0], [1, 0], [0, 1.0]])
    d, a = dist_point_to_polytope([0.2, 0.2], S)
    assert d == pytest.approx(0, abs=1e-12) and np.allclose(a, [0.2, 0.2])
    d, a = dist_point_to_polytope([2, 0], S)
    assert d == pytest.approx(1) and np.allclose(a, [1, 0])
    assert hausdorff_nested(S, S).d_h == pytest.approx(0, abs=1e-12)
    Y = np.array([[0, 0], [1, 0], [0.25, 0.5]])
    r = hausdorff_nested(Y, S)
    assert r.d_h == pytest.approx(math.sqrt(5) / 4)
    assert np.allclose(r.witness_outer, [0, 1]) and np.allclose(r.witness_inner, [0.25, 0.5])
    r = hausdorff_nested([[1 / 3, 1 / 3]], S)
    assert r.d_h == pytest.approx(math.sqrt(5) / 3)
    assert np.allclose(r.witness_outer, [1, 0])


def test_sampled_examples():
    S = np.array([[0, 0], [1, 0], [0, 1.0]])
    Y = np.array([[0, 0], [1, 0], [0.25, 0.5]])
    assert hausdorff_sampled(S, S) == pytest.approx(0, abs=1e-12)
    est = hausdorff_sampled(Y, S, samples=100_000)
    assert math.sqrt(5) / 4 - 1e-2 <= est <= math.sqrt(5) / 4 + 1e-9
    est = hausdorff_sampled([[1 / 3, 1 / 3]], S, samples=1000)
    assert est <= math.sqrt(5) / 3 + 1e-9


# generators


def test_generator_examples():
    inst, eps = gen_primal_tight_mocp(2)
    assert eps == pytest.approx(1 / 3)
    X = Polyhedron.from_vrep(np.eye(3) - 1 / 3)
    assert pts(feasible_set_polytope(inst).vertices) == pts(X.vertices)
    inst, eps = gen_primal_tight_mocp(1)
    assert eps == pytest.approx(0.5)
    assert pts(feasible_set_polytope(inst).vertices) == {(0.5, -0.5), (-0.5, 0.5)}
    inst, eps = gen_primal_tight_cpp(2)
    assert eps == pytest.approx(0.25)
    assert pts(polyhedral_image(inst).vertices) == {(0, 0), (1, 0), (0.25, 0.5)}
    inst, eps = gen_primal_tight_cpp(3)
    assert eps == pytest.approx(0.2)
    assert contains_point(polyhedral_image(inst), [0.2, 0.2, 0.4], 1e-9)
    for q in (2, 3):
        inst, eps, hints = gen_dual_tight_cpp(q)
        assert eps == pytest.approx(1 / (q + 1))
        assert np.allclose(hints[0][1], np.full(q, 1 / (q + 1)))
