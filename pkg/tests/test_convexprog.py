import numpy as np
import pytest

from polyapprox.convexprog import (
    Affine,
    Max,
    Norm2,
    ProblemInstance,
    Quad,
    evaluate,
    expr_from_json,
    find_slater_point,
    restore_feasibility,
    solve_p1,
    solve_p2,
    subgradient,
)
from polyapprox.errors import RankDeficient
from polyapprox.instances import gen_ball_cpp, gen_dual_tight_cpp


def disc():
    return gen_ball_cpp(2)


def test_atoms_evaluate_and_round_trip():
    x = np.array([1.0, 2.0])
    atoms = [
        Affine([1, -1], 0.5),
        Quad(np.eye(2), [0, 1], -1.0),
        Norm2(np.eye(2), [0, 0], 1.0),
        Max((Affine([1, 0]), Affine([0, 1]))),
    ]
    expected = [-0.5, 3.5, np.sqrt(5) - 1, 2.0]
    for g, want in zip(atoms, expected):
        assert evaluate(g, x) == pytest.approx(want)
        back = expr_from_json(g.to_json())
        assert evaluate(back, x) == pytest.approx(want)


def test_subgradient_inequality():
    rng = np.random.default_rng(0)
    g = Max((Norm2(rng.normal(size=(3, 3)), rng.normal(size=3), 0.2), Quad(np.diag([1.0, 2, 3]), np.ones(3))))
    for _ in range(50):
        x, y = rng.normal(size=3), rng.normal(size=3)
        assert evaluate(g, y) >= evaluate(g, x) + subgradient(g, x) @ (y - x) - 1e-9


def test_quad_rejects_indefinite():
    with pytest.raises(ValueError):
        Quad(np.diag([1.0, -1.0]), [0, 0])


def test_rank_deficient_G():
    with pytest.raises(RankDeficient):
        ProblemInstance("cpp", 2, 2, [Affine([1, 0], -1)], -np.ones(2), np.ones(2), G=np.ones((2, 2)))


def test_bad_interior_point():
    with pytest.raises(ValueError):
        ProblemInstance("cpp", 2, 2, [Norm2(np.eye(2), np.zeros(2), 1.0)], -2 * np.ones(2), 2 * np.ones(2),
                        G=np.eye(2), interior_point=[1.0, 1.0])


def test_weighted_sum_on_disc():
    inst = disc()
    w = np.array([0.2, 0.3, 0.5])
    sol = solve_p1(inst, w, gap=1e-8)
    # min over the disc of (w1 - w3, w2 - w3) . x
    c = w[:2] - w[2]
    assert sol.value == pytest.approx(-np.linalg.norm(c), abs=1e-7)
    assert sol.lower_bound <= sol.value + 1e-12
    assert sol.max_violation <= 1e-9


def test_weighted_sum_hint_breaks_tie():
    inst, _, hints = gen_dual_tight_cpp(2)
    w, x = hints[0]
    sol = solve_p1(inst, w)
    assert np.allclose(sol.x, x)


def test_translative_scalarization():
    inst = disc()
    v = np.array([-2.0, -2.0, 4.0])
    sol = solve_p2(inst, v, gap=1e-8)
    assert sol.z > 0
    assert np.all(inst.gamma(sol.x) - sol.z <= v + 1e-6)
    assert sol.w_dual.sum() == pytest.approx(1.0)
    assert np.all(sol.w_dual >= 0)


def test_slater_search_without_hint():
    inst = ProblemInstance("cpp", 2, 2, [Norm2(np.eye(2), [-0.5, 0.0], 0.3)], -np.ones(2), np.ones(2), G=np.eye(2))
    x = find_slater_point(inst)
    assert inst.max_violation(x) < 0


def test_restore_feasibility_lands_on_boundary():
    inst = disc()
    x = restore_feasibility(inst, np.array([2.0, 0.0]), np.zeros(2))
    assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-9)
    assert inst.max_violation(x) <= 1e-9


def test_instance_json_round_trip():
    inst, _, _ = gen_dual_tight_cpp(2)
    back = ProblemInstance.from_json(inst.to_json())
    assert np.allclose(back.G, inst.G)
    assert len(back.hints) == 1
    w = np.array([0.5, 0.3, 0.2])
    assert solve_p1(back, w).value == pytest.approx(solve_p1(inst, w).value)
