import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyapprox.errors import NotNested
from polyapprox.geometry import Polyhedron
from polyapprox.metrics import (
    dist_point_to_polytope,
    hausdorff_nested,
    hausdorff_sampled,
    hausdorff_upper_sets,
)

S2 = np.array([[0, 0], [1, 0], [0, 1.0]])


def test_point_to_segment():
    d, a = dist_point_to_polytope([0.5, 1.0], [[0, 0], [1, 0]])
    assert d == pytest.approx(1.0)
    assert np.allclose(a, [0.5, 0.0])


def test_point_inside_has_zero_distance():
    d, _ = dist_point_to_polytope([0.2, 0.2], S2)
    assert d == pytest.approx(0.0, abs=1e-12)


def test_centroid_in_simplex():
    r = hausdorff_nested([[1 / 3, 1 / 3]], S2)
    assert r.d_h == pytest.approx(np.sqrt(5) / 3)
    assert np.allclose(r.witness_inner, [1 / 3, 1 / 3])


def test_not_nested_raises():
    with pytest.raises(NotNested):
        hausdorff_nested([[2.0, 2.0]], S2)


def test_report_json_keys():
    js = hausdorff_nested(S2, S2).to_json()
    assert set(js) == {"d_h", "witness_outer", "witness_inner"}
    assert js["d_h"] == pytest.approx(0.0, abs=1e-12)


def test_upper_sets_translate():
    outer = Polyhedron.from_vrep([[0.0, 0.0]], np.eye(2))
    inner = Polyhedron.from_vrep([[0.1, 0.1]], np.eye(2))
    assert hausdorff_upper_sets(inner, outer).d_h == pytest.approx(0.1 * np.sqrt(2))
    with pytest.raises(NotNested):
        hausdorff_upper_sets(outer, inner)


def test_sampled_is_deterministic():
    inner = np.array([[0.25, 0.25], [0.5, 0.1], [0.1, 0.5]])
    a = hausdorff_sampled(inner, S2, samples=2000, seed=5)
    b = hausdorff_sampled(inner, S2, samples=2000, seed=5)
    assert a == b
    assert a <= hausdorff_nested(inner, S2).d_h + 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_nearest_point_optimality(seed):
    # the nearest point a satisfies (p - a).(v - a) <= 0 for every vertex v
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(int(rng.integers(1, 9)), int(rng.integers(1, 5))))
    p = 2 * rng.normal(size=V.shape[1])
    d, a = dist_point_to_polytope(p, V)
    assert d == pytest.approx(np.linalg.norm(p - a))
    assert np.max((p - a) @ (V - a).T) <= 1e-9 * max(1.0, d)
    for v in V:
        assert d <= np.linalg.norm(p - v) + 1e-12
