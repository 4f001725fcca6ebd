"""
Deterministic instance generators: four worst-case families (parameterized
by the dimension ``q``), random polyhedral instances, and the unit ball.

Each worst-case family also has an expectations record, built by
``worst_case_example``, that the ``verify`` command and the acceptance tests use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convexprog import Affine, Norm2, ProblemInstance
from .errors import EpsTooLarge
from .geometry import VRep, v_to_h
from .linprog import LpProblem, LpStatus, solve_lp

EXAMPLE_NAMES = ("primal-mocp", "primal-cpp", "dual-cpp", "dual-mocp")


def _simplex_constraints(q: int) -> list[Affine]:
    eye = np.eye(q)
    return [Affine(-eye[i]) for i in range(q)] + [Affine(np.ones(q), -1.0)]


def gen_primal_tight_mocp(q: int) -> tuple[ProblemInstance, float]:
    """
    Identity objectives over the simplex ``conv{e^i - e/(q+1)}``; the run at
    ``eps = 1/(q+1)`` stops at its start set.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    k = q + 1
    eye = np.eye(k)
    cons = [Affine(-eye[i], -1.0 / k) for i in range(k)]
    cons += [Affine(np.ones(k)), Affine(-np.ones(k))]
    inst = ProblemInstance("mocp", k, q, cons, -np.ones(k), 2 * np.ones(k), C=np.eye(k))
    return inst, 1.0 / k


def gen_primal_tight_cpp(q: int) -> tuple[ProblemInstance, float]:
    """
    ``Y = {x_q >= 0, x_q <= 2 x_i (i < q), sum_{i<q} x_i + 1.5 x_q <= 1}``
    with ``G = I``; the outer approximation at ``eps = 1/(q+2)`` is the unit simplex.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    eye = np.eye(q)
    cons = [Affine(-eye[q - 1])]
    cons += [Affine(eye[q - 1] - 2 * eye[i]) for i in range(q - 1)]
    cons.append(Affine(np.append(np.ones(q - 1), 1.5), -1.0))
    interior = np.full(q, 1.0 / (4 * q))
    interior[-1] = 1.0 / (8 * q)
    inst = ProblemInstance("cpp", q, q, cons, -np.ones(q), 2 * np.ones(q), G=np.eye(q), interior_point=interior)
    return inst, 1.0 / (q + 2)


def gen_dual_tight_cpp(q: int) -> tuple[ProblemInstance, float, tuple]:
    """Unit simplex with ``G = I``; the centroid is the preferred weighted-sum optimum."""
    if q < 1:
        raise ValueError("q must be >= 1")
    k = q + 1
    hints = ((np.full(k, 1.0 / k), np.full(q, 1.0 / k)),)
    inst = ProblemInstance(
        "cpp", q, q, _simplex_constraints(q), -0.5 * np.ones(q), 1.5 * np.ones(q),
        G=np.eye(q), interior_point=np.full(q, 1.0 / (2 * q)), hints=hints,
    )
    return inst, 1.0 / k, hints


def staircase_points(q: int, eps: float) -> np.ndarray:
    """Rows ``x^0, ..., x^{q+1}`` with ``x^i`` the mean of ``e^1..e^i``."""
    k = q + 1
    pts = np.array([np.append(np.full(i, 1.0 / i), np.zeros(k - i)) for i in range(1, k + 1)])
    x0 = pts.mean(axis=0) - eps
    return np.vstack([x0, pts])


def _dominated_by_others(pts: np.ndarray, i: int) -> bool:
    """Is ``pts[i]`` in ``conv(other points) + R_+``? (LP feasibility)"""
    others = np.delete(pts, i, axis=0)
    m, d = others.shape
    A = np.vstack([others.T, np.ones((1, m))])
    b = np.append(pts[i], 1.0)
    sol = solve_lp(LpProblem(np.zeros(m), A, b, ["<="] * d + ["="]))
    return sol.status == LpStatus.OPTIMAL


def gen_dual_tight_mocp(q: int, eps: float) -> tuple[ProblemInstance, tuple]:
    """
    Identity objectives over ``S = conv{x^0, ..., x^{q+1}}`` where ``x^0`` sits
    ``eps`` below the centroid of the others along ``-e``.

    Raises EpsTooLarge unless every ``x^i`` is a vertex of ``S + R_+``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = q + 1
    pts = staircase_points(q, eps)
    for i in range(len(pts)):
        if _dominated_by_others(pts, i):
            raise EpsTooLarge(f"eps={eps:g} makes point {i} redundant")
    A, b = v_to_h(VRep(pts, np.zeros((0, k))))
    cons = [Affine(-a, bb) for a, bb in zip(A, b)]
    eye = np.eye(k)
    # weighted sums on e^j tie across x^1..x^{j-1}; prefer the last of them
    hints = tuple((eye[j], pts[j]) for j in range(1, k))
    wbar = eye[0] + 1e-3
    wbar = wbar / wbar.sum()
    inst = ProblemInstance(
        "mocp", k, q, cons, -np.ones(k), 2 * np.ones(k), C=np.eye(k),
        interior_point=pts.mean(axis=0), hints=hints, wbar=wbar,
    )
    return inst, hints


def gen_random_polytope_cpp(q: int, n: int, m: int, seed: int) -> ProblemInstance:
    """Random bounded polyhedral instance around a random interior point."""
    if q > n:
        raise ValueError("need q <= n")
    if m < n + 1:
        raise ValueError("need m >= n + 1")
    rng = np.random.default_rng(seed)
    center = rng.uniform(-0.5, 0.5, size=n)
    normals = rng.normal(size=(m, n))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    slack = rng.uniform(0.2, 1.0, size=m)
    cons = [Affine(a, -(a @ center + s)) for a, s in zip(normals, slack)]
    while True:
        G = rng.normal(size=(q, n))
        if np.linalg.matrix_rank(G, tol=1e-6) == q:
            break
    return ProblemInstance(
        "cpp", n, q, cons, center - 1.0, center + 1.0, G=np.round(G, 12), interior_point=center
    )


def gen_ball_cpp(q: int = 2) -> ProblemInstance:
    """Unit ball with ``G = I``."""
    return ProblemInstance(
        "cpp", q, q, [Norm2(np.eye(q), np.zeros(q), 1.0)], -1.5 * np.ones(q), 1.5 * np.ones(q),
        G=np.eye(q), interior_point=np.zeros(q),
    )


# ---------------------------------------------------------------------------
# expectations


@dataclass
class WorstCaseExample:
    name: str
    q: int
    instance: ProblemInstance
    eps: float
    algorithm: str
    expected_cuts: int | None
    expected_dh: float
    expected_vertices: np.ndarray
    # "y": vertices of the body approximation; "p": of the upper-image one
    level: str
    dh_tol: float = 1e-6
    extra: dict = field(default_factory=dict)

    def expectations_json(self) -> dict:
        from .projection import upper_image_reference

        ref = upper_image_reference(self.instance)
        out = {
            "name": self.name,
            "q": self.q,
            "eps": self.eps,
            "algorithm": self.algorithm,
            "level": self.level,
            "expected_dh": self.expected_dh,
            "reference_p_hrep": [{"a": a.tolist(), "b": float(b)} for a, b in zip(ref.A, ref.b)],
        }
        key = "expected_y_vertices" if self.level == "y" else "expected_p_vertices"
        out[key] = self.expected_vertices.tolist()
        if self.expected_cuts is not None:
            out["expected_cuts"] = self.expected_cuts
        out.update(self.extra)
        return out


def dual_tight_reference_D(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``A t >= b`` of the exact lower image for the simplex family."""
    k = q + 1
    rows, rhs = [], []
    for j in range(q):
        a = np.zeros(k)
        a[j] = 1.0
        rows.append(a)
        rhs.append(0.0)
    a = np.zeros(k)
    a[:q] = -1.0
    rows.append(a)
    rhs.append(-1.0)
    for j in range(q):
        a = np.zeros(k)
        a[:q] = 1.0
        a[j] += 1.0
        a[-1] = -1.0
        rows.append(a)
        rhs.append(1.0)
    a = np.zeros(k)
    a[-1] = -1.0
    rows.append(a)
    rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def worst_case_example(name: str, q: int, eps: float | None = None) -> WorstCaseExample:
    if name == "primal-mocp":
        inst, e = gen_primal_tight_mocp(q)
        start = np.full(q + 1, -1.0 / (q + 1))
        return WorstCaseExample(name, q, inst, e, "primal", 0, e * math.sqrt(q + 1), start[None, :], "p")
    if name == "primal-cpp":
        inst, e = gen_primal_tight_cpp(q)
        verts = np.vstack([np.zeros(q), np.eye(q)])
        u = np.full(q, 1.0 / (q + 2))
        u[-1] = 2.0 / (q + 2)
        return WorstCaseExample(
            name, q, inst, e, "primal", 1, e * math.sqrt(q * q + q - 1), verts, "y",
            extra={"expected_witness_inner": u.tolist()},
        )
    if name == "dual-cpp":
        inst, e, _ = gen_dual_tight_cpp(q)
        return WorstCaseExample(
            name, q, inst, e, "dual", 0, e * math.sqrt(q * q + q - 1), np.full((1, q), 1.0 / (q + 1)), "y"
        )
    if name == "dual-mocp":
        e = 1e-3 if eps is None else eps
        inst, _ = gen_dual_tight_mocp(q, e)
        verts = staircase_points(q, e)[1:]
        return WorstCaseExample(
            name, q, inst, e, "dual", q, e * math.sqrt(q + 1), verts, "p", dh_tol=1e-5
        )
    raise ValueError(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")
