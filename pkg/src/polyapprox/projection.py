"""
Driver for approximating ``Y = G[X]``: lift to the multiobjective program
with objectives ``(Gx, -e^T G x)``, run a Benson loop, then cut the upper
image approximation with ``{e^T y = 0}`` and drop the last coordinate.
"""

from __future__ import annotations

import logging

import numpy as np

from .benson_dual import run_dual
from .benson_primal import run_primal
from .convexprog import Affine, Max, ProblemInstance
from .geometry import Polyhedron, VRep, dd_h_to_v, project_drop_last, slice_by_hyperplane, v_to_h, Halfspace
from .result import ApproxResult, error_bound

__all__ = [
    "ApproxResult",
    "approximate_body",
    "build_mocp",
    "error_bound",
    "extract_Y",
    "feasible_set_polytope",
    "polyhedral_image",
    "upper_image_reference",
]

log = logging.getLogger(__name__)


def build_mocp(cpp: ProblemInstance) -> ProblemInstance:
    if cpp.mode != "cpp":
        raise ValueError("build_mocp expects a cpp-mode instance")
    return ProblemInstance(
        mode="mocp",
        n=cpp.n,
        q=cpp.q,
        constraints=cpp.constraints,
        box_lo=cpp.box_lo,
        box_hi=cpp.box_hi,
        C=cpp.objective_matrix,
        interior_point=cpp.interior_point,
        hints=cpp.hints,
        wbar=cpp.wbar,
        warm_start=cpp.warm_start,
    )


def extract_Y(p_level: Polyhedron, q: int) -> Polyhedron:
    """Body-level polytope from an upper-image approximation in R^{q+1}."""
    if p_level.dim != q + 1:
        raise ValueError(f"expected a polyhedron in R^{q + 1}, got R^{p_level.dim}")
    sliced = slice_by_hyperplane(p_level.with_vrep(), np.ones(q + 1), 0.0)
    vrep = project_drop_last(sliced.vrep)
    # substitute y_{q+1} = -sum(y_1..y_q) into the upper-image rows
    src = p_level.with_hrep()
    A = src.A[:, :-1] - src.A[:, -1:]
    b = src.b
    nrm = np.linalg.norm(A, axis=1)
    keep = nrm > 1e-9
    return Polyhedron(q, A[keep] / nrm[keep, None], b[keep] / nrm[keep], vrep)


def approximate_body(
    inst: ProblemInstance,
    eps: float,
    algorithm: str = "primal",
    selection: str = "fifo",
    wbar=None,
    gap: float | None = None,
    max_cuts: int = 10000,
) -> ApproxResult:
    """
    Outer (``algorithm="primal"``) or inner (``"dual"``) approximation.

    For cpp-mode instances the result carries the body-level polytope and the
    body-level bound; mocp-mode instances stop at the upper image.
    """
    mocp = build_mocp(inst) if inst.mode == "cpp" else inst
    if algorithm == "primal":
        res = run_primal(mocp, eps, selection=selection, gap=gap, max_cuts=max_cuts)
    elif algorithm == "dual":
        res = run_dual(mocp, eps, wbar=wbar, selection=selection, gap=gap, max_cuts=max_cuts)
    else:
        raise ValueError(f"algorithm must be 'primal' or 'dual', got {algorithm!r}")
    if inst.mode == "cpp":
        res.y_level = extract_Y(res.p_level, inst.q)
        res.certified_bound = error_bound(inst.q, eps, "y")
    return res


# ---------------------------------------------------------------------------
# exact references for polyhedral instances


def _affine_rows(g) -> list[Affine]:
    if isinstance(g, Affine):
        return [g]
    if isinstance(g, Max):
        return [r for a in g.args for r in _affine_rows(a)]
    raise ValueError("instance has non-affine constraints")


def feasible_set_polytope(inst: ProblemInstance) -> Polyhedron:
    """``X`` (constraints plus box) with both representations."""
    n = inst.n
    hs = []
    for g in inst.constraints:
        for r in _affine_rows(g):
            if np.linalg.norm(r.c) > 1e-12:
                hs.append(Halfspace.make(-r.c, r.d))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hs.append(Halfspace.make(e, inst.box_lo[i]))
        hs.append(Halfspace.make(-e, -inst.box_hi[i]))
    poly = Polyhedron.from_halfspaces(hs, n)
    return Polyhedron(n, poly.A, poly.b, dd_h_to_v(hs, n))


def _clean(vrep: VRep) -> Polyhedron:
    A, b = v_to_h(vrep)
    hs = [Halfspace(a, bb) for a, bb in zip(A, b)]
    return Polyhedron(vrep.dim, A, b, dd_h_to_v(hs, vrep.dim))


def polyhedral_image(inst: ProblemInstance) -> Polyhedron:
    """Exact ``G[X]`` of a full-dimensional polyhedral cpp instance."""
    if inst.mode != "cpp":
        raise ValueError("polyhedral_image expects a cpp-mode instance")
    X = feasible_set_polytope(inst)
    pts = X.vertices @ inst.G.T
    return _clean(VRep.make(pts, None, inst.q))


def upper_image_reference(inst: ProblemInstance) -> Polyhedron:
    """Exact ``Gamma[X] + R^{q+1}_+`` of a polyhedral instance."""
    X = feasible_set_polytope(inst)
    C = inst.objective_matrix
    k = C.shape[0]
    return _clean(VRep.make(X.vertices @ C.T, np.eye(k), k))
