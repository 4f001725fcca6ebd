"""
Dual Benson-type loop.

The loop refines an outer approximation of the lower image in R^{q+1} using
the coupling function and converts the final dual set into an inner
approximation of the upper image.
"""

from __future__ import annotations

import logging

import numpy as np

from .benson_primal import TIE_TOL, pick_vertex, scalar_gap
from .convexprog import ProblemInstance, solve_p1
from .errors import IterationCap, NumericalBreakdown
from .geometry import Halfspace, Polyhedron, dd_add_halfspace, dd_h_to_v
from .result import ApproxResult, error_bound

log = logging.getLogger(__name__)


def weight_map_w(t) -> np.ndarray:
    """``(t_1, ..., t_q, 1 - sum_{i<=q} t_i)``; the last entry of ``t`` is ignored."""
    t = np.asarray(t, dtype=float)
    head = t[:-1]
    return np.append(head, 1.0 - head.sum())


def coupling_phi(y, ystar) -> float:
    y = np.asarray(y, dtype=float)
    ystar = np.asarray(ystar, dtype=float)
    head = ystar[:-1]
    return float(y[:-1] @ head + y[-1] * (1.0 - head.sum()) - ystar[-1])


def phi_halfspace(y) -> Halfspace:
    """The set ``{y* : phi(y, y*) >= 0}`` as a halfspace in the dual space."""
    y = np.asarray(y, dtype=float)
    a = np.append(y[:-1] - y[-1], -1.0)
    return Halfspace.make(a, -y[-1])


def _safe_weight(t) -> np.ndarray:
    w = weight_map_w(t)
    w[np.abs(w) < 1e-12] = 0.0
    return w


def dual_point_Dstar(inst: ProblemInstance, t, gap: float = 1e-7) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    sol = solve_p1(inst, _safe_weight(t), gap)
    return np.append(t[:-1], sol.value)


def initialize_dual_outer(inst: ProblemInstance, wbar=None, gap: float = 1e-7) -> tuple[Polyhedron, np.ndarray]:
    """
    Start set from one weighted-sum solve at ``wbar``: the dual points that
    are nonnegative on ``{Gamma(xbar)} + R^{q+1}_+``.  Returns the polyhedron
    and ``Gamma(xbar)``.
    """
    k = inst.objective_matrix.shape[0]
    q = k - 1
    if wbar is None:
        wbar = inst.wbar if inst.wbar is not None else np.full(k, 1.0 / k)
    wbar = np.asarray(wbar, dtype=float)
    if wbar.shape != (k,) or np.any(wbar <= 0) or abs(wbar.sum() - 1.0) > 1e-9:
        raise ValueError("wbar must be positive with entries summing to one")
    xbar = solve_p1(inst, wbar, gap).x
    ybar = inst.gamma(xbar)
    hs = []
    for i in range(q):
        a = np.zeros(k)
        a[i] = 1.0
        hs.append(Halfspace.make(a, 0.0))
    a = np.zeros(k)
    a[:q] = -1.0
    hs.append(Halfspace.make(a, -1.0))
    hs.append(phi_halfspace(ybar))
    poly = Polyhedron.from_halfspaces(hs, k)
    return Polyhedron(k, poly.A, poly.b, dd_h_to_v(hs, k)), ybar


def dual_to_primal_inner(dual_outer: Polyhedron) -> Polyhedron:
    """Upper-image inner approximation ``{y : w(t)^T y >= t_{q+1}}`` over dual vertices."""
    verts = dual_outer.vertices
    k = dual_outer.dim
    # the dual set projects onto the whole weight simplex, so its vertices
    # include one above each corner and the unit normals make this pointed
    hs = [Halfspace.make(weight_map_w(t), t[-1]) for t in verts]
    vrep = dd_h_to_v(hs, k)
    poly = Polyhedron.from_halfspaces(hs, k)
    return Polyhedron(k, poly.A, poly.b, vrep)


def run_dual(
    inst: ProblemInstance,
    eps: float,
    wbar=None,
    selection: str = "fifo",
    gap: float | None = None,
    max_cuts: int = 10000,
) -> ApproxResult:
    if eps <= 0:
        raise ValueError("eps must be positive")
    gap = scalar_gap(eps) if gap is None else gap
    outer, _ = initialize_dual_outer(inst, wbar, gap)
    solves = 1
    cuts = 0
    confirmed: set = set()
    trace: list = []
    while True:
        verts = outer.vertices
        i = pick_vertex(verts, confirmed, selection)
        if i is None:
            break
        t = verts[i].copy()
        sol = solve_p1(inst, _safe_weight(t), gap)
        solves += 1
        y = inst.gamma(sol.x)
        phi = coupling_phi(y, t)
        rec = {"vertex": t, "phi": phi, "support": y}
        if phi >= -eps - TIE_TOL:
            confirmed.add(verts[i].tobytes())
            rec["action"] = "confirm"
            trace.append(rec)
            continue
        if cuts >= max_cuts:
            raise IterationCap(f"dual loop exceeded {max_cuts} cuts")
        h = phi_halfspace(y)
        if h.a @ t >= h.b - TIE_TOL:
            raise NumericalBreakdown("dual cut does not separate the queried vertex")
        outer = dd_add_halfspace(outer, h)
        cuts += 1
        rec["action"] = "cut"
        rec["cut"] = h.to_json()
        trace.append(rec)
        log.debug("dual cut at %s phi=%.3g", t, phi)
    q = inst.objective_matrix.shape[0] - 1
    log.info("dual run finished: %d cuts, %d solves", cuts, solves)
    return ApproxResult(
        p_level=dual_to_primal_inner(outer),
        kind="inner",
        eps=eps,
        certified_bound=error_bound(q, eps, "p"),
        cuts=cuts,
        scalarization_solves=solves,
        trace=trace,
        dual_outer=outer,
    )
