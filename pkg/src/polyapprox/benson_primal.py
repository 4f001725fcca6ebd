"""
Primal Benson-type loop: shrink an outer polyhedral approximation of the
upper image ``Gamma[X] + R^{q+1}_+`` until every vertex is within ``eps``
(along ``e``) of the image.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .convexprog import ProblemInstance, solve_p1, solve_p2
from .errors import IterationCap, NumericalBreakdown
from .geometry import Halfspace, Polyhedron, dd_add_halfspace
from .result import ApproxResult, error_bound

log = logging.getLogger(__name__)

# z within this of eps counts as z <= eps
TIE_TOL = 1e-9


def scalar_gap(eps: float) -> float:
    """Inner solver tolerance for a run at accuracy ``eps``."""
    return min(1e-7, eps * 1e-3)


def pick_vertex(vertices: np.ndarray, confirmed: set, selection: str) -> int | None:
    """Index of the next unconfirmed vertex under ``selection`` (fifo|lexmin)."""
    pending = [i for i, v in enumerate(vertices) if v.tobytes() not in confirmed]
    if not pending:
        return None
    if selection == "fifo":
        return pending[0]
    if selection == "lexmin":
        return min(pending, key=lambda i: tuple(np.round(vertices[i], 9)))
    raise ValueError(f"unknown selection policy {selection!r}")


@dataclass
class PrimalState:
    outer: Polyhedron
    eps: float
    confirmed: set = field(default_factory=set)
    trace: list = field(default_factory=list)
    cuts: int = 0
    solves: int = 0


def initialize_outer(inst: ProblemInstance, gap: float = 1e-7) -> tuple[Polyhedron, int]:
    """
    ``{y} + R^{q+1}_+`` with ``y_i`` the minimum of the i-th objective.

    Returns the polyhedron and the number of scalar solves used.  The certified
    lower bound of each solve is used so the start set contains the image.
    """
    k = inst.objective_matrix.shape[0]
    ideal = np.empty(k)
    for i in range(k):
        w = np.zeros(k)
        w[i] = 1.0
        ideal[i] = solve_p1(inst, w, gap).lower_bound
    eye = np.eye(k)
    poly = Polyhedron(k, eye.copy(), ideal.copy(), None)
    return poly.with_vrep(), k


def run_primal(
    inst: ProblemInstance,
    eps: float,
    selection: str = "fifo",
    gap: float | None = None,
    max_cuts: int = 10000,
) -> ApproxResult:
    if eps <= 0:
        raise ValueError("eps must be positive")
    gap = scalar_gap(eps) if gap is None else gap
    outer, n_solves = initialize_outer(inst, gap)
    st = PrimalState(outer, eps, solves=n_solves)
    while True:
        verts = st.outer.vertices
        i = pick_vertex(verts, st.confirmed, selection)
        if i is None:
            break
        v = verts[i].copy()
        sol = solve_p2(inst, v, gap)
        st.solves += 1
        support = inst.gamma(sol.x)
        rec = {"vertex": v, "z": sol.z, "support": support}
        if sol.z <= eps + TIE_TOL:
            st.confirmed.add(verts[i].tobytes())
            rec["action"] = "confirm"
            st.trace.append(rec)
            log.debug("confirm %s z=%.3g", v, sol.z)
            continue
        if st.cuts >= max_cuts:
            raise IterationCap(f"primal loop exceeded {max_cuts} cuts")
        w = sol.w_dual
        offset = solve_p1(inst, w, gap).lower_bound
        st.solves += 1
        if w @ v >= offset - TIE_TOL:
            raise NumericalBreakdown("supporting cut does not separate the queried vertex")
        h = Halfspace.make(w, offset)
        st.outer = dd_add_halfspace(st.outer, h)
        st.cuts += 1
        rec["action"] = "cut"
        rec["cut"] = h.to_json()
        st.trace.append(rec)
        log.debug("cut %s at vertex %s z=%.3g", h.to_json(), v, sol.z)
    q = inst.objective_matrix.shape[0] - 1
    log.info("primal run finished: %d cuts, %d solves", st.cuts, st.solves)
    return ApproxResult(
        p_level=st.outer,
        kind="outer",
        eps=eps,
        certified_bound=error_bound(q, eps, "p"),
        cuts=st.cuts,
        scalarization_solves=st.solves,
        trace=st.trace,
    )
