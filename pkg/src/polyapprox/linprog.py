"""
Dense two-phase primal simplex with Bland's anti-cycling rule.

Multiplier convention: ``y_dual`` satisfies ``c = A^T y + r`` where ``r`` are
the reduced costs; ``y_i <= 0`` on ``<=`` rows, ``y_i >= 0`` on ``>=`` rows
and free on ``=`` rows.  With this convention ``c^T x = b^T y + r^T x`` at an
optimum and ``r_j`` is nonzero only for variables sitting at a bound.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NumericalBreakdown

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
PHASE1_TOL = 1e-9


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    """``min c^T x`` subject to ``A x (sense) b`` and ``lb <= x <= ub``."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: Sequence[str]
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = len(self.c)
        if n == 0:
            raise ValueError("LP needs at least one variable")
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        if len(self.b) != len(self.A) or len(self.senses) != len(self.A):
            raise ValueError("row counts of A, b and senses differ")
        if any(s not in ("<=", ">=", "=") for s in self.senses):
            raise ValueError("row sense must be one of <=, >=, =")
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).reshape(n)
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).reshape(n)
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise ValueError("LP data must be finite")
        if np.any(self.lb > self.ub):
            raise ValueError("variable with lb > ub")


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    y_dual: np.ndarray
    reduced_costs: np.ndarray
    iterations: int = 0
    # Infeasible: Farkas multipliers live in y_dual; Unbounded: x is the ray.
    certificate: str = field(default="")


class _Standard:
    """Map ``LpProblem`` to ``min c'x', A'x' = b', x' >= 0``."""

    def __init__(self, p: LpProblem):
        n = len(p.c)
        cols: list[np.ndarray] = []
        cost: list[float] = []
        self.var_map: list[tuple[str, list[int], float]] = []
        shift = np.zeros(n)
        ub_rows: list[tuple[int, float]] = []
        for j in range(n):
            lo, hi = p.lb[j], p.ub[j]
            col = p.A[:, j]
            k = len(cols)
            if np.isfinite(lo):
                cols.append(col)
                cost.append(p.c[j])
                shift[j] = lo
                self.var_map.append(("shift", [k], lo))
                if np.isfinite(hi):
                    ub_rows.append((k, hi - lo))
            elif np.isfinite(hi):
                cols.append(-col)
                cost.append(-p.c[j])
                shift[j] = hi
                self.var_map.append(("neg", [k], hi))
            else:
                cols.append(col)
                cols.append(-col)
                cost += [p.c[j], -p.c[j]]
                self.var_map.append(("free", [k, k + 1], 0.0))
        m0 = len(p.b)
        nv = len(cols)
        A = np.array(cols).T.reshape(m0, nv) if nv else np.zeros((m0, 0))
        b = p.b - p.A @ shift
        senses = list(p.senses)
        if ub_rows:
            extra = np.zeros((len(ub_rows), nv))
            for r, (k, cap) in enumerate(ub_rows):
                extra[r, k] = 1.0
            A = np.vstack([A, extra])
            b = np.append(b, [cap for _, cap in ub_rows])
            senses += ["<="] * len(ub_rows)
        m = len(b)
        slack_cols = []
        self.slack_of_row: dict[int, int] = {}
        for i, s in enumerate(senses):
            if s == "=":
                continue
            col = np.zeros(m)
            col[i] = 1.0 if s == "<=" else -1.0
            self.slack_of_row[i] = nv + len(slack_cols)
            slack_cols.append(col)
        if slack_cols:
            A = np.hstack([A, np.array(slack_cols).T])
        cost += [0.0] * len(slack_cols)
        self.flip = np.where(b < 0, -1.0, 1.0)
        self.A = A * self.flip[:, None]
        self.b = b * self.flip
        self.c = np.array(cost, dtype=float)
        self.m0 = m0
        self.n_struct = nv
        self.obj_const = float(p.c @ shift)
        self.n = n

    def to_original(self, xs: np.ndarray, direction: bool = False) -> np.ndarray:
        x = np.zeros(self.n)
        for j, (kind, ks, off) in enumerate(self.var_map):
            if kind == "shift":
                x[j] = xs[ks[0]] + (0.0 if direction else off)
            elif kind == "neg":
                x[j] = (0.0 if direction else off) - xs[ks[0]]
            else:
                x[j] = xs[ks[0]] - xs[ks[1]]
        return x


def _pivot(T: np.ndarray, i: int, j: int) -> None:
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])


def _run_simplex(T, basis, cost, allowed, max_iter):
    """Bland-rule iterations on tableau ``T = [B^-1 A | B^-1 b]``."""
    it = 0
    while True:
        if it >= max_iter:
            raise NumericalBreakdown(f"simplex exceeded {max_iter} pivots")
        red = cost - cost[basis] @ T[:, :-1]
        cand = np.flatnonzero((red < -COST_TOL) & allowed)
        if len(cand) == 0:
            return "optimal", it, None
        j = int(cand[0])
        col = T[:, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if len(rows) == 0:
            return "unbounded", it, j
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        ties = rows[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
        i = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, i, j)
        basis[i] = j
        it += 1


def solve_lp(p: LpProblem, max_iter: int | None = None) -> LpSolution:
    """Solve ``p``; see the module docstring for the dual sign convention."""
    st = _Standard(p)
    m, N = st.A.shape
    max_iter = max_iter or 50 * (m + N + 10)

    # phase 1: artificial columns wherever no +1 slack can start the basis
    basis: list[int] = []
    art_rows = []
    for i in range(m):
        k = st.slack_of_row.get(i)
        if k is not None and st.A[i, k] > 0:
            basis.append(k)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    A1 = np.hstack([st.A, np.zeros((m, n_art))])
    for r, i in enumerate(art_rows):
        A1[i, N + r] = 1.0
        basis[i] = N + r
    T = np.hstack([A1, st.b[:, None]])
    cost1 = np.zeros(N + n_art)
    cost1[N:] = 1.0
    allowed = np.ones(N + n_art, dtype=bool)
    iters = 0
    if n_art:
        _, k, _ = _run_simplex(T, basis, cost1, allowed, max_iter)
        iters += k
        infeas = float(cost1[basis] @ T[:, -1])
        if infeas > PHASE1_TOL * (1.0 + np.abs(st.b).max(initial=0.0)):
            B = A1[:, basis]
            y1 = np.linalg.lstsq(B.T, cost1[basis], rcond=None)[0]
            y = _row_duals(st, -y1)
            x = st.to_original(_tableau_point(T, basis, N + n_art)[:N])
            return LpSolution(LpStatus.INFEASIBLE, x, np.nan, y, np.full(len(p.c), np.nan), iters, "farkas")
        # drive remaining artificials out of the basis
        keep_rows = []
        for i in range(m):
            if basis[i] >= N:
                js = np.flatnonzero(np.abs(T[i, :N]) > PIVOT_TOL)
                if len(js):
                    _pivot(T, i, int(js[0]))
                    basis[i] = int(js[0])
                    keep_rows.append(i)
            else:
                keep_rows.append(i)
        T = np.hstack([T[keep_rows, :N], T[keep_rows, -1:]])
        basis = [basis[i] for i in keep_rows]
        rows_kept = keep_rows
    else:
        T = np.hstack([T[:, :N], T[:, -1:]])
        rows_kept = list(range(m))

    cost = st.c
    status, k, j_unb = _run_simplex(T, basis, cost, np.ones(N, dtype=bool), max_iter)
    iters += k
    if status == "unbounded":
        d = np.zeros(N)
        d[j_unb] = 1.0
        for r, bv in enumerate(basis):
            d[bv] = -T[r, j_unb]
        ray = st.to_original(d, direction=True)
        return LpSolution(LpStatus.UNBOUNDED, ray, -np.inf, np.full(len(p.b), np.nan),
                          np.full(len(p.c), np.nan), iters, "ray")

    # clean final solve from the basis
    A_k = st.A[rows_kept]
    b_k = st.b[rows_kept]
    B = A_k[:, basis]
    try:
        xb = np.linalg.solve(B, b_k)
        yk = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown("singular final basis") from exc
    xb[np.abs(xb) < 1e-13] = 0.0
    if xb.min(initial=0.0) < -1e-7:
        raise NumericalBreakdown(f"basic solution infeasible by {-xb.min():.3g}")
    xs = np.zeros(N)
    xs[basis] = np.maximum(xb, 0.0)
    y_std = np.zeros(m)
    y_std[rows_kept] = yk
    x = st.to_original(xs)
    x = np.clip(x, p.lb, p.ub)
    y = _row_duals(st, y_std)
    red = p.c - p.A.T @ y if len(p.b) else p.c.copy()
    return LpSolution(LpStatus.OPTIMAL, x, float(p.c @ x), y, red, iters)


def _tableau_point(T, basis, ncols):
    xs = np.zeros(ncols)
    for r, bv in enumerate(basis):
        xs[bv] = T[r, -1]
    return xs


def _row_duals(st: _Standard, y_std: np.ndarray) -> np.ndarray:
    return (y_std * st.flip)[: st.m0]
