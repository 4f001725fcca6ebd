"""
Convex constraints and the two scalarizations used by the Benson loops.

Both scalarizations are solved with Kelley's cutting-plane method: the
master problem is an LP over the instance box plus linearizations
``g_i(x_k) + s_k^T (x - x_k) <= 0``.  The master value is a certified lower
bound; the upper bound comes from a feasibility-restored iterate, so every
returned point is feasible and every reported lower bound is valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import InstanceInfeasible, NoInteriorPoint, NumericalBreakdown, RankDeficient
from .linprog import LpProblem, LpStatus, solve_lp

log = logging.getLogger(__name__)

FEAS_TOL = 1e-9
DEFAULT_GAP = 1e-7
MAX_KELLEY = 500
BISECTION_STEPS = 60


# ---------------------------------------------------------------------------
# expression atoms


@dataclass(frozen=True, eq=False)
class Affine:
    """``c^T x + d``"""

    c: np.ndarray
    d: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(-1))
        object.__setattr__(self, "d", float(self.d))

    @property
    def n(self) -> int:
        return len(self.c)

    def value(self, x):
        return float(self.c @ x + self.d)

    def subgradient(self, x):
        return self.c.copy()

    def to_json(self):
        return {"affine": {"c": self.c.tolist(), "d": self.d}}


@dataclass(frozen=True, eq=False)
class Quad:
    """``1/2 x^T Q x + c^T x + d`` with ``Q`` symmetric positive semidefinite."""

    Q: np.ndarray
    c: np.ndarray
    d: float = 0.0

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if Q.shape[0] != Q.shape[1] or np.max(np.abs(Q - Q.T), initial=0.0) > 1e-10:
            raise ValueError("Q must be square and symmetric")
        lam, U = np.linalg.eigh(0.5 * (Q + Q.T))
        if lam.min(initial=0.0) < -1e-8:
            raise ValueError("Q is not positive semidefinite")
        Q = (U * np.maximum(lam, 0.0)) @ U.T
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(-1))
        object.__setattr__(self, "d", float(self.d))

    @property
    def n(self) -> int:
        return len(self.c)

    def value(self, x):
        return float(0.5 * x @ self.Q @ x + self.c @ x + self.d)

    def subgradient(self, x):
        return self.Q @ x + self.c

    def to_json(self):
        return {"quad": {"Q": self.Q.tolist(), "c": self.c.tolist(), "d": self.d}}


@dataclass(frozen=True, eq=False)
class Norm2:
    """``||A x + b||_2 - r``"""

    A: np.ndarray
    b: np.ndarray
    r: float = 0.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).reshape(A.shape[0]))
        object.__setattr__(self, "r", float(self.r))

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def value(self, x):
        return float(np.linalg.norm(self.A @ x + self.b) - self.r)

    def subgradient(self, x):
        u = self.A @ x + self.b
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            return np.zeros(self.n)
        return self.A.T @ (u / nrm)

    def to_json(self):
        return {"norm2": {"A": self.A.tolist(), "b": self.b.tolist(), "r": self.r}}


@dataclass(frozen=True, eq=False)
class Max:
    args: tuple

    def __post_init__(self):
        args = tuple(self.args)
        if not args:
            raise ValueError("Max needs at least one argument")
        if len({a.n for a in args}) != 1:
            raise ValueError("Max arguments disagree on dimension")
        object.__setattr__(self, "args", args)

    @property
    def n(self) -> int:
        return self.args[0].n

    def value(self, x):
        return max(a.value(x) for a in self.args)

    def subgradient(self, x):
        vals = [a.value(x) for a in self.args]
        return self.args[int(np.argmax(vals))].subgradient(x)

    def to_json(self):
        return {"max": [a.to_json() for a in self.args]}


ConvexExpr = Union[Affine, Quad, Norm2, Max]


def evaluate(g: ConvexExpr, x) -> float:
    return g.value(np.asarray(x, dtype=float))


def subgradient(g: ConvexExpr, x) -> np.ndarray:
    return g.subgradient(np.asarray(x, dtype=float))


def expr_from_json(obj: dict) -> ConvexExpr:
    if len(obj) != 1:
        raise ValueError(f"expression object must have exactly one key, got {sorted(obj)}")
    (kind, body), = obj.items()
    if kind == "affine":
        return Affine(body["c"], body.get("d", 0.0))
    if kind == "quad":
        return Quad(body["Q"], body["c"], body.get("d", 0.0))
    if kind == "norm2":
        return Norm2(body["A"], body["b"], body.get("r", 0.0))
    if kind == "max":
        return Max(tuple(expr_from_json(a) for a in body))
    raise ValueError(f"unknown expression kind {kind!r}")


def is_polyhedral(g: ConvexExpr) -> bool:
    if isinstance(g, Affine):
        return True
    if isinstance(g, Max):
        return all(is_polyhedral(a) for a in g.args)
    return False


# ---------------------------------------------------------------------------
# instances


@dataclass(eq=False)
class ProblemInstance:
    """
    A convex projection problem (``mode="cpp"``, image ``G x``) or a raw
    multiobjective program (``mode="mocp"``, objectives ``C x`` with q+1 rows).

    The feasible set is ``{x in box : g_i(x) <= 0}``.  ``hints`` pairs weight
    vectors with preferred optimal points for weighted-sum solves whose
    optimum is not unique; ``wbar`` optionally fixes the dual start weight.
    Treat instances as read-only after construction.
    """

    mode: str
    n: int
    q: int
    constraints: tuple
    box_lo: np.ndarray
    box_hi: np.ndarray
    G: np.ndarray | None = None
    C: np.ndarray | None = None
    interior_point: np.ndarray | None = None
    hints: tuple = ()
    wbar: np.ndarray | None = None
    warm_start: bool = True
    _cut_pool: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.constraints = tuple(self.constraints)
        self.box_lo = np.asarray(self.box_lo, dtype=float).reshape(self.n)
        self.box_hi = np.asarray(self.box_hi, dtype=float).reshape(self.n)
        if not (np.all(np.isfinite(self.box_lo)) and np.all(np.isfinite(self.box_hi))):
            raise ValueError("box must be finite")
        if np.any(self.box_lo > self.box_hi):
            raise ValueError("box is empty")
        for g in self.constraints:
            if g.n != self.n:
                raise ValueError("constraint dimension does not match n")
        if self.mode == "cpp":
            self.G = np.asarray(self.G, dtype=float).reshape(self.q, self.n)
            if np.linalg.matrix_rank(self.G, tol=1e-8) < self.q:
                raise RankDeficient("G must have full row rank q")
        elif self.mode == "mocp":
            self.C = np.asarray(self.C, dtype=float).reshape(self.q + 1, self.n)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.hints = tuple((np.asarray(w, dtype=float), np.asarray(x, dtype=float)) for w, x in self.hints)
        if self.wbar is not None:
            self.wbar = np.asarray(self.wbar, dtype=float).reshape(self.q + 1)
        if self.interior_point is not None:
            p = np.asarray(self.interior_point, dtype=float).reshape(self.n)
            self.interior_point = p
            if self.max_violation(p) >= -FEAS_TOL or np.any(p <= self.box_lo) or np.any(p >= self.box_hi):
                raise ValueError("interior_point is not strictly feasible")

    @cached_property
    def objective_matrix(self) -> np.ndarray:
        """``C`` with ``Gamma(x) = C x``; for CPP mode ``C = [G; -e^T G]``."""
        if self.mode == "mocp":
            return self.C
        return np.vstack([self.G, -self.G.sum(axis=0)])

    @cached_property
    def polyhedral(self) -> bool:
        return all(is_polyhedral(g) for g in self.constraints)

    def gamma(self, x) -> np.ndarray:
        return self.objective_matrix @ np.asarray(x, dtype=float)

    def max_violation(self, x) -> float:
        if not self.constraints:
            return -np.inf
        return max(g.value(x) for g in self.constraints)

    @cached_property
    def slater_point(self) -> np.ndarray:
        return find_slater_point(self)

    def to_json(self) -> dict:
        out: dict = {"mode": self.mode, "n": self.n, "q": self.q}
        if self.mode == "cpp":
            out["G"] = self.G.tolist()
        else:
            out["C"] = self.C.tolist()
        out["constraints"] = [g.to_json() for g in self.constraints]
        out["box"] = {"lo": self.box_lo.tolist(), "hi": self.box_hi.tolist()}
        if self.interior_point is not None:
            out["interior_point"] = self.interior_point.tolist()
        if self.hints:
            out["hints"] = [{"w": w.tolist(), "x": x.tolist()} for w, x in self.hints]
        if self.wbar is not None:
            out["wbar"] = self.wbar.tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ProblemInstance:
        return cls(
            mode=obj["mode"],
            n=int(obj["n"]),
            q=int(obj["q"]),
            G=obj.get("G"),
            C=obj.get("C"),
            constraints=tuple(expr_from_json(g) for g in obj.get("constraints", [])),
            box_lo=obj["box"]["lo"],
            box_hi=obj["box"]["hi"],
            interior_point=obj.get("interior_point"),
            hints=tuple((h["w"], h["x"]) for h in obj.get("hints", [])),
            wbar=obj.get("wbar"),
        )


@dataclass
class ScalarSolution:
    x: np.ndarray
    value: float
    lower_bound: float
    iterations: int
    max_violation: float
    z: float | None = None
    w_dual: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Kelley machinery


def _linearize(g: ConvexExpr, xk: np.ndarray) -> tuple[np.ndarray, float]:
    """Cut ``s^T x <= rhs`` valid for ``{g <= 0}``."""
    s = g.subgradient(xk)
    return s, float(s @ xk - g.value(xk))


class _CutSet:
    def __init__(self, inst: ProblemInstance):
        self.inst = inst
        self.rows: list[np.ndarray] = []
        self.rhs: list[float] = []
        if inst.warm_start:
            for s, r in inst._cut_pool.values():
                self.rows.append(s)
                self.rhs.append(r)

    def add(self, i: int, xk: np.ndarray) -> None:
        g = self.inst.constraints[i]
        s, r = _linearize(g, xk)
        self.rows.append(s)
        self.rhs.append(r)
        if self.inst.warm_start and is_polyhedral(g) and isinstance(g, Affine):
            self.inst._cut_pool[i] = (s, r)

    def refine(self, xk: np.ndarray, viols: np.ndarray, threshold: float) -> int:
        added = 0
        for i in np.flatnonzero(viols > threshold):
            self.add(int(i), xk)
            added += 1
        return added


def restore_feasibility(inst: ProblemInstance, x_cand, x_int) -> np.ndarray:
    """
    Move ``x_cand`` toward the strictly feasible ``x_int`` by the smallest
    bisected step that makes every constraint hold.
    """
    x_cand = np.asarray(x_cand, dtype=float)
    x_int = np.asarray(x_int, dtype=float)
    if inst.max_violation(x_cand) <= 0.0:
        return x_cand
    lo, hi = 0.0, 1.0
    d = x_int - x_cand
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if inst.max_violation(x_cand + mid * d) <= 0.0:
            hi = mid
        else:
            lo = mid
    return x_cand + hi * d


def _feasible_point(inst: ProblemInstance, xk: np.ndarray, viol: float) -> np.ndarray:
    xk = np.clip(xk, inst.box_lo, inst.box_hi)
    if viol <= FEAS_TOL:
        return xk
    return restore_feasibility(inst, xk, inst.slater_point)


def _violations(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    return np.array([g.value(x) for g in inst.constraints]) if inst.constraints else np.zeros(0)


def _kelley(inst, c_x, c_z, fixed_A, fixed_b, upper_of, gap):
    """
    Shared Kelley loop over variables ``(x, z)`` (``z`` only if ``c_z`` is
    not None).  ``fixed_A/fixed_b`` are ``<=`` rows kept in every master.
    Returns (x_feasible, upper, lower, iterations, last LP solution).
    """
    n = inst.n
    has_z = c_z is not None
    nv = n + (1 if has_z else 0)
    c = np.append(c_x, c_z) if has_z else np.asarray(c_x, dtype=float)
    lb = np.append(inst.box_lo, -np.inf) if has_z else inst.box_lo
    ub = np.append(inst.box_hi, np.inf) if has_z else inst.box_hi
    cuts = _CutSet(inst)
    n_fixed = len(fixed_b)
    for it in range(1, MAX_KELLEY + 1):
        if cuts.rows:
            cut_A = np.array(cuts.rows)
            if has_z:
                cut_A = np.hstack([cut_A, np.zeros((len(cut_A), 1))])
            A = np.vstack([fixed_A, cut_A]) if n_fixed else cut_A
            b = np.concatenate([fixed_b, cuts.rhs])
        else:
            A = fixed_A.reshape(-1, nv)
            b = np.asarray(fixed_b, dtype=float)
        sol = solve_lp(LpProblem(c, A, b, ["<="] * len(b), lb, ub))
        if sol.status == LpStatus.INFEASIBLE:
            raise InstanceInfeasible("Kelley master became infeasible: no feasible point in the box")
        if sol.status != LpStatus.OPTIMAL:
            raise NumericalBreakdown(f"Kelley master returned {sol.status.value}")
        xk = sol.x[:n]
        lower = sol.objective
        viols = _violations(inst, xk)
        vmax = viols.max(initial=-np.inf)
        added = cuts.refine(xk, viols, gap / 10.0)
        if added and inst.polyhedral and vmax > FEAS_TOL:
            # affine cuts are exact; no need for a Slater point yet
            continue
        x_feas = _feasible_point(inst, xk, vmax)
        upper = upper_of(x_feas)
        if upper - lower <= gap:
            return x_feas, upper, lower, it, sol, n_fixed
        if added == 0:
            if cuts.refine(xk, viols, 0.0) == 0:
                return x_feas, upper, lower, it, sol, n_fixed
    raise NumericalBreakdown(f"Kelley did not reach gap {gap:g} in {MAX_KELLEY} iterations")


def _lookup_hint(inst: ProblemInstance, w: np.ndarray):
    for wh, xh in inst.hints:
        if wh.shape == w.shape and np.max(np.abs(wh - w)) <= 1e-9:
            return xh
    return None


def solve_p1(inst: ProblemInstance, w, gap: float = DEFAULT_GAP) -> ScalarSolution:
    """Weighted sum: ``min w^T Gamma(x)`` over the feasible set."""
    w = np.asarray(w, dtype=float)
    c = inst.objective_matrix.T @ w
    x, upper, lower, it, _, _ = _kelley(
        inst, c, None, np.zeros((0, inst.n)), np.zeros(0), lambda x: float(c @ x), gap
    )
    hint = _lookup_hint(inst, w)
    if hint is not None:
        inside = np.all(hint >= inst.box_lo - FEAS_TOL) and np.all(hint <= inst.box_hi + FEAS_TOL)
        if inside and inst.max_violation(hint) <= FEAS_TOL and c @ hint <= upper + gap:
            x, upper = hint.copy(), float(c @ hint)
    return ScalarSolution(x, upper, min(lower, upper), it, inst.max_violation(x))


def solve_p2(inst: ProblemInstance, v, gap: float = DEFAULT_GAP) -> ScalarSolution:
    """
    Translative scalarization: ``min z`` s.t. ``Gamma(x) - z e <= v``.

    ``w_dual`` holds the master-LP multipliers of the ``q+1`` translation rows
    (nonnegative, summing to one); they weight a supporting halfspace of the
    upper image whose offset must come from a separate weighted-sum solve.
    """
    v = np.asarray(v, dtype=float)
    C = inst.objective_matrix
    k = C.shape[0]
    fixed_A = np.hstack([C, -np.ones((k, 1))])

    def z_of(x):
        return float(np.max(C @ x - v))

    x, upper, lower, it, sol, nf = _kelley(inst, np.zeros(inst.n), 1.0, fixed_A, v, z_of, gap)
    w = -sol.y_dual[:k]
    w[w < 0] = 0.0
    total = w.sum()
    if total <= 0:
        raise NumericalBreakdown("master LP returned zero translation multipliers")
    w = w / total
    return ScalarSolution(x, upper, min(lower, upper), it, inst.max_violation(x), z=upper, w_dual=w)


def find_slater_point(inst: ProblemInstance) -> np.ndarray:
    """
    A point with ``max_i g_i(x) < 0`` strictly inside the box, from Kelley on
    ``min t`` s.t. ``g_i(x) <= t`` and box rows ``lo - x <= t``, ``x - hi <= t``.
    """
    if inst.interior_point is not None:
        return inst.interior_point
    n = inst.n
    eye = np.eye(n)
    box_A = np.vstack([np.hstack([-eye, -np.ones((n, 1))]), np.hstack([eye, -np.ones((n, 1))])])
    box_b = np.concatenate([-inst.box_lo, inst.box_hi])

    def F(x):
        return max(inst.max_violation(x), float(np.max(inst.box_lo - x)), float(np.max(x - inst.box_hi)))

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    center = 0.5 * (inst.box_lo + inst.box_hi)
    for g in inst.constraints:
        s, r = _linearize(g, center)
        rows.append(np.append(s, -1.0))
        rhs.append(r)
    best_x, best = center, F(center)
    lb = np.append(inst.box_lo, -np.inf)
    ub = np.append(inst.box_hi, np.inf)
    c = np.zeros(n + 1)
    c[-1] = 1.0
    for _ in range(MAX_KELLEY):
        A = np.vstack([box_A] + ([np.array(rows)] if rows else []))
        b = np.concatenate([box_b, rhs])
        sol = solve_lp(LpProblem(c, A, b, ["<="] * len(b), lb, ub))
        if sol.status != LpStatus.OPTIMAL:
            raise NumericalBreakdown(f"Slater master returned {sol.status.value}")
        xk = sol.x[:n]
        lower = sol.objective
        fk = F(xk)
        if fk < best:
            best_x, best = xk, fk
        if lower >= -FEAS_TOL:
            break
        if best - lower <= max(1e-9, 1e-3 * abs(best)):
            break
        for g in inst.constraints:
            if g.value(xk) > lower + 1e-12:
                s, r = _linearize(g, xk)
                rows.append(np.append(s, -1.0))
                rhs.append(r)
    if best >= -FEAS_TOL:
        raise NoInteriorPoint(f"minimum of max_i g_i is {best:.3g} >= 0")
    return best_x
