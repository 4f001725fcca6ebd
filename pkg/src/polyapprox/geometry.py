"""
Floating-point polyhedral kernel.

Polyhedra are kept in one or both of two representations:

* H-representation: rows ``a_i^T y >= b_i`` with ``||a_i||_2 = 1``.
* V-representation: vertices plus extreme rays.

Conversion in both directions goes through a single homogeneous double
description (DD) routine that enumerates the extreme rays of a pointed cone
``{x : R x >= 0}``.  Adjacency of generators is decided by the combinatorial
test: two extreme rays are adjacent iff no third ray is tight on every row
they share.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyPolyhedron, LinealityDetected, RaysPresent

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-8
FEAS_TOL = 1e-9
ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Halfspace:
    """The set ``{y : a^T y >= b}`` with ``a`` normalized to unit length."""

    a: np.ndarray
    b: float

    @classmethod
    def make(cls, a: Sequence[float], b: float) -> Halfspace:
        a = np.asarray(a, dtype=float)
        nrm = float(np.linalg.norm(a))
        if not np.isfinite(nrm) or nrm <= DEDUP_TOL:
            raise ValueError("halfspace normal must be nonzero and finite")
        return cls(a / nrm, float(b) / nrm)

    def to_json(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b}


@dataclass(frozen=True, eq=False)
class VRep:
    vertices: np.ndarray
    rays: np.ndarray

    @classmethod
    def make(cls, vertices, rays=None, dim: int | None = None) -> VRep:
        vertices = np.asarray(vertices, dtype=float)
        if dim is None:
            dim = vertices.shape[1] if vertices.ndim == 2 and vertices.size else np.asarray(rays).shape[1]
        vertices = vertices.reshape(-1, dim)
        rays = np.zeros((0, dim)) if rays is None else np.asarray(rays, dtype=float).reshape(-1, dim)
        if len(rays):
            rays = rays / np.linalg.norm(rays, axis=1, keepdims=True)
        return cls(_dedup(vertices, DEDUP_TOL), _dedup(rays, DEDUP_TOL))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """
    Convex polyhedron with lazily converted representations.

    ``A``/``b`` hold the H-representation (``A y >= b``, unit rows) and
    ``vrep`` the V-representation; either may be ``None``.  Instances are
    treated as immutable; every operation returns a new object.
    """

    dim: int
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    vrep: VRep | None = None

    @classmethod
    def from_halfspaces(cls, halfspaces: Iterable[Halfspace], dim: int) -> Polyhedron:
        hs = list(halfspaces)
        A = np.array([h.a for h in hs], dtype=float).reshape(-1, dim)
        b = np.array([h.b for h in hs], dtype=float)
        return cls(dim, A, b, None)

    @classmethod
    def from_inequalities(cls, A, b) -> Polyhedron:
        """Build from raw rows ``A y >= b`` (rows are normalized here)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        A, b = _normalize_rows(A, b)
        return cls(A.shape[1], A, b, None)

    @classmethod
    def from_vrep(cls, vertices, rays=None, dim: int | None = None) -> Polyhedron:
        v = VRep.make(vertices, rays, dim)
        return cls(v.dim, None, None, v)

    @property
    def halfspaces(self) -> list[Halfspace]:
        if self.A is None:
            return []
        return [Halfspace(a.copy(), float(bb)) for a, bb in zip(self.A, self.b)]

    @property
    def vertices(self) -> np.ndarray:
        return self.with_vrep().vrep.vertices

    @property
    def rays(self) -> np.ndarray:
        return self.with_vrep().vrep.rays

    def with_vrep(self) -> Polyhedron:
        if self.vrep is not None:
            return self
        return Polyhedron(self.dim, self.A, self.b, dd_h_to_v(self.halfspaces, self.dim))

    def with_hrep(self) -> Polyhedron:
        if self.A is not None:
            return self
        A, b = v_to_h(self.vrep)
        return Polyhedron(self.dim, A, b, self.vrep)

    def to_json(self) -> dict:
        out: dict = {"dim": self.dim}
        if self.A is not None:
            out["halfspaces"] = [{"a": a.tolist(), "b": float(bb)} for a, bb in zip(self.A, self.b)]
        if self.vrep is not None:
            out["vertices"] = self.vrep.vertices.tolist()
            out["rays"] = self.vrep.rays.tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Polyhedron:
        dim = int(obj["dim"])
        A = b = vrep = None
        if "halfspaces" in obj:
            hs = obj["halfspaces"]
            A = np.array([h["a"] for h in hs], dtype=float).reshape(-1, dim)
            b = np.array([h["b"] for h in hs], dtype=float)
            A, b = _normalize_rows(A, b)
        if "vertices" in obj or "rays" in obj:
            vrep = VRep.make(obj.get("vertices", []), obj.get("rays", []), dim)
        if A is None and vrep is None:
            raise ValueError("polyhedron JSON needs halfspaces or vertices")
        return cls(dim, A, b, vrep)


# ---------------------------------------------------------------------------
# helpers


def _normalize_rows(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nrm = np.linalg.norm(A, axis=1)
    if np.any(nrm <= DEDUP_TOL):
        raise ValueError("halfspace normal must be nonzero")
    return A / nrm[:, None], b / nrm


def _dedup(X: np.ndarray, tol: float) -> np.ndarray:
    """Drop rows lying within ``tol`` (max-norm) of an earlier row."""
    if len(X) <= 1:
        return X.copy()
    keep: list[int] = []
    for i in range(len(X)):
        if keep and np.min(np.max(np.abs(X[keep] - X[i]), axis=1)) <= tol:
            continue
        keep.append(i)
    return X[keep]


def _initial_basis(R: np.ndarray) -> list[int]:
    """Greedy row selection (input order) until full column rank."""
    D = R.shape[1]
    basis: list[int] = []
    for i in range(len(R)):
        trial = basis + [i]
        if np.linalg.matrix_rank(R[trial], tol=1e-10) == len(trial):
            basis = trial
            if len(basis) == D:
                break
    return basis


class _Cone:
    """
    Extreme rays of ``{x : R x >= 0}`` maintained under row insertion.

    In affine mode the last coordinate is the homogenizing variable ``t``:
    vertices are stored as ``(v, 1)`` and rays as ``(r, 0)`` with ``||r|| = 1``,
    so row residuals are true Euclidean distances for unit halfspace rows.
    """

    def __init__(self, rows: np.ndarray, gens: np.ndarray, affine: bool):
        self.rows = rows
        self.gens = gens
        self.affine = affine

    def _normalize(self, g: np.ndarray) -> np.ndarray:
        if self.affine:
            if g[-1] > 0:
                return g / g[-1]
            g = g.copy()
            g[-1] = 0.0
            return g / np.linalg.norm(g[:-1])
        return g / np.linalg.norm(g)

    def _polish(self, g: np.ndarray, rows: np.ndarray) -> np.ndarray:
        # re-solve the vertex from its tight rows to stop error accumulation
        if not self.affine or g[-1] <= 0:
            return g
        d = len(g) - 1
        if len(rows) < d:
            return g
        A, b = rows[:, :-1], -rows[:, -1]
        sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
        if rank < d or np.max(np.abs(sol - g[:-1])) > 1e-6:
            return g
        out = g.copy()
        out[:-1] = sol
        return out

    def insert(self, row: np.ndarray) -> None:
        gens = self.gens
        if len(gens) == 0:
            self.rows = np.vstack([self.rows, row])
            return
        s = gens @ row
        pos = np.flatnonzero(s > ZERO_TOL)
        neg = np.flatnonzero(s < -ZERO_TOL)
        zero = np.flatnonzero(np.abs(s) <= ZERO_TOL)
        if len(neg) == 0:
            self.rows = np.vstack([self.rows, row])
            return
        D = gens.shape[1]
        Z = np.abs(gens @ self.rows.T) <= ZERO_TOL
        Zi = Z.astype(np.int32)
        new_rows = np.vstack([self.rows, row])
        created: list[np.ndarray] = []
        for p in pos:
            common = Z[p] & Z[neg]
            cnt = common.sum(axis=1)
            cand = cnt >= D - 2
            if not cand.any():
                continue
            nidx = neg[cand]
            common = common[cand]
            cnt = cnt[cand]
            contains = Zi @ common.T.astype(np.int32)
            adjacent = (contains == cnt[None, :]).sum(axis=0) == 2
            for n, com in zip(nidx[adjacent], common[adjacent]):
                g = s[p] * gens[n] - s[n] * gens[p]
                if self.affine and gens[p][-1] == 0 and gens[n][-1] == 0:
                    g[-1] = 0.0
                g = self._normalize(g)
                g = self._polish(g, new_rows[np.append(com, True)])
                created.append(g)
        self.rows = new_rows
        kept = gens[np.concatenate([pos, zero])]
        if created:
            fresh = _dedup(np.array(created), DEDUP_TOL)
            if len(zero):
                zg = gens[zero]
                mask = [np.min(np.max(np.abs(zg - f), axis=1)) > DEDUP_TOL for f in fresh]
                fresh = fresh[mask]
            kept = np.vstack([kept, fresh]) if len(fresh) else kept
        self.gens = kept


def _cone_from_rows(R: np.ndarray, affine: bool) -> _Cone:
    """Run DD over the rows of ``R`` in the given order."""
    D = R.shape[1]
    basis = _initial_basis(R)
    if len(basis) < D:
        raise LinealityDetected(f"constraint rows have rank {len(basis)} < {D}")
    inv = np.linalg.inv(R[basis])
    gens = inv.T.copy()  # row j tight on every basis row except j
    if affine:
        # the t >= 0 row is always basis[0]; every other generator is a ray
        assert basis[0] == 0
        gens[1:, -1] = 0.0
    cone = _Cone(R[basis], np.zeros((0, D)), affine)
    cone.gens = np.array([cone._normalize(g) for g in gens])
    rest = [i for i in range(len(R)) if i not in set(basis)]
    for i in rest:
        cone.insert(R[i])
    return cone


# ---------------------------------------------------------------------------
# public operations


def dd_h_to_v(hrep: Sequence[Halfspace], dim: int) -> VRep:
    """
    Enumerate vertices and extreme rays of ``{y : a_i^T y >= b_i}``.

    Raises EmptyPolyhedron for an empty intersection and LinealityDetected
    when the set contains a line.
    """
    if not hrep:
        raise LinealityDetected("empty H-representation describes all of R^d")
    A = np.array([h.a for h in hrep], dtype=float).reshape(-1, dim)
    b = np.array([h.b for h in hrep], dtype=float)
    return _h_to_v_arrays(A, b)


def _h_to_v_arrays(A: np.ndarray, b: np.ndarray) -> VRep:
    dim = A.shape[1]
    t_row = np.zeros(dim + 1)
    t_row[-1] = 1.0
    R = np.vstack([t_row, np.hstack([A, -b[:, None]])])
    cone = _cone_from_rows(R, affine=True)
    return _split_gens(cone.gens, dim)


def _split_gens(gens: np.ndarray, dim: int) -> VRep:
    is_vert = gens[:, -1] > 0
    verts = gens[is_vert, :-1]
    rays = gens[~is_vert, :-1]
    if len(verts) == 0:
        raise EmptyPolyhedron("no vertex survives the halfspace intersection")
    return VRep(verts.reshape(-1, dim), rays.reshape(-1, dim))


def v_to_h(v: VRep) -> tuple[np.ndarray, np.ndarray]:
    """
    Facet description ``A y >= b`` of ``conv(vertices) + cone(rays)``.

    Works on the cone of valid inequalities ``{(a, b) : a^T v - b >= 0,
    a^T r >= 0}``; its extreme rays with ``a != 0`` are the facets.  The set
    must be full-dimensional, otherwise LinealityDetected is raised.
    """
    if len(v.vertices) == 0:
        raise EmptyPolyhedron("V-representation without vertices")
    dim = v.dim
    rows = [np.append(p, -1.0) for p in v.vertices] + [np.append(r, 0.0) for r in v.rays]
    R = np.array(rows)
    R = R / np.linalg.norm(R, axis=1, keepdims=True)
    cone = _cone_from_rows(R, affine=False)
    G = cone.gens
    a, b = G[:, :-1], G[:, -1]
    nrm = np.linalg.norm(a, axis=1)
    keep = nrm > 1e-9
    A = a[keep] / nrm[keep, None]
    b = b[keep] / nrm[keep]
    return A.reshape(-1, dim), b


def _homog(poly: Polyhedron) -> np.ndarray:
    v = poly.vrep
    g_v = np.hstack([v.vertices, np.ones((len(v.vertices), 1))])
    g_r = np.hstack([v.rays, np.zeros((len(v.rays), 1))])
    return np.vstack([g_v, g_r])


def dd_add_halfspace(poly: Polyhedron, h: Halfspace) -> Polyhedron:
    """
    One incremental DD step: ``poly ∩ {y : h.a^T y >= h.b}``.

    Surviving vertices keep their order and exact values; new vertices are
    appended after them.
    """
    poly = poly.with_vrep().with_hrep()
    dim = poly.dim
    t_row = np.zeros(dim + 1)
    t_row[-1] = 1.0
    R = np.vstack([t_row, np.hstack([poly.A, -poly.b[:, None]])])
    cone = _Cone(R, _homog(poly), affine=True)
    cone.insert(np.append(h.a, -h.b))
    vrep = _split_gens(cone.gens, dim)
    A = np.vstack([poly.A, h.a])
    b = np.append(poly.b, h.b)
    return Polyhedron(dim, A, b, vrep)


def slice_by_hyperplane(poly: Polyhedron, normal, offset: float) -> Polyhedron:
    """Intersection with ``{y : normal^T y = offset}`` via two opposing cuts."""
    normal = np.asarray(normal, dtype=float)
    out = dd_add_halfspace(poly, Halfspace.make(normal, offset))
    return dd_add_halfspace(out, Halfspace.make(-normal, -offset))


def project_drop_last(v: VRep) -> VRep:
    if v.dim < 2:
        raise ValueError("need ambient dimension >= 2")
    if len(v.rays):
        raise RaysPresent("cannot project a V-representation with rays")
    return VRep(_dedup(v.vertices[:, :-1], DEDUP_TOL), np.zeros((0, v.dim - 1)))


def contains_point(poly: Polyhedron, p, tol: float = FEAS_TOL) -> bool:
    poly = poly.with_hrep()
    p = np.asarray(p, dtype=float)
    return bool(np.all(poly.A @ p >= poly.b - tol))
