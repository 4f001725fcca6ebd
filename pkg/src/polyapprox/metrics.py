"""
Hausdorff distances between nested convex sets.

For ``M ⊆ N`` the distance is ``max_{b in N} dist(b, M)``; the point-to-set
distance is convex, so for a polytope ``N`` the max sits at a vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LinealityDetected, NotNested
from .geometry import Polyhedron, VRep, contains_point, v_to_h

NEST_TOL = 1e-7
WOLFE_GAP = 1e-12


@dataclass
class DistanceReport:
    d_h: float
    witness_outer: np.ndarray
    witness_inner: np.ndarray
    per_vertex: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "d_h": self.d_h,
            "witness_outer": self.witness_outer.tolist(),
            "witness_inner": self.witness_inner.tolist(),
        }


def _as_points(m) -> np.ndarray:
    if isinstance(m, Polyhedron):
        m = m.with_vrep().vrep
    if isinstance(m, VRep):
        if len(m.rays):
            raise ValueError("expected a bounded set (no rays)")
        return m.vertices
    return np.atleast_2d(np.asarray(m, dtype=float))


def _affine_minimizer(X: np.ndarray) -> np.ndarray:
    """Weights ``a`` (sum 1) minimizing ``||a^T X||`` over the affine hull."""
    k = len(X)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = X @ X.T
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return np.linalg.lstsq(K, rhs, rcond=None)[0][:k]


def _wolfe(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-norm point of ``conv(rows of X)``; returns (point, weights)."""
    m = len(X)
    scale = max(1.0, float(np.max(np.sum(X * X, axis=1))))
    j0 = int(np.argmin(np.sum(X * X, axis=1)))
    S = [j0]
    lam = np.array([1.0])
    cap = 10 * m * m + 10
    for _ in range(cap):
        x = lam @ X[S]
        dots = X @ x
        j = int(np.argmin(dots))
        xx = x @ x
        # gap relative to ||x||^2 so small distances are resolved too;
        # the floor is roughly the rounding noise of the dot products
        if xx - dots[j] <= max(WOLFE_GAP * xx, 1e-15 * scale) or j in S:
            break
        prev = (list(S), lam.copy(), xx)
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_minimizer(X[S])
            if np.all(alpha > 1e-14):
                lam = alpha
                break
            mask = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask, lam / (lam - alpha), np.inf)
            block = int(np.argmin(ratios))
            theta = float(np.clip(ratios[block], 0.0, 1.0))
            lam = lam + theta * (alpha - lam)
            lam[block] = 0.0  # always drop one point so the minor cycle terminates
            keep = lam > 1e-14
            if not keep.any():
                keep[np.argmax(alpha)] = True
                lam[keep] = 1.0
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        y = lam @ X[S]
        if y @ y >= prev[2]:
            # no progress: we are at rounding level, keep the previous iterate
            S, lam = prev[0], prev[1]
            break
    weights = np.zeros(m)
    weights[S] = lam
    return lam @ X[S], weights


def dist_point_to_polytope(p, m) -> tuple[float, np.ndarray]:
    """Euclidean distance from ``p`` to ``conv(m)`` and the nearest point."""
    V = _as_points(m)
    p = np.asarray(p, dtype=float)
    if len(V) == 0:
        raise ValueError("polytope has no vertices")
    x, _ = _wolfe(V - p)
    return float(np.linalg.norm(x)), x + p


def _check_nested(inner: np.ndarray, outer: np.ndarray) -> None:
    for v in inner:
        d, _ = dist_point_to_polytope(v, outer)
        if d > NEST_TOL:
            raise NotNested(f"inner vertex {v.tolist()} is {d:.3g} outside the outer set")


def hausdorff_nested(inner, outer) -> DistanceReport:
    """Hausdorff distance of polytopes with ``conv(inner) ⊆ conv(outer)``."""
    I = _as_points(inner)
    O = _as_points(outer)
    _check_nested(I, O)
    per = []
    best = (-1.0, O[0], I[0])
    for v in O:
        d, a = dist_point_to_polytope(v, I)
        per.append((v, d))
        if d > best[0] + 1e-12:
            best = (d, v, a)
    return DistanceReport(best[0], best[1].copy(), best[2].copy(), per)


def hausdorff_upper_sets(inner: Polyhedron, outer: Polyhedron) -> DistanceReport:
    """
    Hausdorff distance of nested sets of the form ``conv(V) + R^d_+``.

    Distance to an upper set only shrinks along nonnegative directions, so
    the max over ``outer`` is at one of its vertices.  Each distance is taken
    to a truncation ``conv(V ∪ {V + M e^j})`` of ``inner`` with ``M`` large
    enough to contain every nearest point.
    """
    O = outer.with_vrep().vertices
    inner = inner.with_vrep()
    I = inner.vertices
    d = inner.dim
    outer_h = outer.with_hrep()
    for v in I:
        if not contains_point(outer_h, v, NEST_TOL):
            raise NotNested(f"inner vertex {v.tolist()} lies outside the outer set")
    span = float(np.max(np.linalg.norm(O[:, None, :] - I[None, :, :], axis=2)))
    M = 2.0 * span + 1.0
    trunc = np.vstack([I] + [I + M * np.eye(d)[j] for j in range(d)])
    per = []
    best = (-1.0, O[0], I[0])
    for v in O:
        dist, a = dist_point_to_polytope(v, trunc)
        per.append((v, dist))
        if dist > best[0] + 1e-12:
            best = (dist, v, a)
    return DistanceReport(best[0], best[1].copy(), best[2].copy(), per)


# ---------------------------------------------------------------------------
# sampling oracle


def _project_simplex_rows(Y: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    k = Y.shape[1]
    U = -np.sort(-Y, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    idx = np.arange(1, k + 1)
    cond = U - css / idx > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(len(Y)), rho] / (rho + 1)
    return np.maximum(Y - tau[:, None], 0.0)


def _batch_upper_distances(P: np.ndarray, V: np.ndarray, iters: int = 40) -> np.ndarray:
    """Cheap overestimates of ``dist(p, conv V)`` for many ``p`` (accelerated projected gradient)."""
    k = len(V)
    if k == 1:
        return np.linalg.norm(P - V[0], axis=1)
    G = V @ V.T
    L = max(float(np.linalg.eigvalsh(G).max()), 1e-12)
    B = P @ V.T
    lam = np.full((len(P), k), 1.0 / k)
    y = lam.copy()
    t = 1.0
    for _ in range(iters):
        grad = y @ G - B
        new = _project_simplex_rows(y - grad / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = new + ((t - 1.0) / t_new) * (new - lam)
        lam, t = new, t_new
    return np.linalg.norm(P - lam @ V, axis=1)


def _boundary_samples(O: np.ndarray, samples: int, rng: np.random.Generator) -> np.ndarray:
    try:
        A, b = v_to_h(VRep(O, np.zeros((0, O.shape[1]))))
    except LinealityDetected:
        A = None
    if A is None or len(A) == 0:
        W = rng.dirichlet(np.ones(len(O)), size=samples)
        return W @ O
    facets = [np.flatnonzero(np.abs(O @ a - bb) <= NEST_TOL) for a, bb in zip(A, b)]
    which = rng.integers(len(facets), size=samples)
    out = np.empty((samples, O.shape[1]))
    for f, verts in enumerate(facets):
        rows = np.flatnonzero(which == f)
        if len(rows):
            W = rng.dirichlet(np.ones(len(verts)), size=len(rows))
            out[rows] = W @ O[verts]
    return out


def hausdorff_sampled(inner, outer, samples: int = 10_000, seed: int = 0, refine: int = 32) -> float:
    """
    Lower estimate of the nested Hausdorff distance from random boundary
    points of ``outer``.  Deterministic for a fixed seed.
    """
    I = _as_points(inner)
    O = _as_points(outer)
    rng = np.random.default_rng(seed)
    P = _boundary_samples(O, samples, rng)
    est = _batch_upper_distances(P, I)
    top = np.argsort(-est)[:refine]
    return max(dist_point_to_polytope(P[i], I)[0] for i in top)
