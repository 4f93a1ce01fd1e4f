"""Delzant polytopes, their face lattice and adapted affine charts.

A polytope is given by primitive integer inward normals ``nu_j`` and offsets
``lambda_j``; it is the set where every affine function
``L_j(x) = <nu_j, x> + lambda_j`` is non-negative.  Indices of facets are
zero based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    EmptyGrid,
    EmptyInterior,
    NoVertexSelection,
    NotDelzant,
    OutsideDomain,
    PointNotOnFaceInterior,
    PolytopeError,
    RedundantHalfspace,
    Unbounded,
)

#: Membership tolerance for ``L_j(x) >= 0`` and for vertex coincidence.
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DelzantPolytope:
    """A validated Delzant polytope.

    Build instances with :func:`build_polytope`; the constructor does no
    validation.

    Attributes
    ----------
    normals : ndarray, shape (d, m), int
        Primitive inward facet normals.
    offsets : ndarray, shape (d,)
        Offsets, so that ``L = normals @ x + offsets``.
    vertices : ndarray, shape (n_vertices, m)
    vertex_facets : tuple of frozenset
        The ``m`` facets through each vertex.
    faces : tuple of frozenset
        Every face as the set of facets containing it, ordered by codimension
        then lexicographically.  The empty set is the whole polytope.
    """

    normals: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray
    vertex_facets: tuple
    faces: tuple

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def vertices_of(self, face) -> np.ndarray:
        """Vertices lying on the face given by a set of facet indices."""
        face = frozenset(face)
        rows = [k for k, vf in enumerate(self.vertex_facets) if face <= vf]
        return self.vertices[rows]

    def facet_vertices(self, j: int) -> np.ndarray:
        return self.vertices_of({j})

    def distance_to_boundary(self, x) -> np.ndarray:
        """Euclidean distance to the nearest facet hyperplane (negative outside)."""
        L = eval_L(self, x)
        return np.min(L / np.linalg.norm(self.normals, axis=1), axis=-1)

    def contains(self, x, margin: float = 0.0) -> bool:
        return bool(np.all(eval_L(self, x) > margin))


def eval_L(P: DelzantPolytope, x) -> np.ndarray:
    """Evaluate all affine facet functions; broadcasts over leading axes of ``x``."""
    x = np.asarray(x, dtype=float)
    return x @ P.normals.T.astype(float) + P.offsets


def _check_bounded(nu, lam):
    m = nu.shape[1]
    A_ub = -nu
    b_ub = lam
    for i in range(m):
        for sign in (1.0, -1.0):
            c = np.zeros(m)
            c[i] = -sign
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * m, method="highs")
            if res.status == 3:
                raise Unbounded(f"the polytope is unbounded in direction {'+' if sign > 0 else '-'}x{i}")
            if res.status == 2:
                raise EmptyInterior("the half-spaces have empty intersection")


def _inner_radius(nu, lam):
    """Radius of the largest ball inside the polytope (Chebyshev centre LP)."""
    m = nu.shape[1]
    norms = np.linalg.norm(nu, axis=1)
    # variables (x, r): maximise r subject to <nu_j, x> + lam_j >= r |nu_j|
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-nu, norms[:, None]])
    res = linprog(c, A_ub=A_ub, b_ub=lam, bounds=[(None, None)] * m + [(0, None)], method="highs")
    if res.status != 0:
        raise EmptyInterior("could not find an interior point")
    return res.x[-1], res.x[:m]


def build_polytope(normals, offsets) -> DelzantPolytope:
    """Validate facet data and compute vertices and the face lattice.

    Parameters
    ----------
    normals : array_like of int, shape (d, m)
        Inward normals; each must be a nonzero integer vector.
    offsets : array_like, shape (d,)

    Raises
    ------
    Unbounded, EmptyInterior, RedundantHalfspace, NotDelzant
    """
    nu_in = np.asarray(normals)
    if nu_in.ndim != 2 or nu_in.shape[0] == 0 or nu_in.shape[1] == 0:
        raise PolytopeError("normals must be a non-empty (d, m) array")
    if not np.all(np.equal(np.mod(nu_in, 1), 0)):
        raise PolytopeError("normals must have integer entries")
    nu = nu_in.astype(np.int64)
    lam = np.asarray(offsets, dtype=float).reshape(-1)
    d, m = nu.shape
    if lam.shape[0] != d:
        raise PolytopeError(f"{d} normals but {lam.shape[0]} offsets")
    if not np.all(np.isfinite(lam)):
        raise PolytopeError("offsets must be finite")
    if np.any(np.all(nu == 0, axis=1)):
        raise PolytopeError("zero normal vector")
    if d < m + 1:
        raise Unbounded(f"{d} half-spaces cannot bound a polytope in dimension {m}")

    nuf = nu.astype(float)
    _check_bounded(nuf, lam)
    radius, _ = _inner_radius(nuf, lam)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if radius <= MEMBERSHIP_TOL * scale:
        raise EmptyInterior("the polytope has empty interior")

    # candidate vertices: intersections of m facet hyperplanes
    found: list[np.ndarray] = []
    for sub in itertools.combinations(range(d), m):
        A = nuf[list(sub)]
        if abs(np.linalg.det(A)) < 0.5:  # integer matrix: singular iff det == 0
            continue
        x = np.linalg.solve(A, -lam[list(sub)])
        if np.all(nuf @ x + lam >= -MEMBERSHIP_TOL * scale):
            if not any(np.allclose(x, y, atol=MEMBERSHIP_TOL * scale, rtol=0) for y in found):
                found.append(x)
    vertices = np.array(found) + 0.0  # drop negative zeros
    tight = [frozenset(np.flatnonzero(np.abs(nuf @ v + lam) <= MEMBERSHIP_TOL * scale).tolist())
             for v in vertices]

    # every half-space must cut out a facet of dimension m - 1
    for j in range(d):
        on = vertices[[k for k, t in enumerate(tight) if j in t]]
        if len(on) < m:
            raise RedundantHalfspace(j)
        if m > 1 and np.linalg.matrix_rank(on[1:] - on[0], tol=1e-9 * scale) < m - 1:
            raise RedundantHalfspace(j)

    for v, t in zip(vertices, tight):
        if len(t) != m:
            raise NotDelzant(v, sorted(t))
        det = float(np.linalg.det(nuf[sorted(t)]))
        if abs(abs(det) - 1.0) > 1e-9:
            raise NotDelzant(v, sorted(t), round(det))

    faces = set()
    for t in tight:
        for r in range(m + 1):
            for sub in itertools.combinations(sorted(t), r):
                faces.add(frozenset(sub))
    faces = tuple(sorted(faces, key=lambda f: (len(f), sorted(f))))
    return DelzantPolytope(nu, lam, vertices, tuple(tight), faces)


# --------------------------------------------------------------------- charts


@dataclass(frozen=True, eq=False)
class AffineChart:
    """Affine coordinates adapted to a face.

    ``y = N (x - x0)`` where the rows of ``N`` are the selected normals, so
    ``y^i = L_{s_i}(x) - L_{s_i}(x0)``.  The first ``len(face)`` coordinates
    vanish exactly on the face.
    """

    face: frozenset
    x0: np.ndarray
    selection: tuple
    N: np.ndarray
    N_inv: np.ndarray = field(repr=False)

    def to_y(self, x):
        return (np.asarray(x, dtype=float) - self.x0) @ self.N.T

    def to_x(self, y):
        return self.x0 + np.asarray(y, dtype=float) @ self.N_inv.T


def in_face_interior(P: DelzantPolytope, face, x, tol: float = MEMBERSHIP_TOL) -> bool:
    face = frozenset(face)
    L = eval_L(P, x)
    scale = max(1.0, float(np.max(np.abs(P.offsets))))
    on = all(abs(L[j]) <= tol * scale for j in face)
    off = all(L[j] > tol * scale for j in range(P.n_facets) if j not in face)
    return on and off


def adapted_chart(P: DelzantPolytope, face, x0) -> AffineChart:
    """Chart adapted to ``face`` centred at a point of its relative interior.

    The normal selection is ``sorted(face)`` followed by the remaining facets
    of a vertex of the face; among all vertices the lexicographically
    smallest such tuple is used.

    Raises
    ------
    PointNotOnFaceInterior
        If ``x0`` is not in the relative interior of the face.
    NoVertexSelection
        If no vertex of the face yields a unimodular selection.
    """
    face = frozenset(face)
    if face not in P.faces:
        raise PointNotOnFaceInterior(f"{sorted(face)} is not a face of the polytope")
    x0 = np.asarray(x0, dtype=float)
    if not in_face_interior(P, face, x0):
        raise PointNotOnFaceInterior(f"{list(x0)} is not in the relative interior of face {sorted(face)}")
    head = tuple(sorted(face))
    candidates = []
    for vf in P.vertex_facets:
        if face <= vf:
            sel = head + tuple(sorted(vf - face))
            N = P.normals[list(sel)].astype(float)
            if abs(abs(np.linalg.det(N)) - 1.0) <= 1e-9:
                candidates.append(sel)
    if not candidates:
        raise NoVertexSelection(f"no vertex selection for face {sorted(face)}")
    sel = min(candidates)
    N = P.normals[list(sel)].astype(float)
    return AffineChart(face, x0, sel, N, np.linalg.inv(N))


def nearest_vertex_frame(P: DelzantPolytope, x) -> np.ndarray:
    """Integer matrix ``A`` whose inverse has the normals of a vertex near ``x`` as rows.

    The vertex is the one whose facets carry the smallest values of ``L`` at
    ``x`` (compared as sorted tuples).  In the coordinates ``y`` with
    ``x = A y`` the nearest facets are coordinate hyperplanes, so the Hessian
    of a potential with logarithmic boundary behaviour is close to diagonal
    there and its inverse loses no accuracy to cancellation.
    """
    L = eval_L(P, x)
    best = min(P.vertex_facets, key=lambda vf: sorted(L[j] for j in vf))
    N = P.normals[sorted(best)].astype(float)
    return np.round(np.linalg.inv(N))


# --------------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class InteriorGrid:
    """Cell-centred lattice points of the bounding box kept at distance ``eps``.

    Points are in row-major order of the full lattice (first coordinate
    slowest).  ``index`` holds the lattice index of each kept point so a field
    can be laid back onto the full lattice.
    """

    resolution: int
    eps: float
    lower: np.ndarray
    upper: np.ndarray
    points: np.ndarray
    index: np.ndarray

    def __len__(self):
        return self.points.shape[0]


def sample_interior(P: DelzantPolytope, resolution: int, eps: float) -> InteriorGrid:
    """Lattice points at cell centres of the bounding box with ``min L >= eps``.

    Raises
    ------
    EmptyGrid
        If no lattice point satisfies the margin.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    lo = P.vertices.min(axis=0)
    hi = P.vertices.max(axis=0)
    m = P.dim
    centres = [(np.arange(resolution) + 0.5) / resolution * (hi[i] - lo[i]) + lo[i] for i in range(m)]
    mesh = np.meshgrid(*centres, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    idx = np.stack([g.ravel() for g in np.meshgrid(*[np.arange(resolution)] * m, indexing="ij")], axis=1)
    keep = np.min(eval_L(P, pts), axis=1) >= eps
    if not np.any(keep):
        raise EmptyGrid(f"no lattice point at resolution {resolution} has min L >= {eps}")
    return InteriorGrid(resolution, float(eps), lo, hi, pts[keep], idx[keep])


def random_interior(P: DelzantPolytope, n: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
    """Uniform random points of the polytope with ``min L > margin`` (rejection sampling)."""
    lo = P.vertices.min(axis=0)
    hi = P.vertices.max(axis=0)
    out = []
    total = 0
    for _ in range(1000):
        cand = rng.uniform(lo, hi, size=(max(4 * n, 64), P.dim))
        ok = cand[np.min(eval_L(P, cand), axis=1) > margin]
        out.append(ok)
        total += ok.shape[0]
        if total >= n:
            break
    else:
        raise EmptyGrid(f"margin {margin} leaves (almost) no room in the polytope")
    return np.concatenate(out)[:n]


# ---------------------------------------------------------------- facet paths


def facet_path(P: DelzantPolytope, j: int, x_in, n_steps: int = 8, ratio: float = 0.5):
    """Points approaching facet ``j`` orthogonally from an interior point.

    The foot of the perpendicular from ``x_in`` to the facet hyperplane must
    lie in the relative interior of the facet.  The k-th point (``k = 1..n_steps``)
    is ``foot + L_j(x_in) ratio**k nu_j / |nu_j|^2`` so ``L_j`` at the k-th
    point equals ``L_j(x_in) ratio**k``; ``x_in`` itself is not included.

    Returns
    -------
    points : ndarray, shape (n_steps, m)
    lvals : ndarray, shape (n_steps,)
        The value of ``L_j`` along the path.
    foot : ndarray, shape (m,)
    """
    x_in = np.asarray(x_in, dtype=float)
    if not P.contains(x_in):
        raise OutsideDomain(f"{list(x_in)} is not in the open polytope")
    nu = P.normals[j].astype(float)
    L0 = float(eval_L(P, x_in)[j])
    step = nu / (nu @ nu)
    foot = x_in - L0 * step
    if not in_face_interior(P, {j}, foot):
        raise PointNotOnFaceInterior(f"the foot {list(foot)} is not in the interior of facet {j}")
    lvals = L0 * ratio ** np.arange(1, n_steps + 1)
    return foot + lvals[:, None] * step, lvals, foot


def facet_base_points(P: DelzantPolytope, j: int, count: int = 5) -> np.ndarray:
    """Points of the relative interior of facet ``j``: its centroid and pulls towards vertices."""
    V = P.facet_vertices(j)
    c = V.mean(axis=0)
    pts = [c]
    for v in itertools.cycle(V):
        if len(pts) >= count or len(V) == 1:
            break
        pts.append(c + 0.5 * (v - c))
    return np.array(pts)


def max_step_inside(P: DelzantPolytope, x, direction) -> float:
    """Largest ``s`` with ``x + s direction`` in the closed polytope."""
    L = eval_L(P, x)
    rate = P.normals.astype(float) @ np.asarray(direction, dtype=float)
    with np.errstate(divide="ignore"):
        lim = np.where(rate < 0, L / -np.where(rate < 0, rate, 1.0), np.inf)
    return float(np.min(lim))


def analytic_reach(P: DelzantPolytope, x, direction, exclude=()) -> float:
    """Distance in ``s`` from ``x`` to the nearest zero of ``L_k(x + s direction)``, either sign.

    Facets in ``exclude`` are ignored.  Quantities built from the canonical
    potential are analytic in ``s`` within this radius, which bounds how far
    from the boundary an extrapolated approach path may start.
    """
    L = eval_L(P, x)
    rate = P.normals.astype(float) @ np.asarray(direction, dtype=float)
    reach = np.inf
    for k in range(P.n_facets):
        if k in exclude or rate[k] == 0:
            continue
        reach = min(reach, L[k] / abs(rate[k]))
    return float(reach)
