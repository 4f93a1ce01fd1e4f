"""Numerical checks that a structure on the open part extends to the whole manifold.

Three families of checks are provided.

* :func:`check_c1_c2` compares a test structure with a reference one that is
  known to extend (for example the canonical potential with ``C = 0``).  It
  requires ``Psi_test - Psi_ref`` to have a limit at every facet and
  ``det(Psi_ref^{-1} Psi_test)`` to stay bounded away from zero.
* :func:`check_c3` evaluates the positivity of the bilinear form built from
  the two structures at the boundary.  In dimension four it is implied by
  the first two conditions and only reported.
* :func:`acgtf_check` tests the boundary behaviour of a toric metric
  directly: in a chart adapted to a face the matrix ``H_ij = g(X_i, X_j)`` of
  the fundamental vector fields of the selected normals must vanish on the
  facets through the face, with normal slope 2.

"Has a limit" means that samples along a geometric approach path (10 points,
ratio 1/2) extrapolate consistently; see :mod:`torickgk.limits`.  A probe
that does not settle is a failure, never a pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import ChartFailure, PolytopeError, RequiresC1C2
from .gk_core import GKStructure, frame_at
from .limits import path_limit
from .polytope import (
    DelzantPolytope,
    adapted_chart,
    facet_base_points,
    analytic_reach,
    facet_path,
)
from .report import ReportDoc


@dataclass(frozen=True)
class ProbeSettings:
    """Sampling and tolerance settings shared by the checks.

    ``tol_scale`` multiplies every tolerance; values above 1 loosen them.
    """

    base_points: int = 5
    n_steps: int = 10
    ratio: float = 0.5
    rtol: float = 1e-6
    atol: float = 1e-9
    det_floor: float = 1e-6
    slope_target: float = 2.0
    slope_tol: float = 1e-3
    zero_tol: float = 1e-6
    c3_margin: float = 1e-6
    c3_rtol: float = 1e-3
    tol_scale: float = 1.0

    def scaled(self, name):
        v = getattr(self, name)
        if name in ("det_floor", "c3_margin"):
            return v / self.tol_scale
        return v * self.tol_scale

    def tolerances(self):
        keys = ("rtol", "atol", "det_floor", "slope_tol", "zero_tol", "c3_margin", "c3_rtol")
        return {k: self.scaled(k) for k in keys}


DEFAULT_SETTINGS = ProbeSettings()

#: Approach paths start at this fraction of the distance to the nearest other
#: facet, well inside the disc where the sampled quantities are analytic.
START_FRACTION = 0.25


def _same_polytope(P: DelzantPolytope, Q: DelzantPolytope):
    if P is Q:
        return
    if P.normals.shape != Q.normals.shape or not (
            np.array_equal(P.normals, Q.normals) and np.array_equal(P.offsets, Q.offsets)):
        raise PolytopeError("reference and test structures live on different polytopes")


def _facet_paths(P: DelzantPolytope, st: ProbeSettings):
    """Yield ``(facet, base point, path points)`` for every facet probe."""
    for j in range(P.n_facets):
        nu = P.normals[j].astype(float)
        direction = nu / (nu @ nu)
        for b in facet_base_points(P, j, st.base_points):
            delta = START_FRACTION * analytic_reach(P, b, direction, exclude={j})
            pts, _, _ = facet_path(P, j, b + delta / st.ratio * direction, st.n_steps, st.ratio)
            yield j, b, pts


def _hessians(G: GKStructure, pts):
    return [G.jet(x, 2).hess for x in pts]


def check_c1_c2(ref: GKStructure, test: GKStructure, settings: ProbeSettings = DEFAULT_SETTINGS) -> ReportDoc:
    """Smooth extension of ``Psi_test - Psi_ref`` and invertibility of ``Psi_ref^{-1} Psi_test``.

    For every facet probe the entries of ``Psi_test - Psi_ref`` must converge
    along the path, and ``det(Psi_ref^{-1} Psi_test)`` must stay above
    ``det_floor`` and converge to a limit above it.
    """
    _same_polytope(ref.polytope, test.polytope)
    st = settings
    rtol, atol, floor = st.scaled("rtol"), st.scaled("atol"), st.scaled("det_floor")
    rep = ReportDoc("c1_c2", True)
    rep.tolerances.update(st.tolerances())
    rep.notes.append("invertibility is checked as det(Psi_ref^-1 Psi_test) bounded away from zero")
    c1_ok = True
    c2_ok = True
    worst_gap = 0.0
    min_det = np.inf
    n_probes = 0
    for j, b, pts in _facet_paths(ref.polytope, st):
        n_probes += 1
        Sr = _hessians(ref, pts)
        St = _hessians(test, pts)
        Psi_r = [s + ref.C for s in Sr]
        Psi_t = [s + test.C for s in St]
        diff = np.array([t - r for t, r in zip(Psi_t, Psi_r)])
        m = diff.shape[1]
        # differences cannot be resolved below the rounding of the matrices themselves
        size = max(np.max(np.abs(Psi_r[0])), np.max(np.abs(Psi_t[0])))
        for a in range(m):
            for c in range(m):
                est = path_limit(diff[:, a, c], st.ratio, rtol, atol, scale=size)
                worst_gap = max(worst_gap, est.error)
                if not est.converged and c1_ok:
                    c1_ok = False
                    rep.add_witness({
                        "condition": "C1", "facet": j, "base_point": b, "entry": [a, c],
                        "path_points": pts[-3:], "values": diff[-3:, a, c],
                        "extrapolated": est.value, "gap": est.error,
                        "reason": "entries of Psi_test - Psi_ref do not settle along the path"})
        dets = np.array([np.linalg.det(np.linalg.solve(r, t)) for r, t in zip(Psi_r, Psi_t)])
        est = path_limit(dets, st.ratio, rtol, atol)
        min_det = min(min_det, float(np.min(dets)), est.value)
        if (np.min(dets) < floor or not est.converged or est.value < floor) and c2_ok:
            c2_ok = False
            rep.add_witness({
                "condition": "C2", "facet": j, "base_point": b, "path_points": pts[-3:],
                "values": dets[-3:], "extrapolated": est.value, "gap": est.error,
                "reason": ("determinant does not settle" if not est.converged
                           else "determinant reaches the floor")})
    rep.add_condition("C1", c1_ok, {"probes": n_probes, "largest_gap": worst_gap})
    rep.add_condition("C2", c2_ok, {"probes": n_probes, "smallest_determinant": min_det})
    return rep


def _relative_min_eig(Sr, Psi_r, St, Psi_t):
    """Smallest eigenvalue of the test bilinear form relative to the reference one.

    In the coframe ``(dmu, J dmu)`` of the reference structure the symmetric
    parts are ``diag(S_test, sym(Psi_r^T Psi_t^{-1} Psi_r))`` and
    ``diag(S_ref, S_ref)``.
    """
    top = eigh(0.5 * (St + St.T), Sr, eigvals_only=True)
    M = Psi_r.T @ np.linalg.solve(Psi_t, Psi_r)
    bottom = eigh(0.5 * (M + M.T), Sr, eigvals_only=True)
    return float(min(top[0], bottom[0]))


def check_c3(ref: GKStructure, test: GKStructure, c12: ReportDoc | None = None,
             settings: ProbeSettings = DEFAULT_SETTINGS) -> ReportDoc:
    """Positivity at the boundary of the extended bilinear form.

    The form ``beta + (Psi_t - Psi_r) dmu dmu + (Psi_r^T Psi_t^{-1} Psi_r - Psi_r^T) Jdmu Jdmu``
    is compared with ``beta`` through relative eigenvalues, which do not
    depend on the frame and stay finite up to the boundary.  The smallest
    one is extrapolated along every facet probe; the limit minus its
    uncertainty must exceed ``c3_margin``.  Only the sign matters here, so
    the extrapolation tolerance ``c3_rtol`` is looser than for the other
    checks.  In dimension four the condition follows from the other two and
    the verdict is reported as implied.

    Raises
    ------
    RequiresC1C2
        If the smooth extension report is missing or failed.
    """
    st = settings
    if c12 is None:
        c12 = check_c1_c2(ref, test, st)
    if not c12.verdict:
        raise RequiresC1C2("positivity is only meaningful once the smooth extension checks pass")
    margin = st.scaled("c3_margin")
    c3_rtol, atol = st.scaled("c3_rtol"), st.scaled("atol")
    m = ref.dim
    rep = ReportDoc("c3", True)
    rep.tolerances.update(st.tolerances())
    smallest = np.inf
    witness = None
    for j, b, pts in _facet_paths(ref.polytope, st):
        vals = []
        for x in pts:
            Sr = ref.jet(x, 2).hess
            St = test.jet(x, 2).hess
            vals.append(_relative_min_eig(Sr, Sr + ref.C, St, St + test.C))
        # the coupling of normal and tangential directions in this frame is of
        # order sqrt(L), so the eigenvalue is extrapolated in powers of sqrt(L)
        est = path_limit(np.array(vals), np.sqrt(st.ratio), c3_rtol, atol, max_level=6)
        value = est.value - est.error if est.converged else -np.inf
        if value < smallest:
            smallest = value
            witness = {"condition": "C3", "facet": j, "base_point": b, "values": vals[-3:],
                       "extrapolated": est.value, "gap": est.error, "converged": est.converged}
    passed = smallest > margin
    if m == 2:
        rep.add_condition("C3", True, {"implied_in_dimension_four": True,
                                       "smallest_relative_eigenvalue": smallest})
        rep.notes.append("in dimension four positivity follows from the smooth extension checks; "
                         "the eigenvalue is informational")
    else:
        rep.add_condition("C3", passed, {"smallest_relative_eigenvalue": smallest})
        if not passed:
            rep.add_witness(witness)
    return rep


# ------------------------------------------------------------------ ACGTF


def _face_base_points(P: DelzantPolytope, face, count):
    V = P.vertices_of(face)
    c = V.mean(axis=0)
    pts = [c]
    for v in V:
        if len(pts) >= count or len(V) == 1:
            break
        pts.append(c + 0.5 * (v - c))
    return pts


def acgtf_check(G: GKStructure, factor=None, faces=None, base_points: int = 3,
                settings: ProbeSettings = DEFAULT_SETTINGS) -> ReportDoc:
    """Boundary criterion for the toric metric ``f S dmu^2 + f^{-1} S^{-1} dt^2``.

    ``S`` is the Hessian of ``G``'s potential and ``f = factor(frame)``
    (``f = 1``, the Kähler metric, by default).  For each face and each base
    point of its relative interior an adapted chart ``y`` is built and the
    matrix ``H = N S^{-1} N^T / f`` of inner products of the fundamental
    fields of the selected normals is sampled along ``y = s (1, .., 1, 0, .., 0)``
    with ``s -> 0``.  For every facet ``i`` through the face ``H_ij`` must
    tend to 0 and ``dH_ii/dy^i`` to 2; the remaining block must have a
    positive definite limit.

    Raises
    ------
    ChartFailure
        If an adapted chart cannot be built.
    """
    P = G.polytope
    st = settings
    rtol, atol = st.scaled("rtol"), st.scaled("atol")
    slope_tol, zero_tol = st.scaled("slope_tol"), st.scaled("zero_tol")
    faces = [f for f in P.faces if f] if faces is None else [frozenset(f) for f in faces]
    rep = ReportDoc("acgtf", True)
    rep.tolerances.update(st.tolerances())

    def H_at(x, N):
        F = frame_at(G, x)
        f = 1.0 if factor is None else factor(F)
        return N @ F.S_inv @ N.T / f

    slopes_seen = []
    conds = {"limits_exist": True, "vanishing": True, "normal_slope": True, "tangential_positive": True}
    for face in faces:
        r = len(face)
        for x0 in _face_base_points(P, face, base_points):
            try:
                ch = adapted_chart(P, face, x0)
            except PolytopeError as err:
                raise ChartFailure(str(err)) from err
            N = ch.N
            ones = np.zeros(P.dim)
            ones[:r] = 1.0
            direction = ch.N_inv @ ones
            s0 = START_FRACTION * analytic_reach(P, x0, direction, exclude=face)
            s = s0 * st.ratio ** np.arange(st.n_steps)
            Hs = []
            slopes = []
            for sk in s:
                y = sk * ones
                Hs.append(H_at(ch.to_x(y), N))
                row = []
                for i in range(r):
                    e = np.zeros(P.dim)
                    e[i] = 0.25 * sk
                    hp = H_at(ch.to_x(y + e), N)[i, i]
                    hm = H_at(ch.to_x(y - e), N)[i, i]
                    row.append((hp - hm) / (0.5 * sk))
                slopes.append(row)
            Hs = np.array(Hs)
            slopes = np.array(slopes)
            where = {"face": sorted(face), "base_point": x0, "selection": list(ch.selection)}
            limits = np.zeros((P.dim, P.dim))
            # entries are judged against the size of the whole matrix, so a
            # small off-diagonal entry tending to zero is not held to a
            # tighter standard than its neighbours
            hsize = float(np.max(np.abs(Hs)))
            for a in range(P.dim):
                for b in range(P.dim):
                    est = path_limit(Hs[:, a, b], st.ratio, rtol, atol, scale=hsize)
                    limits[a, b] = est.value
                    if not est.converged and conds["limits_exist"]:
                        conds["limits_exist"] = False
                        rep.add_witness({**where, "condition": "limits_exist", "entry": [a, b],
                                         "values": Hs[-3:, a, b], "gap": est.error})
            hscale = 1.0 + float(np.max(np.abs(Hs)))
            for i in range(r):
                if np.any(np.abs(limits[i, :]) > zero_tol * hscale) and conds["vanishing"]:
                    conds["vanishing"] = False
                    rep.add_witness({**where, "condition": "vanishing", "row": i, "limits": limits[i, :]})
                # the slope only has to be resolved well inside its own tolerance
                est = path_limit(slopes[:, i], st.ratio, max(rtol, 0.1 * slope_tol), atol)
                slopes_seen.append(est.value)
                bad = (not est.converged) or abs(est.value - st.slope_target) > slope_tol
                if bad and conds["normal_slope"]:
                    conds["normal_slope"] = False
                    rep.add_witness({**where, "condition": "normal_slope", "facet": ch.selection[i],
                                     "slope": est.value, "converged": est.converged,
                                     "expected": st.slope_target})
            if r < P.dim:
                tail = limits[r:, r:]
                mineig = float(np.min(np.linalg.eigvalsh(0.5 * (tail + tail.T))))
                if mineig <= 0 and conds["tangential_positive"]:
                    conds["tangential_positive"] = False
                    rep.add_witness({**where, "condition": "tangential_positive", "smallest_eigenvalue": mineig})
    for k, v in conds.items():
        details = {}
        if k == "normal_slope" and slopes_seen:
            details = {"min_slope": float(np.min(slopes_seen)), "max_slope": float(np.max(slopes_seen))}
        rep.add_condition(k, v, details)
    return rep


def kahler_reference(P: DelzantPolytope) -> GKStructure:
    """The canonical reference: the Guillemin potential with ``C = 0``."""
    from .potential import Guillemin

    return GKStructure.kahler(P, Guillemin(P))
