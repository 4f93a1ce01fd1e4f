"""Independent finite difference Riemannian geometry for invariant metrics.

Nothing here uses the closed form curvature formulas.  A metric is given as a
function returning its ``2m x 2m`` matrix in the basis ``(d/dmu, d/dt)``.
Since the metric is torus invariant it depends on ``mu`` only, so every
``t`` derivative vanishes and the Christoffel symbols, Ricci tensor and
scalar curvature follow from central differences in ``mu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NotPositiveDefinite, StepTooLarge
from .gk_core import GKStructure, frame_at, frame_from_hessian, omega_matrix
from .polytope import DelzantPolytope
from .report import ReportDoc

#: Default step as a fraction of the distance to the boundary.
DEFAULT_STEP_FRACTION = 1e-3


@dataclass(frozen=True, eq=False)
class InvariantMetric:
    """A torus invariant metric on the open part of a toric manifold.

    Attributes
    ----------
    m : int
        Dimension of the polytope; matrices are ``2m x 2m``.
    matrix : callable
        ``matrix(mu) -> ndarray (2m, 2m)``.
    polytope : DelzantPolytope, optional
        Used to size steps and refuse stencils that leave the polytope.
    frame : ndarray (m, m), optional
        Unimodular matrix ``A`` of the coordinates ``y`` with ``mu = A y``
        (and ``t = A^{-T} s``, so the symplectic form keeps its shape).
        ``matrix`` then returns components in the basis ``(d/dy, d/ds)`` and
        finite differences step along the columns of ``A``.  Points are
        still given as ``mu``.
    """

    m: int
    matrix: Callable
    polytope: DelzantPolytope | None = None
    frame: np.ndarray | None = None

    def __call__(self, mu) -> np.ndarray:
        return self.matrix(np.asarray(mu, dtype=float))

    def steps(self, h: float) -> np.ndarray:
        """Rows are the stencil displacements in ``mu`` for step ``h``."""
        A = np.eye(self.m) if self.frame is None else self.frame
        return h * A.T


def _hessian(G: GKStructure, mu, frame):
    return G.potential.jet(mu, 2, G.polytope.distance_to_boundary(mu), frame).hess


def _frame_C(G: GKStructure, frame):
    return G.C if frame is None else frame.T @ G.C @ frame


def kahler_metric(G: GKStructure, frame=None) -> InvariantMetric:
    """``S dmu^2 + S^{-1} dt^2``, the Kähler metric of the potential (``C`` ignored).

    With ``frame`` the components are taken in adapted coordinates, see
    :class:`InvariantMetric`; the Hessian is then built in that frame
    directly, which avoids cancellation next to a slanted facet.
    """

    def mat(mu):
        S = _hessian(G, mu, frame)
        return _block_diag(S, np.linalg.inv(S))

    return InvariantMetric(G.dim, mat, G.polytope, frame)


def gk_metric(G: GKStructure, frame=None) -> InvariantMetric:
    """Symmetric part of ``omega(., J .)``: ``S dmu^2 + sym(Psi^{-1}) dt^2``."""
    C = _frame_C(G, frame)
    return InvariantMetric(G.dim, lambda mu: frame_from_hessian(mu, _hessian(G, mu, frame), C).g,
                           G.polytope, frame)


def conformal_metric(G: GKStructure, factor: Callable) -> InvariantMetric:
    """``factor(p) * g`` where ``g`` is the generalized Kähler metric and ``p`` the angle function."""

    def mat(mu):
        F = frame_at(G, mu)
        return factor(F.p) * F.g

    return InvariantMetric(G.dim, mat, G.polytope)


def g_f_metric(G: GKStructure, f: Callable) -> InvariantMetric:
    """``f S dmu^2 + f^{-1} S^{-1} dt^2`` for a positive function ``f(frame)``."""

    def mat(mu):
        F = frame_at(G, mu)
        fv = f(F)
        return _block_diag(fv * F.S, F.S_inv / fv)

    return InvariantMetric(G.dim, mat, G.polytope)


def almost_kahler_factor(F) -> float:
    """``sqrt((1 - p) / 2)``, equal to ``sqrt(det S / det Psi)`` in dimension four."""
    return float(np.sqrt(0.5 * (1.0 - F.p)))


def almost_kahler_metric(G: GKStructure) -> InvariantMetric:
    """The omega-compatible metric ``g_f`` with ``f = sqrt((1 - p)/2)``."""
    return g_f_metric(G, almost_kahler_factor)


def flat_metric(m: int) -> InvariantMetric:
    return InvariantMetric(m, lambda mu: np.eye(2 * m))


def _block_diag(a, b):
    m = a.shape[0]
    out = np.zeros((2 * m, 2 * m))
    out[:m, :m] = a
    out[m:, m:] = b
    return out


# ------------------------------------------------------------ derivatives


def _check_step(met: InvariantMetric, x, h, reach):
    if met.polytope is not None:
        reach = reach * float(np.max(np.linalg.norm(met.steps(1.0), axis=1)))
        dist = float(met.polytope.distance_to_boundary(x))
        if dist <= reach * h:
            raise StepTooLarge(f"step {h:g} needs distance {reach * h:g} to the boundary, have {dist:g}")


def _default_step(met: InvariantMetric, x, h):
    if h is not None:
        return float(h)
    if met.polytope is None:
        return DEFAULT_STEP_FRACTION
    return DEFAULT_STEP_FRACTION * float(met.polytope.distance_to_boundary(x))


def metric_derivatives(met: InvariantMetric, x, h: float):
    """Metric with its first and second derivatives by central differences.

    Returns ``g``, ``dg[k] = d g / d x^k`` and ``ddg[k, l]`` over all ``2m``
    coordinates (``t`` derivatives are zero).  The coordinates are ``mu``, or
    ``y`` when the metric carries a frame.
    """
    m = met.m
    n = 2 * m
    x = np.asarray(x, dtype=float)
    E = met.steps(h)
    g0 = met(x)
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    plus = [met(x + E[a]) for a in range(m)]
    minus = [met(x - E[a]) for a in range(m)]
    for a in range(m):
        dg[a] = (plus[a] - minus[a]) / (2 * h)
        ddg[a, a] = (plus[a] - 2 * g0 + minus[a]) / h**2
        for b in range(a + 1, m):
            mixed = (met(x + E[a] + E[b]) - met(x + E[a] - E[b])
                     - met(x - E[a] + E[b]) + met(x - E[a] - E[b])) / (4 * h * h)
            ddg[a, b] = ddg[b, a] = mixed
    return g0, dg, ddg


def scalar_curvature_fd(met: InvariantMetric, x, h: float | None = None) -> float:
    """Riemannian scalar curvature by central differences of the metric.

    The default step is ``1e-3`` times the distance to the boundary.  The
    error is second order in ``h`` until rounding takes over.

    Raises
    ------
    StepTooLarge
        If the polytope is known and ``x`` is within ``4 h`` of its boundary.
    NotPositiveDefinite
        If the metric at ``x`` is not positive definite.
    """
    x = np.asarray(x, dtype=float)
    h = _default_step(met, x, h)
    _check_step(met, x, h, 4.0)
    g, dg, ddg = metric_derivatives(met, x, h)
    g = 0.5 * (g + g.T)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"metric is not positive definite at {x.tolist()}") from None
    gi = np.linalg.inv(g)
    # first kind symbols: Gam1[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    Gam1 = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    Gam = np.einsum("kl,lij->kij", gi, Gam1)
    dgi = -np.einsum("ka,mab,bl->mkl", gi, dg, gi)
    dGam1 = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    dGam = np.einsum("mkl,lij->mkij", dgi, Gam1) + np.einsum("kl,mlij->mkij", gi, dGam1)
    # R_ij = d_k Gam^k_ij - d_j Gam^k_ik + Gam^k_kl Gam^l_ij - Gam^k_jl Gam^l_ik
    ric = (np.einsum("kkij->ij", dGam) - np.einsum("jkik->ij", dGam)
           + np.einsum("kkl,lij->ij", Gam, Gam) - np.einsum("kjl,lik->ij", Gam, Gam))
    return float(np.einsum("ij,ij->", gi, ric))


def laplacian_fd(met: InvariantMetric, f: Callable, x, h: float | None = None) -> float:
    """``Delta f = -(1/sqrt(det g)) d_i (sqrt(det g) g^{ij} d_j f)`` for invariant ``f(mu)``.

    The sign is the geometer's one (non-negative spectrum), so the flat
    Laplacian of ``mu1^2`` is ``-2``.
    """
    x = np.asarray(x, dtype=float)
    h = _default_step(met, x, h)
    _check_step(met, x, h, 3.0)
    m = met.m
    E = met.steps(h)

    def flux(y):
        g = met(y)
        grad = np.array([(f(y + E[j]) - f(y - E[j])) / (2 * h) for j in range(m)])
        gi = np.linalg.inv(g)
        return np.sqrt(np.linalg.det(g)) * (gi[:m, :m] @ grad)

    div = sum((flux(x + E[i])[i] - flux(x - E[i])[i]) / (2 * h) for i in range(m))
    return -float(div / np.sqrt(np.linalg.det(met(x))))


def compatibility_check(met: InvariantMetric, points, tol: float = 1e-10) -> ReportDoc:
    """Check that ``T = Omega^{-1} g`` squares to ``-Id`` and ``g`` is positive definite.

    This is the condition for ``g`` to be ``omega``-compatible, that is
    ``g = omega(., T .)`` for an almost complex structure ``T``.
    """
    Om = omega_matrix(met.m)
    worst = 0.0
    worst_at = None
    min_eig = np.inf
    for x in points:
        g = met(x)
        T = np.linalg.solve(Om, g)
        err = float(np.max(np.abs(T @ T + np.eye(2 * met.m))))
        scale = max(1.0, float(np.max(np.abs(T))) ** 2)
        if err / scale > worst:
            worst, worst_at = err / scale, np.asarray(x).tolist()
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(0.5 * (g + g.T)))))
    rep = ReportDoc("omega_compatibility", True)
    rep.add_condition("square_is_minus_identity", worst <= tol, {"max_relative_error": worst})
    rep.add_condition("positive_definite", min_eig > 0, {"smallest_eigenvalue": min_eig})
    if not rep.verdict:
        rep.add_witness({"point": worst_at})
    rep.tolerances["relative"] = tol
    return rep
