"""Scalar curvatures of toric generalized Kähler structures.

The generalized Kähler scalar curvature depends only on the potential:

    u_GK = - sum_{i,j} d^2 (S^{-1})_{ij} / dmu^i dmu^j,      S = Hess(tau).

It is constant for extremal structures, for example ``4/a`` on ``[0, a]``
and 12 on the standard triangle with the canonical potential.  On four
manifolds the module also produces the Chern type scalar curvature ``u_J``
of the underlying Hermitian structure, the Riemannian scalar curvature
``s_g`` and the auxiliary quantities relating them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AngleSingularity, DegenerateGrid, Dim4Only, InconsistentComputation
from .gk_core import Dim4Scalars, GKStructure, PointFrame, dim4_scalars, frame_from_hessian
from .polytope import nearest_vertex_frame
from .potential import Jet

#: Required agreement between the two closed forms of ``u_J``.
UJ_CONSISTENCY_TOL = 1e-7


def inverse_hessian_derivatives(jet: Jet):
    """``S^{-1}`` with its first and second derivatives.

    Returns
    -------
    S_inv : ndarray (m, m)
    dS_inv : ndarray (m, m, m)
        ``dS_inv[a, b, k] = d(S^{-1})_{ab} / dmu^k``.
    ddS_inv : ndarray (m, m, m, m)
        ``ddS_inv[a, b, k, l] = d^2 (S^{-1})_{ab} / dmu^k dmu^l``.
    """
    S = 0.5 * (jet.hess + jet.hess.T)
    S_inv = np.linalg.inv(S)
    Sk = np.moveaxis(jet.third, 2, 0)  # Sk[k] = dS/dmu^k
    Skl = np.moveaxis(jet.fourth, (2, 3), (0, 1))
    X = np.einsum("ab,kbc->kac", S_inv, Sk)  # S^{-1} S_k
    dS_inv = -np.einsum("kab,bc->kac", X, S_inv)
    # d_l d_k S^{-1} = S^-1 S_l S^-1 S_k S^-1 + S^-1 S_k S^-1 S_l S^-1 - S^-1 S_kl S^-1
    XX = np.einsum("lab,kbc->lkac", X, X)
    two = np.einsum("lkab,bc->klac", XX, S_inv)
    ddS_inv = two + np.swapaxes(two, 0, 1) - np.einsum("ab,klbc,cd->klad", S_inv, Skl, S_inv)
    return S_inv, np.moveaxis(dS_inv, 0, 2), np.moveaxis(ddS_inv, (0, 1), (2, 3))


def u_gk_from_jet(jet: Jet) -> float:
    """Generalized Kähler scalar curvature from a fourth order jet."""
    _, _, dd = inverse_hessian_derivatives(jet)
    return -float(np.einsum("ijij->", dd))


def u_gk_at(G: GKStructure, x) -> float:
    """Generalized Kähler scalar curvature of ``G`` at ``x``; independent of ``C``.

    ``u_GK`` is a full contraction and so does not change under a linear
    change of coordinates.  It is evaluated in the unimodular frame of the
    nearest vertex (:func:`~torickgk.polytope.nearest_vertex_frame`); near a
    facet that is not a coordinate hyperplane the plain coordinates would
    lose about ``eps / L**3`` to cancellation in ``S^{-1}``.
    """
    x = np.asarray(x, dtype=float)
    A = nearest_vertex_frame(G.polytope, x)
    return u_gk_from_jet(G.potential.jet(x, 4, G.polytope.distance_to_boundary(x), A))


# -------------------------------------------------------------- dimension 4


@dataclass(frozen=True)
class CurvaturePoint:
    """Curvature data at one point of a four dimensional structure.

    ``u_J`` is computed from ``u_GK`` and ``Delta p``; ``u_J_bracket`` from
    ``u_GK`` and ``Delta p - 2 p |theta|^2``.  ``s_g = u_J - |theta|^2 / 2``.
    """

    x: np.ndarray
    u_gk: float
    u_J: float
    u_J_bracket: float
    s_g: float
    scalars: Dim4Scalars


def hermitian_scalar_curvature(u_gk: float, sc: Dim4Scalars) -> float:
    """``u_J = u_GK - 2 Delta p / (1 - p) + (4 + 2p)/(1 - p) |theta|^2``."""
    p = sc.p
    if 1.0 - p < 1e-10:
        raise AngleSingularity(f"1 - p = {1.0 - p!r}")
    return u_gk - 2.0 * sc.lap_p / (1.0 - p) + (4.0 + 2.0 * p) / (1.0 - p) * sc.lee_norm2


def hermitian_scalar_curvature_bracket(u_gk: float, sc: Dim4Scalars) -> float:
    """``u_J = u_GK + (4 - 2p)/(1 - p) |theta|^2 - 2 (Delta p - 2 p |theta|^2) / (1 - p)``.

    Equal to :func:`hermitian_scalar_curvature`; the bracket is the pairing of
    ``[J, J*]`` with ``d theta``.
    """
    p = sc.p
    if 1.0 - p < 1e-10:
        raise AngleSingularity(f"1 - p = {1.0 - p!r}")
    return u_gk - 2.0 / (1.0 - p) * sc.bracket + (4.0 - 2.0 * p) / (1.0 - p) * sc.lee_norm2


def curvature_point(G: GKStructure, x) -> CurvaturePoint:
    """``u_GK``, ``u_J`` (two ways) and ``s_g`` at ``x``.

    Raises
    ------
    Dim4Only
        If the polytope is not two dimensional.
    InconsistentComputation
        If the two expressions for ``u_J`` differ by more than
        :data:`UJ_CONSISTENCY_TOL` relative.
    """
    if G.dim != 2:
        raise Dim4Only("u_J and s_g are implemented for four dimensional manifolds")
    x = np.asarray(x, dtype=float)
    jet = G.jet(x, 4)
    F = frame_from_hessian(x, jet.hess, G.C)
    sc = dim4_scalars(F, jet)
    u = u_gk_at(G, x)
    uj = hermitian_scalar_curvature(u, sc)
    ujb = hermitian_scalar_curvature_bracket(u, sc)
    if abs(uj - ujb) > UJ_CONSISTENCY_TOL * max(1.0, abs(uj)):
        raise InconsistentComputation(f"u_J routes disagree at {x.tolist()}: {uj} vs {ujb}")
    return CurvaturePoint(x, u, uj, ujb, uj - 0.5 * sc.lee_norm2, sc)


# --------------------------------------------- Chern-Ricci form (independent)


def _log_det_derivatives(M_inv, third, fourth):
    """Gradient and Hessian of ``log det M`` when ``dM/dmu^i = third[..., i]``."""
    X = np.einsum("ab,bci->iac", M_inv, third)
    grad = np.einsum("iaa->i", X)
    hess = -np.einsum("kab,iba->ik", X, X) + np.einsum("ab,baik->ik", M_inv, fourth)
    return grad, hess


def ricci_form_components(F: PointFrame, jet: Jet) -> np.ndarray:
    """Coefficients ``R[k, j]`` of ``rho = sum R[k, j] dmu^k ^ dt^j``.

    ``rho = dd^c f`` with ``f = -1/2 log det S + log det Psi`` and
    ``d^c f = sum_{ij} f_{,i} Psi^{ij} dt^j``.
    """
    if F.dim != 2:
        raise Dim4Only("the Chern-Ricci form route is implemented for four dimensional manifolds")
    gS, hS = _log_det_derivatives(F.S_inv, jet.third, jet.fourth)
    gP, hP = _log_det_derivatives(F.Psi_inv, jet.third, jet.fourth)
    fg = -0.5 * gS + gP
    fh = -0.5 * hS + hP
    # d_k Psi^{-1} = -Psi^{-1} S_k Psi^{-1}
    dPinv = -np.einsum("ab,bck,cd->kad", F.Psi_inv, jet.third, F.Psi_inv)
    return fh @ F.Psi_inv + np.einsum("i,kij->kj", fg, dPinv)


def _wedge4(a: np.ndarray, b: np.ndarray) -> float:
    """Coefficient of ``e0^e1^e2^e3`` in ``a ^ b`` for antisymmetric 4x4 matrices."""
    return (a[0, 1] * b[2, 3] - a[0, 2] * b[1, 3] + a[0, 3] * b[1, 2]
            + a[1, 2] * b[0, 3] - a[1, 3] * b[0, 2] + a[2, 3] * b[0, 1])


def u_J_from_ricci(G: GKStructure, x) -> float:
    """``u_J = 4 rho ^ F / F ^ F`` with ``F = g(J ., .)`` and ``rho`` the Chern-Ricci form."""
    jet = G.jet(x, 4)
    Fr = frame_from_hessian(x, jet.hess, G.C)
    R = ricci_form_components(Fr, jet)
    rho = np.zeros((4, 4))
    rho[:2, 2:] = R
    rho[2:, :2] = -R.T
    fund = Fr.J.T @ Fr.g
    fund = 0.5 * (fund - fund.T)
    return 4.0 * _wedge4(rho, fund) / _wedge4(fund, fund)


# -------------------------------------------------------------- extremality


@dataclass(frozen=True)
class ExtremalFit:
    """Least squares fit of ``u_GK`` by an affine function on a grid.

    ``coeffs = (a_1, .., a_m, b)`` for ``a . mu + b``; ``residual`` is the
    relative root mean square residual ``|u - fit| / |u|``.
    """

    coeffs: np.ndarray
    residual: float
    is_extremal: bool
    threshold: float
    n_points: int


def extremal_fit(G: GKStructure, grid, threshold: float | None = None) -> ExtremalFit:
    """Fit ``u_GK`` on the grid by an affine function of ``mu``.

    The default threshold is ``1e-6`` for closed form potentials and ``1e-3``
    when the jets come from finite differences.

    Raises
    ------
    DegenerateGrid
        If the design matrix has rank below ``m + 1``.
    """
    X = np.asarray(grid.points, dtype=float)
    n, m = X.shape
    design = np.hstack([X, np.ones((n, 1))])
    if n < m + 1 or np.linalg.matrix_rank(design) < m + 1:
        raise DegenerateGrid(f"{n} grid points do not determine an affine function in dimension {m}")
    u = np.array([u_gk_at(G, x) for x in X])
    coeffs, *_ = np.linalg.lstsq(design, u, rcond=None)
    res = float(np.linalg.norm(design @ coeffs - u) / max(np.linalg.norm(u), 1e-300))
    if threshold is None:
        threshold = 1e-3 if G.potential.uses_finite_differences else 1e-6
    return ExtremalFit(coeffs, res, res <= threshold, threshold, n)
