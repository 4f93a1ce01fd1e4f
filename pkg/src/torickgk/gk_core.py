"""Pointwise linear algebra of a toric generalized Kähler structure.

Tangent vectors are written in the basis ``(d/dmu^1..m, d/dt^1..m)`` of
action-angle coordinates.  The symplectic form is ``omega = sum dmu^j ^ dt^j``
with matrix ``Omega = [[0, I], [-I, 0]]`` so that ``omega(X, Y) = X^T Omega Y``.

For a potential ``tau`` with Hessian ``S`` and a constant antisymmetric
matrix ``C`` put ``Psi = S + C``.  The complex structure is

    J = [[0, -Psi^{-1}], [Psi, 0]],

its symplectic adjoint (``omega(J X, Y) = omega(X, J* Y)``) is

    J* = Omega^{-1} J^T Omega = [[0, Psi^{-T}], [-Psi^T, 0]],

and ``omega(., J .) = Omega J = diag(Psi, Psi^{-1})`` splits into the metric
``g`` (symmetric part) and the two-form ``b`` with ``Omega J = g - b``.
The endomorphisms ``A = -2 (J - J*)^{-1}`` and ``B = -(J + J*)(J - J*)^{-1}``
repackage ``(J, J*)`` as a symplectic type generalized complex structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateAngle,
    Dim4Only,
    InconsistentComputation,
    SingularPsi,
)
from .polytope import DelzantPolytope
from .potential import Jet, require_convex

#: Agreement required between the two routes to the angle function.
ANGLE_CONSISTENCY_TOL = 1e-9


def omega_matrix(m: int) -> np.ndarray:
    """Matrix of the symplectic form in the basis (d/dmu, d/dt)."""
    Z = np.zeros((m, m))
    I = np.eye(m)
    return np.block([[Z, I], [-I, Z]])


def symplectic_adjoint(E: np.ndarray) -> np.ndarray:
    """The endomorphism ``E*`` with ``omega(E X, Y) = omega(X, E* Y)``."""
    Om = omega_matrix(E.shape[0] // 2)
    return np.linalg.solve(Om, E.T @ Om)


@dataclass(frozen=True, eq=False)
class GKStructure:
    """Polytope, potential and constant antisymmetric matrix ``C``."""

    polytope: DelzantPolytope
    potential: object
    C: np.ndarray

    def __post_init__(self):
        m = self.polytope.dim
        C = np.asarray(self.C, dtype=float)
        if C.shape != (m, m):
            raise ValueError(f"C must have shape {(m, m)}, got {C.shape}")
        if not np.array_equal(C, -C.T):
            raise ValueError("C must be antisymmetric")
        if self.potential.dim != m:
            raise ValueError("potential and polytope dimensions differ")
        object.__setattr__(self, "C", C)

    @property
    def dim(self) -> int:
        return self.polytope.dim

    @classmethod
    def kahler(cls, polytope, potential):
        m = polytope.dim
        return cls(polytope, potential, np.zeros((m, m)))

    def with_C(self, C) -> "GKStructure":
        return GKStructure(self.polytope, self.potential, C)

    def jet(self, x, order: int = 4) -> Jet:
        return self.potential.jet(x, order, self.polytope.distance_to_boundary(x))


def c_of(C: np.ndarray) -> float:
    """The entry ``c = C[0, 1]`` of a 2x2 antisymmetric matrix."""
    if C.shape != (2, 2):
        raise Dim4Only("c is defined only for 2x2 matrices")
    return float(C[0, 1])


@dataclass(frozen=True, eq=False)
class PointFrame:
    """All pointwise tensors of the structure at one point.

    ``p`` (the angle function ``-1/4 tr(J J*)``) is filled only when the
    polytope is two dimensional; ``trace_JJdual`` is always available.
    """

    x: np.ndarray
    S: np.ndarray
    C: np.ndarray
    Psi: np.ndarray
    S_inv: np.ndarray
    Psi_inv: np.ndarray
    J: np.ndarray
    Jdual: np.ndarray
    A: np.ndarray
    B: np.ndarray
    g: np.ndarray
    b: np.ndarray
    detS: float
    detPsi: float
    trace_JJdual: float
    p: float | None

    @property
    def dim(self) -> int:
        return self.S.shape[0]


def frame_from_hessian(x, S, C) -> PointFrame:
    """Build a :class:`PointFrame` from the Hessian ``S`` and ``C``.

    Raises
    ------
    NotConvexAt
        If ``S`` is not positive definite.
    SingularPsi
        If ``S + C`` is numerically singular.
    """
    x = np.asarray(x, dtype=float)
    S = 0.5 * (S + S.T)
    m = S.shape[0]
    Lc = require_convex(S, x)
    Psi = S + C
    detS = float(np.prod(np.diag(Lc)) ** 2)
    detPsi = float(np.linalg.det(Psi))
    if not np.isfinite(detPsi) or abs(detPsi) <= 1e-14 * detS:
        raise SingularPsi(f"S + C is singular at {x.tolist()}")
    I = np.eye(m)
    S_inv = np.linalg.solve(S, I)
    S_inv = 0.5 * (S_inv + S_inv.T)
    Psi_inv = np.linalg.solve(Psi, I)
    Z = np.zeros((m, m))
    J = np.block([[Z, -Psi_inv], [Psi, Z]])
    Jdual = np.block([[Z, Psi_inv.T], [-Psi.T, Z]])
    D_minus = J - Jdual
    D_plus = J + Jdual
    Dm_inv = np.linalg.inv(D_minus)
    A = -2.0 * Dm_inv
    B = -D_plus @ Dm_inv
    OJ = omega_matrix(m) @ J
    g = 0.5 * (OJ + OJ.T)
    b = -0.5 * (OJ - OJ.T)
    tr = float(np.trace(J @ Jdual))
    p = None
    if m == 2:
        p = -0.25 * tr
        c = float(C[0, 1])
        closed = (c * c - detS) / detPsi
        if abs(p - closed) > ANGLE_CONSISTENCY_TOL * max(1.0, abs(closed)):
            raise InconsistentComputation(f"angle function routes disagree: {p} vs {closed}")
    return PointFrame(x, S, C, Psi, S_inv, Psi_inv, J, Jdual, A, B, g, b, detS, detPsi, tr, p)


def frame_at(G: GKStructure, x) -> PointFrame:
    """Pointwise tensors of ``G`` at ``x``."""
    return frame_from_hessian(x, G.jet(x, 2).hess, G.C)


def q_matrix(F: PointFrame) -> np.ndarray:
    """Complex matrix ``Q_ij = omega(K d/dt^i, d/dt^j)`` with ``K = A + iB``.

    Its real part is ``-S^{-1}`` when ``C = 0`` and its imaginary part is
    antisymmetric.
    """
    m = F.dim
    K = F.A + 1j * F.B
    Om = omega_matrix(m)
    return K[:, m:].T @ Om[:, m:]


# --------------------------------------------------------- dimension four


def det_derivatives(S_inv: np.ndarray, detS: float, third: np.ndarray, fourth: np.ndarray):
    """First and second derivatives of ``det S`` where ``S = Hess(tau)``.

    ``third[..., i]`` is ``dS/dmu^i`` and ``fourth[..., i, k]`` is
    ``d^2 S / dmu^i dmu^k``.
    """
    m = S_inv.shape[0]
    M = np.einsum("ab,bci->iac", S_inv, third)  # M[i] = S^{-1} S_i
    trM = np.einsum("iaa->i", M)
    dD = detS * trM
    cross = np.einsum("kab,iba->ik", M, M)
    second = np.einsum("ab,baik->ik", S_inv, fourth)
    ddD = detS * (np.outer(trM, trM) - cross + second)
    return dD, 0.5 * (ddD + ddD.T)


@dataclass(frozen=True)
class Dim4Scalars:
    """Scalar invariants on a four dimensional toric manifold.

    Attributes
    ----------
    p : float
        The angle function.
    dp : ndarray
        Its differential in the ``dmu`` coframe.
    dp_norm2 : float
        ``|dp|_g^2``.
    lee_norm2 : float
        Squared norm of the Lee form, ``|theta|_g^2``.
    lap_p : float
        ``Delta p`` with the geometer's sign ``Delta = -div grad``.
    bracket : float
        ``Delta p - 2 p |theta|^2``.
    """

    p: float
    dp: np.ndarray
    dp_norm2: float
    lee_norm2: float
    lap_p: float
    bracket: float


def dim4_scalars(F: PointFrame, jet: Jet, allow_degenerate: bool = False) -> Dim4Scalars:
    """Angle function, Lee form norm and Laplacian of ``p`` from closed forms.

    Raises
    ------
    Dim4Only
        If the polytope is not two dimensional.
    DegenerateAngle
        If ``c != 0`` but ``|p|`` is within ``1e-12`` of 1, where the closed
        forms lose all accuracy (skipped when ``allow_degenerate``).
    """
    if F.dim != 2:
        raise Dim4Only("the angle function invariants need a two dimensional polytope")
    c = c_of(F.C)
    if c == 0.0:
        z = np.zeros(2)
        return Dim4Scalars(F.p, z, 0.0, 0.0, 0.0, 0.0)
    if not allow_degenerate and 1.0 - abs(F.p) <= 1e-12:
        raise DegenerateAngle(f"|p| = {abs(F.p)!r} at {F.x.tolist()}")
    D = F.detS
    P = F.detPsi
    dD, ddD = det_derivatives(F.S_inv, D, jet.third, jet.fourth)
    quad = float(dD @ F.S_inv @ dD)
    c2 = c * c
    dp = -2.0 * c2 / P**2 * dD
    dp_norm2 = float(dp @ F.S_inv @ dp)
    lee2 = c2 * quad / (P**2 * D)
    lap = 2.0 * c2 / P**2 * (float(np.sum(ddD * F.S_inv)) - 3.0 / P * quad)
    return Dim4Scalars(F.p, dp, dp_norm2, lee2, lap, lap - 2.0 * F.p * lee2)
