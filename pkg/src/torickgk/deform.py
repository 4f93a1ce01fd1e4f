"""The deformation ``Psi(t) = S + t C`` of a toric Kähler structure.

Starting from a Kähler structure (``C = 0``) and a constant antisymmetric
matrix ``C`` the family ``J_t`` with ``Psi(t) = S + t C`` consists of
generalized Kähler structures for small ``|t|``.  The symmetric part of
``Psi(t)`` does not depend on ``t``, so ``J_t`` stays tamed by ``omega``, and
the generalized Kähler scalar curvature is the same for every ``t``.

This module locates the range of ``t`` for which the structure passes the
compactification checks, verifies the first order variation against closed
forms and returns the associated holomorphic Poisson matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compactify import DEFAULT_SETTINGS, ProbeSettings, check_c1_c2, check_c3
from .errors import RequiresC1C2
from .gk_core import GKStructure
from .report import ReportDoc


@dataclass(frozen=True, eq=False)
class DeformationFamily:
    """A Kähler base structure and an antisymmetric direction ``C``."""

    base: GKStructure
    direction: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.direction, dtype=float)
        if not np.array_equal(D, -D.T):
            raise ValueError("the direction must be antisymmetric")
        if np.any(self.base.C != 0):
            raise ValueError("the base structure must be Kähler (C = 0)")
        object.__setattr__(self, "direction", D)

    @property
    def dim(self) -> int:
        return self.base.dim

    def at(self, t: float) -> GKStructure:
        """The structure with matrix ``t C``."""
        return self.base.with_C(t * self.direction)


def u_gk_drift(fam: DeformationFamily, points, ts) -> float:
    """Largest change of ``u_GK`` over the points when ``t`` ranges over ``ts``."""
    from .curvature import u_gk_at

    base = np.array([u_gk_at(fam.base, x) for x in points])
    drift = 0.0
    for t in ts:
        cur = np.array([u_gk_at(fam.at(t), x) for x in points])
        drift = max(drift, float(np.max(np.abs(cur - base))))
    return drift


# -------------------------------------------------------------- admissibility


@dataclass
class AdmissibleRange:
    """Range of ``t`` passing the compactification checks.

    ``t_min``/``t_max`` are ``None`` when that side is unbounded within the
    search limit.  ``endpoints`` holds the reports at the first failing
    parameter on each bounded side.
    """

    t_min: float | None
    t_max: float | None
    search_limit: float
    endpoints: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def unbounded(self) -> bool:
        return self.t_min is None and self.t_max is None


def _verdict(fam: DeformationFamily, t: float, st: ProbeSettings):
    test = fam.at(t)
    rep = check_c1_c2(fam.base, test, st)
    if not rep.verdict:
        return False, rep
    if fam.dim > 2:
        try:
            rep3 = check_c3(fam.base, test, rep, st)
        except RequiresC1C2:  # pragma: no cover - guarded above
            return False, rep
        return rep3.verdict, rep3
    return True, rep


def admissible_range(fam: DeformationFamily, search_limit: float = 1e6, rel_tol: float = 1e-6,
                     settings: ProbeSettings = DEFAULT_SETTINGS) -> AdmissibleRange:
    """Bisect on each side of ``t = 0`` for the first failing parameter.

    The verdict at ``t`` is the smooth extension check against the base
    structure, together with the boundary positivity check when the
    polytope has dimension three or more.  Each side is first probed at
    ``search_limit``; if that passes the side is reported unbounded.
    Otherwise the failing parameter is bracketed by doubling from 1 and then
    bisected to relative accuracy ``rel_tol``.
    """
    out = AdmissibleRange(None, None, search_limit)
    if not np.any(fam.direction):
        out.notes.append("zero direction: the family is constant")
        return out
    for sign in (1.0, -1.0):
        ok, rep = _verdict(fam, sign * search_limit, settings)
        if ok:
            continue
        lo, hi = 0.0, 1.0
        while hi < search_limit:
            ok, rep = _verdict(fam, sign * hi, settings)
            if not ok:
                break
            lo, hi = hi, min(2.0 * hi, search_limit)
        fail_rep = rep
        while hi - lo > rel_tol * max(hi, 1e-300):
            mid = 0.5 * (lo + hi)
            ok, rep = _verdict(fam, sign * mid, settings)
            if ok:
                lo = mid
            else:
                hi, fail_rep = mid, rep
        key = "t_max" if sign > 0 else "t_min"
        setattr(out, key, sign * hi)
        out.endpoints[key] = fail_rep
    if fam.dim == 2:
        out.notes.append("in dimension four det(Psi^-1 Psi(t)) = (det S + t^2 c^2)/det S >= 1 for every t")
    return out


# -------------------------------------------------------------- first order


def _holomorphic_frame(S_inv: np.ndarray):
    """Columns ``d/dz^1..m, d/dzbar^1..m`` of the base structure in the ``(mu, t)`` basis.

    The coordinates are ``z = u + i t`` with ``du = S dmu``, hence
    ``d/du^j = sum_i S^{ij} d/dmu^i``.
    """
    m = S_inv.shape[0]
    du = np.vstack([S_inv, np.zeros((m, m))])
    dt = np.vstack([np.zeros((m, m)), np.eye(m)])
    dz = 0.5 * (du - 1j * dt)
    dzbar = 0.5 * (du + 1j * dt)
    return np.hstack([dz, dzbar])


def _J(Psi):
    m = Psi.shape[0]
    Z = np.zeros((m, m))
    return np.block([[Z, -np.linalg.inv(Psi)], [Psi, Z]])


def first_order_check(fam: DeformationFamily, x, h: float = 1e-5, tol: float = 1e-8,
                      alpha_tol: float = 1e-7) -> ReportDoc:
    """First order variation of ``J_t`` at ``t = 0`` against closed forms.

    Checks ``d/dt Psi(t)^{-1} = -S^{-1} C S^{-1}`` by a central difference in
    ``t`` and decomposes ``d/dt J_t (d/dzbar^j)`` in the holomorphic frame of
    the base structure.  The ``d/dz^k`` coefficients must equal
    ``i (C S^{-1})_{kj}`` and the ``d/dzbar^k`` coefficients must vanish.  In
    dimension four the report also checks that the Poisson coefficient
    matrix ``t C + t S Psi(t)^{-T} C S^{-1} Psi(t)^T`` equals ``2 t C``.
    """
    x = np.asarray(x, dtype=float)
    S = fam.base.jet(x, 2).hess
    S = 0.5 * (S + S.T)
    C = fam.direction
    S_inv = np.linalg.inv(S)
    rep = ReportDoc("first_order", True)
    rep.tolerances.update({"psi_inverse": tol, "alpha": alpha_tol, "step": h})

    fd = (np.linalg.inv(S + h * C) - np.linalg.inv(S - h * C)) / (2 * h)
    closed = -S_inv @ C @ S_inv
    scale = max(1.0, float(np.max(np.abs(S_inv))) ** 2 * max(1.0, float(np.max(np.abs(C)))))
    err = float(np.max(np.abs(fd - closed))) / scale
    rep.add_condition("psi_inverse_derivative", err <= tol, {"relative_error": err})

    dJ = (_J(S + h * C) - _J(S - h * C)) / (2 * h)
    frame = _holomorphic_frame(S_inv)
    m = fam.dim
    coeff = np.linalg.solve(frame, dJ @ frame[:, m:])  # columns: images of d/dzbar^j
    alpha_fd = coeff[:m, :]  # alpha_fd[k, j]: coefficient of d/dz^k
    beta_fd = coeff[m:, :]
    alpha = alpha_matrix(S_inv, C)
    a_scale = max(1.0, float(np.max(np.abs(alpha))))
    a_err = float(np.max(np.abs(alpha_fd - alpha))) / a_scale
    a_err_flipped = float(np.max(np.abs(alpha_fd + alpha))) / a_scale
    rep.add_condition("alpha_matches", a_err <= alpha_tol,
                      {"relative_error": a_err, "error_with_opposite_sign": a_err_flipped,
                       "real_part_error": float(np.max(np.abs(alpha_fd.real - alpha.real))) / a_scale,
                       "imaginary_part_error": float(np.max(np.abs(alpha_fd.imag - alpha.imag))) / a_scale})
    b_err = float(np.max(np.abs(beta_fd))) / a_scale
    rep.add_condition("antiholomorphic_part_vanishes", b_err <= alpha_tol, {"relative_error": b_err})
    rep.notes.append("frame: z = u + i t with du = S dmu; d/dzbar = (d/du + i d/dt)/2")
    if m == 2:
        worst = 0.0
        for t in (0.1, 1.0, 10.0):
            M = poisson_coefficients(S, C, t)
            worst = max(worst, float(np.max(np.abs(M - 2 * t * C))) / max(1.0, abs(t) * float(np.max(np.abs(C)))))
        rep.add_condition("poisson_scaling_dim4", worst <= 1e-10, {"relative_error": worst})
        rep.notes.append("in dimension four the Poisson structure of J_t is 4 t times that of the direction")
    return rep


def alpha_matrix(S_inv: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``alpha[k, j] = i (C S^{-1})_{kj}``, the ``d/dz^k`` component of ``J'(0) d/dzbar^j``."""
    return 1j * (C @ S_inv)


def poisson_coefficients(S: np.ndarray, C: np.ndarray, t: float) -> np.ndarray:
    """``t C + t S Psi(t)^{-T} C S^{-1} Psi(t)^T`` with ``Psi(t) = S + t C``."""
    Psi = S + t * C
    return t * C + t * S @ np.linalg.solve(Psi.T, C @ np.linalg.solve(S, Psi.T))


def poisson_matrix(fam: DeformationFamily, frame: str = "fundamental") -> np.ndarray:
    """Constant coefficient matrix of the holomorphic Poisson structure.

    ``frame="fundamental"`` gives ``2 C`` in the frame of ``(1,0)`` parts of
    the fundamental vector fields; ``frame="coordinate"`` gives ``-2 C`` in
    the ``d/dz`` frame.
    """
    C = fam.direction
    if frame == "fundamental":
        M = 2.0 * C
    elif frame == "coordinate":
        M = -2.0 * C
    else:
        raise ValueError(f"unknown frame {frame!r}")
    assert np.array_equal(M, -M.T)
    return M.astype(complex)
