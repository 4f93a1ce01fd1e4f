"""Symplectic potentials and their derivative jets up to fourth order.

A potential is a strictly convex function ``tau`` on the open polytope.  Each
potential type implements ``jet(x, order=4, dist=None, frame=None)`` returning
a :class:`Jet` with the value and the derivative tensors of ``tau`` at ``x``.
With ``frame = A`` (an invertible ``m x m`` matrix) the tensors are the
derivatives along the columns of ``A``, i.e. the jet of ``y -> tau(x + A y)``
at ``y = 0``.  Closed form potentials build these directly, which keeps full
relative accuracy in frames adapted to a nearby facet.

* :class:`Guillemin` is the canonical potential ``1/2 sum_j L_j log L_j``
  with closed form derivatives.
* :class:`Quadratic` has constant Hessian.
* :class:`Expression` wraps a parsed expression and differentiates it with
  central differences plus one Richardson step.
* :class:`Sum` adds jets term by term.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import expr as _expr
from .errors import (
    EvaluationError,
    FDStepUnderflow,
    NotConvexAt,
    OutsideDomain,
)
from .polytope import DelzantPolytope, eval_L
from .report import ReportDoc


@dataclass(frozen=True)
class Jet:
    """Value and derivative tensors of a function at a point.

    ``third[i, j, k]`` is the third derivative along ``i, j, k`` and likewise
    for ``fourth``.  Tensors above the requested order are ``None``.
    """

    value: float
    grad: np.ndarray
    hess: np.ndarray
    third: np.ndarray | None = None
    fourth: np.ndarray | None = None

    def __add__(self, other: "Jet") -> "Jet":
        def add(a, b):
            return None if a is None or b is None else a + b

        return Jet(self.value + other.value, self.grad + other.grad, self.hess + other.hess,
                   add(self.third, other.third), add(self.fourth, other.fourth))

    def scaled(self, s: float) -> "Jet":
        def mul(a):
            return None if a is None else s * a

        return Jet(s * self.value, s * self.grad, s * self.hess, mul(self.third), mul(self.fourth))

    def in_frame(self, A: np.ndarray) -> "Jet":
        """The jet with every tensor slot contracted with ``A``."""
        def con(T, k):
            if T is None:
                return None
            for slot in range(k):
                T = np.moveaxis(np.tensordot(T, A, axes=([slot], [0])), -1, slot)
            return T

        return Jet(self.value, A.T @ self.grad, con(self.hess, 2), con(self.third, 3), con(self.fourth, 4))


# --------------------------------------------------------------- closed forms


def _xlogx_derivatives(t):
    """Derivatives of order 0..4 of ``t log t``."""
    return (t * np.log(t), np.log(t) + 1.0, 1.0 / t, -1.0 / t**2, 2.0 / t**3)


@dataclass(frozen=True, eq=False)
class Guillemin:
    """The canonical potential ``scale/2 * sum_j L_j log L_j``."""

    polytope: DelzantPolytope
    scale: float = 1.0

    @property
    def dim(self):
        return self.polytope.dim

    uses_finite_differences = False

    def jet(self, x, order: int = 4, dist=None, frame=None) -> Jet:
        x = np.asarray(x, dtype=float)
        L = eval_L(self.polytope, x)
        if np.any(L <= 0):
            raise OutsideDomain(f"{list(x)} is not in the open polytope")
        nu = self.polytope.normals.astype(float)
        if frame is not None:
            nu = nu @ frame
        d = _xlogx_derivatives(L)
        w = 0.5 * self.scale
        value = w * float(np.sum(d[0]))
        grad = w * (d[1] @ nu)
        hess = w * np.einsum("j,ja,jb->ab", d[2], nu, nu)
        third = w * np.einsum("j,ja,jb,jc->abc", d[3], nu, nu, nu) if order >= 3 else None
        fourth = w * np.einsum("j,ja,jb,jc,jd->abcd", d[4], nu, nu, nu, nu) if order >= 4 else None
        return Jet(value, grad, hess, third, fourth)


@dataclass(frozen=True, eq=False)
class Quadratic:
    """``1/2 x^T Q x + l^T x + c`` with symmetric ``Q``."""

    Q: np.ndarray
    l: np.ndarray | None = None
    c: float = 0.0

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or not np.allclose(Q, Q.T, rtol=0, atol=0):
            raise ValueError("Q must be a symmetric square matrix")
        object.__setattr__(self, "Q", Q)
        lin = np.zeros(Q.shape[0]) if self.l is None else np.asarray(self.l, dtype=float)
        object.__setattr__(self, "l", lin)

    @property
    def dim(self):
        return self.Q.shape[0]

    uses_finite_differences = False

    def jet(self, x, order: int = 4, dist=None, frame=None) -> Jet:
        x = np.asarray(x, dtype=float)
        m = self.dim
        A = np.eye(m) if frame is None else np.asarray(frame, dtype=float)
        value = 0.5 * x @ self.Q @ x + self.l @ x + self.c
        return Jet(float(value), A.T @ (self.Q @ x + self.l), A.T @ self.Q @ A,
                   np.zeros((m,) * 3) if order >= 3 else None,
                   np.zeros((m,) * 4) if order >= 4 else None)


# ------------------------------------------------------- finite differences

#: Smallest step of the ladder per derivative order, as a fraction of the
#: distance to the boundary.  Tuned on logarithmic singularities at the
#: boundary, where the step must scale with that distance.
FD_STEP_FRACTION = {1: 3e-3, 2: 5e-3, 3: 1.5e-2, 4: 2e-2}

#: The largest stencil reach allowed, as a fraction of the distance to the boundary.
FD_MAX_REACH = 0.5

#: Smallest admissible finite difference step.
FD_MIN_STEP = 1e-6


def _stencil(m: int, k: int):
    """Offsets (in units of h) and weights for all order ``k`` central differences.

    Returns the list of sorted multi-indices, a stacked array of offsets with
    shape (n_multi, 2**k, m) and the matching sign products.
    """
    multis = list(itertools.combinations_with_replacement(range(m), k))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
    offsets = np.zeros((len(multis), signs.shape[0], m))
    for a, mi in enumerate(multis):
        for slot, axis in enumerate(mi):
            offsets[a, :, axis] += signs[:, slot]
    return multis, offsets, np.prod(signs, axis=1)


def _symmetrize(multis, vals, m, k):
    out = np.zeros((m,) * k)
    for mi, v in zip(multis, vals):
        for perm in set(itertools.permutations(mi)):
            out[perm] = v
    return out


def fd_derivatives(f, x, k: int, h: float):
    """Order ``k`` derivative tensor of ``f`` at ``x`` by nested central differences.

    One Richardson step with steps ``h`` and ``h/2`` removes the leading
    ``h**2`` error term.  ``f`` must accept an array of points of shape
    ``(..., m)``.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    multis, offsets, weights = _stencil(m, k)

    def raw(step):
        vals = f(x + step * offsets)
        return (vals @ weights) / (2.0 * step) ** k

    coarse = raw(h)
    fine = raw(0.5 * h)
    return _symmetrize(multis, (4.0 * fine - coarse) / 3.0, m, k)


@dataclass(frozen=True, eq=False)
class Expression:
    """A potential given by an expression in ``mu1 .. mum``.

    Derivatives are computed by finite differences with steps proportional to
    the distance ``dist`` to the boundary of the polytope (or to 1 when no
    distance is supplied), never below :data:`FD_MIN_STEP`.  When the stencil
    would not fit inside the polytope, or an evaluation leaves the domain of
    the expression, :class:`~torickgk.errors.FDStepUnderflow` is raised.
    """

    tree: object
    dim: int
    source: str = ""

    @classmethod
    def from_source(cls, src: str, dim: int) -> "Expression":
        return cls(_expr.parse(src, dim), dim, src)

    uses_finite_differences = True

    def __call__(self, x):
        return _expr.evaluate(self.tree, x)

    def jet(self, x, order: int = 4, dist=None, frame=None) -> Jet:
        if frame is not None:
            return self.jet(x, order, dist).in_frame(np.asarray(frame, dtype=float))
        x = np.asarray(x, dtype=float)
        scale = 1.0 if dist is None else float(dist)
        try:
            value = float(self(x))
            tensors = [self._derivative(x, k, scale) for k in range(1, order + 1)]
        except EvaluationError as err:
            raise FDStepUnderflow(f"finite difference stencil at {list(x)} left the domain: {err}") from err
        tensors += [None] * (4 - len(tensors))
        return Jet(value, tensors[0], tensors[1], tensors[2], tensors[3])

    def _derivative(self, x, k, scale):
        """Order ``k`` tensor chosen from a ladder of doubling steps.

        Small steps suffer from rounding and large ones from truncation; the
        estimate is taken where two consecutive rungs agree best.
        """
        h0 = max(FD_STEP_FRACTION[k] * scale, FD_MIN_STEP)
        if k * h0 >= FD_MAX_REACH * scale:
            raise FDStepUnderflow(
                f"order {k} stencil of step {h0:.3g} at {list(x)} does not fit inside the polytope")
        steps = [h0]
        while k * steps[-1] * 2.0 <= FD_MAX_REACH * scale and len(steps) < 8:
            steps.append(steps[-1] * 2.0)
        ests = [fd_derivatives(self, x, k, h) for h in steps]
        if len(ests) == 1:
            return ests[0]
        gaps = [np.max(np.abs(b - a)) for a, b in zip(ests, ests[1:])]
        return ests[int(np.argmin(gaps))]


@dataclass(frozen=True, eq=False)
class Sum:
    """Sum of potentials."""

    terms: tuple

    @property
    def dim(self):
        return self.terms[0].dim

    @property
    def uses_finite_differences(self):
        return any(t.uses_finite_differences for t in self.terms)

    def jet(self, x, order: int = 4, dist=None, frame=None) -> Jet:
        out = self.terms[0].jet(x, order, dist, frame)
        for t in self.terms[1:]:
            out = out + t.jet(x, order, dist, frame)
        return out


def jet4(potential, x, dist=None) -> Jet:
    """All derivatives up to order four."""
    return potential.jet(x, 4, dist)


# ------------------------------------------------------------------ checks


def check_strict_convexity(potential, grid, polytope: DelzantPolytope | None = None,
                           rel_pivot: float = 1e-10, warn_pivot: float = 1e-6) -> ReportDoc:
    """Check that the Hessian is positive definite at every grid point.

    A point fails when the Cholesky factorisation breaks down or its smallest
    pivot is at most ``rel_pivot`` times the trace.  Points whose smallest
    pivot is below ``warn_pivot`` are listed as warnings.
    """
    worst = (math.inf, None)
    warnings = []
    failure = None
    for x in grid.points:
        dist = polytope.distance_to_boundary(x) if polytope is not None else None
        S = potential.jet(x, 2, dist).hess
        tr = float(np.trace(S))
        try:
            Lc = np.linalg.cholesky(S)
            pivot = float(np.min(np.diag(Lc)) ** 2)
        except np.linalg.LinAlgError:
            pivot = -math.inf
        if pivot < worst[0]:
            worst = (pivot, x)
        if pivot <= rel_pivot * abs(tr):
            failure = (x, float(np.min(np.linalg.eigvalsh(0.5 * (S + S.T)))))
            break
        if pivot < warn_pivot:
            warnings.append(f"near-singular Hessian at {x.tolist()}: smallest pivot {pivot:.3e}")
    rep = ReportDoc("strict_convexity", failure is None)
    rep.add_condition("positive_definite_hessian", failure is None,
                      {"points": len(grid), "smallest_pivot": worst[0]})
    if failure is not None:
        rep.add_witness({"point": failure[0].tolist(), "smallest_eigenvalue": failure[1]})
    rep.notes.extend(warnings)
    rep.tolerances.update({"relative_pivot": rel_pivot, "warning_pivot": warn_pivot})
    return rep


def require_convex(S, x):
    """Cholesky factor of ``S`` or :class:`NotConvexAt`."""
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise NotConvexAt(np.asarray(x).tolist(), float(np.min(np.linalg.eigvalsh(0.5 * (S + S.T))))) from None
