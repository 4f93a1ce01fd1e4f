"""Curvature of toric generalized Kähler structures on a few small polytopes.

Run with ``python3 demos/curvature_tour.py``.  For the canonical potential
the scalar ``u_GK`` is constant (4 on the interval, 12 on the triangle) and
adding an antisymmetric matrix ``C`` leaves it unchanged, while the
bihermitian scalar curvature ``s_g`` does depend on ``C``.
"""

import numpy as np

from torickgk.curvature import curvature_point, extremal_fit, u_gk_at
from torickgk.gk_core import GKStructure
from torickgk.polytope import build_polytope, random_interior, sample_interior
from torickgk.potential import Expression, Guillemin, Sum


def structure(normals, offsets, c=0.0):
    P = build_polytope(normals, offsets)
    C = np.zeros((P.dim, P.dim))
    if P.dim == 2:
        C = np.array([[0.0, c], [-c, 0.0]])
    return GKStructure(P, Guillemin(P), C)


interval = structure([[1], [-1]], [0, 1])
triangle = structure([[1, 0], [0, 1], [-1, -1]], [0, 0, 1])
rng = np.random.default_rng(0)

print("u_GK at random interior points")
for label, G in (("interval", interval), ("triangle", triangle)):
    vals = [u_gk_at(G, x) for x in random_interior(G.polytope, 5, rng)]
    print(f"  {label:9s}", " ".join(f"{v:.12f}" for v in vals))

print("\nthe square with growing c, at the centre")
for c in (0.0, 0.3, 1.0, 3.0):
    G = structure([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1], c)
    cp = curvature_point(G, [0.5, 0.5])
    print(f"  c = {c:3.1f}: u_GK = {cp.u_gk:.12f}  p = {cp.scalars.p:+.6f}  s_g = {cp.s_g:.9f}")

print("\nextremality on the triangle")
grid = sample_interior(triangle.polytope, 10, 1e-3)
print(f"  canonical potential: residual {extremal_fit(triangle, grid).residual:.2e}")
P = triangle.polytope
bumped = GKStructure.kahler(P, Sum((Guillemin(P), Expression.from_source("0.05*mu1^2*mu2^2", 2))))
fit = extremal_fit(bumped, grid)
print(f"  with 0.05 mu1^2 mu2^2 added: residual {fit.residual:.2e}, extremal: {fit.is_extremal}")
