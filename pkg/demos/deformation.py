"""Deforming a toric Kähler structure by ``Psi(t) = S + t C``.

Run with ``python3 demos/deformation.py``.  In real dimension four every
parameter ``t`` gives a structure that extends to the compact surface.  On
the cube the smallest boundary eigenvalue of ``Psi^-1 Psi(t)`` is
``1 / (1 + t^2 / 16)`` for the direction below, so asking for a positivity
margin of 0.5 bounds the range at ``|t| = 4``.
"""

import numpy as np

from torickgk.compactify import ProbeSettings
from torickgk.deform import DeformationFamily, admissible_range, first_order_check, u_gk_drift
from torickgk.gk_core import GKStructure
from torickgk.polytope import build_polytope, sample_interior
from torickgk.potential import Guillemin

square = build_polytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])
fam = DeformationFamily(GKStructure.kahler(square, Guillemin(square)), np.array([[0.0, 1.0], [-1.0, 0.0]]))
pts = sample_interior(square, 5, 1e-2).points
print(f"square: largest change of u_GK for t in (-10, 10): {u_gk_drift(fam, pts, [-10.0, 10.0]):.1e}")
rng = admissible_range(fam)
print(f"square: admissible range unbounded up to |t| = {rng.search_limit:g}: {rng.unbounded}")
rep = first_order_check(fam, [0.3, 0.6])
print(f"square: first order variation matches the closed form: {rep.verdict}")

cube = build_polytope([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], [0, 0, 0, 1, 1, 1])
D = np.zeros((3, 3))
D[1, 2], D[2, 1] = 0.5, -0.5
rng3 = admissible_range(DeformationFamily(GKStructure.kahler(cube, Guillemin(cube)), D), search_limit=100.0,
                        rel_tol=1e-4, settings=ProbeSettings(c3_margin=0.5))
print(f"cube: admissible range with margin 0.5 is ({rng3.t_min:.4f}, {rng3.t_max:.4f})")
