"""What happens at the boundary of the polytope.

Run with ``python3 demos/boundary_behaviour.py``.  Along a path into a facet
the pointwise scalar ``p`` tends to -1, and the smooth extension checks
separate the canonical potential from twice the canonical potential, whose
metric has a cone angle along every facet.
"""

import numpy as np

from torickgk.compactify import acgtf_check, check_c1_c2, kahler_reference
from torickgk.gk_core import GKStructure, frame_at
from torickgk.limits import path_limit
from torickgk.polytope import build_polytope, facet_path
from torickgk.potential import Guillemin

P = build_polytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])
C = np.array([[0.0, 1.0], [-1.0, 0.0]])
G = GKStructure(P, Guillemin(P), C)

print("p along a path towards the facet mu1 = 0")
pts, _, _ = facet_path(P, 0, np.array([0.5, 0.5]), n_steps=8)
ps = [frame_at(G, x).p for x in pts]
for x, p in zip(pts, ps):
    print(f"  mu1 = {x[0]:.3e}: p = {p:+.9f}")
est = path_limit(ps)
print(f"  extrapolated limit {est.value:+.12f} (converged: {est.converged})")

print("\nsmooth extension checks")
ref = kahler_reference(P)
for label, pot in (("canonical", Guillemin(P)), ("twice canonical", Guillemin(P, 2.0))):
    test = GKStructure(P, pot, C)
    c12 = check_c1_c2(ref, test).verdict
    slope = acgtf_check(test).conditions["normal_slope"]
    print(f"  {label:15s}: extension checks {'pass' if c12 else 'fail'}; "
          f"normal slope in [{slope['min_slope']:.6f}, {slope['max_slope']:.6f}] (2 for a smooth extension)")
