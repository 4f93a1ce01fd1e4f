"""Boundary limits of sampled quantities along geometric paths.

A quantity sampled at parameters ``s_k = s_0 r^k`` is extrapolated to
``s = 0`` with a Richardson table that removes the powers ``s, s^2, ...`` in
turn.  The limit is accepted only when two consecutive estimates at the best
level agree, so a divergent or non-smooth sequence is reported as such rather
than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated limit of a sequence.

    ``error`` is the gap between the two estimates used; ``converged`` tells
    whether it is below the requested tolerance.
    """

    value: float
    error: float
    converged: bool
    level: int


def richardson_table(values, ratio: float = 0.5, max_level: int = 4):
    """Rows of the Richardson table for samples at ``s_0 ratio**k``.

    ``table[j]`` holds the estimates after eliminating ``s, .., s^j``.
    """
    v = np.asarray(values, dtype=float)
    table = [v]
    for j in range(1, max_level + 1):
        prev = table[-1]
        if prev.shape[0] < 2:
            break
        f = ratio**j
        table.append((prev[1:] - f * prev[:-1]) / (1.0 - f))
    return table


def path_limit(values, ratio: float = 0.5, rtol: float = 1e-6, atol: float = 1e-9,
               max_level: int = 4, scale: float = 0.0) -> LimitEstimate:
    """Limit at ``s = 0`` of values sampled at ``s_0 ratio**k``, ``k = 0, 1, ...``.

    For each level of the table the last two estimates are compared and the
    level with the smallest gap is used.  The sequence counts as convergent
    when that gap is at most ``atol + rtol * scale`` with ``scale`` the
    largest magnitude sampled (or the given ``scale`` if larger), and the
    increments over the last three samples shrink.  Divergent sequences
    (constant or growing increments) therefore fail, and so do slowly
    settling ones such as square roots, whose estimates keep moving.
    """
    v = np.asarray(values, dtype=float)
    if v.shape[0] < 4 or not np.all(np.isfinite(v)):
        return LimitEstimate(float(v[-1]) if v.size else np.nan, np.inf, False, 0)
    table = richardson_table(v, ratio, max_level)
    best = None
    for j, row in enumerate(table):
        if row.shape[0] < 2:
            break
        gap = abs(row[-1] - row[-2])
        if best is None or gap < best[1]:
            best = (row[-1], gap, j)
    value, gap, level = best
    scale = max(float(np.max(np.abs(v))), float(scale))
    inc = np.abs(np.diff(v))
    shrinking = inc[-1] <= 0.9 * inc[-3] + atol + 10.0 * rtol * scale
    ok = bool(gap <= atol + rtol * scale) and bool(shrinking)
    return LimitEstimate(float(value), float(gap), ok, level)
