"""Harmonic functions on the gasket.

A harmonic function is determined by its three boundary values; its value at
any vertex is the convex combination produced by the midpoint averaging rule

    h(q_{w i j}) = (2/5) h(q_{w i}) + (2/5) h(q_{w j}) + (1/5) h(q_{w k}),

the unique extension that keeps the graph energy constant from level to
level.  Evaluation walks the address word once, multiplying the three-value
boundary vector by per-letter restriction maps, so it is exact up to one
rounding per letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import address
from .address import Address, CanonicalVertex
from .vertexfn import VertexFunction


@dataclass(frozen=True)
class HarmonicFunction:
    """A harmonic function, as its boundary values ``(h(q_1), h(q_2), h(q_3))``."""

    boundary: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "boundary", tuple(float(b) for b in self.boundary))
        if len(self.boundary) != 3:
            raise ValueError("boundary must have exactly three values")


@lru_cache(maxsize=1)
def restriction_maps() -> np.ndarray:
    """The three cell-restriction maps, shape ``(3, 3, 3)``.

    ``restriction_maps()[i-1]`` maps boundary values of ``h`` to boundary
    values of ``h o P_i``: the row for the fixed corner ``q_i`` is the unit
    vector, the other rows average with weights 2/5, 2/5, 1/5.
    """
    maps = np.empty((3, 3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                row = np.eye(3)[i]
            else:
                k = 3 - i - j
                row = np.zeros(3)
                row[i] = row[j] = 0.4
                row[k] = 0.2
            maps[i, j] = row
    return maps


def eval_harmonic(h: HarmonicFunction, v: CanonicalVertex | Address | str) -> float:
    """Value of ``h`` at a vertex, by per-letter coefficient propagation."""
    if isinstance(v, str):
        v = address.parse_address(v)
    if isinstance(v, CanonicalVertex):
        v = v.address
    maps = restriction_maps()
    vec = np.asarray(h.boundary, dtype=float)
    for letter in v.word:
        vec = maps[int(letter) - 1] @ vec
    return float(vec[v.terminal - 1])


def pair_sum(h: HarmonicFunction, i: int, m: int) -> float:
    """Closed form for ``h(q_{i^m j}) + h(q_{i^m k})``.

    Repeated averaging toward corner ``q_i`` contracts the sum of the two
    off-corner values geometrically with ratio 3/5:

        2 h(q_i) + (3/5)^m (h(q_j) + h(q_k) - 2 h(q_i)).
    """
    if i not in address.LETTERS:
        raise ValueError(f"corner index must be 1, 2 or 3, got {i}")
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    bi = h.boundary[i - 1]
    bj, bk = (h.boundary[t - 1] for t in address.LETTERS if t != i)
    return 2.0 * bi + 0.6**m * (bj + bk - 2.0 * bi)


def harmonic_on_level(h: HarmonicFunction, m: int) -> VertexFunction:
    """Values of ``h`` on all of ``V_m``, by level-by-level midpoint averaging."""
    address.check_level(m)
    vals = np.asarray(h.boundary, dtype=float)
    for level in range(m):
        ref = address.refinement(level)
        nxt = np.empty(len(address.vertices_at_level(level + 1)))
        nxt[ref.old_rows] = vals[ref.old_parent]
        corners = vals[ref.new_corners]
        nxt[ref.new_rows] = 0.4 * (corners[:, 0] + corners[:, 1]) + 0.2 * corners[:, 2]
        vals = nxt
    return VertexFunction(m, vals)
