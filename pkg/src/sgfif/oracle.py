"""Brute-force cross checks: quadratic minimization and sparse Dirichlet solves.

Everything here is deliberately independent of the closed-form modules.  The
only shared code is the address bookkeeping and the plain data carriers; the
numerics are straight linear algebra on the level graphs, so agreement with
the rule-based and closed-form routes is a real two-implementation check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from . import address
from .address import DepthCapError
from .energy import SG, HarmonicStructure
from .vertexfn import VertexFunction

#: Largest level solved directly (|V_9| is ~30k unknowns; past that, refuse).
SOLVER_CAP = 9


@dataclass(frozen=True)
class LinearSystem:
    """A sparse symmetric system ``A z = b`` in canonical vertex order."""

    matrix: sparse.csr_matrix
    rhs: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def solve(self) -> np.ndarray:
        out = spsolve(self.matrix.tocsc(), self.rhs)
        return np.atleast_1d(out)


def _edge_weight(cell: str, pair: tuple[int, int], hs: HarmonicStructure) -> float:
    c = {(1, 2): hs.conductances[0], (1, 3): hs.conductances[1], (2, 3): hs.conductances[2]}
    r = math.prod(hs.ratios[int(ch) - 1] for ch in cell)
    return c[pair] / r


def minimize_extension(u: VertexFunction, hs: HarmonicStructure = SG) -> VertexFunction:
    """Extend ``u`` one level down by minimizing the next graph energy.

    Assembles the energy quadratic form over the level-(m+1) edges and solves
    its normal equations for the new midpoint values; old values are kept.
    On the gasket defaults the minimizer reproduces the previous energy
    exactly, which is what makes the energies compatible.
    """
    m = u.level + 1
    ref = address.refinement(u.level)
    n_next = len(address.vertices_at_level(m))
    known = np.full(n_next, np.nan)
    known[ref.old_rows] = u.values[ref.old_parent]
    unknown_pos = {int(r): k for k, r in enumerate(ref.new_rows)}
    n_unk = len(unknown_pos)

    a_rows, a_cols, a_vals = [], [], []
    b = np.zeros(n_unk)
    index = address.vertex_index(m)
    for edge in address.edges_at_level(m):
        va, vb = edge.endpoints
        ia, ib = index[va], index[vb]
        w = _edge_weight(edge.cell, edge.corners, hs)
        pa, pb = unknown_pos.get(ia), unknown_pos.get(ib)
        if pa is not None and pb is not None:
            a_rows += [pa, pb, pa, pb]
            a_cols += [pa, pb, pb, pa]
            a_vals += [w, w, -w, -w]
        elif pa is not None:
            a_rows.append(pa)
            a_cols.append(pa)
            a_vals.append(w)
            b[pa] += w * known[ib]
        elif pb is not None:
            a_rows.append(pb)
            a_cols.append(pb)
            a_vals.append(w)
            b[pb] += w * known[ia]

    system = LinearSystem(
        sparse.csr_matrix((a_vals, (a_rows, a_cols)), shape=(n_unk, n_unk)), b
    )
    z = system.solve()
    if not np.all(np.isfinite(z)):
        raise ValueError("singular minimization system for this harmonic structure")
    out = known
    out[ref.new_rows] = z
    return VertexFunction(m, out)


def solve_discrete_dirichlet(a, eta: float, m: int) -> VertexFunction:
    """Solve ``(3/2) 5^m L_m u = eta`` at every interior vertex, ``u = a`` on V_0.

    Direct sparse solve of the interior graph-Laplacian system; the interior
    block is symmetric and nonsingular, so the solution is unique.
    """
    a = tuple(float(v) for v in a)
    if len(a) != 3:
        raise ValueError("boundary data must have exactly three values")
    if m < 1:
        raise ValueError(f"level must be at least 1, got {m}")
    if m > SOLVER_CAP:
        raise DepthCapError(f"level {m} exceeds the solver cap {SOLVER_CAP}")

    verts = address.vertices_at_level(m)
    index = address.vertex_index(m)
    boundary_value = {}
    for i in address.LETTERS:
        boundary_value[index[address.at_level(f".{i}", m)]] = a[i - 1]
    interior = [r for r in range(len(verts)) if r not in boundary_value]
    pos = {r: k for k, r in enumerate(interior)}

    rows, cols, vals = [], [], []
    rhs = np.full(len(interior), eta * (2.0 / 3.0) / 5.0**m)
    adj = address.adjacency(m)
    for r in interior:
        k = pos[r]
        nbrs = adj[verts[r]]
        rows.append(k)
        cols.append(k)
        vals.append(-float(len(nbrs)))
        for nb in nbrs:
            rn = index[nb]
            if rn in boundary_value:
                rhs[k] -= boundary_value[rn]
            else:
                rows.append(k)
                cols.append(pos[rn])
                vals.append(1.0)

    system = LinearSystem(
        sparse.csr_matrix((vals, (rows, cols)), shape=(len(interior),) * 2), rhs
    )
    z = system.solve()
    out = np.empty(len(verts))
    out[interior] = z
    for r, v in boundary_value.items():
        out[r] = v
    return VertexFunction(m, out)
