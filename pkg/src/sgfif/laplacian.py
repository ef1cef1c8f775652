"""Graph Laplacians of FIFs, closed forms, existence, and the Dirichlet solver.

The level-m graph Laplacian is the plain neighbor-difference sum at interior
vertices; the (pointwise) Laplacian of a function is the limit of
``(3/2) 5^m`` times it.  For an FIF with uniform scaling factor ``d`` the
level sequence at a midpoint ``q_ij`` has the exact closed form

    L_{m+1} f(q_ij) = d a_ij / (3/5 - d) * ((3/5)^m - d^m)
                      + L_1 f(q_ij) * (3/5)^m,       d != 3/5,

where ``a_ij`` combines the level-0/level-1 cell operators of the data, and
deeper vertices scale out of it by ``L_{|w|+m+1} f(q_{w i j}) = d^{|w|}
L_{m+1} f(q_ij)``.  Renormalizing kills the ``(3/5)^m`` terms only when the
data is harmonic (Laplacian 0) or when ``d = 1/5`` and the three quantities
``y_k + x_k / 5`` coincide (constant Laplacian); :func:`classify` decides
which, and :func:`solve_dirichlet` inverts the constant case into the FIF
solving ``Delta u = eta`` with prescribed boundary values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import address
from .address import Address, CanonicalVertex, DepthCapError
from .fif import FifSpec, evaluate_on_level
from .harmonic import HarmonicFunction, eval_harmonic
from .vertexfn import VertexFunction

CASE_HARMONIC = "harmonic"
CASE_CONSTANT = "constant"
CASE_NONEXISTENT = "nonexistent"

_CORNER_PAIRS = ((1, 2), (1, 3), (2, 3))


class LaplacianUndefinedError(ValueError):
    """The renormalized Laplacian of this FIF diverges."""


def graph_laplacian(u: VertexFunction, x) -> float:
    """Neighbor-difference sum ``sum_{y ~ x} (u(y) - u(x))`` at an interior x."""
    cv = address.at_level(x, u.level)
    if cv.is_boundary:
        raise ValueError(f"{cv} is a boundary vertex; the graph Laplacian needs interior points")
    ux = u[cv]
    return float(sum(u[y] - ux for y in address.neighbors(cv, u.level)))


def graph_laplacian_on_level(u: VertexFunction) -> np.ndarray:
    """Laplacian at every vertex of the level, ``nan`` on the boundary."""
    rows, _, _ = address.edge_arrays(u.level)
    lap = np.zeros(len(u.values))
    d01 = u.values[rows[:, 1]] - u.values[rows[:, 0]]
    np.add.at(lap, rows[:, 0], d01)
    np.add.at(lap, rows[:, 1], -d01)
    lap[list(boundary_rows(u.level))] = np.nan
    return lap


@lru_cache(maxsize=None)
def boundary_rows(m: int) -> tuple[int, ...]:
    index = address.vertex_index(m)
    return tuple(index[address.at_level(f".{i}", m)] for i in address.LETTERS)


def renormalized_laplacian(u: VertexFunction, x, m: int | None = None) -> float:
    """``(3/2) 5^m`` times the graph Laplacian; the quantity whose limit is Delta u."""
    if m is not None and m != u.level:
        raise ValueError(f"level argument {m} does not match function level {u.level}")
    return 1.5 * 5.0**u.level * graph_laplacian(u, x)


def renormalized_sequence(spec: FifSpec, x, m_max: int) -> list[float]:
    """Renormalized Laplacians of the FIF at ``x`` for each level up to ``m_max``."""
    cv = address.canonicalize(x)
    if cv.is_boundary:
        raise ValueError(f"{cv} is a boundary vertex")
    start = max(1, cv.native_level)
    return [
        renormalized_laplacian(evaluate_on_level(spec, m), cv)
        for m in range(start, m_max + 1)
    ]


def detect_divergence(values, factor: float = 2.0, runs: int = 3) -> bool:
    """True when |values| grow by ``factor`` over ``runs`` consecutive steps.

    Tuned for the divergent mode of the renormalized sequence, which grows by
    a factor 3 per level.
    """
    streak = 0
    for prev, cur in zip(values, values[1:]):
        if abs(cur) >= factor * abs(prev) and abs(cur) > 0:
            streak += 1
            if streak >= runs:
                return True
        else:
            streak = 0
    return False


# ---------------------------------------------------------------------------
# cell operators of data on V_1


@dataclass(frozen=True)
class CellOperators:
    """Level-0 and per-cell level-1 difference operators of a function on V_1.

    ``delta0[i-1]`` is the boundary-triangle Laplacian at ``q_i``;
    ``delta1[i-1, c-1]`` sums differences toward the corners of cell ``i``
    at the point ``P_i(q_c)``.  ``alpha[(i, j)]`` is the combination
    ``delta1^i(q_i) + delta1^j(q_j) + (3/5) delta0(q_k)`` driving the midpoint
    Laplacian closed form, stored twice: once from the operators, once from
    its expanded affine form in the six data values.
    """

    delta0: np.ndarray
    delta1: np.ndarray
    alpha: dict[tuple[int, int], float]
    alpha_affine: dict[tuple[int, int], float]
    midpoint_laplacian: dict[tuple[int, int], float]

    def alpha_of(self, i: int, j: int) -> float:
        return self.alpha[(min(i, j), max(i, j))]


def _xy(spec_or_u) -> tuple[tuple[float, ...], tuple[float, ...]]:
    if isinstance(spec_or_u, FifSpec):
        return spec_or_u.boundary, spec_or_u.midpoints
    u = spec_or_u
    if not isinstance(u, VertexFunction) or u.level != 1:
        raise ValueError("need an FifSpec or a level-1 VertexFunction")
    x = tuple(u[f".{i}"] for i in address.LETTERS)
    y = tuple(u[f"{i}.{j}"] for (i, j) in ((2, 3), (1, 3), (1, 2)))
    return x, y


def _alpha_affine(x, y, i: int, j: int) -> float:
    k = 6 - i - j
    return (
        -1.4 * x[i - 1]
        - 1.4 * x[j - 1]
        - 1.2 * x[k - 1]
        + y[i - 1]
        + y[j - 1]
        + 2.0 * y[k - 1]
    )


def _delta0(x, i: int) -> float:
    return sum(x[l - 1] for l in address.LETTERS if l != i) - 2.0 * x[i - 1]


def _delta1_corner(x, y, i: int) -> float:
    # in-cell Laplacian of cell i at its fixed corner q_i
    return sum(y[l - 1] for l in address.LETTERS if l != i) - 2.0 * x[i - 1]


def _midpoint_lap1(x, y, i: int, j: int) -> float:
    # full level-1 Laplacian at q_ij (4 neighbors)
    k = 6 - i - j
    return x[i - 1] + x[j - 1] + y[i - 1] + y[j - 1] - 4.0 * y[k - 1]


def cell_operators(u) -> CellOperators:
    """All level-0/level-1 cell operators of data on ``V_1``.

    Accepts an :class:`FifSpec` (only its six values are used) or a level-1
    :class:`VertexFunction`.  The operator-form and affine-form alphas must
    agree; both are returned so callers can check.
    """
    x, y = _xy(u)
    vf = VertexFunction.from_dict(
        1,
        {
            ".1": x[0], ".2": x[1], ".3": x[2],
            "2.3": y[0], "1.3": y[1], "1.2": y[2],
        },
    )
    cells = {
        i: {address.canonicalize(Address(str(i), c)) for c in address.LETTERS}
        for i in address.LETTERS
    }
    delta0 = np.array([_delta0(x, i) for i in address.LETTERS])
    delta1 = np.zeros((3, 3))
    for i in address.LETTERS:
        for c in address.LETTERS:
            p = address.canonicalize(Address(str(i), c))
            delta1[i - 1, c - 1] = sum(
                vf[nb] - vf[p] for nb in address.neighbors(p, 1) if nb in cells[i]
            )
    alpha, alpha_aff, mid_lap = {}, {}, {}
    for i, j in _CORNER_PAIRS:
        k = 6 - i - j
        alpha[(i, j)] = (
            delta1[i - 1, i - 1] + delta1[j - 1, j - 1] + 0.6 * delta0[k - 1]
        )
        alpha_aff[(i, j)] = _alpha_affine(x, y, i, j)
        mid_lap[(i, j)] = delta1[i - 1, j - 1] + delta1[j - 1, i - 1]
    return CellOperators(delta0, delta1, alpha, alpha_aff, mid_lap)


# ---------------------------------------------------------------------------
# closed forms (uniform scaling factor)


def _require_uniform(spec: FifSpec, forbid_three_fifths: bool = False) -> float:
    d = spec.uniform_d()
    if forbid_three_fifths and abs(d - 0.6) < 1e-12:
        raise ValueError("closed form undefined at scaling factor 3/5")
    return d


def pair_sum_fif(spec: FifSpec, i: int, m: int) -> float:
    """Closed form for ``f(q_{i^m j}) + f(q_{i^m k})`` (uniform ``d != 3/5``).

    The recursion contracts the pair sum with ratio ``d`` while the harmonic
    parts feed in a geometric ``(3/5)^m`` series:

        2 x_i + d^m delta0_i + (delta1_i - d delta0_i)/(3/5 - d)
                               * ((3/5)^m - d^m).
    """
    if i not in address.LETTERS:
        raise ValueError(f"corner index must be 1, 2 or 3, got {i}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    d = _require_uniform(spec, forbid_three_fifths=True)
    x, y = spec.boundary, spec.midpoints
    d0 = _delta0(x, i)
    d1 = _delta1_corner(x, y, i)
    return 2.0 * x[i - 1] + d**m * d0 + (d1 - d * d0) / (0.6 - d) * (0.6**m - d**m)


def midpoint_laplacian_closed_form(spec: FifSpec, pair: tuple[int, int], m: int) -> float:
    """Closed form for the level-(m+1) graph Laplacian at the midpoint ``q_ij``."""
    i, j = pair
    if i == j or i not in address.LETTERS or j not in address.LETTERS:
        raise ValueError(f"need two distinct corners, got {pair}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    d = _require_uniform(spec, forbid_three_fifths=True)
    x, y = spec.boundary, spec.midpoints
    alpha = _alpha_affine(x, y, i, j)
    lap1 = _midpoint_lap1(x, y, i, j)
    return d * alpha / (0.6 - d) * (0.6**m - d**m) + lap1 * 0.6**m


def laplacian_scaling(spec: FifSpec, word: str, pair: tuple[int, int], m: int) -> float:
    """Deep-level Laplacian via the scaling identity.

    ``L_{|word|+m+1} f(q_{word i j}) = d^{|word|} L_{m+1} f(q_ij)``; the
    shallow factor is computed directly by evaluating level ``m + 1``, so this
    holds for every uniform ``d`` (including 3/5).
    """
    i, j = pair
    if i == j or i not in address.LETTERS or j not in address.LETTERS:
        raise ValueError(f"need two distinct corners, got {pair}")
    d = _require_uniform(spec)
    deep = len(word) + m + 1
    if deep > address.depth_cap():
        raise DepthCapError(f"level {deep} exceeds depth cap {address.depth_cap()}")
    u = evaluate_on_level(spec, m + 1)
    shallow = graph_laplacian(u, Address(str(i), j))
    return d ** len(word) * shallow


# ---------------------------------------------------------------------------
# existence classification


@lru_cache(maxsize=1)
def harmonic_midpoint_matrix() -> np.ndarray:
    """Map from boundary values to the midpoint triple of the harmonic function.

    Row ``k-1`` gives ``y_k`` (the midpoint opposite corner ``k``); derived by
    evaluating the averaging rule on the three unit boundary vectors, and
    equal to ``1/5`` on the diagonal, ``2/5`` off it.
    """
    out = np.empty((3, 3))
    for k, (i, j) in zip((3, 2, 1), ((1, 2), (1, 3), (2, 3))):
        for c in range(3):
            e = HarmonicFunction(tuple(1.0 if t == c else 0.0 for t in range(3)))
            out[k - 1, c] = eval_harmonic(e, f"{i}.{j}")
    return out


@lru_cache(maxsize=1)
def existence_system_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient matrices of the two linear systems behind the existence split.

    ``A1 y = B1 x`` expresses "all alphas vanish" and ``A2 y = B2 x``
    expresses "all midpoint level-1 Laplacians vanish", rows ordered by pair
    (1,2), (1,3), (2,3).  Extracted from the affine forms on unit vectors.
    """
    zeros = (0.0, 0.0, 0.0)
    a1 = np.empty((3, 3))
    b1 = np.empty((3, 3))
    a2 = np.empty((3, 3))
    b2 = np.empty((3, 3))
    for row, (i, j) in enumerate(_CORNER_PAIRS):
        for c in range(3):
            e = tuple(1.0 if t == c else 0.0 for t in range(3))
            a1[row, c] = _alpha_affine(zeros, e, i, j)
            b1[row, c] = -_alpha_affine(e, zeros, i, j)
            a2[row, c] = _midpoint_lap1(zeros, e, i, j)
            b2[row, c] = -_midpoint_lap1(e, zeros, i, j)
    return a1, b1, a2, b2


@dataclass(frozen=True)
class LaplacianClassification:
    """Outcome of the existence test for the renormalized Laplacian.

    ``case`` is ``"harmonic"`` (midpoints obey the averaging rule, Laplacian
    identically 0), ``"constant"`` (``d = 1/5`` and the three quantities
    ``y_k + x_k/5`` coincide; the Laplacian is the stated constant), or
    ``"nonexistent"``.  ``diagnostics`` carries the alphas and the residuals
    of both membership tests.
    """

    case: str
    constant_value: float | None
    diagnostics: dict

    @property
    def exists(self) -> bool:
        return self.case != CASE_NONEXISTENT


def classify(spec: FifSpec, tol: float = 1e-10) -> LaplacianClassification:
    """Decide whether the FIF has a (renormalized graph-limit) Laplacian.

    Requires a uniform scaling factor.  Residuals are compared against
    ``tol`` scaled by ``max(1, |x|_inf, |y|_inf)``; both membership conditions
    are exact affine identities, so the tolerance only absorbs input noise.
    """
    d = spec.uniform_d()
    x = np.asarray(spec.boundary)
    y = np.asarray(spec.midpoints)
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    ops = cell_operators(spec)

    harmonic_residual = float(np.max(np.abs(y - harmonic_midpoint_matrix() @ x)))
    s = y + x / 5.0
    constant_residual = float(np.max(s) - np.min(s))
    diagnostics = {
        "alpha": {f"{i}{j}": ops.alpha_affine[(i, j)] for i, j in _CORNER_PAIRS},
        "harmonic_residual": harmonic_residual,
        "constant_residual": constant_residual,
        "d": d,
    }
    if harmonic_residual <= tol * scale:
        return LaplacianClassification(CASE_HARMONIC, None, diagnostics)
    if abs(d - 0.2) <= tol and constant_residual <= tol * scale:
        value = 3.0 * (2.0 * x[0] + 2.0 * x[1] + x[2] - 5.0 * y[2])
        return LaplacianClassification(CASE_CONSTANT, float(value), diagnostics)
    if abs(d - 0.5) <= tol:
        diagnostics["note"] = (
            "d = 1/2 solves the determinant equation but lies outside the "
            "finite-energy range |d| < 1/sqrt(5)"
        )
    return LaplacianClassification(CASE_NONEXISTENT, None, diagnostics)


def laplacian_at(spec: FifSpec, x, tol: float = 1e-10) -> float:
    """Pointwise Laplacian at an interior vertex, via the classification.

    Zero in the harmonic case; in the constant case the value at
    ``q_{w i j}`` is ``(5 d)^{|w|}`` times the midpoint value, which with
    ``d = 1/5`` is the same constant everywhere.
    """
    result = classify(spec, tol)
    if not result.exists:
        raise LaplacianUndefinedError(
            f"the Laplacian of this FIF does not exist (diagnostics: {result.diagnostics})"
        )
    cv = address.canonicalize(x)
    if cv.is_boundary:
        raise ValueError(f"{cv} is a boundary vertex")
    if result.case == CASE_HARMONIC:
        return 0.0
    n = cv.native_level - 1
    return result.constant_value * (5.0 * spec.uniform_d()) ** n


def solve_dirichlet(a: tuple[float, float, float], eta: float) -> FifSpec:
    """The FIF solving ``Delta u = eta`` on the gasket with ``u(q_i) = a_i``.

    The unique solution has uniform scaling factor 1/5 and midpoints
    ``u(q_ij) = (2 a_i + 2 a_j + a_k - eta/3) / 5``.
    """
    a = tuple(float(v) for v in a)
    if len(a) != 3:
        raise ValueError("boundary data must have exactly three values")
    y = []
    for i, j in ((2, 3), (1, 3), (1, 2)):  # y_k order, k = 1, 2, 3
        k = 6 - i - j
        y.append((2.0 * a[i - 1] + 2.0 * a[j - 1] + a[k - 1] - eta / 3.0) / 5.0)
    return FifSpec(boundary=a, midpoints=tuple(y), d=(0.2, 0.2, 0.2))
