"""Symbolic addressing of the Sierpinski gasket vertex sets.

The gasket is the attractor of three planar similitudes ``P_1, P_2, P_3``
of ratio 1/2, each fixing one corner of a triangle.  A word ``w`` over the
alphabet ``{1, 2, 3}`` names the composed map ``P_w = P_{w1} o ... o P_{wm}``,
and an :class:`Address` ``(w, t)`` names the vertex ``P_w(q_t)``.  The level-m
vertex set ``V_m`` is the union of ``P_w(V_0)`` over all words of length m;
two cells meet only at shared midpoints (``P_i(q_j) = P_j(q_i)`` for i != j),
so a vertex generally has several addresses.  :func:`canonicalize` resolves
them to a unique representative, and the enumeration helpers build the level
graphs that every other module consumes.

Conventions:

* textual address syntax is ``"word.terminal"``, e.g. ``"12.3"`` for
  ``P_1 P_2 (q_3)``; the empty word is written ``".3"``;
* a vertex of a coarser level is re-addressed at level m by padding its word
  with repeated terminal letters, so all level-m words have length m;
* among the two mirror addresses of an interior vertex the lexicographically
  smaller one is canonical.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LETTERS = (1, 2, 3)

DEFAULT_DEPTH_CAP = 12
DEPTH_CAP_ENV = "FIF_DEPTH_CAP"

#: Corners of the default embedding triangle (rows: q_1, q_2, q_3).
DEFAULT_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])


class DepthCapError(RuntimeError):
    """Raised when an enumeration or solve exceeds the configured depth cap."""


def depth_cap() -> int:
    """Current depth cap: ``FIF_DEPTH_CAP`` env var, else 12."""
    raw = os.environ.get(DEPTH_CAP_ENV)
    if raw is None:
        return DEFAULT_DEPTH_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"invalid {DEPTH_CAP_ENV}={raw!r}: not an integer") from exc


def check_level(m: int) -> None:
    """Validate a level argument against the depth cap."""
    if m < 0:
        raise ValueError(f"level must be nonnegative, got {m}")
    cap = depth_cap()
    if m > cap:
        raise DepthCapError(f"level {m} exceeds depth cap {cap}")


def _check_word(word: str) -> None:
    if not all(c in "123" for c in word):
        raise ValueError(f"address word must use letters 1,2,3 only, got {word!r}")


def _check_terminal(terminal: int) -> None:
    if terminal not in LETTERS:
        raise ValueError(f"terminal must be 1, 2 or 3, got {terminal!r}")


@dataclass(frozen=True, order=True)
class Address:
    """A vertex name ``P_word(q_terminal)``; not necessarily canonical."""

    word: str
    terminal: int

    def __post_init__(self) -> None:
        _check_word(self.word)
        _check_terminal(self.terminal)

    @property
    def level(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return f"{self.word}.{self.terminal}"


def parse_address(text: str) -> Address:
    """Parse ``"word.terminal"`` syntax, e.g. ``"12.3"`` or ``".1"``."""
    text = text.strip()
    word, sep, term = text.partition(".")
    if not sep or not term:
        raise ValueError(f"address {text!r} must look like WORD.TERMINAL, e.g. '12.3'")
    if not term.isdigit():
        raise ValueError(f"address terminal {term!r} is not a digit")
    return Address(word, int(term))


@dataclass(frozen=True, order=True)
class CanonicalVertex:
    """The canonical name of a vertex of ``V_level``.

    ``word`` always has length ``level``.  Instances are produced by
    :func:`canonicalize` and the enumeration helpers; constructing one by hand
    does not validate canonical form.
    """

    level: int
    word: str
    terminal: int

    @property
    def address(self) -> Address:
        return Address(self.word, self.terminal)

    @property
    def reduced_word(self) -> str:
        """The padding-free word (trailing copies of the terminal stripped)."""
        return self.word.rstrip(str(self.terminal))

    @property
    def native_level(self) -> int:
        """The first level at which this point appears in ``V_m``."""
        return len(self.reduced_word)

    @property
    def is_boundary(self) -> bool:
        return self.native_level == 0

    def __str__(self) -> str:
        return f"{self.word}.{self.terminal}"


def canonicalize(a: Address | CanonicalVertex | str) -> CanonicalVertex:
    """Resolve an address to the unique canonical vertex of its level.

    Applies the two gasket identifications: ``P_i(q_i) = q_i`` (trailing
    letters equal to the terminal are padding) and ``P_i(q_j) = P_j(q_i)``
    (mirror addresses of an interior vertex), then re-pads to the original
    level.  Idempotent, and total on well-formed addresses.
    """
    if isinstance(a, str):
        a = parse_address(a)
    if isinstance(a, CanonicalVertex):
        a = a.address
    level = a.level
    word, term = a.word, a.terminal
    core = word.rstrip(str(term))
    if core:
        last = int(core[-1])
        # interior vertex: mirror pair is (tau+last, term) vs (tau+term, last)
        if last > term:
            core, term = core[:-1] + str(term), last
    padded = core + str(term) * (level - len(core))
    return CanonicalVertex(level, padded, term)


def at_level(v: CanonicalVertex | Address | str, m: int) -> CanonicalVertex:
    """Re-address a vertex at level ``m`` (>= its native level)."""
    cv = canonicalize(v)
    if cv.native_level > m:
        raise ValueError(f"{cv} does not belong to V_{m}")
    core = cv.reduced_word
    word = core + str(cv.terminal) * (m - len(core))
    return CanonicalVertex(m, word, cv.terminal)


@dataclass(frozen=True)
class Edge:
    """One edge of the level graph: two corners of the cell ``P_cell(V_0)``.

    ``corners`` are the corner labels ``(i, j)`` with ``i < j``; note the
    canonical endpoint terminals need not equal them (mirror forms).
    """

    cell: str
    corners: tuple[int, int]
    endpoints: tuple[CanonicalVertex, CanonicalVertex]


_PAIRS = ((1, 2), (1, 3), (2, 3))


def _words(m: int):
    return ("".join(p) for p in itertools.product("123", repeat=m))


@lru_cache(maxsize=None)
def _vertices(m: int) -> tuple[CanonicalVertex, ...]:
    seen = {canonicalize(Address(w, t)) for w in _words(m) for t in LETTERS}
    return tuple(sorted(seen))


def vertices_at_level(m: int) -> tuple[CanonicalVertex, ...]:
    """All canonical vertices of ``V_m``, sorted; size ``(3^{m+1} + 3) / 2``."""
    check_level(m)
    return _vertices(m)


@lru_cache(maxsize=None)
def vertex_index(m: int) -> dict[CanonicalVertex, int]:
    return {v: i for i, v in enumerate(_vertices(m))}


@lru_cache(maxsize=None)
def _edges(m: int) -> tuple[Edge, ...]:
    edges = []
    for w in _words(m):
        for i, j in _PAIRS:
            edges.append(
                Edge(
                    w, (i, j), (canonicalize(Address(w, i)), canonicalize(Address(w, j)))
                )
            )
    return tuple(edges)


def edges_at_level(m: int) -> tuple[Edge, ...]:
    """All ``3^{m+1}`` edges of the level-m graph, three per cell."""
    check_level(m)
    return _edges(m)


@lru_cache(maxsize=None)
def edge_arrays(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized edge table: (rows, pair ids, cell ids).

    ``rows`` is ``(E, 2)`` vertex indices into :func:`vertices_at_level`,
    ``pairs`` holds 0/1/2 for corner pairs (1,2)/(1,3)/(2,3), and ``cells``
    indexes the lexicographic cell enumeration (for per-cell weights).
    """
    index = vertex_index(m)
    edges = _edges(m)
    rows = np.array([[index[e.endpoints[0]], index[e.endpoints[1]]] for e in edges])
    pairs = np.tile(np.arange(3), 3**m)
    cells = np.repeat(np.arange(3**m), 3)
    return rows, pairs, cells


@lru_cache(maxsize=None)
def cell_letter_counts(m: int) -> np.ndarray:
    """``(3^m, 3)`` table: how often each letter occurs in each cell word."""
    counts = np.zeros((3**m, 3), dtype=int)
    for c, w in enumerate(_words(m)):
        for letter in w:
            counts[c, int(letter) - 1] += 1
    return counts


@lru_cache(maxsize=None)
def adjacency(m: int) -> dict[CanonicalVertex, tuple[CanonicalVertex, ...]]:
    nbrs: dict[CanonicalVertex, set[CanonicalVertex]] = {v: set() for v in _vertices(m)}
    for e in _edges(m):
        a, b = e.endpoints
        nbrs[a].add(b)
        nbrs[b].add(a)
    return {v: tuple(sorted(s)) for v, s in nbrs.items()}


def neighbors(v: CanonicalVertex | Address | str, m: int) -> list[CanonicalVertex]:
    """Level-m graph neighbors: 4 for interior vertices, 2 on the boundary."""
    cv = at_level(v, m)
    adj = adjacency(m)
    if cv not in adj:
        raise ValueError(f"{cv} is not a vertex of V_{m}")
    return list(adj[cv])


def embed(v: CanonicalVertex | Address | str, corners: np.ndarray | None = None) -> np.ndarray:
    """Planar coordinates of a vertex under the similitude system.

    ``corners`` are the triangle corners (default equilateral
    ``(0,0), (1,0), (1/2, sqrt(3)/2)``); each map halves the distance to its
    corner.  Mirror addresses of a glued vertex embed to the same point.
    """
    if corners is None:
        corners = DEFAULT_CORNERS
    else:
        corners = np.asarray(corners, dtype=float)
    if isinstance(v, str):
        v = parse_address(v)
    if isinstance(v, CanonicalVertex):
        v = v.address
    point = corners[v.terminal - 1].copy()
    for letter in reversed(v.word):
        point = 0.5 * (point + corners[int(letter) - 1])
    return point


def embedding_array(m: int, corners: np.ndarray | None = None) -> np.ndarray:
    """Coordinates of all of ``V_m`` in canonical order, shape ``(n, 2)``."""
    return np.array([embed(v, corners) for v in vertices_at_level(m)])


@dataclass(frozen=True)
class Refinement:
    """Index maps describing how ``V_{m+1}`` refines ``V_m``.

    Vertices of ``V_{m+1}`` split into the carried-over vertices of ``V_m``
    (``old_rows`` with their ``old_parent`` positions in ``V_m``) and the new
    cell midpoints.  For each new vertex ``q_{tau i j}`` (``i < j``,
    ``k = 6-i-j``), ``new_corners`` holds the ``V_m`` rows of
    ``q_{tau i}, q_{tau j}, q_{tau k}``, while ``new_letter``/``new_parent``
    express it as ``P_letter`` of a ``V_m`` point for value recursions.
    """

    base_level: int
    old_rows: np.ndarray
    old_parent: np.ndarray
    new_rows: np.ndarray
    new_corners: np.ndarray
    new_letter: np.ndarray
    new_parent: np.ndarray


@lru_cache(maxsize=None)
def _refinement(m: int) -> Refinement:
    base = vertex_index(m)
    old_rows, old_parent = [], []
    new_rows, new_corners, new_letter, new_parent = [], [], [], []
    for row, v in enumerate(_vertices(m + 1)):
        if v.native_level <= m:
            old_rows.append(row)
            old_parent.append(base[CanonicalVertex(m, v.word[:-1], v.terminal)])
        else:
            tau, i, j = v.word[:-1], int(v.word[-1]), v.terminal
            k = 6 - i - j
            new_rows.append(row)
            new_corners.append(
                [base[canonicalize(Address(tau, t))] for t in (i, j, k)]
            )
            new_letter.append(int(v.word[0]))
            new_parent.append(base[canonicalize(Address(v.word[1:], v.terminal))])
    return Refinement(
        base_level=m,
        old_rows=np.array(old_rows, dtype=int),
        old_parent=np.array(old_parent, dtype=int),
        new_rows=np.array(new_rows, dtype=int),
        new_corners=np.array(new_corners, dtype=int),
        new_letter=np.array(new_letter, dtype=int),
        new_parent=np.array(new_parent, dtype=int),
    )


def refinement(m: int) -> Refinement:
    """The :class:`Refinement` from level ``m`` to ``m + 1``."""
    check_level(m + 1)
    return _refinement(m)
