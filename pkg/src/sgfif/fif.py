"""Fractal interpolation functions on the gasket.

An :class:`FifSpec` fixes six interpolation values (three boundary, three
midpoint) and three vertical scaling factors ``d_i`` with ``|d_i| < 1``.
There is a unique continuous function ``f`` matching those values on ``V_1``
and satisfying the self-similar recursion

    f(P_i(x)) = d_i f(x) + h_i(x),

where each ``h_i`` is the harmonic function pinned down by the data
(:func:`derive_h`).  Two evaluation routes are provided on purpose:
:func:`eval_at` unrolls the recursion along one address, while
:func:`evaluate_on_level` fills whole vertex sets top-down; tests play them
against each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import address
from .address import Address, CanonicalVertex
from .harmonic import HarmonicFunction, eval_harmonic, harmonic_on_level
from .vertexfn import VertexFunction

__all__ = [
    "FifSpec",
    "VertexFunction",
    "derive_h",
    "eval_at",
    "evaluate_on_level",
    "load_spec",
    "save_spec",
]


@dataclass(frozen=True)
class FifSpec:
    """Interpolation data of one FIF.

    boundary
        ``(f(q_1), f(q_2), f(q_3))``.
    midpoints
        ``(y_1, y_2, y_3)`` with ``y_k = f(q_ij)`` for ``{i, j, k} = {1, 2, 3}``
        (the midpoint opposite corner ``k``).
    d
        Vertical scaling factors ``(d_1, d_2, d_3)``, each in ``(-1, 1)``.
    """

    boundary: tuple[float, float, float]
    midpoints: tuple[float, float, float]
    d: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "boundary", tuple(float(v) for v in self.boundary))
        object.__setattr__(self, "midpoints", tuple(float(v) for v in self.midpoints))
        d = self.d
        if np.isscalar(d):
            d = (d, d, d)
        object.__setattr__(self, "d", tuple(float(v) for v in d))
        for name in ("boundary", "midpoints", "d"):
            if len(getattr(self, name)) != 3:
                raise ValueError(f"{name} must have exactly three entries")
        for v in self.d:
            if not -1.0 < v < 1.0:
                raise ValueError(f"vertical scaling factors must lie in (-1, 1), got {v}")

    @property
    def is_uniform(self) -> bool:
        return self.d[0] == self.d[1] == self.d[2]

    def uniform_d(self) -> float:
        if not self.is_uniform:
            raise ValueError(f"scaling factors {self.d} are not uniform")
        return self.d[0]

    def midpoint_value(self, i: int, j: int) -> float:
        """``f(q_ij)`` for distinct corners ``i, j``."""
        if i == j or i not in address.LETTERS or j not in address.LETTERS:
            raise ValueError(f"need two distinct corners, got ({i}, {j})")
        return self.midpoints[6 - i - j - 1]

    def to_mapping(self) -> dict:
        d = self.d
        return {
            "boundary": list(self.boundary),
            "midpoints": list(self.midpoints),
            "d": d[0] if self.is_uniform else list(d),
        }

    @classmethod
    def from_mapping(cls, data: dict) -> "FifSpec":
        if not isinstance(data, dict):
            raise ValueError("spec must be a JSON object")
        for key in ("boundary", "midpoints", "d"):
            if key not in data:
                raise ValueError(f"spec is missing required field {key!r}")
        extra = set(data) - {"boundary", "midpoints", "d"}
        if extra:
            raise ValueError(f"spec has unknown fields {sorted(extra)}")

        def triple(key):
            v = data[key]
            if not isinstance(v, (list, tuple)) or len(v) != 3:
                raise ValueError(f"field {key!r} must be a list of three numbers")
            return tuple(float(x) for x in v)

        d = data["d"]
        d = (float(d),) * 3 if isinstance(d, (int, float)) else triple("d")
        return cls(boundary=triple("boundary"), midpoints=triple("midpoints"), d=d)


def load_spec(path: str | Path) -> FifSpec:
    """Read a spec from JSON; ``"d"`` may be a scalar (uniform shorthand)."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed spec JSON in {path}: {exc}") from exc
    return FifSpec.from_mapping(data)


def save_spec(spec: FifSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec.to_mapping(), indent=2) + "\n")


def derive_h(spec: FifSpec) -> tuple[HarmonicFunction, HarmonicFunction, HarmonicFunction]:
    """The harmonic components ``h_i`` of the recursion.

    Matching the recursion on ``V_1`` forces ``h_i(q_j) = f(q_ij) - d_i f(q_j)``
    with the convention ``f(q_ii) = f(q_i)``.
    """
    x, d = spec.boundary, spec.d
    hs = []
    for i in address.LETTERS:
        vals = []
        for j in address.LETTERS:
            fij = x[i - 1] if j == i else spec.midpoint_value(i, j)
            vals.append(fij - d[i - 1] * x[j - 1])
        hs.append(HarmonicFunction(tuple(vals)))
    return tuple(hs)


def eval_at(spec: FifSpec, a: Address | CanonicalVertex | str) -> float:
    """``f`` at one vertex, unrolling the recursion letter by letter.

    Any address of a glued vertex gives the same value up to roundoff; tests
    exploit this by evaluating both mirror addresses independently.
    """
    if isinstance(a, str):
        a = address.parse_address(a)
    if isinstance(a, CanonicalVertex):
        a = a.address
    hs = derive_h(spec)
    return _eval_rec(spec, hs, a.word, a.terminal)


def _eval_rec(spec, hs, word, terminal) -> float:
    # base cases are the interpolation data on V_1
    if not word:
        return spec.boundary[terminal - 1]
    i = int(word[0])
    if len(word) == 1:
        return spec.boundary[i - 1] if i == terminal else spec.midpoint_value(i, terminal)
    return spec.d[i - 1] * _eval_rec(spec, hs, word[1:], terminal) + eval_harmonic(
        hs[i - 1], Address(word[1:], terminal)
    )


def evaluate_on_level(spec: FifSpec, m: int) -> VertexFunction:
    """``f`` on all of ``V_m``.

    Walks levels top-down: known values are carried over unchanged (so the
    interpolation data on ``V_1`` is reproduced exactly) and each new midpoint
    ``P_i(z)`` gets ``d_i f(z) + h_i(z)``, with the ``h_i`` tabulated level by
    level alongside.
    """
    address.check_level(m)
    hs = derive_h(spec)
    vals = np.asarray(spec.boundary, dtype=float)
    hvals = [np.asarray(h.boundary, dtype=float) for h in hs]
    dvec = np.asarray(spec.d)
    for level in range(m):
        ref = address.refinement(level)
        n_next = len(address.vertices_at_level(level + 1))
        nxt = np.empty(n_next)
        nxt[ref.old_rows] = vals[ref.old_parent]
        if level == 0:
            # the V_1 midpoints are interpolation data, not derived values
            nxt[ref.new_rows] = np.asarray(spec.midpoints)[ref.new_corners[:, 2]]
        else:
            letters = ref.new_letter - 1
            hmat = np.stack(hvals)  # (3, n_level)
            nxt[ref.new_rows] = (
                dvec[letters] * vals[ref.new_parent] + hmat[letters, ref.new_parent]
            )
        # advance the harmonic tables by midpoint averaging
        new_h = []
        for hv in hvals:
            hn = np.empty(n_next)
            hn[ref.old_rows] = hv[ref.old_parent]
            c = hv[ref.new_corners]
            hn[ref.new_rows] = 0.4 * (c[:, 0] + c[:, 1]) + 0.2 * c[:, 2]
            new_h.append(hn)
        vals, hvals = nxt, new_h
    return VertexFunction(m, vals)
