"""Real-valued functions on a level vertex set ``V_m``."""

from __future__ import annotations

from typing import Iterator, Mapping

import numpy as np

from . import address
from .address import Address, CanonicalVertex


class VertexFunction:
    """A function ``V_m -> R``, stored as an array in canonical vertex order.

    Lookups accept anything :func:`sgfif.address.canonicalize` accepts; an
    address of a coarser vertex is re-addressed at this level first, so
    ``u["1.2"]`` works on a level-5 function.
    """

    __slots__ = ("level", "values")

    def __init__(self, level: int, values: np.ndarray):
        expected = len(address.vertices_at_level(level))
        values = np.asarray(values, dtype=float)
        if values.shape != (expected,):
            raise ValueError(
                f"level {level} needs {expected} values, got shape {values.shape}"
            )
        self.level = level
        self.values = values
        self.values.flags.writeable = False

    @classmethod
    def from_dict(
        cls, level: int, mapping: Mapping[CanonicalVertex | Address | str, float]
    ) -> "VertexFunction":
        """Build from a mapping whose keys cover ``V_level`` exactly."""
        resolved = {address.at_level(k, level): float(v) for k, v in mapping.items()}
        verts = address.vertices_at_level(level)
        missing = [v for v in verts if v not in resolved]
        if missing or len(resolved) != len(verts):
            extra = set(resolved) - set(verts)
            raise ValueError(
                f"domain mismatch for V_{level}: missing {missing[:3]}, extra {sorted(extra)[:3]}"
            )
        return cls(level, np.array([resolved[v] for v in verts]))

    def __getitem__(self, key: CanonicalVertex | Address | str) -> float:
        cv = address.at_level(key, self.level)
        return float(self.values[address.vertex_index(self.level)[cv]])

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[CanonicalVertex]:
        return iter(address.vertices_at_level(self.level))

    def items(self):
        return zip(address.vertices_at_level(self.level), self.values)

    def as_dict(self) -> dict[CanonicalVertex, float]:
        return {v: float(x) for v, x in self.items()}

    def __repr__(self) -> str:
        return f"VertexFunction(level={self.level}, n={len(self.values)})"
