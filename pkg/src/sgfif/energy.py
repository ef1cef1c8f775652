"""Graph energies and the finiteness classification of FIF energy.

The level-m energy of ``u`` is the weighted sum of squared differences over
level-m edges, with the edge in cell ``w`` between corners ``i < j`` weighted
``c_ij / (r_w1 ... r_wm)``.  On the gasket defaults (unit conductances,
ratios 3/5) every level-m edge carries weight ``(5/3)^m`` and the sequence
``E_m`` is nondecreasing.

For an FIF the sequence obeys an exact affine recursion

    E_m = delta * (E_{m-1} - E_0) + E_1,      delta = sum_k d_k^2 / r_k,

so the limit is ``E_0 + (E_1 - E_0) / (1 - delta)`` when ``delta < 1``,
``E_0`` when the data is harmonic (``E_1 = E_0``), and infinite otherwise.
:func:`verify_recursion` recomputes every level by brute-force edge sums and
reports how well the recursion and the closed form hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import address
from .fif import FifSpec, evaluate_on_level
from .vertexfn import VertexFunction

HARMONIC = "harmonic"
FINITE = "finite"
INFINITE = "infinite"


@dataclass(frozen=True)
class HarmonicStructure:
    """Edge conductances ``(c_12, c_13, c_23)`` and ratios ``(r_1, r_2, r_3)``.

    Only the gasket defaults ``(1, 1, 1) / (3/5, 3/5, 3/5)`` are known to make
    the energies compatible across levels; other positive values are computed
    verbatim with no such guarantee.
    """

    conductances: tuple[float, float, float] = (1.0, 1.0, 1.0)
    ratios: tuple[float, float, float] = (0.6, 0.6, 0.6)

    def __post_init__(self):
        object.__setattr__(self, "conductances", tuple(float(c) for c in self.conductances))
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if len(self.conductances) != 3 or len(self.ratios) != 3:
            raise ValueError("conductances and ratios must each have three entries")
        if min(self.conductances) <= 0 or min(self.ratios) <= 0:
            raise ValueError("conductances and ratios must be strictly positive")

    @property
    def is_sg_default(self) -> bool:
        return self.conductances == (1.0, 1.0, 1.0) and self.ratios == (0.6, 0.6, 0.6)


SG = HarmonicStructure()


@lru_cache(maxsize=None)
def _edge_weights(m: int, hs: HarmonicStructure) -> np.ndarray:
    _, pairs, cells = address.edge_arrays(m)
    counts = address.cell_letter_counts(m)
    log_r = np.log(np.asarray(hs.ratios))
    r_cell = np.exp(counts @ log_r) if m else np.ones(1)
    c = np.asarray(hs.conductances)
    return c[pairs] / r_cell[cells]


def graph_energy(u: VertexFunction, hs: HarmonicStructure = SG) -> float:
    """``E_m(u)``: weighted sum of squared edge differences at ``u``'s level."""
    rows, _, _ = address.edge_arrays(u.level)
    diffs = u.values[rows[:, 0]] - u.values[rows[:, 1]]
    return float(_edge_weights(u.level, hs) @ (diffs * diffs))


def graph_energy_bilinear(
    u: VertexFunction, v: VertexFunction, hs: HarmonicStructure = SG
) -> float:
    """The polarization ``E_m(u, v)``; symmetric, with ``E_m(u, u) = E_m(u)``."""
    if u.level != v.level:
        raise ValueError(f"level mismatch: {u.level} vs {v.level}")
    rows, _, _ = address.edge_arrays(u.level)
    du = u.values[rows[:, 0]] - u.values[rows[:, 1]]
    dv = v.values[rows[:, 0]] - v.values[rows[:, 1]]
    return float(_edge_weights(u.level, hs) @ (du * dv))


def delta_factor(d, hs: HarmonicStructure = SG) -> float:
    """The energy contraction ratio ``sum_k d_k^2 / r_k`` (1/5 per unit d^2 on SG)."""
    d = (d, d, d) if np.isscalar(d) else tuple(d)
    if len(d) != 3:
        raise ValueError("d must be a scalar or a triple")
    return float(sum(dk * dk / rk for dk, rk in zip(d, hs.ratios)))


def energy_closed_form(
    e0: float, e1: float, delta: float, rel_tol: float = 1e-12
) -> tuple[str, float]:
    """Classify the energy limit from ``(E_0, E_1, delta)``.

    Returns ``(classification, total)`` with classification one of
    ``"harmonic"`` (``E_1 = E_0`` up to ``rel_tol``; the limit is ``E_0``),
    ``"finite"`` (``delta < 1``; limit ``E_0 + (E_1 - E_0)/(1 - delta)``), or
    ``"infinite"`` (``math.inf``).  The harmonic test is a floating-point
    equality and only meaningful for data meant to be exactly harmonic.
    """
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if e1 < e0 - rel_tol * max(1.0, abs(e0)):
        raise ValueError(f"E_1 = {e1} < E_0 = {e0} violates energy monotonicity")
    if math.isclose(e0, e1, rel_tol=rel_tol, abs_tol=rel_tol):
        return HARMONIC, e0
    if delta < 1.0:
        return FINITE, e0 + (e1 - e0) / (1.0 - delta)
    return INFINITE, math.inf


@dataclass(frozen=True)
class EnergyReport:
    """Brute-force energies of one spec plus how well the theory fits them."""

    energies: tuple[float, ...]
    delta: float
    classification: str
    closed_form_total: float
    max_recursion_residual: float
    max_formula_residual: float


def energy_sequence(spec: FifSpec, m_max: int, hs: HarmonicStructure = SG) -> np.ndarray:
    """``E_0 .. E_{m_max}`` by direct edge sums over evaluated levels."""
    return np.array(
        [graph_energy(evaluate_on_level(spec, m), hs) for m in range(m_max + 1)]
    )


def verify_recursion(spec: FifSpec, m_max: int, hs: HarmonicStructure = SG) -> EnergyReport:
    """Compare brute-force ``E_0..E_{m_max}`` against the recursion and closed form."""
    e = energy_sequence(spec, m_max, hs)
    delta = delta_factor(spec.d, hs)
    rec = 0.0
    for m in range(1, m_max + 1):
        predicted = delta * (e[m - 1] - e[0]) + e[1]
        rec = max(rec, abs(e[m] - predicted) / max(1.0, abs(e[m])))
    formula = 0.0
    for m in range(m_max + 1):
        if delta == 1.0:
            predicted = e[0] + m * (e[1] - e[0])
        else:
            predicted = delta**m / (1.0 - delta) * (e[0] - e[1]) + e[0] + (
                e[1] - e[0]
            ) / (1.0 - delta)
        formula = max(formula, abs(e[m] - predicted) / max(1.0, abs(e[m])))
    classification, total = energy_closed_form(e[0], e[1], delta)
    return EnergyReport(
        energies=tuple(float(v) for v in e),
        delta=delta,
        classification=classification,
        closed_form_total=total,
        max_recursion_residual=rec,
        max_formula_residual=formula,
    )


def estimate_delta(energies) -> float:
    """The increment ratio ``(E_m - E_{m-1}) / (E_{m-1} - E_{m-2})``.

    For an FIF this equals delta exactly, so it diagnoses growth straight
    from an observed energy sequence.  Uses the deepest usable increment pair;
    returns 0.0 for (near-)constant sequences.
    """
    e = np.asarray(energies, dtype=float)
    scale = max(1.0, float(np.max(np.abs(e))))
    inc = np.diff(e)
    for m in range(len(inc) - 1, 0, -1):
        if abs(inc[m - 1]) > 1e-13 * scale:
            return float(inc[m] / inc[m - 1])
    return 0.0


def classify_growth(energies) -> str:
    """``"constant"``, ``"saturating"`` (ratio < 1) or ``"growing"`` (ratio >= 1)."""
    e = np.asarray(energies, dtype=float)
    scale = max(1.0, float(np.max(np.abs(e))))
    if np.all(np.abs(np.diff(e)) <= 1e-12 * scale):
        return "constant"
    ratio = estimate_delta(e)
    return "saturating" if ratio < 1.0 else "growing"
