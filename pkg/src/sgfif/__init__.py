"""Fractal interpolation functions on the Sierpinski gasket.

Exact construction and evaluation of FIFs from six interpolation values and
vertical scaling factors, their graph energies with closed-form totals,
renormalized graph Laplacians with the existence classification, a
Dirichlet-problem solver, and an independent brute-force linear-algebra
oracle that cross-checks all of it.
"""

from .address import (
    Address,
    CanonicalVertex,
    DepthCapError,
    Edge,
    canonicalize,
    edges_at_level,
    embed,
    neighbors,
    parse_address,
    vertices_at_level,
)
from .energy import (
    EnergyReport,
    HarmonicStructure,
    SG,
    delta_factor,
    energy_closed_form,
    graph_energy,
    graph_energy_bilinear,
    verify_recursion,
)
from .fif import FifSpec, derive_h, eval_at, evaluate_on_level, load_spec, save_spec
from .harmonic import HarmonicFunction, eval_harmonic, harmonic_on_level, pair_sum, restriction_maps
from .laplacian import (
    LaplacianClassification,
    LaplacianUndefinedError,
    cell_operators,
    classify,
    graph_laplacian,
    laplacian_at,
    midpoint_laplacian_closed_form,
    pair_sum_fif,
    renormalized_laplacian,
    solve_dirichlet,
)
from .oracle import minimize_extension, solve_discrete_dirichlet
from .vertexfn import VertexFunction

__version__ = "0.1.0"

__all__ = [
    "Address",
    "CanonicalVertex",
    "DepthCapError",
    "Edge",
    "EnergyReport",
    "FifSpec",
    "HarmonicFunction",
    "HarmonicStructure",
    "LaplacianClassification",
    "LaplacianUndefinedError",
    "SG",
    "VertexFunction",
    "canonicalize",
    "cell_operators",
    "classify",
    "delta_factor",
    "derive_h",
    "edges_at_level",
    "embed",
    "energy_closed_form",
    "eval_at",
    "eval_harmonic",
    "evaluate_on_level",
    "graph_energy",
    "graph_energy_bilinear",
    "graph_laplacian",
    "harmonic_on_level",
    "laplacian_at",
    "load_spec",
    "midpoint_laplacian_closed_form",
    "minimize_extension",
    "neighbors",
    "pair_sum",
    "pair_sum_fif",
    "parse_address",
    "renormalized_laplacian",
    "restriction_maps",
    "save_spec",
    "solve_dirichlet",
    "solve_discrete_dirichlet",
    "verify_recursion",
    "vertices_at_level",
]
