"""Built-in verification suites behind the ``verify`` subcommand.

Each suite re-derives one family of identities numerically (closed form vs
brute force, rule vs minimization, classifier vs construction) and fails
loudly on any mismatch.  ``levels`` bounds the depth everywhere, so
``--levels 2`` is a quick smoke pass and the default is a thorough one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import address, energy, laplacian, oracle
from .address import Address
from .fif import FifSpec, eval_at, evaluate_on_level
from .harmonic import HarmonicFunction, eval_harmonic, harmonic_on_level, pair_sum
from .vertexfn import VertexFunction


class CheckFailure(AssertionError):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailure(msg)


def _random_spec(rng, d_range=(-0.4, 0.4), uniform=True) -> FifSpec:
    d = rng.uniform(*d_range)
    dd = (d, d, d) if uniform else tuple(rng.uniform(*d_range, 3))
    return FifSpec(tuple(rng.uniform(-1, 1, 3)), tuple(rng.uniform(-1, 1, 3)), dd)


def _check_counts(levels, rng, perturb):
    top = min(levels + 1, 6)
    for m in range(top + 1):
        n = len(address.vertices_at_level(m))
        _require(n == (3 ** (m + 1) + 3) // 2, f"vertex count wrong at level {m}: {n}")
        _require(
            len(address.edges_at_level(m)) == 3 ** (m + 1),
            f"edge count wrong at level {m}",
        )
        degs = {v: len(address.adjacency(m)[v]) for v in address.vertices_at_level(m)}
        for v, deg in degs.items():
            want = 2 if v.is_boundary else 4
            _require(deg == want, f"degree {deg} != {want} at {v} (level {m})")
    return f"counts and degrees verified for m <= {top}"


def _check_canonical(levels, rng, perturb):
    depth = min(levels, 5)
    n = 0
    for k in range(depth + 1):
        for w in itertools.product("123", repeat=k):
            word = "".join(w)
            for i, j in itertools.permutations((1, 2, 3), 2):
                a = address.canonicalize(Address(word + str(i), j))
                b = address.canonicalize(Address(word + str(j), i))
                _require(a == b, f"gluing broken at {word}+({i},{j})")
                _require(
                    address.canonicalize(a) == a, f"canonicalize not idempotent at {a}"
                )
                n += 1
    return f"{n} mirror pairs glue and canonicalize idempotently"


def _check_embedding(levels, rng, perturb):
    m = min(levels, 4)
    pts = address.embedding_array(m)
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    min_dist = float(np.sqrt(d2.min()))
    _require(
        min_dist >= 0.5**m * (1 - 1e-9),
        f"embedded vertices too close at level {m}: {min_dist}",
    )
    for k in range(min(levels, 4)):
        for w in itertools.product("123", repeat=k):
            word = "".join(w)
            for i, j in itertools.permutations((1, 2, 3), 2):
                p = address.embed(Address(word + str(i), j))
                q = address.embed(Address(word + str(j), i))
                _require(
                    float(np.max(np.abs(p - q))) < 1e-12,
                    f"mirror embeddings differ at {word}({i},{j})",
                )
    return f"separation and glued coordinates verified at level {m}"


def _check_rule_vs_minimization(levels, rng, perturb):
    for c in range(3):
        vals = np.zeros(3)
        vals[c] = 1.0
        ext = oracle.minimize_extension(VertexFunction(0, vals))
        if perturb:
            ext = VertexFunction(1, ext.values + 1e-6)
        for i, j in ((1, 2), (1, 3), (2, 3)):
            k = 6 - i - j
            want = 0.4 * (vals[i - 1] + vals[j - 1]) + 0.2 * vals[k - 1]
            got = ext[f"{i}.{j}"]
            _require(
                abs(got - want) < 1e-10,
                f"minimizer gives {got} at q_{i}{j} for unit vector {c + 1}, want {want}",
            )
    return "energy minimization reproduces the 2/5-2/5-1/5 averaging rule"


def _check_harmonic_annihilation(levels, rng, perturb):
    h = HarmonicFunction(tuple(rng.uniform(-1, 1, 3)))
    worst = 0.0
    for m in range(1, min(levels, 6) + 1):
        hv = harmonic_on_level(h, m)
        lap = laplacian.graph_laplacian_on_level(hv)
        worst = max(worst, float(np.nanmax(np.abs(lap))))
    _require(worst < 1e-12, f"harmonic graph Laplacian as large as {worst}")
    return f"graph Laplacian of a random harmonic function < 1e-12 up to level {min(levels, 6)}"


def _check_pair_sums(levels, rng, perturb):
    top = min(levels, 6)
    h = HarmonicFunction(tuple(rng.uniform(-1, 1, 3)))
    for i in (1, 2, 3):
        for m in range(1, top + 1):
            direct = eval_harmonic(h, Address(str(i) * m, _others(i)[0])) + eval_harmonic(
                h, Address(str(i) * m, _others(i)[1])
            )
            _require(
                abs(pair_sum(h, i, m) - direct) <= 1e-12 * max(1, abs(direct)),
                f"harmonic pair sum off at i={i}, m={m}",
            )
    for _ in range(5):
        spec = _random_spec(rng, d_range=(-0.55, 0.55))
        for i in (1, 2, 3):
            for m in range(top + 1):
                direct = eval_at(spec, Address(str(i) * m, _others(i)[0])) + eval_at(
                    spec, Address(str(i) * m, _others(i)[1])
                )
                got = laplacian.pair_sum_fif(spec, i, m)
                _require(
                    abs(got - direct) <= 1e-11 * max(1, abs(direct)),
                    f"FIF pair sum off at i={i}, m={m}: {got} vs {direct}",
                )
    return f"pair-sum closed forms match direct evaluation up to m = {top}"


def _others(i):
    return tuple(t for t in (1, 2, 3) if t != i)


def _check_energy_recursion(levels, rng, perturb):
    top = min(levels, 6)
    worst = 0.0
    for t in range(20):
        spec = _random_spec(rng, uniform=(t % 2 == 0))
        rep = energy.verify_recursion(spec, top)
        worst = max(worst, rep.max_recursion_residual, rep.max_formula_residual)
    _require(worst < 1e-9, f"energy recursion residual {worst}")
    return f"recursion and closed form hold to {worst:.2e} over 20 random specs"


def _check_energy_threshold(levels, rng, perturb):
    top = max(4, min(levels, 6))
    base = lambda d: FifSpec((0, 0, 0), (1, 1, 1), (d, d, d))
    sat = energy.energy_sequence(base(0.44), top)
    grow = energy.energy_sequence(base(0.46), top)
    _require(energy.classify_growth(sat) == "saturating", "d=0.44 not seen as saturating")
    _require(energy.classify_growth(grow) == "growing", "d=0.46 not seen as growing")
    ratios = grow[4:] / grow[3:-1]  # E_{m+1}/E_m beyond m = 3 (E_0 = 0 here)
    _require(
        bool(np.all(ratios >= 5 * 0.46**2)),
        f"growth ratios {ratios} below 5 d^2",
    )
    return "finiteness threshold behavior detected on both sides of d^2 = 1/5"


def _check_midpoint_closed_form(levels, rng, perturb):
    top = min(levels, 6)
    for _ in range(5):
        spec = _random_spec(rng, d_range=(-0.55, 0.55))
        for m in range(top):
            u = evaluate_on_level(spec, m + 1)
            for i, j in ((1, 2), (1, 3), (2, 3)):
                direct = laplacian.graph_laplacian(u, Address(str(i), j))
                got = laplacian.midpoint_laplacian_closed_form(spec, (i, j), m)
                _require(
                    abs(got - direct) <= 1e-11 * max(1, abs(direct)),
                    f"midpoint closed form off at ({i},{j}), m={m}",
                )
    return f"midpoint Laplacian closed form matches direct values up to level {top}"


def _check_scaling(levels, rng, perturb):
    spec = _random_spec(rng)
    deep_cap = min(levels + 1, 6)
    for wlen in range(0, 3):
        for w in itertools.product("123", repeat=wlen):
            word = "".join(w)
            for m in range(0, deep_cap - wlen - 1):
                deep = len(word) + m + 1
                u = evaluate_on_level(spec, deep)
                for i, j in ((1, 2), (2, 3)):
                    direct = laplacian.graph_laplacian(u, Address(word + str(i), j))
                    got = laplacian.laplacian_scaling(spec, word, (i, j), m)
                    _require(
                        abs(got - direct) <= 1e-10 * max(1, abs(direct)),
                        f"scaling identity off at w={word!r}, m={m}",
                    )
    return f"deep-level Laplacians collapse to scaled shallow ones (depth <= {deep_cap})"


def _check_constant_case(levels, rng, perturb):
    spec = FifSpec((0, 0, 0), (1, 1, 1), (0.2, 0.2, 0.2))
    top = min(levels, 6)
    for m in range(1, top + 1):
        u = evaluate_on_level(spec, m)
        lap = laplacian.graph_laplacian_on_level(u)
        vals = 1.5 * 5.0**m * lap[~np.isnan(lap)]
        _require(
            float(np.max(np.abs(vals + 15.0))) < 1e-8,
            f"renormalized Laplacian deviates from -15 at level {m}",
        )
    return f"renormalized Laplacian is -15 at every interior vertex, m <= {top}"


def _check_matrices(levels, rng, perturb):
    a1, b1, a2, b2 = laplacian.existence_system_matrices()
    want = np.full((3, 3), 0.4)
    np.fill_diagonal(want, 0.2)
    for a, b in ((a1, b1), (a2, b2)):
        _require(
            float(np.max(np.abs(np.linalg.solve(a, b) - want))) < 1e-14,
            "A^-1 B is not the 1/5-2/5 matrix",
        )
    for lam in np.linspace(-4, 4, 10):
        det = np.linalg.det(lam * a1 + a2)
        _require(
            abs(det + 2 * (lam - 5) ** 2 * (2 * lam - 1)) <= 1e-10 * max(1, abs(det)),
            f"determinant factorization fails at lambda={lam}",
        )
    return "existence-system matrix identities hold"


def _check_classifier(levels, rng, perturb):
    n = 0
    for _ in range(50):
        x = tuple(rng.uniform(-1, 1, 3))
        d = float(rng.uniform(-0.9, 0.9))
        harmonic_y = tuple(laplacian.harmonic_midpoint_matrix() @ np.asarray(x))
        got = laplacian.classify(FifSpec(x, harmonic_y, (d, d, d)))
        _require(got.case == "harmonic", f"harmonic data classified {got.case}")
        sol = laplacian.solve_dirichlet(x, float(rng.uniform(-9, 9)))
        _require(laplacian.classify(sol).case == "constant", "constant data missed")
        noisy = FifSpec(x, tuple(np.asarray(harmonic_y) + rng.uniform(1e-6, 1e-5, 3)), (d, d, d))
        _require(
            laplacian.classify(noisy).case == "nonexistent",
            "perturbed data not rejected",
        )
        n += 3
    return f"classifier sound on {n} constructed cases"


def _check_dirichlet_oracle(levels, rng, perturb):
    m = max(2, min(levels, 5))
    worst = 0.0
    for _ in range(5):
        a = tuple(rng.uniform(-2, 2, 3))
        eta = float(rng.uniform(-20, 20))
        spec = laplacian.solve_dirichlet(a, eta)
        fif_side = evaluate_on_level(spec, m)
        oracle_side = oracle.solve_discrete_dirichlet(a, eta, m)
        worst = max(worst, float(np.max(np.abs(fif_side.values - oracle_side.values))))
    _require(worst < 1e-8, f"oracle and closed-form solutions differ by {worst}")
    return f"sparse-solve and FIF Dirichlet solutions agree to {worst:.2e} at level {m}"


_SUITES = [
    ("address-counts", _check_counts),
    ("address-canonical", _check_canonical),
    ("embedding", _check_embedding),
    ("rule-vs-minimization", _check_rule_vs_minimization),
    ("harmonic-annihilation", _check_harmonic_annihilation),
    ("pair-sums", _check_pair_sums),
    ("energy-recursion", _check_energy_recursion),
    ("energy-threshold", _check_energy_threshold),
    ("midpoint-closed-form", _check_midpoint_closed_form),
    ("scaling-lemma", _check_scaling),
    ("constant-case", _check_constant_case),
    ("matrix-identities", _check_matrices),
    ("classifier", _check_classifier),
    ("dirichlet-oracle", _check_dirichlet_oracle),
]


def run_suites(
    levels: int = 5, seed: int = 2026, inject_failure: bool = False
) -> list[CheckResult]:
    """Run every suite; ``inject_failure`` perturbs one comparison on purpose."""
    results = []
    for name, fn in _SUITES:
        rng = np.random.default_rng(seed)
        perturb = inject_failure and name == "rule-vs-minimization"
        try:
            detail = fn(levels, rng, perturb)
            results.append(CheckResult(name, True, detail))
        except CheckFailure as exc:
            results.append(CheckResult(name, False, str(exc)))
    return results
