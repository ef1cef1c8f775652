import numpy as np
import pytest

from sgfif import address as A
from sgfif.address import Address
from sgfif.fif import FifSpec, eval_at, evaluate_on_level
from sgfif.harmonic import HarmonicFunction, harmonic_on_level
from sgfif.laplacian import (
    LaplacianUndefinedError,
    cell_operators,
    classify,
    detect_divergence,
    existence_system_matrices,
    graph_laplacian,
    graph_laplacian_on_level,
    harmonic_midpoint_matrix,
    laplacian_at,
    laplacian_scaling,
    midpoint_laplacian_closed_form,
    pair_sum_fif,
    renormalized_laplacian,
    renormalized_sequence,
    solve_dirichlet,
)
from sgfif.vertexfn import VertexFunction

RNG = np.random.default_rng(31)

UNIFORM = FifSpec((0, 0, 0), (1, 1, 1), 0.2)
PAIRS = ((1, 2), (1, 3), (2, 3))


def random_uniform_spec(rng, d_range=(-0.55, 0.55)):
    d = float(rng.uniform(*d_range))
    return FifSpec(tuple(rng.uniform(-1, 1, 3)), tuple(rng.uniform(-1, 1, 3)), d)


def harmonic_compatible(b, d):
    rule = harmonic_on_level(HarmonicFunction(b), 1)
    return FifSpec(b, (rule["2.3"], rule["1.3"], rule["1.2"]), d)


class TestGraphLaplacian:
    def test_uniform_midpoint(self):
        u = evaluate_on_level(UNIFORM, 1)
        assert graph_laplacian(u, "1.2") == pytest.approx(-2.0, abs=1e-14)

    def test_constant_vanishes(self):
        u = VertexFunction(2, np.full(len(A.vertices_at_level(2)), 3.3))
        assert graph_laplacian(u, "1.2") == 0.0

    def test_harmonic_vanishes(self):
        h = HarmonicFunction(tuple(RNG.uniform(-2, 2, 3)))
        for m in range(1, 7):
            lap = graph_laplacian_on_level(harmonic_on_level(h, m))
            assert np.nanmax(np.abs(lap)) < 1e-12

    def test_boundary_rejected(self):
        u = evaluate_on_level(UNIFORM, 2)
        with pytest.raises(ValueError, match="boundary"):
            graph_laplacian(u, ".1")

    def test_vertex_not_in_level_rejected(self):
        u = evaluate_on_level(UNIFORM, 2)
        with pytest.raises(ValueError):
            graph_laplacian(u, "121.3")

    def test_whole_level_matches_pointwise(self):
        spec = random_uniform_spec(RNG)
        u = evaluate_on_level(spec, 3)
        lap = graph_laplacian_on_level(u)
        for v in A.vertices_at_level(3):
            i = A.vertex_index(3)[v]
            if v.is_boundary:
                assert np.isnan(lap[i])
            else:
                assert lap[i] == pytest.approx(graph_laplacian(u, v), rel=1e-13, abs=1e-13)


class TestRenormalized:
    def test_uniform_is_minus_fifteen(self):
        for m in range(1, 9):
            u = evaluate_on_level(UNIFORM, m)
            assert renormalized_laplacian(u, "1.2") == pytest.approx(-15.0, abs=1e-9)

    def test_harmonic_is_zero(self):
        spec = harmonic_compatible((1.0, -0.3, 0.6), 0.2)
        for val in renormalized_sequence(spec, "1.2", 6):
            assert abs(val) < 1e-10

    def test_broken_constant_case_diverges(self):
        # d = 1/5 but the midpoint identity fails: the sequence grows like 3^m
        spec = FifSpec((0, 0, 0), (1, 2, 3), 0.2)
        seq = renormalized_sequence(spec, "1.2", 7)
        assert detect_divergence(seq)
        tail = [abs(b / a) for a, b in zip(seq[-3:], seq[-2:])]
        assert all(2.5 < r < 3.5 for r in tail)

    def test_level_argument_checked(self):
        u = evaluate_on_level(UNIFORM, 3)
        with pytest.raises(ValueError):
            renormalized_laplacian(u, "1.2", m=2)


def test_detect_divergence():
    assert detect_divergence([1, 3, 9, 27, 81])
    assert not detect_divergence([5, 5, 5, 5, 5])
    assert not detect_divergence([1, 3, 1, 3, 1, 3])


class TestCellOperators:
    def test_uniform_values(self):
        ops = cell_operators(UNIFORM)
        assert ops.delta1[0, 0] == pytest.approx(2.0, abs=1e-14)
        assert ops.delta0[2] == pytest.approx(0.0, abs=1e-14)
        assert ops.alpha[(1, 2)] == pytest.approx(4.0, abs=1e-14)

    def test_constant_all_zero(self):
        ops = cell_operators(FifSpec((5, 5, 5), (5, 5, 5), 0.1))
        assert np.allclose(ops.delta0, 0) and np.allclose(ops.delta1, 0)
        assert all(v == 0 for v in ops.alpha.values())

    def test_harmonic_data_kills_alpha(self):
        spec = harmonic_compatible((1.0, 0.0, 0.0), 0.3)
        ops = cell_operators(spec)
        for pair in PAIRS:
            assert abs(ops.alpha[pair]) < 1e-14

    def test_operator_and_affine_forms_agree(self):
        for _ in range(25):
            spec = random_uniform_spec(RNG)
            ops = cell_operators(spec)
            for pair in PAIRS:
                assert ops.alpha[pair] == pytest.approx(
                    ops.alpha_affine[pair], rel=1e-13, abs=1e-13
                )

    def test_delta0_sums_to_zero(self):
        spec = random_uniform_spec(RNG)
        assert cell_operators(spec).delta0.sum() == pytest.approx(0.0, abs=1e-13)

    def test_accepts_level1_function(self):
        u = evaluate_on_level(UNIFORM, 1)
        ops = cell_operators(u)
        assert ops.alpha[(1, 2)] == pytest.approx(4.0, abs=1e-14)


class TestPairSumFif:
    def test_uniform_m1(self):
        assert pair_sum_fif(UNIFORM, 1, 1) == pytest.approx(2.0, rel=1e-14)

    def test_m0_reduces_to_data(self):
        spec = random_uniform_spec(RNG)
        for i in (1, 2, 3):
            j, k = (t for t in (1, 2, 3) if t != i)
            want = spec.boundary[j - 1] + spec.boundary[k - 1]
            assert pair_sum_fif(spec, i, 0) == pytest.approx(want, rel=1e-13, abs=1e-13)

    def test_specific_random_case(self):
        spec = FifSpec(tuple(RNG.uniform(-1, 1, 3)), tuple(RNG.uniform(-1, 1, 3)), 0.3)
        direct = eval_at(spec, Address("2222", 1)) + eval_at(spec, Address("2222", 3))
        assert pair_sum_fif(spec, 2, 4) == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_property_against_direct(self):
        for _ in range(25):
            spec = random_uniform_spec(RNG)
            for i in (1, 2, 3):
                j, k = (t for t in (1, 2, 3) if t != i)
                for m in range(7):
                    direct = eval_at(spec, Address(str(i) * m, j)) + eval_at(
                        spec, Address(str(i) * m, k)
                    )
                    got = pair_sum_fif(spec, i, m)
                    assert got == pytest.approx(direct, rel=1e-11, abs=1e-11)

    def test_rejects_three_fifths_and_nonuniform(self):
        with pytest.raises(ValueError):
            pair_sum_fif(FifSpec((0, 0, 0), (1, 1, 1), 0.6), 1, 2)
        with pytest.raises(ValueError):
            pair_sum_fif(FifSpec((0, 0, 0), (1, 1, 1), (0.1, 0.2, 0.3)), 1, 2)


class TestMidpointClosedForm:
    def test_uniform_geometric_decay(self):
        for m in range(7):
            got = midpoint_laplacian_closed_form(UNIFORM, (1, 2), m)
            assert got == pytest.approx(-2.0 * 0.2**m, rel=1e-12)

    def test_harmonic_compatible_vanishes(self):
        spec = harmonic_compatible((0.2, -1.4, 0.9), -0.25)
        for pair in PAIRS:
            for m in range(5):
                assert abs(midpoint_laplacian_closed_form(spec, pair, m)) < 1e-12

    def test_specific_random_case(self):
        spec = FifSpec(tuple(RNG.uniform(-1, 1, 3)), tuple(RNG.uniform(-1, 1, 3)), -0.2)
        u = evaluate_on_level(spec, 4)
        direct = graph_laplacian(u, Address("2", 3))
        assert midpoint_laplacian_closed_form(spec, (2, 3), 3) == pytest.approx(
            direct, rel=1e-12, abs=1e-12
        )

    def test_property_against_direct(self):
        for _ in range(20):
            spec = random_uniform_spec(RNG)
            for m in range(6):
                u = evaluate_on_level(spec, m + 1)
                for i, j in PAIRS:
                    direct = graph_laplacian(u, Address(str(i), j))
                    got = midpoint_laplacian_closed_form(spec, (i, j), m)
                    assert got == pytest.approx(direct, rel=1e-11, abs=1e-11)

    def test_rejects_three_fifths(self):
        with pytest.raises(ValueError):
            midpoint_laplacian_closed_form(FifSpec((0, 0, 0), (1, 1, 1), 0.6), (1, 2), 1)


class TestScaling:
    def test_empty_word_is_identity(self):
        spec = random_uniform_spec(RNG)
        u = evaluate_on_level(spec, 3)
        direct = graph_laplacian(u, Address("1", 2))
        assert laplacian_scaling(spec, "", (1, 2), 2) == pytest.approx(direct, rel=1e-13)

    def test_uniform_one_letter(self):
        # scaled shallow value against the directly computed level-4 Laplacian
        u4 = evaluate_on_level(UNIFORM, 4)
        direct = graph_laplacian(u4, Address("21", 3))
        got = laplacian_scaling(UNIFORM, "2", (1, 3), 2)
        assert got == pytest.approx(direct, rel=1e-11, abs=1e-12)
        u3 = evaluate_on_level(UNIFORM, 3)
        assert got == pytest.approx(0.2 * graph_laplacian(u3, Address("1", 3)), rel=1e-12)

    def test_two_letter_word(self):
        spec = random_uniform_spec(RNG)
        u = evaluate_on_level(spec, 4)
        direct = graph_laplacian(u, Address("312", 3))
        assert laplacian_scaling(spec, "31", (2, 3), 1) == pytest.approx(
            direct, rel=1e-10, abs=1e-12
        )

    def test_property_against_direct(self):
        for _ in range(5):
            spec = random_uniform_spec(RNG)
            for word in ("", "1", "23", "132"):
                for m in range(3):
                    deep = len(word) + m + 1
                    u = evaluate_on_level(spec, deep)
                    for i, j in ((1, 2), (2, 3)):
                        direct = graph_laplacian(u, Address(word + str(i), j))
                        got = laplacian_scaling(spec, word, (i, j), m)
                        assert got == pytest.approx(direct, rel=1e-10, abs=1e-11)

    def test_depth_cap(self, monkeypatch):
        monkeypatch.setenv(A.DEPTH_CAP_ENV, "4")
        with pytest.raises(A.DepthCapError):
            laplacian_scaling(UNIFORM, "1111", (1, 2), 1)


class TestMatrices:
    def test_explicit_entries(self):
        a1, b1, a2, b2 = existence_system_matrices()
        assert np.array_equal(a1, [[1, 1, 2], [1, 2, 1], [2, 1, 1]])
        assert np.allclose(b1, np.array([[7, 7, 6], [7, 6, 7], [6, 7, 7]]) / 5, atol=1e-15)
        assert np.array_equal(a2, [[1, 1, -4], [1, -4, 1], [-4, 1, 1]])
        assert np.array_equal(b2, [[-1, -1, 0], [-1, 0, -1], [0, -1, -1]])

    def test_inverse_identities(self):
        a1, b1, a2, b2 = existence_system_matrices()
        want = harmonic_midpoint_matrix()
        assert np.allclose(want, np.full((3, 3), 0.4) - 0.2 * np.eye(3), atol=1e-15)
        assert np.max(np.abs(np.linalg.solve(a1, b1) - want)) < 1e-14
        assert np.max(np.abs(np.linalg.solve(a2, b2) - want)) < 1e-14

    def test_determinant_factorization(self):
        a1, _, a2, _ = existence_system_matrices()
        for lam in np.linspace(-4.5, 4.5, 10):
            det = np.linalg.det(lam * a1 + a2)
            want = -2 * (lam - 5) ** 2 * (2 * lam - 1)
            assert det == pytest.approx(want, rel=1e-10, abs=1e-10)


class TestClassify:
    def test_uniform_basic_is_constant(self):
        result = classify(UNIFORM)
        assert result.case == "constant"
        assert result.constant_value == pytest.approx(-15.0, rel=1e-12)

    def test_harmonic_any_d(self):
        for d in (0.0, 0.2, 0.45, -0.7):
            spec = harmonic_compatible((1.0, 0.0, 0.0), d)
            result = classify(spec)
            assert result.case == "harmonic"

    def test_nonexistent(self):
        assert classify(FifSpec((0, 0, 0), (1, 2, 3), 0.2)).case == "nonexistent"

    def test_nonuniform_rejected(self):
        with pytest.raises(ValueError, match="uniform"):
            classify(FifSpec((0, 0, 0), (1, 1, 1), (0.1, 0.2, 0.3)))

    def test_half_gets_diagnostic_note(self):
        result = classify(FifSpec((0, 0, 0), (1, 1, 1), 0.5))
        assert result.case == "nonexistent"
        assert "1/2" in result.diagnostics["note"]

    def test_constant_equals_alpha_scaling(self):
        for _ in range(20):
            a = tuple(RNG.uniform(-2, 2, 3))
            spec = solve_dirichlet(a, float(RNG.uniform(-10, 10)))
            result = classify(spec)
            assert result.case == "constant"
            assert result.constant_value == pytest.approx(
                -3.75 * result.diagnostics["alpha"]["12"], rel=1e-11, abs=1e-11
            )
            alphas = list(result.diagnostics["alpha"].values())
            assert max(alphas) - min(alphas) < 1e-12

    def test_tolerance_boundary(self):
        base = solve_dirichlet((0.4, -0.2, 0.9), 3.0)
        y = np.array(base.midpoints)
        y[0] += 1e-9
        assert classify(FifSpec(base.boundary, tuple(y), 0.2)).case == "nonexistent"
        wiggled_d = FifSpec(base.boundary, base.midpoints, 0.2 + 1e-9)
        assert classify(wiggled_d).case == "nonexistent"


class TestLaplacianAt:
    def test_constant_case_everywhere(self):
        spec = solve_dirichlet((1, 2, 3), 6.0)
        assert laplacian_at(spec, "12312.1") == pytest.approx(6.0, rel=1e-12)
        assert laplacian_at(spec, "1.2") == pytest.approx(6.0, rel=1e-12)

    def test_harmonic_case_zero(self):
        spec = harmonic_compatible((1.0, 0.0, -1.0), 0.3)
        assert laplacian_at(spec, "312.1") == 0.0

    def test_nonexistent_raises(self):
        with pytest.raises(LaplacianUndefinedError):
            laplacian_at(FifSpec((0, 0, 0), (1, 2, 3), 0.2), "1.2")

    def test_boundary_rejected(self):
        with pytest.raises(ValueError, match="boundary"):
            laplacian_at(UNIFORM, ".1")

    def test_limit_matches_constant_at_random_vertices(self):
        spec = solve_dirichlet((0.3, -1.0, 0.5), -4.0)
        m = 8
        u = evaluate_on_level(spec, m)
        interior = [v for v in A.vertices_at_level(m) if not v.is_boundary]
        picks = RNG.choice(len(interior), size=20, replace=False)
        for idx in picks:
            v = interior[idx]
            got = renormalized_laplacian(u, v)
            assert got == pytest.approx(laplacian_at(spec, v), abs=1e-8)


class TestSolveDirichlet:
    def test_zero_data(self):
        spec = solve_dirichlet((0, 0, 0), 0.0)
        assert spec.midpoints == (0.0, 0.0, 0.0)
        assert np.all(evaluate_on_level(spec, 4).values == 0.0)

    def test_eta_scales_the_basic_fif(self):
        alpha = 7.5
        spec = solve_dirichlet((0, 0, 0), alpha)
        base = evaluate_on_level(UNIFORM, 4).values
        got = evaluate_on_level(spec, 4).values
        assert np.max(np.abs(got - (-alpha / 15.0) * base)) < 1e-12

    def test_classifies_with_requested_eta(self):
        a = (1.0, 2.0, 3.0)
        spec = solve_dirichlet(a, 6.0)
        for k, (i, j) in zip((1, 2, 3), ((2, 3), (1, 3), (1, 2))):
            want = (2 * a[i - 1] + 2 * a[j - 1] + a[k - 1] - 2.0) / 5.0
            assert spec.midpoints[k - 1] == pytest.approx(want, rel=1e-14)
        result = classify(spec)
        assert result.case == "constant"
        assert result.constant_value == pytest.approx(6.0, rel=1e-13)

    def test_discrete_equation_all_levels(self):
        spec = solve_dirichlet((0.2, 1.4, -0.7), 9.0)
        for m in range(1, 7):
            u = evaluate_on_level(spec, m)
            lap = graph_laplacian_on_level(u)
            vals = 1.5 * 5.0**m * lap[~np.isnan(lap)]
            assert np.max(np.abs(vals - 9.0)) < 1e-8
