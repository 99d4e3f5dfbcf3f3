import numpy as np
import pytest

from cpspectra import (
    AlgebraShape,
    BudgetExceededError,
    ConvergenceError,
    CpMap,
    PreconditionError,
    algebra_map,
    balance_similarity,
    canonical_extension,
    conjugate_map,
    friedland_value,
    jsr_brute,
    jsr_tensor_approx,
    kron,
    neumann_witness,
    norm_achieving_check,
    op_norm,
    outer_radius,
    outer_radius_gelfand,
    perron_vector,
    positive_map_norm,
    psd_sqrt,
    scaled_outer_radius,
    spectral_radius,
    spectral_radius_of,
    singular_psd_combination,
)
from cpspectra.reference_maps import (
    double_trace_map,
    golden_ratio_map,
    path_adjacency_map,
    trace_corner_map,
)
from helpers import (
    random_cpmap,
    random_matrix,
    random_normal_matrix,
    random_strictly_positive,
)

GOLD = (1 + np.sqrt(5)) / 2


class TestSpectralRadius:
    def test_reference_values(self):
        assert abs(spectral_radius_of(algebra_map(trace_corner_map())) - 1.0) < 1e-12
        assert abs(spectral_radius_of(algebra_map(path_adjacency_map())) - np.sqrt(2)) < 1e-12
        assert abs(spectral_radius_of(algebra_map(golden_ratio_map())) - GOLD) < 1e-12

    def test_positive_map_norm(self):
        assert positive_map_norm(trace_corner_map()) == pytest.approx(2.0)


class TestOuterRadius:
    def test_singleton_equals_spectral_radius(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            a = random_matrix(rng, 3)
            assert abs(outer_radius([a]) - spectral_radius(a)) < 1e-10

    def test_repeated_identity(self):
        for d in (1, 2, 5):
            assert abs(outer_radius([np.eye(2)] * d) - np.sqrt(d)) < 1e-12

    def test_adjoint_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            mats = [random_matrix(rng, 2) for _ in range(3)]
            adj = [a.conj().T for a in mats]
            assert abs(outer_radius(mats) - outer_radius(adj)) < 1e-9


class TestGelfand:
    def test_single_identity_kraus(self):
        for n in (1, 7, 64):
            assert abs(outer_radius_gelfand([np.eye(2)], n) - 1.0) < 1e-12

    def test_double_trace_pair_converges(self):
        mats = list(double_trace_map().kraus)
        target = outer_radius(mats)
        assert target == pytest.approx(2.0, abs=1e-12)
        assert abs(outer_radius_gelfand(mats, 64) - target) < 1e-3

    def test_gap_shrinks_along_doublings(self):
        # ||tau^(2n)(1)|| <= ||tau^n||^2 makes the gap monotone along n -> 2n
        rng = np.random.default_rng(2)
        for _ in range(20):
            mats = [random_matrix(rng, 2) for _ in range(2)]
            target = outer_radius(mats)
            if target < 1e-8:
                continue
            gaps = [outer_radius_gelfand(mats, n) - target for n in (4, 8, 16, 32)]
            for a, b in zip(gaps, gaps[1:]):
                assert b <= a + 1e-9

    def test_large_n_does_not_overflow(self):
        mats = [5.0 * np.eye(2), 5.0 * np.ones((2, 2))]
        value = outer_radius_gelfand(mats, 64)
        assert np.isfinite(value)

    def test_matches_word_sum_oracle(self):
        # ||tau^n(1)|| is the norm of the sum of W*W over all length-n words W
        import itertools

        rng = np.random.default_rng(16)
        mats = [random_matrix(rng, 2) for _ in range(2)]
        for n in (1, 2, 3):
            total = np.zeros((2, 2), dtype=complex)
            for word in itertools.product(mats, repeat=n):
                prod = np.eye(2, dtype=complex)
                for a in word:
                    prod = prod @ a
                total += prod.conj().T @ prod
            expect = op_norm(total) ** (1.0 / (2.0 * n))
            assert outer_radius_gelfand(mats, n) == pytest.approx(expect, rel=1e-12)


class TestJsrBrute:
    def test_singleton_normal(self):
        rng = np.random.default_rng(3)
        a = random_normal_matrix(rng, 2, radius=1.3)
        est = jsr_brute([a], 20)
        assert abs(est.lower - 1.3) < 1e-3 and abs(est.upper - 1.3) < 1e-3

    def test_golden_pair_lower_bound(self):
        a = np.array([[1, 1], [0, 1.0]])
        b = np.array([[1, 0], [1, 1.0]])
        est = jsr_brute([a, b], 2)
        assert est.lower >= GOLD - 1e-9

    def test_zero_tuple(self):
        est = jsr_brute([np.zeros((2, 2))], 4)
        assert est.lower == 0.0 and est.upper == 0.0

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            jsr_brute([np.eye(2)] * 2, 30, budget=10**4)


class TestJsrTensor:
    def test_k1_reduces_to_plain_sandwich(self):
        rng = np.random.default_rng(4)
        mats = [random_matrix(rng, 2) for _ in range(2)]
        est = jsr_tensor_approx(mats, 1)
        rho = outer_radius(mats)
        assert est.upper == pytest.approx(rho, abs=1e-12)
        assert est.lower == pytest.approx(rho / np.sqrt(2), abs=1e-12)

    def test_singleton_collapses(self):
        rng = np.random.default_rng(5)
        a = random_matrix(rng, 2)
        for k in (1, 2, 3):
            est = jsr_tensor_approx([a], k)
            assert est.lower == pytest.approx(est.upper)
            assert est.upper == pytest.approx(spectral_radius(a), rel=1e-8, abs=1e-10)

    def test_tensor_power_exactness(self):
        rng = np.random.default_rng(6)
        a = random_matrix(rng, 2)
        base = outer_radius([a])
        for k in (2, 3):
            powered = a
            for _ in range(k - 1):
                powered = kron(powered, a)
            assert outer_radius([powered]) == pytest.approx(base**k, rel=1e-8)

    def test_nested_intervals_intersect_brute(self):
        a = np.array([[1, 1], [0, 1.0]])
        b = np.array([[1, 0], [1, 1.0]])
        brute = jsr_brute([a, b], 12)
        mid = (brute.lower + brute.upper) / 2
        for k in (1, 2, 3):
            est = jsr_tensor_approx([a, b], k)
            assert est.lower - 1e-9 <= mid <= est.upper + 1e-9

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            jsr_tensor_approx([np.eye(4)], 4, max_side=4096)


class TestScaledOuterRadius:
    def test_identity_scaling(self):
        rng = np.random.default_rng(7)
        mats = [random_matrix(rng, 2) for _ in range(2)]
        expect = np.sqrt(op_norm(sum(a.conj().T @ a for a in mats)))
        assert scaled_outer_radius(mats, np.eye(2)) == pytest.approx(expect)

    def test_conjugation_identity(self):
        rng = np.random.default_rng(8)
        mats = [random_matrix(rng, 2) for _ in range(2)]
        v = random_strictly_positive(rng, 2)
        vi = np.linalg.inv(v)
        moved = [v @ a @ vi for a in mats]
        assert scaled_outer_radius(mats, v) == pytest.approx(
            scaled_outer_radius(moved, np.eye(2)), rel=1e-10
        )

    def test_always_above_outer_radius(self):
        rng = np.random.default_rng(9)
        mats = [random_matrix(rng, 2) for _ in range(2)]
        rho = outer_radius(mats)
        for _ in range(20):
            v = random_strictly_positive(rng, 2)
            assert scaled_outer_radius(mats, v) >= rho - 1e-9

    def test_perron_scaling_attains_infimum(self):
        tau = canonical_extension(golden_ratio_map())
        ell = perron_vector(algebra_map(tau))
        value = scaled_outer_radius(list(tau.kraus), psd_sqrt(ell))
        assert abs(value - outer_radius(list(tau.kraus))) < 1e-6

    def test_rejects_indefinite_scaling(self):
        with pytest.raises(PreconditionError):
            scaled_outer_radius([np.eye(2)], np.diag([1.0, -1.0]))


class TestFriedland:
    def test_at_identity_matches_norm(self):
        tau = golden_ratio_map()
        phi = algebra_map(tau)
        assert friedland_value(phi, np.eye(3)) == pytest.approx(positive_map_norm(phi))

    def test_at_perron_vector_attains_radius(self):
        tau = golden_ratio_map()
        phi = algebra_map(tau)
        ell = perron_vector(phi)
        assert abs(friedland_value(phi, ell) - GOLD) < 1e-9

    def test_lower_bound_on_random_scalings(self):
        rng = np.random.default_rng(10)
        phi = algebra_map(path_adjacency_map())
        for _ in range(100):
            w = np.diag(rng.uniform(0.2, 2.0, size=3)).astype(complex)
            assert friedland_value(phi, w) >= np.sqrt(2) - 1e-9

    def test_random_maps_lower_bound(self):
        from cpspectra import compress

        rng = np.random.default_rng(11)
        for blocks in [(2,), (2, 1)]:
            tau = random_cpmap(rng, blocks, terms=4)
            phi = algebra_map(tau)
            r = spectral_radius_of(phi)
            for _ in range(100):
                w = compress(random_strictly_positive(rng, phi.m), phi.shape)
                assert friedland_value(phi, w) >= r - 1e-9


class TestNeumannWitness:
    def test_zero_map(self):
        zero = CpMap((np.zeros((2, 2), dtype=complex),), AlgebraShape.full(2))
        w = neumann_witness(algebra_map(zero), 1.0)
        assert np.abs(w - np.eye(2)).max() < 1e-12

    def test_trace_corner_explicit_witness(self):
        phi = algebra_map(trace_corner_map())
        w = neumann_witness(phi, 2.0)
        assert np.abs(w - np.diag([3.0, 1.0])).max() < 1e-10
        assert np.linalg.norm(phi(w) - 2.0 * (w - np.eye(2))) < 1e-10

    def test_rejects_s_below_radius(self):
        phi = algebra_map(trace_corner_map())
        with pytest.raises(PreconditionError):
            neumann_witness(phi, 0.5)

    def test_near_singular_solve_reported(self):
        phi = algebra_map(trace_corner_map())
        with pytest.raises((PreconditionError, ConvergenceError)):
            neumann_witness(phi, 1.0 + 1e-12)


class TestConjugateMap:
    def test_identity_scaling_is_noop(self):
        phi = algebra_map(golden_ratio_map())
        sigma = conjugate_map(phi, np.eye(3))
        assert np.abs(sigma.superop.matrix - phi.superop.matrix).max() < 1e-12

    def test_golden_example_form(self):
        phi = algebra_map(golden_ratio_map())
        ell = perron_vector(phi)
        sigma = conjugate_map(phi, psd_sqrt(ell))
        x = np.diag([1.0, 1.0, 0.0]) + 0j
        x[0, 1] = 0.7  # b entry, killed by the map
        out = sigma(x)
        expect = np.diag([1.0, 1.0, GOLD * 1.0])  # a=d=1, e=0: diag(a+(r-1)e, ., r d)
        assert np.abs(out - expect).max() < 1e-9
        assert abs(positive_map_norm(sigma) - GOLD) < 1e-9

    def test_radius_invariance(self):
        rng = np.random.default_rng(12)
        tau = random_cpmap(rng, (2, 1), terms=4)
        phi = algebra_map(tau)
        r = spectral_radius_of(phi)
        for _ in range(5):
            blocks = [random_strictly_positive(rng, 2), random_strictly_positive(rng, 1)]
            v = np.zeros((3, 3), dtype=complex)
            v[:2, :2], v[2:, 2:] = blocks[0], blocks[1]
            assert abs(spectral_radius_of(conjugate_map(phi, v)) - r) < 1e-9


class TestNormAchieving:
    def test_golden_perron_scaling(self):
        phi = algebra_map(golden_ratio_map())
        ell = perron_vector(phi)
        result = norm_achieving_check(phi, ell)
        assert abs(result.norm - GOLD) < 1e-8

    def test_trace_corner_has_no_achieving_scaling(self):
        # tau(w) <= r w has no strictly positive solution here
        phi = algebra_map(trace_corner_map())
        for w in (np.eye(2), np.diag([3.0, 1.0]), np.diag([10.0, 0.5])):
            with pytest.raises(PreconditionError) as err:
                norm_achieving_check(phi, w.astype(complex))
            assert "violating eigenvalue" in str(err.value)


class TestBalanceSimilarity:
    def test_normal_matrix(self):
        rng = np.random.default_rng(13)
        a = random_normal_matrix(rng, 3, radius=1.7)
        result = balance_similarity(a)
        assert result.norm <= 1.7 * (1 + 1e-6)

    def test_interior_jordan_block_scaled(self):
        a = np.array([[1.0, 0, 0], [0, 0.5, 100.0], [0, 0, 0.5]])
        result = balance_similarity(a)
        assert result.norm <= 1.0 + 1e-6
        p_inv = np.linalg.inv(result.p)
        assert op_norm(result.p @ a @ p_inv) == pytest.approx(result.norm)

    def test_peripheral_jordan_rejected(self):
        with pytest.raises(PreconditionError):
            balance_similarity(np.array([[1.0, 1.0], [0, 1.0]]))

    def test_scaled_peripheral_jordan_rejected(self):
        # normalized powers of [[0.5, 100], [0, 0.5]] grow linearly
        with pytest.raises(PreconditionError):
            balance_similarity(np.array([[0.5, 100.0], [0, 0.5]]))

    def test_rejects_nilpotent(self):
        with pytest.raises(PreconditionError):
            balance_similarity(np.array([[0.0, 1.0], [0, 0.0]]))


class TestSingularPsdCombination:
    def test_singular_input_returned(self):
        w1 = np.diag([1.0, 0.0])
        out = singular_psd_combination(w1, np.eye(2))
        assert np.abs(out - w1).max() == 0

    def test_hand_example(self):
        out = singular_psd_combination(np.eye(2), np.diag([1.0, 2.0]))
        assert np.abs(out - np.diag([0.5, 0.0])).max() < 1e-12

    def test_random_pairs(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            w1 = random_strictly_positive(rng, 3)
            w2 = random_strictly_positive(rng, 3)
            out = singular_psd_combination(w1, w2)
            eigs = np.linalg.eigvalsh(out)
            assert eigs.min() > -1e-9
            assert eigs.min() < 1e-9
            assert np.linalg.norm(out) > 1e-9

    def test_rejects_proportional(self):
        with pytest.raises(PreconditionError):
            singular_psd_combination(np.eye(2), 2.0 * np.eye(2))

    def test_rejects_indefinite(self):
        with pytest.raises(PreconditionError):
            singular_psd_combination(np.diag([1.0, -1.0]), np.eye(2))


class TestSandwichProperty:
    def test_brute_vs_outer_radius(self):
        rng = np.random.default_rng(15)
        for d, m in [(2, 2), (3, 2), (2, 3)]:
            for _ in range(4):
                mats = [random_matrix(rng, m) for _ in range(d)]
                rho_hat = outer_radius(mats)
                est = jsr_brute(mats, 10)
                assert rho_hat / np.sqrt(d) <= est.upper + 1e-6
                assert est.lower <= rho_hat + 1e-6
