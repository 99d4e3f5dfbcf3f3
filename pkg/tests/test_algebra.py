import numpy as np
import pytest

from cpspectra import (
    AlgebraShape,
    CpMap,
    FormatError,
    algebra_map,
    canonical_extension,
    choi_of,
    compress,
    compress_superop,
    embed,
    in_algebra,
    psd_report,
    spectral_radius,
    spectral_radius_of,
    split,
    superop_of,
    unvec,
    vec,
)
from cpspectra.reference_maps import double_trace_map, golden_ratio_map
from helpers import random_cpmap, random_matrix, random_psd


class TestShape:
    def test_parse(self):
        shape = AlgebraShape.parse("2,1")
        assert shape.blocks == (2, 1) and shape.m == 3

    def test_rejects_bad_blocks(self):
        with pytest.raises(FormatError):
            AlgebraShape((0, 1))

    def test_json_round_trip(self):
        shape = AlgebraShape((1, 3, 2))
        assert AlgebraShape.from_json(shape.to_json()) == shape


class TestEmbedCompress:
    def test_embed_two_blocks(self):
        blocks = [np.array([[1, 2], [3, 4.0]]), np.array([[5.0]])]
        out = embed(blocks, AlgebraShape((2, 1)))
        expect = np.array([[1, 2, 0], [3, 4, 0], [0, 0, 5.0]])
        assert np.array_equal(out, expect)

    def test_embed_identity_blocks(self):
        shape = AlgebraShape((2, 3))
        assert np.array_equal(embed([np.eye(2), np.eye(3)], shape), np.eye(5))

    def test_single_block_is_identity_embedding(self):
        a = random_matrix(np.random.default_rng(0), 3)
        assert np.array_equal(embed([a], AlgebraShape.full(3)), a)

    def test_compress_fixed_point(self):
        shape = AlgebraShape((2, 1))
        x = embed([np.ones((2, 2)), np.ones((1, 1))], shape)
        assert np.array_equal(compress(x, shape), x)

    def test_compress_all_ones(self):
        out = compress(np.ones((2, 2)), AlgebraShape((1, 1)))
        assert np.array_equal(out, np.eye(2))

    def test_compress_idempotent(self):
        rng = np.random.default_rng(1)
        shape = AlgebraShape((2, 1))
        x = random_matrix(rng, 3)
        once = compress(x, shape)
        assert np.array_equal(compress(once, shape), once)

    def test_compress_preserves_psd(self):
        rng = np.random.default_rng(2)
        shape = AlgebraShape((2, 2))
        for _ in range(10):
            out = compress(random_psd(rng, 4), shape)
            assert psd_report(out).is_psd

    def test_compress_after_embed_round_trip(self):
        rng = np.random.default_rng(3)
        shape = AlgebraShape((1, 2))
        blocks = [random_matrix(rng, 1), random_matrix(rng, 2)]
        back = split(compress(embed(blocks, shape), shape), shape)
        for a, b in zip(blocks, back):
            assert np.array_equal(a, b)

    def test_compress_superop_action(self):
        rng = np.random.default_rng(4)
        shape = AlgebraShape((2, 1))
        c = compress_superop(shape)
        x = random_matrix(rng, 3)
        assert np.abs(unvec(c @ vec(x)) - compress(x, shape)).max() < 1e-14

    def test_in_algebra(self):
        shape = AlgebraShape((1, 1))
        assert in_algebra(np.eye(2), shape)
        assert not in_algebra(np.ones((2, 2)), shape)


class TestCanonicalExtension:
    def test_double_trace_extension_action(self):
        ext = canonical_extension(double_trace_map())
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1.0
                expect = 2.0 * (1.0 if i == j else 0.0) * np.eye(2)
                assert np.abs(ext(e) - expect).max() < 1e-12
        assert np.abs(choi_of(ext) - 2 * np.eye(4)).max() < 1e-9

    def test_identity_map_extends_to_compression(self):
        shape = AlgebraShape((2, 1))
        ident = CpMap(tuple(np.asarray(p) for p in shape.projections()), shape)
        ext = canonical_extension(ident)
        assert np.abs(superop_of(ext).matrix - compress_superop(shape)).max() < 1e-9

    def test_golden_radius_preserved(self):
        tau = golden_ratio_map()
        ext = canonical_extension(tau)
        r_ext = spectral_radius_of(ext)
        assert abs(r_ext - (1 + np.sqrt(5)) / 2) < 1e-9

    def test_extension_powers_factor_through_compression(self):
        # ext^n == iota o tau^n o compress as superoperators
        rng = np.random.default_rng(5)
        for blocks in [(2, 1), (1, 1, 1)]:
            tau = random_cpmap(rng, blocks, terms=3)
            s_given = superop_of(tau).matrix
            c = compress_superop(tau.shape)
            s_ext = s_given @ c
            for n in (2, 3):
                lhs = np.linalg.matrix_power(s_ext, n)
                rhs = np.linalg.matrix_power(s_given, n) @ c
                assert np.abs(lhs - rhs).max() < 1e-12

    def test_extension_agrees_with_functional_definition(self):
        # ext(X) == tau(compress(X)) evaluated entirely without superoperators
        rng = np.random.default_rng(7)
        for blocks in [(2, 1), (1, 1, 1), (3,)]:
            tau = random_cpmap(rng, blocks, terms=3)
            ext = canonical_extension(tau)
            for _ in range(5):
                x = random_matrix(rng, tau.m)
                assert np.abs(ext(x) - tau(compress(x, tau.shape))).max() < 1e-10

    def test_extension_radius_matches_restriction(self):
        # r(extension) equals r of the map restricted to algebra coordinates
        rng = np.random.default_rng(6)
        for blocks in [(2, 1), (1, 1, 1)]:
            tau = random_cpmap(rng, blocks, terms=4)
            phi = algebra_map(tau)
            idx = []
            for sl in tau.shape.slices():
                for i in range(sl.start, sl.stop):
                    for j in range(sl.start, sl.stop):
                        idx.append(i + j * tau.m)
            restricted = phi.superop.matrix[np.ix_(idx, idx)]
            assert abs(spectral_radius_of(phi) - spectral_radius(restricted)) < 1e-9
