"""Pruning, quantization, sparsity stats, and the run-length codec."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dnncost as dc
from dnncost.optkit import (CodecError, compression_ratio, prune_magnitude,
                            prune_network, quantize_uniform, rle_decode,
                            rle_encode, rle_pair_count, sparse_stats)

word_lists = st.lists(st.integers(min_value=0, max_value=65535), max_size=300)


class TestSparseStats:
    def test_counts_zeros(self):
        st_ = sparse_stats([0.0, 1.0, 0.0, 2.0, 0.0])
        assert st_.elements == 5
        assert st_.zeros == 3
        assert st_.density == pytest.approx(0.4)

    def test_empty_tensor_is_fully_dense(self):
        st_ = sparse_stats(np.empty(0))
        assert st_.elements == 0
        assert st_.density == 1.0

    def test_shape_agnostic(self):
        st_ = sparse_stats(np.zeros((3, 4, 5)))
        assert st_.elements == 60
        assert st_.zeros == 60
        assert st_.density == 0.0


class TestPruneMagnitude:
    def test_worked_example(self):
        pruned, mask = prune_magnitude([0.1, -0.5, 0.3, -0.2], 0.5)
        np.testing.assert_allclose(pruned, [0.0, -0.5, 0.3, 0.0])
        np.testing.assert_array_equal(mask, [False, True, True, False])

    def test_fraction_bounds(self):
        arr = [1.0, 2.0]
        pruned, mask = prune_magnitude(arr, 0.0)
        assert mask.all()
        pruned, mask = prune_magnitude(arr, 1.0)
        assert not mask.any()
        np.testing.assert_array_equal(pruned, [0.0, 0.0])
        with pytest.raises(ValueError, match="fraction"):
            prune_magnitude(arr, 1.5)
        with pytest.raises(ValueError, match="fraction"):
            prune_magnitude(arr, -0.1)

    def test_ties_zero_earlier_indices_first(self):
        pruned, mask = prune_magnitude([1.0, 1.0, 1.0, 1.0], 0.5)
        np.testing.assert_array_equal(mask, [False, False, True, True])

    def test_preserves_shape(self):
        rng = np.random.default_rng(0)
        w = rng.standard_normal((4, 3, 2))
        pruned, mask = prune_magnitude(w, 0.25)
        assert pruned.shape == w.shape == mask.shape
        assert (~mask).sum() == int(0.25 * w.size)
        # survivors never lie below the pruned magnitudes
        assert np.abs(pruned[mask]).min() >= np.abs(w[~mask]).max()


class TestPruneNetwork:
    def test_global_competition_matches_concatenation(self):
        rng = np.random.default_rng(1)
        layers = {"a": rng.standard_normal(20), "b": rng.standard_normal(30)}
        out = prune_network(layers, 0.4)
        flat = np.concatenate([layers["a"], layers["b"]])
        _, ref_mask = prune_magnitude(flat, 0.4)
        got = np.concatenate([out["a"][1], out["b"][1]])
        np.testing.assert_array_equal(got, ref_mask)

    def test_ordered_drain_empties_expensive_layers_first(self):
        layers = {"cheap": np.arange(1.0, 5.0), "costly": np.arange(1.0, 5.0)}
        out = prune_network(layers, 0.5, order={"cheap": 1.0, "costly": 9.0})
        assert not out["costly"][1].any()  # all four pruned
        assert out["cheap"][1].all()

    def test_ordered_drain_spends_exact_budget(self):
        rng = np.random.default_rng(2)
        layers = {f"l{i}": rng.standard_normal(17) for i in range(4)}
        order = {f"l{i}": float(i) for i in range(4)}
        out = prune_network(layers, 0.6, order=order)
        zeroed = sum(int((~mask).sum()) for _, mask in out.values())
        assert zeroed == int(0.6 * 68)

    def test_order_must_cover_all_layers(self):
        with pytest.raises(ValueError, match="order lacks keys"):
            prune_network({"a": np.ones(3)}, 0.5, order={})

    def test_empty_network(self):
        assert prune_network({}, 0.5) == {}


class TestQuantizeUniform:
    def test_worked_example(self):
        out = quantize_uniform([-1.0, 0.3, 1.0], 2)
        np.testing.assert_allclose(out, [-1.0, 0.0, 1.0])

    def test_peak_maps_to_top_level(self):
        out = quantize_uniform([0.0, 0.5, 2.0], 8)
        assert out.max() == pytest.approx(2.0)

    def test_one_bit_clamps_to_sign_levels(self):
        out = quantize_uniform([-3.0, -0.4, 0.0, 0.4, 3.0], 1)
        assert set(np.round(out, 12)) <= {-3.0, 0.0, 3.0}

    def test_all_zero_stays_zero(self):
        np.testing.assert_array_equal(quantize_uniform(np.zeros(5), 4),
                                      np.zeros(5))

    def test_bits_bounds(self):
        with pytest.raises(ValueError, match="bits"):
            quantize_uniform([1.0], 0)
        with pytest.raises(ValueError, match="bits"):
            quantize_uniform([1.0], 17)

    @given(st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False,
                              allow_subnormal=False), min_size=1, max_size=64),
           st.integers(min_value=1, max_value=16))
    @settings(deadline=None, max_examples=100)
    def test_idempotent(self, values, bits):
        once = quantize_uniform(values, bits)
        twice = quantize_uniform(once, bits)
        np.testing.assert_allclose(twice, once, atol=1e-9)


class TestCodec:
    def test_byte_frozen_encoding(self):
        # (run 3, value 5) -> 00011 0000000000000101 padded to 24 bits
        assert rle_encode([0, 0, 0, 5]) == b"\x18\x00\x28"

    def test_pair_counts(self):
        assert rle_pair_count([0, 0, 0, 5]) == 1
        assert rle_pair_count([0] * 35 + [7]) == 2
        assert rle_pair_count([0] * 64) == 2
        assert rle_pair_count([1, 2]) == 2
        assert rle_pair_count([]) == 0

    def test_round_trip_worked_cases(self):
        for words in ([], [0], [5], [0, 0, 0, 5], [0] * 33, [0] * 64,
                      [65535, 0, 65535], list(range(40)), [7] + [0] * 31):
            assert rle_decode(rle_encode(words)) == list(words)

    def test_compression_ratios(self):
        assert compression_ratio([0] * 64) == pytest.approx(1024 / 42)
        assert compression_ratio([1, 2]) == pytest.approx(16 / 21)
        with pytest.raises(CodecError, match="empty"):
            compression_ratio([])

    def test_decode_rejects_truncation(self):
        with pytest.raises(CodecError, match="truncated"):
            rle_decode(b"\xff")

    def test_decode_rejects_dirty_padding(self):
        dirty = bytearray(rle_encode([0, 0, 0, 5]))
        dirty[-1] |= 0x01
        with pytest.raises(CodecError, match="padding"):
            rle_decode(bytes(dirty))

    def test_word_validation(self):
        for bad in ([65536], [-1], [1.5]):
            with pytest.raises(CodecError, match="integers"):
                rle_encode(bad)

    def test_relu_like_stream_compresses(self):
        rng = np.random.default_rng(3)
        words = [int(v) if rng.random() > 0.7 else 0
                 for v in rng.integers(1, 65536, size=4096)]
        ratio = compression_ratio(words)
        assert ratio > 1.5
        assert rle_decode(rle_encode(words)) == words

    @given(word_lists)
    @settings(deadline=None, max_examples=200)
    def test_round_trip_property(self, words):
        encoded = rle_encode(words)
        assert rle_decode(encoded) == words
        if words:
            pairs = rle_pair_count(words)
            assert len(encoded) == (21 * pairs + 7) // 8
            assert pairs <= len(words)  # never more pairs than words


class TestPackageSurface:
    def test_reexports(self):
        assert dc.rle_encode is rle_encode
        assert dc.SparseStats is type(sparse_stats([1.0]))
        assert dc.CodecError is CodecError
