import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wavestego.blockengine import (
    BlockIndex,
    block_stats,
    enhance_block,
    enhance_residual_blocks,
    merge_blocks,
    partition_blocks,
    rank_homogeneous,
    select_blocks,
)

values = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestPartition:
    def test_16x16_raster_order(self):
        x = np.arange(256.0).reshape(16, 16)
        blocks = partition_blocks(x)
        assert blocks.shape == (4, 8, 8)
        assert blocks[1][0, 0] == 8 and blocks[2][0, 0] == 128 and blocks[3][0, 0] == 136

    def test_128_plane(self):
        assert partition_blocks(np.zeros((128, 128))).shape == (256, 8, 8)

    def test_reassembly(self, rng):
        x = rng.normal(size=(24, 40))
        assert np.array_equal(merge_blocks(partition_blocks(x), x.shape), x)

    def test_indivisible(self):
        with pytest.raises(ValueError):
            partition_blocks(np.zeros((10, 16)))


class TestStats:
    def test_population_variance(self, rng):
        x = rng.normal(size=(8, 16))
        s = block_stats(x, "HH", "G")
        assert [st.index for st in s] == [BlockIndex("HH", "G", 0, 0), BlockIndex("HH", "G", 0, 1)]
        for stat, block in zip(s, (x[:, :8], x[:, 8:])):
            vals = block.ravel().tolist()
            mu = sum(vals) / 64
            assert stat.mean == pytest.approx(mu, abs=1e-12)
            assert stat.variance == pytest.approx(sum((v - mu) ** 2 for v in vals) / 64, rel=1e-12)
            assert stat.variance >= 0

    def test_token(self):
        assert BlockIndex("LL", "R", 3, 5).token() == "LL,3,5"


class TestRanking:
    def test_constant_plane_keeps_raster_order(self):
        ranked = rank_homogeneous(block_stats(np.full((32, 32), 4.0)))
        assert [(s.index.row, s.index.col) for s in ranked] == [(r, c) for r in range(4) for c in range(4)]

    def test_noisy_block_last(self, rng):
        x = np.full((32, 32), 10.0)
        x[8:16, 16:24] += rng.normal(size=(8, 8))
        ranked = rank_homogeneous(block_stats(x))
        assert (ranked[-1].index.row, ranked[-1].index.col) == (1, 2)

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, (32, 24), elements=st.sampled_from([0.0, 1.0, 2.0, 5.0])))
    def test_stable_ascending_permutation(self, x):
        stats = block_stats(x)
        ranked = rank_homogeneous(stats)
        assert sorted(ranked, key=lambda s: (s.index.row, s.index.col)) == stats
        for a, b in zip(ranked, ranked[1:]):
            assert a.variance <= b.variance
            if a.variance == b.variance:
                assert (a.index.row, a.index.col) < (b.index.row, b.index.col)
        assert rank_homogeneous(list(reversed(stats))) == ranked


class TestEnhancement:
    def test_constant_block_unchanged(self):
        b = np.full((8, 8), 3.5)
        assert np.array_equal(enhance_block(b, 1.7), b)

    def test_two_point_example(self):
        out = enhance_block(np.array([0.0, 2.0]), 2.0)
        assert out.tolist() == [-1.0, 3.0]
        assert out.mean() == 1.0 and out.var() == 4 * np.array([0.0, 2.0]).var()

    def test_gain_1_2(self, rng):
        b = rng.normal(size=(8, 8))
        assert enhance_block(b, 1.2).var() / b.var() == pytest.approx(1.44, rel=1e-6)

    @pytest.mark.parametrize("gain", [1.0, 0.5, -2.0, float("nan")])
    def test_gain_must_exceed_one(self, gain):
        with pytest.raises(ValueError):
            enhance_block(np.zeros((8, 8)), gain)

    def test_many(self, rng):
        blocks = [rng.normal(size=(8, 8)) for _ in range(3)]
        out = enhance_residual_blocks(blocks, 1.5)
        assert len(out) == 3 and np.allclose(out[1], enhance_block(blocks[1], 1.5))

    @settings(max_examples=1000, deadline=None)
    @given(arrays(np.float64, (8, 8), elements=values), st.floats(1.0001, 4.0))
    def test_mean_and_variance(self, block, gain):
        out = enhance_block(block, gain)
        assert abs(out.mean() - block.mean()) <= 1e-9
        if block.var() > 1e-6:
            assert out.var() / block.var() == pytest.approx(gain * gain, rel=1e-6)


class TestSelection:
    def ranked(self, n):
        return rank_homogeneous(block_stats(np.arange(64.0 * n).reshape(8, 8 * n) % 7))

    def test_pool_is_half_the_blocks(self):
        ranked = self.ranked(16)
        chosen, extra = select_blocks(ranked, 3)
        assert chosen == [s.index for s in ranked[:3]]
        assert extra == [s.index for s in ranked[3:8]]

    def test_payload_fills_pool(self):
        chosen, extra = select_blocks(self.ranked(16), 12)
        assert len(chosen) == 12 and extra == []

    def test_explicit_count(self):
        ranked = self.ranked(16)
        assert len(select_blocks(ranked, 4, n_enhance=10)[1]) == 10
        assert len(select_blocks(ranked, 4, n_enhance=100)[1]) == 12

    def test_capacity(self):
        with pytest.raises(ValueError):
            select_blocks(self.ranked(2), 3)
