import numpy as np
import pytest

from seisal.errors import DimsMismatchError
from seisal.synth import SyntheticSpec, auc, fault_plane_offset, generate, layered_trace
from seisal.volume import Volume3D


def pairwise_auc(s, m):
    pos, neg = s[m], s[~m]
    diff = pos[:, None] - neg[None, :]
    return (np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / diff.size


class TestGenerate:
    def test_layered_constant_per_time_slice(self):
        vol, mask = generate(SyntheticSpec((20, 8, 9), "layered", seed=3))
        flat = vol.data.reshape(20, -1)
        assert np.all(flat == flat[:, :1])
        assert not np.any(mask.data)

    def test_vertical_fault_shift(self):
        spec = SyntheticSpec((32, 16, 4), "layered+fault", dip=90.0, throw=3, seed=11)
        vol, mask = generate(spec)
        t = np.arange(32)
        ref = layered_trace(t, 11).astype(np.float32)
        shifted = layered_trace(t - 3, 11).astype(np.float32)
        # the plane sits at x = 8; x > 8 is the down-thrown side
        np.testing.assert_array_equal(vol.data[:, 12, 2], shifted)
        np.testing.assert_array_equal(vol.data[:, 3, 1], ref)
        np.testing.assert_array_equal(np.flatnonzero(mask.data[0, :, 0]), [7, 8, 9])

    def test_dipping_fault_mask_hugs_plane(self):
        spec = SyntheticSpec((64, 64, 8), "layered+fault", dip=60.0, throw=2)
        _, mask = generate(spec)
        off = fault_plane_offset(spec)
        assert np.all(np.abs(off[mask.data > 0]) * np.sin(np.radians(60)) <= 1.0)
        # every time sample of every inline has fault voxels
        assert np.all(mask.data.sum(axis=1) >= 1)

    def test_deterministic(self):
        spec = SyntheticSpec((24, 20, 16), "layered+fault", noise_sigma=0.1, seed=42)
        a, ma = generate(spec)
        b, mb = generate(spec)
        assert a.data.tobytes() == b.data.tobytes()
        assert ma.data.tobytes() == mb.data.tobytes()
        c, _ = generate(SyntheticSpec((24, 20, 16), "layered+fault", noise_sigma=0.1, seed=43))
        assert a.data.tobytes() != c.data.tobytes()

    def test_noise_level(self):
        clean, _ = generate(SyntheticSpec((32, 32, 32), "layered", seed=1))
        noisy, _ = generate(SyntheticSpec((32, 32, 32), "layered", noise_sigma=0.2, seed=1))
        resid = noisy.data.astype(np.float64) - clean.data
        assert resid.std() == pytest.approx(0.2, rel=0.02)

    def test_dome(self):
        spec = SyntheticSpec((48, 48, 48), "layered+dome", dome_center=(28, 24, 24), dome_radius=10)
        vol, mask = generate(spec)
        assert vol.data[28, 24, 24] == 0.0
        assert mask.data[18, 24, 24] == 1 and mask.data[28, 24, 24] == 0
        # reflectors are pulled up above the crest, flat far from it
        far = vol.data[:, 0, 0]
        assert not np.array_equal(vol.data[:17, 24, 24], far[:17])
        with pytest.raises(ValueError):
            generate(SyntheticSpec((32, 32, 32), "layered+dome", dome_center=(5, 16, 16), dome_radius=10))

    def test_chaotic_patch(self):
        spec = SyntheticSpec((32, 32, 32), "chaotic-patch", region=(8, 24, 8, 24, 8, 24), seed=2)
        vol, mask = generate(spec)
        inner = vol.data[8:24, 8:24, 8:24]
        assert inner.reshape(16, -1).var(axis=1).min() > 0.1
        assert mask.data[8, 16, 16] == 1 and mask.data[7, 16, 16] == 1 and mask.data[16, 16, 16] == 0
        with pytest.raises(ValueError):
            generate(SyntheticSpec((32, 32, 32), "chaotic-patch", region=(8, 40, 0, 4, 0, 4)))

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            SyntheticSpec(scenario="volcano")
        with pytest.raises(ValueError):
            SyntheticSpec(noise_sigma=-1)
        with pytest.raises(ValueError):
            generate(SyntheticSpec((16, 16, 16), "layered+fault", throw=20))
        with pytest.raises(ValueError):
            generate(SyntheticSpec((16, 16, 16), "layered+fault", dip=0))


class TestAuc:
    def test_perfect_and_constant(self, rng):
        m = (rng.random((8, 8, 8)) > 0.7).astype(np.float32)
        assert auc(m, m).auc == 1.0
        r = auc(np.full(m.shape, 0.3), m)
        assert r.auc == 0.5
        assert r.contrast_ratio == pytest.approx(1.0)

    def test_matches_pairwise_on_subsample(self):
        rng = np.random.default_rng(2024)
        s = rng.random((64, 64, 64))
        m = rng.random((64, 64, 64)) > 0.5
        sub_s, sub_m = s[:10, :10, :10].ravel(), m[:10, :10, :10].ravel()
        assert auc(sub_s, sub_m).auc == pytest.approx(pairwise_auc(sub_s, sub_m), abs=1e-12)
        assert abs(auc(s, m).auc - 0.5) < 0.01

    def test_full_volume_matches_pairwise(self):
        # a one-voxel plane keeps the exhaustive pair count near 1e9
        rng = np.random.default_rng(99)
        s = np.round(rng.random((64, 64, 64)), 3)  # coarse values force ties
        m = np.zeros((64, 64, 64), bool)
        m[:, 32, :] = True
        pos, neg = s[m], s[~m]
        gt = eq = 0
        for chunk in np.array_split(pos, 64):
            d = chunk[:, None] - neg[None, :]
            gt += int(np.count_nonzero(d > 0))
            eq += int(np.count_nonzero(d == 0))
        ref = (gt + 0.5 * eq) / (pos.size * neg.size)
        assert auc(s, m).auc == pytest.approx(ref, abs=1e-12)

    def test_ties_count_half(self):
        s = np.array([1.0, 1.0, 0.0, 2.0])
        m = np.array([1, 0, 0, 1])
        assert auc(s, m).auc == pytest.approx(pairwise_auc(s, m.astype(bool)))
        assert auc(s, m).auc == pytest.approx(0.875)

    def test_monotone_transform_invariance(self, rng):
        s = rng.standard_normal(500)
        m = rng.random(500) > 0.6
        a = auc(s, m).auc
        assert auc(np.exp(s), m).auc == a
        assert auc(3 * s + 1, m).auc == a

    def test_contrast(self):
        s = np.array([4.0, 4.0, 1.0, 1.0])
        r = auc(s, np.array([1, 1, 0, 0]))
        assert (r.mean_in, r.mean_out, r.contrast_ratio) == (4.0, 1.0, 4.0)
        assert set(r.as_dict()) == {"auc", "mean_in", "mean_out", "contrast_ratio"}

    def test_errors(self):
        with pytest.raises(ValueError):
            auc(np.ones(5), np.zeros(5))
        with pytest.raises(DimsMismatchError):
            auc(Volume3D(np.ones((2, 2, 2))), Volume3D(np.ones((2, 2, 3))))


def test_noise_free_fault_detected():
    from seisal.dcs import dcs_all
    from seisal.fusion import combine
    from seisal.spectral import energy_volumes

    vol, mask = generate(SyntheticSpec((64, 64, 64), "layered+fault", seed=7, dip=75, throw=3))
    rep = auc(combine(*dcs_all(energy_volumes(vol))), mask)
    assert rep.auc >= 0.9
    assert rep.contrast_ratio >= 3
