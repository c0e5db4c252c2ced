import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from seisal.errors import UnsupportedSizeError
from seisal.spectral import (
    SpectralCube,
    centered_freqs,
    energy_volumes,
    local_dft_oracle,
    local_fft,
    project_spectrum,
    projection_factor,
    projection_fields,
    spectral_energy,
)
from seisal.volume import Volume3D, tile_plan


def triple_sum_dft(cube):
    """Direct evaluation of the DFT sum at every centered frequency."""
    n = cube.shape[0]
    f = centered_freqs(n)
    s = np.arange(n)
    out = np.zeros((n, n, n), dtype=complex)
    for a, i in enumerate(f):
        for b, j in enumerate(f):
            for c, k in enumerate(f):
                phase = (i * s[:, None, None] + j * s[None, :, None] + k * s[None, None, :]) / n
                out[a, b, c] = np.sum(cube * np.exp(-2j * np.pi * phase))
    return out


class TestOracle:
    def test_impulse_flat_spectrum(self):
        cube = np.zeros((4, 4, 4))
        cube[0, 0, 0] = 1
        np.testing.assert_allclose(np.abs(local_dft_oracle(cube).bins), 1.0, atol=1e-12)

    def test_constant_dc_only(self):
        spec = local_dft_oracle(np.full((4, 4, 4), 2.5))
        assert spec.bin(0, 0, 0) == pytest.approx(64 * 2.5)
        mag = np.abs(spec.bins)
        mag[2, 2, 2] = 0
        assert mag.max() < 1e-10

    def test_matches_triple_sum(self, rng):
        cube = rng.standard_normal((4, 4, 4))
        np.testing.assert_allclose(local_dft_oracle(cube).bins, triple_sum_dft(cube), atol=1e-10, rtol=0)

    def test_size_limit(self):
        with pytest.raises(UnsupportedSizeError):
            local_dft_oracle(np.zeros((32, 32, 32)))

    def test_rejects_non_cube(self):
        with pytest.raises(ValueError):
            local_dft_oracle(np.zeros((4, 4, 2)))


class TestFastTransform:
    def test_matches_oracle(self, rng):
        for _ in range(5):
            cube = rng.standard_normal((8, 8, 8))
            fast, slow = local_fft(cube).bins, local_dft_oracle(cube).bins
            assert np.max(np.abs(fast - slow)) <= 1e-8 * np.max(np.abs(slow))

    def test_odd_size_matches_triple_sum(self, rng):
        cube = rng.standard_normal((5, 5, 5))
        np.testing.assert_allclose(local_fft(cube, allow_any_size=True).bins, triple_sum_dft(cube), atol=1e-10)

    def test_zero_cube(self):
        assert not np.any(local_fft(np.zeros((8, 8, 8))).bins)

    def test_offset_changes_only_dc(self, rng):
        cube = rng.standard_normal((8, 8, 8))
        a, b = local_fft(cube).bins, local_fft(cube + 3.0).bins
        diff = np.abs(a - b)
        assert diff[4, 4, 4] == pytest.approx(512 * 3.0)
        diff[4, 4, 4] = 0
        assert diff.max() < 1e-10

    def test_non_power_of_two_rejected(self):
        with pytest.raises(UnsupportedSizeError):
            local_fft(np.zeros((6, 6, 6)))

    @settings(max_examples=20, deadline=None)
    @given(arrays(np.float64, (4, 4, 4), elements=st.floats(-100, 100)))
    def test_hermitian_symmetry(self, cube):
        spec = local_fft(cube)
        # the -n/2 bin has no mirror inside the centered range; compare the rest
        inner = spec.bins[1:, 1:, 1:]
        mirror = np.conj(inner[::-1, ::-1, ::-1])
        scale = max(np.abs(spec.bins).max(), 1.0)
        assert np.max(np.abs(inner - mirror)) <= 1e-6 * scale


class TestProjection:
    def test_examples(self):
        assert projection_factor("t", 0, 3, 4) == 1.0
        assert projection_factor("x", 1, 2, 2) == pytest.approx(np.sqrt(5) / 3, abs=1e-15)
        for m in "txy":
            assert projection_factor(m, 0, 0, 0) == 0.0

    def test_fields_match_scalar_factor(self):
        fields = projection_fields(4)
        f = centered_freqs(4)
        for a, i in enumerate(f):
            for b, j in enumerate(f):
                for c, k in enumerate(f):
                    for m in range(3):
                        assert fields[m, a, b, c] == pytest.approx(projection_factor("txy"[m], i, j, k), abs=1e-15)

    @pytest.mark.parametrize("n", [4, 5, 8, 16])
    def test_squared_factors_sum_to_two(self, n):
        fields = projection_fields(n)
        h = n // 2
        assert np.all(fields[:, h, h, h] == 0.0)
        total = np.sum(fields ** 2, axis=0)
        total[h, h, h] = 2.0
        np.testing.assert_allclose(total, 2.0, atol=1e-12)
        assert fields.min() >= 0 and fields.max() <= 1

    def test_uncentered_fields_are_shifted(self):
        np.testing.assert_array_equal(np.fft.ifftshift(projection_fields(8), axes=(1, 2, 3)),
                                      projection_fields(8, centered=False))

    def test_single_bin_split(self):
        bins = np.zeros((16, 16, 16), dtype=complex)
        bins[8 + 0, 8 + 3, 8 + 4] = 2.0 + 1.0j
        ft, fx, fy = project_spectrum(SpectralCube(bins))
        e = abs(2 + 1j) ** 2
        assert np.sum(np.abs(ft.bins) ** 2) == pytest.approx(e)
        assert np.sum(np.abs(fx.bins) ** 2) == pytest.approx(e * 16 / 25)
        assert np.sum(np.abs(fy.bins) ** 2) == pytest.approx(e * 9 / 25)

    def test_energy_identity(self, rng):
        for _ in range(20):
            bins = rng.standard_normal((8, 8, 8)) + 1j * rng.standard_normal((8, 8, 8))
            parts = project_spectrum(SpectralCube(bins))
            lhs = sum(np.sum(np.abs(p.bins) ** 2) for p in parts)
            nodc = np.abs(bins) ** 2
            nodc[4, 4, 4] = 0
            assert lhs == pytest.approx(2 * nodc.sum(), rel=1e-9)
            assert all(p.bin(0, 0, 0) == 0 for p in parts)

    def test_zero_spectrum(self):
        for p in project_spectrum(SpectralCube(np.zeros((4, 4, 4), dtype=complex))):
            assert not np.any(p.bins)


class TestSpectralEnergy:
    def test_zero(self):
        assert spectral_energy(SpectralCube(np.zeros((4, 4, 4), dtype=complex))) == 0

    def test_constant_cube(self):
        for p in project_spectrum(local_fft(np.full((4, 4, 4), -7.0))):
            assert spectral_energy(p) == pytest.approx(0, abs=1e-12)

    def test_matches_oracle_path(self, rng):
        cube = rng.standard_normal((4, 4, 4))
        slow = triple_sum_dft(cube)
        f = centered_freqs(4)
        for m, p in zip("txy", project_spectrum(local_fft(cube))):
            ref = np.mean([
                abs(slow[a, b, c]) * projection_factor(m, i, j, k)
                for a, i in enumerate(f) for b, j in enumerate(f) for c, k in enumerate(f)
            ])
            assert spectral_energy(p) == pytest.approx(ref, rel=1e-10)


def _per_tile_reference(v, n, stride):
    """Energies through the single-cube API, splatted with plain loops."""
    plan = tile_plan(v.dims, n, stride)
    acc = np.zeros((3,) + v.dims)
    for t, x, y in plan.tile_origins:
        cube = np.asarray(v.data[t:t + n, x:x + n, y:y + n], dtype=np.float64)
        for m, p in enumerate(project_spectrum(local_fft(cube - cube.mean()))):
            acc[m, t:t + n, x:x + n, y:y + n] += spectral_energy(p)
    return acc / plan.coverage


class TestEnergyVolumes:
    def test_constant_volume(self):
        ev = energy_volumes(Volume3D(np.full((16, 16, 16), 4.2)), n=8, stride=4)
        for e in ev:
            assert e.dims == (16, 16, 16)
            np.testing.assert_array_equal(e.data, 0.0)

    def test_matches_per_tile_reference(self, rng):
        v = Volume3D(rng.standard_normal((16, 20, 12)).astype(np.float32))
        ev = energy_volumes(v, n=8, stride=4)
        ref = _per_tile_reference(v, 8, 4)
        for m in range(3):
            np.testing.assert_allclose(ev[m].data, ref[m], rtol=1e-10)
            assert ev[m].data.min() >= 0

    def test_layering_energy_lies_off_t(self):
        # Variation along t puts spectral energy on the f_t axis, where the
        # t-factor vanishes; the x and y factors are 1 there.
        t = np.arange(32)
        trace = np.sin(2 * np.pi * t / 5) + 0.5 * np.sin(2 * np.pi * t / 13)
        v = Volume3D(np.broadcast_to(trace[:, None, None], (32, 32, 32)).copy())
        ev = energy_volumes(v)
        inner = (slice(8, 24),) * 3
        mt, mx, my = (float(ev[m].data[inner].mean()) for m in "txy")
        assert mx > 5 * mt and my > 5 * mt
        assert mx == pytest.approx(my, rel=1e-12)

    def test_offset_bit_identical(self, rng):
        v = Volume3D(rng.uniform(-0.5, 0.5, (32, 32, 32)).astype(np.float32))
        shifted = Volume3D(v.data.astype(np.float64) + 7.3)
        a, b = energy_volumes(v), energy_volumes(shifted)
        for m in range(3):
            assert a[m].data.tobytes() == b[m].data.tobytes()

    def test_threads_do_not_change_result(self, rng):
        v = Volume3D(rng.standard_normal((32, 24, 40)).astype(np.float32))
        a = energy_volumes(v, threads=1, batch=7)
        b = energy_volumes(v, threads=4, batch=7)
        for m in range(3):
            assert a[m].data.tobytes() == b[m].data.tobytes()

    def test_transpose_equivariance(self, rng):
        arr = rng.standard_normal((24, 24, 24))
        ev = energy_volumes(Volume3D(arr))
        evT = energy_volumes(Volume3D(arr.transpose(1, 0, 2).copy()))
        np.testing.assert_allclose(evT.t.data, ev.x.data.transpose(1, 0, 2), rtol=1e-6)
        np.testing.assert_allclose(evT.x.data, ev.t.data.transpose(1, 0, 2), rtol=1e-6)
        np.testing.assert_allclose(evT.y.data, ev.y.data.transpose(1, 0, 2), rtol=1e-6)

    def test_hann_taper_changes_energies(self, rng):
        v = Volume3D(rng.standard_normal((16, 16, 16)))
        plain, tapered = energy_volumes(v, n=8, stride=4), energy_volumes(v, n=8, stride=4, taper="hann")
        assert not np.allclose(plain.t.data, tapered.t.data)
        with pytest.raises(ValueError):
            energy_volumes(v, n=8, stride=4, taper="kaiser")
