import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import periodized, riemann_fourier
from meyerdens.meyer import (
    BasisSpec,
    band_frequencies,
    build_band_table,
    fourier_size_for,
    meyer_scaling_ft,
    meyer_wavelet_ft,
    ramp,
)


class TestProfiles:
    def test_ramp_endpoints_and_symmetry(self):
        t = np.linspace(-0.5, 1.5, 201)
        np.testing.assert_allclose(ramp(t) + ramp(1 - t), 1.0, atol=1e-15)
        assert ramp(-1.0) == 0.0
        assert ramp(2.0) == 1.0

    def test_scaling_value_at_pi(self):
        # cos(pi/4)
        np.testing.assert_allclose(meyer_scaling_ft(np.pi), np.sqrt(0.5), rtol=1e-14)
        assert meyer_scaling_ft(0.0) == 1.0
        assert meyer_scaling_ft(4 * np.pi / 3 + 1e-9) == 0.0

    def test_scalar_in_scalar_out(self):
        assert isinstance(meyer_scaling_ft(1.0), float)
        assert isinstance(meyer_wavelet_ft(3.0), complex)

    def test_wavelet_support(self):
        w = np.array([0.0, 2.0, 2 * np.pi / 3 - 1e-9, 8 * np.pi / 3 + 1e-9, 10.0])
        np.testing.assert_array_equal(np.abs(meyer_wavelet_ft(w)), 0.0)

    @given(st.floats(min_value=0.0, max_value=20.0))
    def test_partition_of_unity(self, w):
        # |phi(w)|^2 + sum_j |psi(2^-j w)|^2 = 1 over the Littlewood-Paley tiling
        total = meyer_scaling_ft(w) ** 2
        for j in range(0, 6):
            total += abs(meyer_wavelet_ft(w / 2**j)) ** 2
        if w < 8 * np.pi / 3 * 2**5:
            assert abs(total - 1.0) < 1e-12

    @given(st.floats(min_value=-10.0, max_value=10.0))
    def test_hermitian(self, w):
        assert abs(meyer_wavelet_ft(-w) - np.conj(meyer_wavelet_ft(w))) < 1e-15

    def test_two_scale_energy_relation(self):
        # |psi(w)|^2 = phi(w/2)^2 - phi(w)^2
        w = np.linspace(-12.0, 12.0, 1001)
        lhs = np.abs(meyer_wavelet_ft(w)) ** 2
        rhs = meyer_scaling_ft(w / 2) ** 2 - meyer_scaling_ft(w) ** 2
        np.testing.assert_allclose(lhs, rhs, atol=1e-14)


class TestBands:
    def test_level_three_band(self):
        ell = band_frequencies(3)
        expected = np.concatenate([-np.arange(10, 2, -1), np.arange(3, 11)])
        np.testing.assert_array_equal(ell, expected)

    @pytest.mark.parametrize("j", range(2, 11))
    def test_band_matches_open_interval(self, j):
        ell = np.abs(band_frequencies(j))
        assert np.all(ell > 2**j / 3)
        assert np.all(ell < 2 ** (j + 2) / 3)
        full = np.arange(1, 2 ** (j + 2))
        inside = full[(full > 2**j / 3) & (full < 2 ** (j + 2) / 3)]
        np.testing.assert_array_equal(np.unique(ell), inside)

    @pytest.mark.parametrize("j", range(1, 9))
    def test_scaling_band(self, j):
        ell = band_frequencies(j, scaling=True)
        assert np.all(np.abs(ell) < 2 ** (j + 1) / 3)
        assert 0 in ell

    @pytest.mark.parametrize("level", range(2, 12))
    def test_fourier_size_covers_band(self, level):
        M = fourier_size_for(level)
        top = np.abs(band_frequencies(level)).max()
        assert top < M // 2
        assert top >= M // 4

    def test_fourier_size_for_depth_eight(self):
        assert BasisSpec(3, 4, 8).fourier_size == 512


class TestBasisSpec:
    def test_properties(self):
        spec = BasisSpec(3, 4, 8)
        assert spec.N == 256
        assert list(spec.levels) == [3, 4, 5, 6, 7]
        assert spec.with_levels(j1=6).j1 == 6

    @pytest.mark.parametrize("args", [(4, 3, 8), (3, 8, 8), (-1, 2, 5)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            BasisSpec(*args)

    def test_non_integer(self):
        with pytest.raises(TypeError):
            BasisSpec(3.5, 4, 8)


class TestBandTable:
    spec = BasisSpec(3, 4, 8)

    def test_unit_norm_per_level(self):
        table = build_band_table(self.spec)
        for j in self.spec.levels:
            np.testing.assert_allclose(np.sum(np.abs(table[j].values) ** 2), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.sum(np.abs(table.scaling.values) ** 2), 1.0, atol=1e-12)

    def test_column_phase(self):
        band = build_band_table(self.spec)[5]
        k = 7
        expected = band.values * np.exp(-2j * np.pi * band.freqs * k / 32)
        np.testing.assert_allclose(band.column(k), expected, atol=1e-15)
        np.testing.assert_allclose(band.matrix()[k], expected, atol=1e-15)

    def test_shift_by_period_is_identity(self):
        band = build_band_table(self.spec)[4]
        np.testing.assert_allclose(band.column(3), band.column(3 + 16), atol=1e-13)

    def test_residues(self):
        band = build_band_table(self.spec)[6]
        np.testing.assert_array_equal(band.residues, np.mod(band.freqs, 64))

    def test_read_only(self):
        band = build_band_table(self.spec)[3]
        with pytest.raises(ValueError):
            band.values[0] = 0

    def test_bands_order(self):
        table = build_band_table(self.spec)
        bands = list(table.bands())
        assert bands[0].scaling
        assert [b.level for b in bands[1:]] == list(self.spec.levels)

    def test_full_gram_matrix(self):
        # scaling plus all wavelet levels form an orthonormal system of 2^J functions
        spec = BasisSpec(2, 2, 7)
        table = build_band_table(spec)
        M = spec.fourier_size
        cols = []
        for band in table.bands():
            for k in range(band.size):
                v = np.zeros(M, dtype=complex)
                v[band.freqs + M // 2] = band.column(k)
                cols.append(v)
        A = np.array(cols)
        np.testing.assert_allclose(A.conj() @ A.T, np.eye(2**spec.J), atol=1e-12)


class TestTimeDomainOracle:
    """Fourier coefficients against inverse transform + periodization + Riemann sum."""

    spec = BasisSpec(3, 3, 8)

    @pytest.mark.parametrize("j,k", [(3, 0), (4, 11), (5, 3)])
    def test_wavelet_coefficients(self, j, k):
        band = build_band_table(self.spec)[j]
        values = periodized(np.arange(128) / 128, j, k)
        np.testing.assert_allclose(riemann_fourier(values, band.freqs), band.column(k), atol=1e-6)

    def test_scaling_coefficients(self):
        band = build_band_table(self.spec).scaling
        values = periodized(np.arange(64) / 64, 3, 5, scaling=True)
        np.testing.assert_allclose(riemann_fourier(values, band.freqs), band.column(5), atol=1e-6)

    def test_outside_band_vanishes(self):
        band = build_band_table(self.spec)[4]
        values = periodized(np.arange(128) / 128, 4, 2)
        outside = np.array([0, 1, 5, 22, 30, -2, -23])
        assert not np.intersect1d(outside, band.freqs).size
        np.testing.assert_allclose(riemann_fourier(values, outside), 0.0, atol=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=3, max_value=7), st.integers(min_value=0, max_value=10**6))
def test_shift_orthogonality_property(j, seed):
    table = build_band_table(BasisSpec(3, 3, 8))
    band = table[j]
    rng = np.random.default_rng(seed)
    k1, k2 = rng.integers(0, 2**j, size=2)
    inner = np.vdot(band.column(k1), band.column(k2))
    assert abs(inner - (k1 == k2)) < 1e-12
