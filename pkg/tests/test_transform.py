import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import periodized, riemann_fourier
from meyerdens.meyer import BasisSpec, build_band_table
from meyerdens.spectral import FourierGrid, empirical_fourier
from meyerdens.transform import (
    CoeffSet,
    evaluate,
    forward_fast,
    forward_reference,
    reconstruct,
    synthesize_fourier,
)
from meyerdens.truth import TruthModel

SPEC = BasisSpec(3, 4, 8)


def random_symmetric_grid(rng, M):
    """Fourier coefficients of a random real function on the grid of size M."""
    half = M // 2
    pos = rng.standard_normal(half + 1) + 1j * rng.standard_normal(half + 1)
    pos[0] = pos[0].real
    pos[half] = pos[half].real
    return FourierGrid(np.concatenate([np.conj(pos[half - 1:0:-1]), pos]))


class TestCoeffSet:
    def test_vector_round_trip(self, rng):
        vec = rng.standard_normal(2**SPEC.J)
        cs = CoeffSet.from_vector(SPEC, vec)
        np.testing.assert_array_equal(cs.to_vector(), vec)
        assert cs.scaling.shape == (8,)
        assert cs.wavelet[7].shape == (128,)

    def test_wrong_lengths(self):
        with pytest.raises(ValueError):
            CoeffSet.from_vector(SPEC, np.zeros(100))
        with pytest.raises(ValueError):
            CoeffSet(SPEC, np.zeros(4), CoeffSet.zeros(SPEC).wavelet)

    def test_replace(self):
        cs = CoeffSet.zeros(SPEC).replace(wavelet={4: np.ones(16)})
        assert cs.wavelet[4].sum() == 16
        assert cs.wavelet[5].sum() == 0


class TestForward:
    def test_fast_matches_reference(self, rng):
        table = build_band_table(SPEC)
        for _ in range(5):
            grid = random_symmetric_grid(rng, SPEC.fourier_size)
            a = forward_fast(grid, table).to_vector()
            b = forward_reference(grid, table).to_vector()
            np.testing.assert_allclose(a, b, atol=1e-10)

    def test_max_level_zeros_above(self, rng):
        grid = random_symmetric_grid(rng, SPEC.fourier_size)
        cs = forward_fast(grid, build_band_table(SPEC), max_level=5)
        assert np.any(cs.wavelet[5])
        assert not np.any(cs.wavelet[6]) and not np.any(cs.wavelet[7])

    def test_grid_too_small(self, rng):
        grid = random_symmetric_grid(rng, 64)
        with pytest.raises(ValueError, match="does not cover"):
            forward_fast(grid, build_band_table(SPEC))
        # enough for levels up to 4
        forward_fast(grid, build_band_table(SPEC), max_level=4)

    def test_non_real_input_rejected(self, rng):
        M = SPEC.fourier_size
        grid = FourierGrid(rng.standard_normal(M) + 1j * rng.standard_normal(M))
        with pytest.raises(ArithmeticError):
            forward_fast(grid, build_band_table(SPEC))

    def test_single_sample_gives_point_values(self):
        # with n = 1, beta_hat_{j,k} = psi_{j,k}(X)
        x = 0.5
        spec = BasisSpec(3, 5, 6)
        cs = forward_fast(empirical_fourier([x], spec.fourier_size), build_band_table(spec))
        for j, k in [(3, 4), (4, 0), (5, 17)]:
            np.testing.assert_allclose(cs.wavelet[j][k], periodized(np.array([x]), j, k)[0], atol=1e-6)
        np.testing.assert_allclose(cs.scaling[2], periodized(np.array([x]), 3, 2, scaling=True)[0], atol=1e-6)

    def test_true_coefficients_are_inner_products(self):
        # beta_{j,k} = int_0^1 f psi_{j,k}; the Riemann sum is exact up to aliasing of
        # the (fast decaying) density coefficients
        truth = TruthModel("mixtgauss")
        spec = BasisSpec(3, 5, 6)
        beta = truth.true_coeffs(spec)
        G = 128
        x = np.arange(G) / G
        f = truth.pdf(x)
        for j, k in [(3, 3), (4, 6), (5, 19)]:
            quad = np.mean(f * periodized(x, j, k))
            np.testing.assert_allclose(beta.wavelet[j][k], quad, atol=1e-6)

    def test_shift_equivariance(self, rng):
        # translating the samples by 1/2^j cycles the level-j coefficients by one
        x = rng.random(30)
        table = build_band_table(SPEC)
        a = forward_fast(empirical_fourier(x, SPEC.fourier_size), table)
        b = forward_fast(empirical_fourier(np.mod(x + 1 / 32, 1), SPEC.fourier_size), table)
        np.testing.assert_allclose(np.roll(a.wavelet[5], 1), b.wavelet[5], atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_fast_reference_property(seed):
    rng = np.random.default_rng(seed)
    spec = BasisSpec(2, 3, 7)
    grid = random_symmetric_grid(rng, spec.fourier_size)
    table = build_band_table(spec)
    np.testing.assert_allclose(
        forward_fast(grid, table).to_vector(), forward_reference(grid, table).to_vector(), atol=1e-10
    )


class TestSynthesis:
    def test_analysis_of_synthesis_is_identity(self, rng):
        table = build_band_table(SPEC)
        cs = CoeffSet.from_vector(SPEC, rng.standard_normal(2**SPEC.J))
        freqs, g = synthesize_fourier(cs, table)
        M = SPEC.fourier_size
        values = np.zeros(M, dtype=complex)
        values[freqs + M // 2 - 1] = g
        back = forward_fast(FourierGrid(values), table)
        np.testing.assert_allclose(back.to_vector(), cs.to_vector(), atol=1e-12)

    def test_constant_function(self):
        cs = CoeffSet.zeros(SPEC)
        # 1 = sum_k 2^{-j0/2} phi_{j0,k}
        cs = cs.replace(scaling=np.full(8, 2.0 ** (-1.5)))
        np.testing.assert_allclose(reconstruct(cs, 64), 1.0, atol=1e-12)

    def test_grid_values_match_time_domain(self, rng):
        spec = BasisSpec(3, 3, 5)
        cs = CoeffSet.zeros(spec).replace(wavelet={4: np.eye(16)[5]})
        G = 64
        np.testing.assert_allclose(reconstruct(cs, G), periodized(np.arange(G) / G, 4, 5), atol=1e-6)

    def test_evaluate_matches_grid(self, rng):
        cs = CoeffSet.from_vector(SPEC, rng.standard_normal(2**SPEC.J))
        freqs, g = synthesize_fourier(cs)
        G = 512
        np.testing.assert_allclose(evaluate(freqs, g, np.arange(G) / G), reconstruct(cs, G), atol=1e-10)

    def test_grid_too_small_for_band(self, rng):
        cs = CoeffSet.from_vector(SPEC, rng.standard_normal(2**SPEC.J))
        with pytest.raises(ValueError, match="smaller than the band support"):
            reconstruct(cs, 128)

    def test_zero_levels_shrink_support(self):
        cs = CoeffSet.zeros(SPEC).replace(wavelet={4: np.ones(16)})
        freqs, _ = synthesize_fourier(cs)
        assert freqs.max() == 21
        reconstruct(cs, 64)

    def test_raw_values_keep_sign(self):
        cs = CoeffSet.zeros(SPEC).replace(wavelet={3: -np.eye(8)[0]})
        assert reconstruct(cs, 64).min() < -0.5

    def test_riemann_of_grid_recovers_fourier(self, rng):
        cs = CoeffSet.from_vector(SPEC, rng.standard_normal(2**SPEC.J))
        freqs, g = synthesize_fourier(cs)
        G = 1024
        np.testing.assert_allclose(riemann_fourier(reconstruct(cs, G), freqs), g, atol=1e-12)
