"""Forward wavelet coefficients from Fourier coefficients, and synthesis back to a grid.

All transforms work level by level. For level ``j`` the analysis is::

    beta_{j,k} = sum_{l in C_j} conj(w_l) f_l exp(2 pi i l k / 2^j)

Folding ``l`` modulo ``2^j`` turns the sum over ``k`` into a single inverse
DFT of length ``2^j``, which is the whole fast algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meyer import BandTable, BasisSpec, build_band_table
from .utils import check_power_of_two

__all__ = [
    "CoeffSet",
    "forward_reference",
    "forward_fast",
    "synthesize_fourier",
    "reconstruct",
    "evaluate",
]

IMAG_TOL = 1e-9


def _drop_imag(z, what="coefficients"):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        bad = np.abs(z.imag) > IMAG_TOL * (1.0 + np.abs(z.real))
        if np.any(bad):
            worst = float(np.max(np.abs(z.imag)))
            raise ArithmeticError(f"{what} have imaginary residue {worst:.3g}")
        return np.ascontiguousarray(z.real) if z.ndim else z.real
    return z


@dataclass(frozen=True)
class CoeffSet:
    """Scaling coefficients at ``spec.j0`` and wavelet coefficients for levels ``j0..J-1``."""

    spec: BasisSpec
    scaling: np.ndarray
    wavelet: dict

    def __post_init__(self):
        if self.scaling.shape != (2**self.spec.j0,):
            raise ValueError("scaling coefficients must have length 2^j0")
        for j in self.spec.levels:
            if self.wavelet[j].shape != (2**j,):
                raise ValueError(f"level {j} must have length 2^{j}")

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.scaling] + [self.wavelet[j] for j in self.spec.levels])

    @classmethod
    def from_vector(cls, spec: BasisSpec, vec) -> "CoeffSet":
        vec = np.asarray(vec)
        pos = 2**spec.j0
        scaling = vec[:pos].copy()
        wavelet = {}
        for j in spec.levels:
            wavelet[j] = vec[pos:pos + 2**j].copy()
            pos += 2**j
        if pos != vec.size:
            raise ValueError("vector length does not match spec")
        return cls(spec, scaling, wavelet)

    @classmethod
    def zeros(cls, spec: BasisSpec) -> "CoeffSet":
        return cls.from_vector(spec, np.zeros(2**spec.J))

    def replace(self, scaling=None, wavelet=None) -> "CoeffSet":
        new_wavelet = dict(self.wavelet)
        new_wavelet.update(wavelet or {})
        return CoeffSet(
            self.spec, self.scaling if scaling is None else scaling, new_wavelet
        )


def _check_grid(fourier, table, max_level):
    top = max(
        int(np.max(np.abs(b.freqs)))
        for b in table.bands()
        if b.scaling or b.level <= max_level
    )
    if top > fourier.size // 2 - 1:
        raise ValueError(
            f"Fourier grid of size {fourier.size} does not cover band frequency {top}"
        )


def _max_level(table, max_level):
    return table.spec.J - 1 if max_level is None else min(max_level, table.spec.J - 1)


def forward_reference(fourier, table: BandTable, max_level=None) -> CoeffSet:
    """Direct summation over every ``(j, k)``, O(sum_j 2^j #C_j). Oracle for :func:`forward_fast`."""
    top = _max_level(table, max_level)
    _check_grid(fourier, table, top)
    out = {}
    for band in table.bands():
        if not band.scaling and band.level > top:
            out[band.level] = np.zeros(band.size)
            continue
        f = fourier.at(band.freqs)
        coef = np.conj(band.matrix()) @ f
        out["scaling" if band.scaling else band.level] = _drop_imag(coef)
    scaling = out.pop("scaling")
    return CoeffSet(table.spec, scaling, out)


def _analyze_band(band, f):
    s = np.conj(band.values) * f
    size = band.size
    # lay the band out densely from a multiple of ``size`` so that folding
    # modulo ``size`` is a contiguous reshape and column sum
    lo = (int(band.freqs.min()) // size) * size
    rows = -(-(int(band.freqs.max()) + 1 - lo) // size)
    dense = np.zeros(rows * size, dtype=complex)
    dense[band.freqs - lo] = s
    return size * np.fft.ifft(dense.reshape(rows, size).sum(axis=0))


def forward_fast(fourier, table: BandTable, max_level=None) -> CoeffSet:
    """Per-scale folded inverse DFTs; O(N log N) overall.

    Parameters
    ----------
    fourier : FourierGrid
        Fourier coefficients (empirical or exact) on a grid covering the bands.
    table : BandTable
        Basis table, or deconvolution weights from
        :func:`meyerdens.spectral.deconvolution_weights`.
    max_level : int, optional
        Skip levels above this one; they are returned as zeros.
    """
    top = _max_level(table, max_level)
    _check_grid(fourier, table, top)
    scaling = _drop_imag(_analyze_band(table.scaling, fourier.at(table.scaling.freqs)))
    wavelet = {}
    for j in table.spec.levels:
        band = table[j]
        if j > top:
            wavelet[j] = np.zeros(band.size)
        else:
            wavelet[j] = _drop_imag(_analyze_band(band, fourier.at(band.freqs)))
    return CoeffSet(table.spec, scaling, wavelet)


def synthesize_fourier(coeffs: CoeffSet, table: BandTable = None):
    """Fourier coefficients ``g_l`` of the expansion, as ``(freqs, values)`` over the used bands."""
    table = build_band_table(coeffs.spec) if table is None else table
    top = max(
        (int(np.max(np.abs(table[j].freqs))) for j in coeffs.spec.levels if np.any(coeffs.wavelet[j])),
        default=0,
    )
    top = max(top, int(np.max(np.abs(table.scaling.freqs))))
    freqs = np.arange(-top, top + 1)
    g = np.zeros(freqs.size, dtype=complex)
    pairs = [(table.scaling, coeffs.scaling)] + [
        (table[j], coeffs.wavelet[j]) for j in coeffs.spec.levels
    ]
    for band, c in pairs:
        if not np.any(c):
            continue
        spectrum = np.fft.fft(c)
        np.add.at(g, band.freqs + top, band.values * spectrum[band.residues])
    return freqs, g


def reconstruct(coeffs: CoeffSet, grid_size: int, table: BandTable = None) -> np.ndarray:
    """Values of the expansion at ``m / G`` for ``m = 0..G-1``.

    Raises ``ValueError`` if a band with nonzero coefficients does not fit in
    the grid (it would alias).
    """
    G = check_power_of_two(grid_size, "grid_size")
    freqs, g = synthesize_fourier(coeffs, table)
    if freqs.size and freqs[-1] > G // 2:
        raise ValueError(
            f"grid of size {G} is smaller than the band support (|l| up to {freqs[-1]})"
        )
    spectrum = np.zeros(G, dtype=complex)
    np.add.at(spectrum, np.mod(freqs, G), g)
    return _drop_imag(G * np.fft.ifft(spectrum), "grid values")


def evaluate(freqs, g, x) -> np.ndarray:
    """Trigonometric polynomial ``sum_l g_l exp(2 pi i l x)`` at arbitrary points ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    flat = x.ravel()
    res = out.ravel()
    for start in range(0, flat.size, 2048):
        xs = flat[start:start + 2048]
        vals = np.exp(2j * np.pi * np.multiply.outer(xs, freqs)) @ g
        res[start:start + 2048] = _drop_imag(vals, "density values")
    return out
