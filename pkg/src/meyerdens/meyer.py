"""Periodized Meyer wavelets on [0, 1], described entirely by Fourier coefficients.

The Fourier coefficient of a periodized, dilated and shifted wavelet samples
the continuous transform at integer frequencies::

    psi^{j,k}_l = 2^{-j/2} exp(-2 pi i l k / 2^j) psihat(2 pi l / 2^j)

so a level is fully described by its ``k = 0`` column and the phase rule.
Only those columns are stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "BasisSpec",
    "Band",
    "BandTable",
    "ramp",
    "meyer_scaling_ft",
    "meyer_wavelet_ft",
    "build_band_table",
    "band_frequencies",
]

TWO_PI_OVER_3 = 2.0 * np.pi / 3.0


def ramp(t):
    """Degree-3 auxiliary function ``3t^2 - 2t^3`` clipped to [0, 1].

    It satisfies ``ramp(t) + ramp(1 - t) = 1``, which is what makes the
    squared profiles below sum to one.
    """
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def meyer_scaling_ft(omega):
    """Fourier transform of the Meyer scaling function at angular frequency ``omega``."""
    w = np.abs(np.asarray(omega, dtype=float))
    out = np.cos(0.5 * np.pi * ramp(3.0 * w / (2.0 * np.pi) - 1.0))
    out = np.where(w > 4.0 * np.pi / 3.0, 0.0, out)
    return out if out.ndim else float(out)


def meyer_wavelet_ft(omega):
    """Fourier transform of the Meyer wavelet, supported on 2pi/3 <= |omega| <= 8pi/3."""
    omega = np.asarray(omega, dtype=float)
    w = np.abs(omega)
    inner = np.sin(0.5 * np.pi * ramp(3.0 * w / (2.0 * np.pi) - 1.0))
    outer = np.cos(0.5 * np.pi * ramp(3.0 * w / (4.0 * np.pi) - 1.0))
    mod = np.where(w <= 4.0 * np.pi / 3.0, inner, outer)
    mod = np.where((w < TWO_PI_OVER_3) | (w > 8.0 * np.pi / 3.0), 0.0, mod)
    out = np.exp(0.5j * omega) * mod
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BasisSpec:
    """Resolution bookkeeping.

    Parameters
    ----------
    j0 : int
        Coarse level (scaling functions live here).
    j1 : int
        Finest level that is thresholded; coefficients above it are dropped.
    J : int
        Transform depth; wavelet levels run over ``j0..J-1``.
    """

    j0: int
    j1: int
    J: int

    def __post_init__(self):
        for name in ("j0", "j1", "J"):
            if int(getattr(self, name)) != getattr(self, name):
                raise TypeError(f"{name} must be an integer")
        if not 0 <= self.j0 <= self.j1 < self.J:
            raise ValueError(
                f"need 0 <= j0 <= j1 < J, got j0={self.j0}, j1={self.j1}, J={self.J}"
            )

    @property
    def N(self) -> int:
        return 2**self.J

    @property
    def levels(self) -> range:
        return range(self.j0, self.J)

    @property
    def fourier_size(self) -> int:
        """Size of the Fourier grid that holds every band up to level J-1."""
        return fourier_size_for(self.J - 1)

    def with_levels(self, j0=None, j1=None, J=None) -> "BasisSpec":
        return BasisSpec(
            self.j0 if j0 is None else j0,
            self.j1 if j1 is None else j1,
            self.J if J is None else J,
        )


def band_frequencies(j: int, scaling: bool = False) -> np.ndarray:
    """Integer frequencies where the level-``j`` wavelet (or scaling) coefficients are nonzero."""
    if scaling:
        # |2 pi l / 2^j| < 4 pi / 3; the endpoint value is exactly zero
        hi = -(-(2 ** (j + 1)) // 3) - 1
        ell = np.arange(-hi, hi + 1)
        return ell[np.abs(meyer_scaling_ft(2.0 * np.pi * ell / 2**j)) > 0]
    lo = 2**j // 3 + 1
    hi = -(-(2 ** (j + 2)) // 3) - 1
    pos = np.arange(lo, hi + 1)
    pos = pos[np.abs(meyer_wavelet_ft(2.0 * np.pi * pos / 2**j)) > 0]
    return np.concatenate([-pos[::-1], pos])


def fourier_size_for(level: int) -> int:
    """Smallest power-of-two grid size M with every band up to ``level`` inside |l| < M/2."""
    top = int(np.max(np.abs(band_frequencies(level))))
    M = 2
    while M // 2 <= top:
        M *= 2
    return M


@dataclass(frozen=True)
class Band:
    """One level of the table: frequencies ``freqs`` and the ``k = 0`` coefficients ``values``."""

    level: int
    freqs: np.ndarray
    values: np.ndarray
    scaling: bool = False
    residues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "residues", np.mod(self.freqs, 2**self.level))
        for arr in (self.freqs, self.values, self.residues):
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return 2**self.level

    def column(self, k) -> np.ndarray:
        """Coefficients for shift(s) ``k``; shape ``(len(k), len(freqs))`` for array ``k``."""
        k = np.asarray(k)
        phase = np.exp(-2j * np.pi * np.multiply.outer(k, self.freqs) / self.size)
        return phase * self.values

    def matrix(self) -> np.ndarray:
        """Dense ``(2^j, #C_j)`` table. Only for reference paths and tests."""
        return self.column(np.arange(self.size))


@dataclass(frozen=True)
class BandTable:
    """Fourier-side description of the basis for levels ``j0..J-1``.

    ``values`` may hold the plain basis coefficients or deconvolution
    weights divided by the noise coefficients (see
    :func:`meyerdens.spectral.deconvolution_weights`).
    """

    spec: BasisSpec
    scaling: Band
    wavelets: dict
    noise: object = None

    def __getitem__(self, j: int) -> Band:
        return self.wavelets[j]

    def bands(self):
        yield self.scaling
        for j in self.spec.levels:
            yield self.wavelets[j]

    @property
    def max_frequency(self) -> int:
        return max(int(np.max(np.abs(b.freqs))) for b in self.bands())

    def replace_values(self, new_values: dict, noise=None) -> "BandTable":
        """Copy with ``values`` swapped; ``new_values`` maps level (``'scaling'`` for the coarse band)."""
        scaling = Band(self.scaling.level, self.scaling.freqs, new_values["scaling"], True)
        wavelets = {
            j: Band(j, b.freqs, new_values[j]) for j, b in self.wavelets.items()
        }
        return BandTable(self.spec, scaling, wavelets, noise)


@lru_cache(maxsize=64)
def build_band_table(spec: BasisSpec) -> BandTable:
    """Tabulate ``psi^{j,0}_l`` over each band ``C_j`` and ``phi^{j0,0}_l`` over ``C_{j0}``."""
    bands = {}
    for j in spec.levels:
        ell = band_frequencies(j)
        vals = 2.0 ** (-j / 2) * meyer_wavelet_ft(2.0 * np.pi * ell / 2**j)
        bands[j] = Band(j, ell, np.asarray(vals, dtype=complex))
    ell = band_frequencies(spec.j0, scaling=True)
    vals = 2.0 ** (-spec.j0 / 2) * meyer_scaling_ft(2.0 * np.pi * ell / 2**spec.j0)
    scaling = Band(spec.j0, ell, np.asarray(vals, dtype=complex), scaling=True)
    table = BandTable(spec, scaling, bands)
    if table.max_frequency >= spec.fourier_size // 2:
        raise AssertionError(
            f"band support {table.max_frequency} exceeds Fourier grid {spec.fourier_size}"
        )
    return table
