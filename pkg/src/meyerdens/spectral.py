"""Empirical Fourier coefficients of samples and ordinary-smooth noise models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .meyer import BandTable
from .utils import check_power_of_two, check_samples

__all__ = [
    "IllPosedBand",
    "FourierGrid",
    "EmpiricalFourier",
    "NoiseModel",
    "empirical_fourier",
    "deconvolution_weights",
    "eta_j",
]

_CHUNK = 4096


class IllPosedBand(ValueError):
    """Raised when a noise Fourier coefficient on a used band is (numerically) zero."""


@dataclass(frozen=True)
class FourierGrid:
    """Fourier coefficients ``f_l`` stored for ``l = -M/2+1, ..., M/2``."""

    values: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[-1]

    @property
    def frequencies(self) -> np.ndarray:
        M = self.size
        return np.arange(-M // 2 + 1, M // 2 + 1)

    def at(self, ell):
        """Values at integer frequencies ``ell`` (must lie on the grid)."""
        ell = np.asarray(ell)
        M = self.size
        if ell.size and (ell.min() <= -M // 2 or ell.max() > M // 2):
            raise IndexError(f"frequency outside the grid of size {M}")
        return self.values[..., ell + M // 2 - 1]

    @classmethod
    def from_function(cls, func, M: int) -> "FourierGrid":
        """Tabulate ``func(l)`` on the grid of size ``M``."""
        check_power_of_two(M, "M")
        return cls(np.asarray(func(np.arange(-M // 2 + 1, M // 2 + 1)), dtype=complex))


@dataclass(frozen=True)
class EmpiricalFourier(FourierGrid):
    """``(1/n) sum_m exp(-2 pi i l X_m)`` on the grid; ``n`` is the sample size."""

    n: int = 0


def _phase_sums(samples, ell):
    """``sum_m exp(-2 pi i l X_m)`` for nonnegative ``ell``, chunked over samples."""
    total = np.zeros(ell.shape, dtype=complex)
    for start in range(0, samples.size, _CHUNK):
        x = samples[start:start + _CHUNK]
        total += np.exp(-2j * np.pi * np.multiply.outer(ell, x)).sum(axis=1)
    return total


def empirical_fourier(samples, N: int, check_range: bool = True) -> EmpiricalFourier:
    """Exact empirical Fourier coefficients on the grid of size ``N``.

    Parameters
    ----------
    samples : array_like
        Observations, expected in [0, 1].
    N : int
        Power-of-two grid size; frequencies ``-N/2+1..N/2`` are returned.
    check_range : bool
        Reject samples outside [0, 1]. Deconvolution passes ``False`` since
        noisy observations may leave the interval (integer frequencies make
        the evaluation 1-periodic anyway).
    """
    x = check_samples(samples, unit_interval=check_range)
    check_power_of_two(N, "N")
    half = N // 2
    pos = _phase_sums(x, np.arange(0, half + 1)) / x.size
    pos[0] = 1.0
    values = np.concatenate([np.conj(pos[half - 1:0:-1]), pos])
    return EmpiricalFourier(values, n=x.size)


@dataclass(frozen=True)
class NoiseModel:
    """Error density described by its Fourier coefficients.

    ``kind`` is ``'identity'`` (no noise), ``'laplace'`` or ``'custom'``.
    For ``'custom'`` supply ``cf``, a callable of a real frequency in cycles
    returning the Fourier transform ``int h(u) exp(-2 pi i xi u) du``, and
    the declared degree of ill-posedness ``nu``.
    """

    kind: str = "identity"
    sigma: float = 0.0
    nu: float = 0.0
    cf: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("identity", "laplace", "custom"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "laplace":
            if not self.sigma > 0:
                raise ValueError("laplace noise needs sigma > 0")
            object.__setattr__(self, "nu", 2.0)
        if self.kind == "custom" and self.cf is None:
            raise ValueError("custom noise needs a cf callable")
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")

    @classmethod
    def identity(cls) -> "NoiseModel":
        return cls("identity")

    @classmethod
    def laplace(cls, sigma: float) -> "NoiseModel":
        """Laplace errors with standard deviation ``sigma``."""
        return cls("laplace", sigma=float(sigma))

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"

    def fourier(self, ell):
        ell = np.asarray(ell, dtype=float)
        if self.kind == "identity":
            return np.ones(ell.shape, dtype=complex)
        if self.kind == "laplace":
            return (1.0 / (1.0 + 2.0 * self.sigma**2 * np.pi**2 * ell**2)).astype(complex)
        return np.asarray(self.cf(ell), dtype=complex)

    def sample(self, rng, size):
        if self.kind == "identity":
            return np.zeros(size)
        if self.kind == "laplace":
            return rng.laplace(0.0, self.sigma / np.sqrt(2.0), size)
        raise NotImplementedError("custom noise models have no sampler")

    def rescaled(self, scale: float) -> "NoiseModel":
        """Noise model of ``eps / scale``."""
        if self.kind == "identity":
            return self
        if self.kind == "laplace":
            return NoiseModel.laplace(self.sigma / scale)
        cf = self.cf
        return NoiseModel("custom", nu=self.nu, cf=lambda xi: cf(np.asarray(xi) / scale))

    def sandwich_ratios(self, ell):
        """``|h_l| |l|^nu`` on nonzero ``ell``; bounded above and below for ordinary smooth noise."""
        ell = np.asarray(ell, dtype=float)
        ell = ell[ell != 0]
        return np.abs(self.fourier(ell)) * np.abs(ell) ** self.nu


def deconvolution_weights(table: BandTable, noise: NoiseModel, floor: float = 1e-12) -> BandTable:
    """Divide every band by the noise coefficients.

    The stored value is ``psi_l / conj(h_l)`` so that the analysis weight
    ``conj(value) = conj(psi_l) / h_l`` is unbiased for ``f_l`` when applied
    to ``E exp(-2 pi i l Y) = f_l h_l``. For real (symmetric) noise this is
    ``psi_l / h_l``. Identity noise returns the table unchanged.
    """
    if noise.is_identity:
        return table
    new = {}
    for band in table.bands():
        h = noise.fourier(band.freqs)
        if np.any(np.abs(h) < floor):
            bad = band.freqs[np.abs(h) < floor]
            raise IllPosedBand(
                f"|h_l| < {floor:g} on level {band.level} at frequencies {bad[:5].tolist()}"
            )
        new["scaling" if band.scaling else band.level] = band.values / np.conj(h)
    return table.replace_values(new, noise=noise)


def eta_j(band) -> float:
    """Sum of absolute weights over the band; independent of the shift ``k``."""
    return float(np.abs(band.values).sum())
