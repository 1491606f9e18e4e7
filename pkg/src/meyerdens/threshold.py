"""Variance estimates, random thresholds, hard thresholding and hyperparameter rules."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .meyer import BandTable
from .spectral import eta_j
from .transform import CoeffSet, _drop_imag
from .utils import check_samples

__all__ = [
    "KAPPA",
    "VarianceTable",
    "ThresholdParams",
    "estimate_variance",
    "variance_double_sum",
    "random_threshold",
    "threshold_formula",
    "hard_threshold",
    "level_threshold",
    "level_thresholds",
    "select_hyperparams_direct",
    "select_hyperparams_deconv",
    "check_delta",
]

KAPPA = 4.0 / 3.0 + math.sqrt(5.0 / 3.0)

_CHUNK = 2048


@dataclass(frozen=True)
class VarianceTable:
    """Per-coefficient variance estimates.

    Attributes
    ----------
    vhat : CoeffSet
        Unbiased estimate of the upper bound ``V = E|w(Y)|^2 / n``.
    sigma2hat : CoeffSet
        ``vhat - beta^2 / n``, the plug-in variance estimate.
    coeffs : CoeffSet
        Empirical coefficients computed from the same per-sample sums.
    eta : dict
        Sum of absolute weights per level (key ``'scaling'`` for the coarse band).
    """

    n: int
    vhat: CoeffSet
    sigma2hat: CoeffSet
    coeffs: CoeffSet
    eta: dict


@dataclass(frozen=True)
class ThresholdParams:
    delta: float
    n: int

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def kappa(self) -> float:
        return KAPPA

    @property
    def logn(self) -> float:
        return math.log(self.n)


def _per_sample_sums(y, band):
    """Matrix ``w_{j,k}(y_m) = sum_l conj(weight^{j,k}_l) exp(-2 pi i l y_m)``, shape ``(n, 2^j)``."""
    size = band.size
    a = np.conj(band.values)
    out = np.empty((y.size, size), dtype=complex)
    for start in range(0, y.size, _CHUNK):
        ys = y[start:start + _CHUNK]
        m = ys.size
        terms = a * np.exp(-2j * np.pi * np.multiply.outer(ys, band.freqs))
        idx = (np.arange(m)[:, None] * size + band.residues[None, :]).ravel()
        folded = np.bincount(idx, weights=terms.real.ravel(), minlength=m * size) + 1j * np.bincount(
            idx, weights=terms.imag.ravel(), minlength=m * size
        )
        out[start:start + m] = size * np.fft.ifft(folded.reshape(m, size), axis=1)
    return out


def estimate_variance(samples, weights: BandTable, max_level=None, check_range=True) -> VarianceTable:
    """Estimate ``V_{j,k}`` by ``(1/n^2) sum_m |w_{j,k}(Y_m)|^2``.

    The per-sample sums ``w_{j,k}(Y_m)`` come from the same folded per-scale
    DFT as :func:`meyerdens.transform.forward_fast`, one row per sample.
    Levels above ``max_level`` are left at zero.
    """
    y = check_samples(samples, unit_interval=check_range)
    n = y.size
    spec = weights.spec
    top = spec.J - 1 if max_level is None else max_level
    vhat, s2hat, beta, eta = {}, {}, {}, {}
    for band in weights.bands():
        key = "scaling" if band.scaling else band.level
        eta[key] = eta_j(band)
        if not band.scaling and band.level > top:
            vhat[key] = s2hat[key] = beta[key] = np.zeros(band.size)
            continue
        w = _per_sample_sums(y, band)
        b = _drop_imag(w.mean(axis=0))
        v = (np.abs(w) ** 2).sum(axis=0) / n**2
        # (1/n^2) sum |w_m - mean|^2: nonnegative up to rounding
        s2 = np.maximum(v - np.abs(b) ** 2 / n, 0.0)
        vhat[key], s2hat[key], beta[key] = v, s2, b

    def pack(d):
        d = dict(d)
        return CoeffSet(spec, d.pop("scaling"), d)

    return VarianceTable(n, pack(vhat), pack(s2hat), pack(beta), eta)


def variance_double_sum(samples, band, k: int) -> float:
    """``(1/n) sum_{l,l'} a_l conj(a_l') fhat_{l-l'}`` with ``a = conj(weight^{j,k})``.

    Direct evaluation of the quadratic form; O(n #C_j^2). Reference only.
    """
    y = np.asarray(samples, dtype=float)
    a = np.conj(band.column(k))
    diff = np.subtract.outer(band.freqs, band.freqs)
    uniq, inv = np.unique(diff, return_inverse=True)
    fhat = np.exp(-2j * np.pi * np.multiply.outer(uniq, y)).mean(axis=1)
    quad = np.outer(a, np.conj(a)) * fhat[inv.reshape(diff.shape)]
    return float(_drop_imag(quad.sum())) / y.size


def threshold_formula(vhat, eta, n, delta):
    """Random threshold as a function of the variance estimate and ``eta`` (broadcasts)."""
    vhat = np.asarray(vhat, dtype=float)
    delta = np.asarray(delta, dtype=float)
    dl = delta * math.log(n)
    e2 = (eta / n) ** 2
    inner = vhat + np.sqrt(2.0 * dl * vhat * e2) + dl * KAPPA * e2
    return np.sqrt(2.0 * dl * inner) + dl / (3.0 * n) * eta


def random_threshold(vt: VarianceTable, params, use_sigma2: bool = False) -> CoeffSet:
    """Per-coefficient thresholds; the scaling entries are zero (never thresholded).

    ``params`` is a :class:`ThresholdParams` or a bare ``delta``. With
    ``use_sigma2`` the plug-in variance replaces the upper bound estimate.
    """
    if not isinstance(params, ThresholdParams):
        params = ThresholdParams(float(params), vt.n)
    table = vt.sigma2hat if use_sigma2 else vt.vhat
    wavelet = {
        j: threshold_formula(table.wavelet[j], vt.eta[j], params.n, params.delta)
        for j in table.spec.levels
    }
    return CoeffSet(table.spec, np.zeros_like(table.scaling), wavelet)


def hard_threshold(coeffs: CoeffSet, tau: CoeffSet, j1: int) -> CoeffSet:
    """Keep ``beta`` where ``|beta| >= tau`` for levels up to ``j1``; zero above ``j1``."""
    spec = coeffs.spec
    if not spec.j0 <= j1 < spec.J:
        raise ValueError(f"j1={j1} outside [{spec.j0}, {spec.J - 1}]")
    wavelet = {}
    for j in spec.levels:
        b = coeffs.wavelet[j]
        if j > j1:
            wavelet[j] = np.zeros_like(b)
        else:
            t = tau.wavelet[j] if isinstance(tau, CoeffSet) else tau[j]
            wavelet[j] = np.where(np.abs(b) >= t, b, 0.0)
    return CoeffSet(spec, coeffs.scaling.copy(), wavelet)


def level_threshold(delta: float, n: int, j: int) -> float:
    """``delta * sqrt(j / n)``."""
    return delta * math.sqrt(j / n)


def level_thresholds(spec, delta: float, n: int) -> CoeffSet:
    wavelet = {j: np.full(2**j, level_threshold(delta, n, j)) for j in spec.levels}
    return CoeffSet(spec, np.zeros(2**spec.j0), wavelet)


def _coarse_level(n):
    return int(math.floor(math.log2(math.log(n)))) + 1


def select_hyperparams_direct(n: int, alpha: float = 0.0, j1=None):
    """``(j0, j1, delta)`` for direct density estimation.

    ``j0 = floor(log2(log n)) + 1``, ``j1 = floor(log2(n) / 2) + 1`` unless
    given, and ``delta = (j1 - 1 - alpha log2(log n)) / log2(n)``.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    j0 = _coarse_level(n)
    if j1 is None:
        j1 = int(math.floor(0.5 * math.log2(n))) + 1
    if j1 < j0:
        warnings.warn(f"j1={j1} is below j0={j0}", stacklevel=2)
    delta = (j1 - 1 - alpha * math.log2(math.log(n))) / math.log2(n)
    if delta <= 0:
        warnings.warn(f"selected delta={delta:.4g} is not positive", stacklevel=2)
    return j0, j1, delta


def select_hyperparams_deconv(n: int, nu: float, alpha: float = 0.0, j1=None):
    """``(j0, j1, delta)`` for deconvolution with ill-posedness ``nu``.

    ``j1 = j0 = floor(log2(log n)) + 1`` unless ``j1`` is given, and
    ``delta = (2 nu + 1)(j1 - 1 - alpha log2(log n)) / log2(n)``.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if nu < 0 or alpha < 0:
        raise ValueError("nu and alpha must be nonnegative")
    j0 = _coarse_level(n)
    j1 = j0 if j1 is None else j1
    delta = (2 * nu + 1) * (j1 - 1 - alpha * math.log2(math.log(n))) / math.log2(n)
    if delta <= 0:
        warnings.warn(f"selected delta={delta:.4g} is not positive", stacklevel=2)
    return j0, j1, delta


def check_delta(delta: float, j1: int, n: int, nu: float = 0.0) -> bool:
    """Warn when ``delta`` is below the smallest value covered by the oracle inequalities.

    The cutoff is ``(2 nu + 1)(j1 - 1) / log2(n)``, i.e. ``(j1 - 1) / log2(n)``
    without noise. Returns ``True`` when ``delta`` is inside the range.
    """
    cutoff = (2 * nu + 1) * (j1 - 1) / math.log2(n)
    if delta < cutoff - 1e-12:
        warnings.warn(
            f"delta={delta:.4g} is below the theoretical cutoff {cutoff:.4g}", stacklevel=2
        )
        return False
    return True
