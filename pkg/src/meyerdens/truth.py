"""Test densities with exact Fourier coefficients, exact coefficient variances and the oracle risk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .meyer import BandTable, BasisSpec, build_band_table
from .spectral import FourierGrid, NoiseModel, deconvolution_weights
from .transform import CoeffSet, _drop_imag, forward_fast

__all__ = [
    "DENSITIES",
    "TruthModel",
    "OracleQuantities",
    "true_fourier",
    "exact_variance",
    "exact_variance_level",
    "oracle_quantities",
    "oracle_estimator",
    "oracle_risk",
]

DENSITIES = ("uniform", "exponential", "laplace", "mixtgauss")

# mixture weights, means, standard deviations
MIXT = (np.array([0.4, 0.6]), np.array([0.4, 0.6]), np.array([0.05, 0.05]))

_QUAD_POINTS = 2**16


def _mixt_pdf(x):
    w, mu, sd = MIXT
    x = np.asarray(x, dtype=float)[..., None]
    return (w * stats.norm.pdf(x, mu, sd)).sum(axis=-1)


def _mixt_quadrature_fourier(ell):
    # periodic trapezoid rule on 2^16 points; the density vanishes to < 1e-13 at 0 and 1
    grid = np.arange(_QUAD_POINTS) / _QUAD_POINTS
    spectrum = np.fft.fft(_mixt_pdf(grid)) / _QUAD_POINTS
    return spectrum[np.mod(np.asarray(ell), _QUAD_POINTS)]


def _laplace_fourier(ell):
    # 10 exp(-20 |x - 1/2|) restricted to [0, 1]
    b = 2.0 * np.pi * np.asarray(ell, dtype=float)
    z = 20.0 - 1j * b
    half = (1.0 - np.exp(-0.5 * z)) / z
    return np.exp(-1j * np.pi * np.asarray(ell)) * 20.0 * half.real


def _exponential_fourier(ell):
    # 10 exp(-10 (x - 0.2)) on [0.2, 1]; mass beyond 1 (exp(-8)) is left out
    a = 10.0 + 2j * np.pi * np.asarray(ell, dtype=float)
    return 10.0 * np.exp(2.0) * (np.exp(-0.2 * a) - np.exp(-a)) / a


def _uniform_fourier(ell):
    ell = np.asarray(ell, dtype=float)
    return np.exp(-1j * np.pi * ell) * np.sinc(0.2 * ell)


def true_fourier(kind: str, ell):
    """Fourier coefficients ``int_0^1 f(u) exp(-2 pi i l u) du`` of a test density."""
    kind = _check_kind(kind)
    ell = np.asarray(ell)
    if kind == "uniform":
        out = _uniform_fourier(ell)
    elif kind == "exponential":
        out = _exponential_fourier(ell)
    elif kind == "laplace":
        out = _laplace_fourier(ell)
    else:
        out = _mixt_quadrature_fourier(ell)
    return np.asarray(out, dtype=complex)


def _check_kind(kind):
    kind = kind.lower()
    if kind not in DENSITIES:
        raise ValueError(f"unknown density {kind!r}; choose from {', '.join(DENSITIES)}")
    return kind


@dataclass(frozen=True)
class TruthModel:
    """One of the four benchmark densities on [0, 1]."""

    kind: str

    def __post_init__(self):
        object.__setattr__(self, "kind", _check_kind(self.kind))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            return np.where((x >= 0.4) & (x <= 0.6), 5.0, 0.0)
        if self.kind == "exponential":
            return np.where(x >= 0.2, 10.0 * np.exp(-10.0 * np.maximum(x - 0.2, 0.0)), 0.0)
        if self.kind == "laplace":
            return 10.0 * np.exp(-20.0 * np.abs(x - 0.5))
        return _mixt_pdf(x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            return np.clip((x - 0.4) / 0.2, 0.0, 1.0)
        if self.kind == "exponential":
            return np.where(x >= 0.2, -np.expm1(-10.0 * np.maximum(x - 0.2, 0.0)), 0.0)
        if self.kind == "laplace":
            d = x - 0.5
            return np.where(d < 0, 0.5 * np.exp(20.0 * np.minimum(d, 0.0)),
                            1.0 - 0.5 * np.exp(-20.0 * np.maximum(d, 0.0)))
        w, mu, sd = MIXT
        return (w * special.ndtr((x[..., None] - mu) / sd)).sum(axis=-1)

    @property
    def mean(self) -> float:
        return {"uniform": 0.5, "exponential": 0.3, "laplace": 0.5,
                "mixtgauss": float(MIXT[0] @ MIXT[1])}[self.kind]

    @property
    def variance(self) -> float:
        """Variance of the density as written (on the real line)."""
        if self.kind == "uniform":
            return 0.2**2 / 12.0
        if self.kind == "exponential":
            return 0.01
        if self.kind == "laplace":
            return 2.0 * 0.05**2
        w, mu, sd = MIXT
        return float(w @ (sd**2 + mu**2) - (w @ mu) ** 2)

    @property
    def sup_norm(self) -> float:
        if self.kind == "mixtgauss":
            # the taller mode sits within one sd of 0.6
            res = optimize.minimize_scalar(lambda x: -float(self.pdf(x)), bounds=(0.55, 0.65),
                                           method="bounded", options={"xatol": 1e-12})
            return float(-res.fun)
        return {"uniform": 5.0, "exponential": 10.0, "laplace": 10.0}[self.kind]

    def sample(self, rng, size, return_clamped=False):
        """Draw ``size`` samples; values outside [0, 1] are clamped and counted."""
        if self.kind == "uniform":
            x = rng.uniform(0.4, 0.6, size)
        elif self.kind == "exponential":
            x = 0.2 + rng.exponential(0.1, size)
        elif self.kind == "laplace":
            x = rng.laplace(0.5, 0.05, size)
        else:
            w, mu, sd = MIXT
            comp = (rng.random(size) >= w[0]).astype(int)
            x = rng.normal(mu[comp], sd[comp])
        clamped = int(np.count_nonzero((x < 0.0) | (x > 1.0)))
        x = np.clip(x, 0.0, 1.0)
        return (x, clamped) if return_clamped else x

    def fourier(self, ell):
        return true_fourier(self.kind, ell)

    def fourier_grid(self, M: int) -> FourierGrid:
        return FourierGrid.from_function(self.fourier, M)

    def true_coeffs(self, spec: BasisSpec) -> CoeffSet:
        """Exact ``c_{j0,k}`` and ``beta_{j,k}`` for every level of ``spec``."""
        return forward_fast(self.fourier_grid(spec.fourier_size), build_band_table(spec))


def _dense(band, top):
    a = np.zeros(2 * top + 1, dtype=complex)
    a[band.freqs + top] = np.conj(band.values)
    return a


def exact_variance_level(truth: TruthModel, band, n: int, noise: NoiseModel = None):
    """Exact ``V_{j,k}`` for every ``k`` of one (possibly noise-weighted) band.

    Uses ``V_{j,k} = (1/n) sum_d c_d f^Y_d exp(2 pi i d k / 2^j)`` where
    ``c_d`` is the autocorrelation of the analysis weights, then folds ``d``
    modulo ``2^j``.
    """
    noise = NoiseModel.identity() if noise is None else noise
    top = int(np.max(np.abs(band.freqs)))
    a = _dense(band, top)
    c = np.correlate(a, a, mode="full")  # c[d + 2 top] = sum_l a_{l+d} conj(a_l)
    d = np.arange(-2 * top, 2 * top + 1)
    fy = truth.fourier(d) * noise.fourier(d)
    size = band.size
    s = c * fy
    folded = np.bincount(np.mod(d, size), weights=s.real, minlength=size) + 1j * np.bincount(
        np.mod(d, size), weights=s.imag, minlength=size
    )
    return _drop_imag(size * np.fft.ifft(folded), "exact variances") / n


def exact_variance(truth, noise, band, n: int, k: int):
    """``(V_{j,k}, sigma^2_{j,k})`` by the explicit double sum over ``C_j x C_j``."""
    noise = NoiseModel.identity() if noise is None else noise
    if not isinstance(truth, TruthModel):
        truth = TruthModel(truth)
    a = np.conj(band.column(k))
    diff = np.subtract.outer(band.freqs, band.freqs)
    fy = truth.fourier(diff) * noise.fourier(diff)
    V = float(_drop_imag(np.sum(np.outer(a, np.conj(a)) * fy), "exact variance")) / n
    beta = float(_drop_imag(np.sum(a * truth.fourier(band.freqs))))
    return V, V - beta**2 / n


@dataclass(frozen=True)
class OracleQuantities:
    """Exact ``V``, ``sigma^2`` and true coefficients for a density, noise and sample size."""

    spec: BasisSpec
    n: int
    beta: CoeffSet
    V: CoeffSet
    sigma2: CoeffSet
    max_level: int

    def keep_mask(self, j: int) -> np.ndarray:
        return self.beta.wavelet[j] ** 2 >= self.sigma2.wavelet[j]

    def risk_terms(self, j1: int, Jtail: int = None):
        """``(scaling variance, sum min(beta^2, sigma^2) over j0..j1, tail energy j1+1..Jtail-1)``."""
        Jtail = self.spec.J if Jtail is None else Jtail
        if j1 > self.max_level:
            raise ValueError(f"variances only computed up to level {self.max_level}")
        if Jtail > self.spec.J:
            raise ValueError("tail level beyond the transform depth")
        scaling = float(np.sum(self.sigma2.scaling))
        mid = sum(
            float(np.sum(np.minimum(self.beta.wavelet[j] ** 2, self.sigma2.wavelet[j])))
            for j in range(self.spec.j0, j1 + 1)
        )
        tail = sum(float(np.sum(self.beta.wavelet[j] ** 2)) for j in range(j1 + 1, Jtail))
        return scaling, mid, tail


def oracle_quantities(truth: TruthModel, spec: BasisSpec, n: int, noise: NoiseModel = None,
                      max_level: int = None) -> OracleQuantities:
    """Exact oracle ingredients; variances are computed for levels up to ``max_level``."""
    noise = NoiseModel.identity() if noise is None else noise
    table = build_band_table(spec)
    weights = deconvolution_weights(table, noise)
    top = spec.J - 1 if max_level is None else min(max_level, spec.J - 1)
    beta = truth.true_coeffs(spec)
    V = {"scaling": exact_variance_level(truth, weights.scaling, n, noise)}
    for j in spec.levels:
        V[j] = exact_variance_level(truth, weights[j], n, noise) if j <= top else np.zeros(2**j)
    sigma2 = {"scaling": V["scaling"] - beta.scaling**2 / n}
    for j in spec.levels:
        sigma2[j] = V[j] - beta.wavelet[j] ** 2 / n if j <= top else np.zeros(2**j)
    V = CoeffSet(spec, V.pop("scaling"), V)
    sigma2 = CoeffSet(spec, sigma2.pop("scaling"), sigma2)
    return OracleQuantities(spec, n, beta, V, sigma2, top)


def oracle_estimator(coeffs: CoeffSet, oq: OracleQuantities, j1: int) -> CoeffSet:
    """Keep empirical coefficients where ``beta^2 >= sigma^2`` (levels ``<= j1``)."""
    wavelet = {}
    for j in coeffs.spec.levels:
        if j > j1:
            wavelet[j] = np.zeros_like(coeffs.wavelet[j])
        else:
            wavelet[j] = np.where(oq.keep_mask(j), coeffs.wavelet[j], 0.0)
    return CoeffSet(coeffs.spec, coeffs.scaling.copy(), wavelet)


def oracle_risk(oq: OracleQuantities, j1: int, Jtail: int = None) -> float:
    """Quadratic risk of the oracle estimator, tail truncated at level ``Jtail - 1``."""
    return float(sum(oq.risk_terms(j1, Jtail)))
