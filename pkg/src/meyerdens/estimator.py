"""Scikit-learn style density estimator built on thresholded Meyer coefficients."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .harness import default_depth
from .meyer import BasisSpec, build_band_table, fourier_size_for
from .spectral import NoiseModel, deconvolution_weights, empirical_fourier
from .threshold import (
    check_delta,
    estimate_variance,
    hard_threshold,
    level_thresholds,
    random_threshold,
    select_hyperparams_deconv,
    select_hyperparams_direct,
)
from .transform import evaluate, forward_fast, reconstruct, synthesize_fourier
from .utils import check_power_of_two, check_samples

__all__ = ["RescaleMap", "MeyerDensityEstimator", "postprocess", "POLICIES"]

POLICIES = ("raw", "clip", "clip-renormalize")
_POLICY_ALIASES = {"clip-renorm": "clip-renormalize"}


@dataclass(frozen=True)
class RescaleMap:
    """Affine map ``x -> (x - offset) / scale`` onto the unit interval."""

    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def from_samples(cls, x, margin: float = 0.05) -> "RescaleMap":
        lo, hi = float(np.min(x)), float(np.max(x))
        width = hi - lo
        if not width > 0:
            raise ValueError("degenerate samples: all values are equal")
        return cls(lo - margin * width, (1.0 + 2.0 * margin) * width)

    @property
    def is_identity(self) -> bool:
        return self.offset == 0.0 and self.scale == 1.0

    def forward(self, x):
        return (np.asarray(x, dtype=float) - self.offset) / self.scale

    def inverse(self, u):
        return np.asarray(u, dtype=float) * self.scale + self.offset


def _policy(name):
    name = _POLICY_ALIASES.get(name, name)
    if name not in POLICIES:
        raise ValueError(f"unknown postprocess policy {name!r}")
    return name


def postprocess(values, policy: str = "raw", dx: float = None):
    """Apply ``'raw'``, ``'clip'`` or ``'clip-renormalize'`` to grid values.

    ``dx`` is the grid spacing used for the Riemann sum in
    ``'clip-renormalize'`` (defaults to ``1 / len(values)``).
    """
    policy = _policy(policy)
    values = np.asarray(values, dtype=float)
    if policy == "raw":
        return values.copy()
    clipped = np.maximum(values, 0.0)
    if policy == "clip":
        return clipped
    dx = 1.0 / values.size if dx is None else dx
    mass = clipped.sum() * dx
    if not mass > 0:
        raise ValueError("clipped estimate is identically zero; cannot renormalize")
    return clipped / mass


class MeyerDensityEstimator(BaseEstimator):
    """Density estimation (and deconvolution) by hard thresholding of Meyer coefficients.

    Parameters
    ----------
    mode : {'direct', 'deconvolve'}
        ``'deconvolve'`` treats the samples as ``X + eps`` with ``eps`` drawn
        from ``noise`` (given in the units of the data).
    noise : NoiseModel, optional
        Required in deconvolve mode.
    j0, j1 : int or 'auto'
        Coarse and finest levels. ``'auto'`` uses the mode's selection rule.
    delta : float or 'auto'
        Threshold constant.
    alpha : float or 'auto'
        Log-factor exponent used by the automatic ``delta``. ``'auto'`` is 0
        for direct estimation and 0.5 for deconvolution.
    J : int, optional
        Transform depth; defaults to ``max(8, ceil(log2 n))``.
    rule : {'random', 'level'}
        Data-driven thresholds from the variance estimates, or ``delta sqrt(j/n)``.
    use_sigma2 : bool
        Use the plug-in variance instead of the upper-bound estimate in the
        random thresholds.
    rescale : bool
        Map the data onto [0, 1] with a ``margin`` on each side. With
        ``False`` the samples must already lie in [0, 1].
    grid_size : int
        Power-of-two number of points in ``grid_`` / ``density_``.
    postprocess : {'raw', 'clip', 'clip-renormalize'}
        Applied to ``density_`` and to :meth:`predict`.

    Attributes
    ----------
    spec_ : BasisSpec
    j0_, j1_, delta_ : selected hyperparameters
    rescale_ : RescaleMap
    coeffs_ : CoeffSet
        Empirical coefficients before thresholding.
    thresholds_ : CoeffSet
    thresholded_ : CoeffSet
    grid_, density_ : ndarray
        Evaluation grid and estimate in the original units.
    """

    def __init__(self, mode="direct", noise=None, j0="auto", j1="auto", delta="auto",
                 alpha="auto", J=None, rule="random", use_sigma2=False, rescale=True,
                 margin=0.05, grid_size=512, postprocess="raw"):
        self.mode = mode
        self.noise = noise
        self.j0 = j0
        self.j1 = j1
        self.delta = delta
        self.alpha = alpha
        self.J = J
        self.rule = rule
        self.use_sigma2 = use_sigma2
        self.rescale = rescale
        self.margin = margin
        self.grid_size = grid_size
        self.postprocess = postprocess

    def _hyperparams(self, n, noise):
        nu = noise.nu
        plain = self.mode == "direct" or noise.is_identity
        alpha = (0.0 if plain else 0.5) if self.alpha == "auto" else float(self.alpha)
        j1 = None if self.j1 == "auto" else int(self.j1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            # without noise the deconvolution estimator is the direct one, rules included
            if plain:
                j0, j1, delta = select_hyperparams_direct(n, alpha, j1)
            else:
                j0, j1, delta = select_hyperparams_deconv(n, nu, alpha, j1)
        if self.j0 != "auto":
            j0 = int(self.j0)
        if self.delta != "auto":
            delta = float(self.delta)
            if delta < 0:
                raise ValueError("delta must be nonnegative")
            if self.rule == "random":
                check_delta(delta, j1, n, nu)
        return j0, j1, delta

    def fit(self, X, y=None):
        """Estimate the density of ``X`` (1-d array, or a single-column 2-d array)."""
        if self.mode not in ("direct", "deconvolve"):
            raise ValueError("mode must be 'direct' or 'deconvolve'")
        if self.rule not in ("random", "level"):
            raise ValueError("rule must be 'random' or 'level'")
        _policy(self.postprocess)
        G = check_power_of_two(self.grid_size, "grid_size")
        direct = self.mode == "direct"
        if not direct and self.noise is None:
            raise ValueError("deconvolve mode needs a noise model")
        x = check_samples(X, unit_interval=False, min_size=3)
        n = x.size
        if self.rescale:
            rmap = RescaleMap.from_samples(x, self.margin)
        else:
            rmap = RescaleMap()
        u = rmap.forward(x)
        if direct:
            u = check_samples(u, unit_interval=True)
        noise = NoiseModel.identity() if direct else self.noise.rescaled(rmap.scale)

        j0, j1, delta = self._hyperparams(n, noise)
        J = default_depth(n) if self.J is None else int(self.J)
        if j1 >= J:
            raise ValueError(f"j1={j1} must be below the transform depth J={J}")
        spec = BasisSpec(j0, j1, J)
        table = build_band_table(spec)
        weights = deconvolution_weights(table, noise)

        fourier = empirical_fourier(u, fourier_size_for(j1), check_range=direct)
        coeffs = forward_fast(fourier, weights, max_level=j1)
        if self.rule == "random":
            variance = estimate_variance(u, weights, max_level=j1, check_range=direct)
            tau = random_threshold(variance, delta, use_sigma2=self.use_sigma2)
        else:
            variance = None
            tau = level_thresholds(spec, delta, n)
        kept = hard_threshold(coeffs, tau, j1)

        self.n_samples_ = n
        self.spec_ = spec
        self.j0_, self.j1_, self.delta_ = j0, j1, delta
        self.rescale_ = rmap
        self.noise_ = noise
        self.coeffs_ = coeffs
        self.variance_ = variance
        self.thresholds_ = tau
        self.thresholded_ = kept
        self.fourier_ = synthesize_fourier(kept, table)

        unit = reconstruct(kept, G, table)
        self.raw_unit_density_ = unit
        self.grid_ = rmap.inverse(np.arange(G) / G)
        self.density_ = self._post(unit) / rmap.scale
        return self

    def _post(self, unit_values, reference=None):
        policy = _policy(self.postprocess)
        if policy != "clip-renormalize":
            return postprocess(unit_values, policy)
        ref = self.raw_unit_density_ if reference is None else reference
        mass = np.maximum(ref, 0.0).mean()
        if not mass > 0:
            raise ValueError("clipped estimate is identically zero; cannot renormalize")
        return np.maximum(unit_values, 0.0) / mass

    def predict(self, X):
        """Estimated density at the points ``X`` (original units), post-processed."""
        check_is_fitted(self, "fourier_")
        x = np.asarray(X, dtype=float)
        if x.ndim == 2 and x.shape[1] == 1:
            x = x[:, 0]
        freqs, g = self.fourier_
        unit = evaluate(freqs, g, self.rescale_.forward(x))
        return self._post(unit) / self.rescale_.scale

    def score_samples(self, X):
        """Log of the clipped density estimate; ``-inf`` where it is not positive."""
        dens = np.maximum(self.predict(X), 0.0)
        with np.errstate(divide="ignore"):
            return np.log(dens)

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))

    @property
    def total_mass(self) -> float:
        """Integral of the raw estimate over one period, ``sum_k c_k 2^{-j0/2}``."""
        check_is_fitted(self, "fourier_")
        return float(self.thresholded_.scaling.sum() * 2.0 ** (-self.spec_.j0 / 2))
