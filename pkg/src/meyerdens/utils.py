"""Input validation helpers shared by the estimator, harness and CLI."""

import numbers

import numpy as np

__all__ = ["check_samples", "check_power_of_two", "check_random_state", "log2_ceil"]


def check_samples(samples, unit_interval=True, min_size=1):
    """Return ``samples`` as a flat float array, raising ``ValueError`` on bad input."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d array of samples, got shape {x.shape}")
    if x.size < max(min_size, 1):
        if x.size == 0:
            raise ValueError("no samples")
        raise ValueError(f"need at least {min_size} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples contain NaN or inf")
    if unit_interval and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("samples must lie in [0, 1]; rescale them first")
    return x


def check_power_of_two(value, name="N"):
    if not isinstance(value, numbers.Integral) or value < 1 or value & (value - 1):
        raise ValueError(f"{name} must be a positive power of two, got {value!r}")
    return int(value)


def log2_ceil(n):
    return int(np.ceil(np.log2(n) - 1e-12))


def check_random_state(seed):
    """``numpy.random.Generator`` from a seed, a ``SeedSequence`` or a generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
