"""Shared fixtures and an independent time-domain oracle for the Meyer basis.

The oracle never touches the Fourier-coefficient formula used by the
package: it inverts the continuous transform by Gauss-Legendre quadrature,
periodizes by summing shifts, and integrates over [0, 1] with a Riemann sum.
"""

import numpy as np
import pytest

from meyerdens.meyer import meyer_scaling_ft, meyer_wavelet_ft

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(1200)

# beyond this |t| the profiles are below 1e-7 and the tails are dropped
T_MAX = 320.0


def _gauss(a, b):
    return 0.5 * (b - a) * _NODES + 0.5 * (b + a), 0.5 * (b - a) * _WEIGHTS


def _inverse_ft(ft, pieces, t):
    # f(t) = (1/pi) Re int_0^inf fhat(w) exp(i w t) dw for real f
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape)
    for a, b in pieces:
        w, wt = _gauss(a, b)
        vals = ft(w) * wt
        total += np.real(np.exp(1j * np.multiply.outer(t, w)) @ vals)
    return total / np.pi


def psi_time(t):
    """Meyer wavelet in the time domain."""
    p = np.pi
    return _inverse_ft(meyer_wavelet_ft, [(2 * p / 3, 4 * p / 3), (4 * p / 3, 8 * p / 3)], t)


def phi_time(t):
    """Meyer scaling function in the time domain."""
    p = np.pi
    return _inverse_ft(meyer_scaling_ft, [(0.0, 2 * p / 3), (2 * p / 3, 4 * p / 3)], t)


def periodized(x, j, k, scaling=False):
    """``sum_i 2^{j/2} g(2^j (x + i) - k)`` over the shifts with ``|2^j (x + i) - k| <= T_MAX``."""
    g = phi_time if scaling else psi_time
    x = np.asarray(x, dtype=float)
    shifts = int(np.ceil(T_MAX / 2**j)) + 1
    i = np.arange(-shifts, shifts + 1)
    t = 2.0**j * np.add.outer(x, i) - k
    inside = np.abs(t) <= T_MAX
    vals = np.zeros(t.shape)
    vals[inside] = g(t[inside])
    return 2.0 ** (j / 2) * vals.sum(axis=-1)


def riemann_fourier(values, ell):
    """``(1/G) sum_m v(m/G) exp(-2 pi i l m / G)``: exact for trigonometric polynomials of low degree."""
    G = values.size
    x = np.arange(G) / G
    return np.exp(-2j * np.pi * np.multiply.outer(ell, x)) @ values / G


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
