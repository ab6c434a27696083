"""Elliptic special functions: AGM periods, complex Jacobi functions, theta_1.

All routines work with the modulus k (not the parameter m = k^2) unless
noted.  The Jacobi functions accept complex arguments through the standard
real/imaginary addition identities, with the real-argument values supplied
by scipy's Landen-transform implementation.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ellipj

from .errors import ConvergenceError

_AGM_TOL = 1e-16


def agm(a, b):
    """Arithmetic-geometric mean of two positive reals."""
    a = float(a)
    b = float(b)
    for _ in range(80):
        if abs(a - b) <= _AGM_TOL * abs(a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    else:
        raise ConvergenceError("AGM did not converge")
    return 0.5 * (a + b)


def complete_K(k):
    """Complete elliptic integral K(k) by the AGM, modulus convention."""
    kp = np.sqrt((1.0 - k) * (1.0 + k))
    return np.pi / (2.0 * agm(1.0, kp))


def jacobi_complex(z, m):
    """Jacobi sn, cn, dn at complex argument z for parameter m = k^2.

    Uses sn(x+iy) etc. expressed through real-argument Jacobi functions of
    x (parameter m) and y (parameter 1-m).  Vectorized over z.
    """
    z = np.asarray(z, dtype=complex)
    x, y = np.real(z), np.imag(z)
    s, c, d, _ = ellipj(x, m)
    s1, c1, d1, _ = ellipj(y, 1.0 - m)
    den = c1 * c1 + m * (s * s1) ** 2
    sn = (s * d1 + 1j * c * d * s1 * c1) / den
    cn = (c * c1 - 1j * s * d * s1 * d1) / den
    dn = (d * c1 * d1 - 1j * m * s * c * s1) / den
    return sn, cn, dn


def nome(K, Kp):
    """Elliptic nome for the rectangular lattice spanned by (4K, 2iK')."""
    return np.exp(-np.pi * Kp / (2.0 * K))


def theta1(v, q, nterms=None):
    """First Jacobi theta function theta_1(v, q) by its sine series.

    The series terms decay like q^{(n+1/2)^2} e^{(2n+1)|Im v|}; the default
    term count is chosen so the tail is below machine precision for the
    arguments arising from points in the fundamental rectangle.
    """
    v = np.asarray(v, dtype=complex)
    if nterms is None:
        nterms = 26
    terms = np.arange(nterms)
    # shape (..., nterms) broadcast
    phase = (2 * terms + 1) * v[..., None]
    coef = (-1.0) ** terms * q ** ((terms + 0.5) ** 2)
    return 2.0 * np.sum(coef * np.sin(phase), axis=-1)


def theta1_dlog(v, q, nterms=None):
    """Logarithmic derivative theta_1'(v, q) / theta_1(v, q)."""
    v = np.asarray(v, dtype=complex)
    if nterms is None:
        nterms = 26
    terms = np.arange(nterms)
    phase = (2 * terms + 1) * v[..., None]
    coef = (-1.0) ** terms * q ** ((terms + 0.5) ** 2)
    num = 2.0 * np.sum(coef * (2 * terms + 1) * np.cos(phase), axis=-1)
    den = 2.0 * np.sum(coef * np.sin(phase), axis=-1)
    return num / den
