"""Quadrature grid on the two-sheet contour, Cauchy-type projections and
the torus invariant.

The contour is discretized through the Cayley chart w = (xi-i)/(xi+i),
w = e^{i theta}, with n angles uniform on (-pi, pi].  The node theta = 0
is the point at infinity and is flagged.  With this chart the weighted
half-line projections

    Pt^+ = nonnegative Fourier modes,   Pt^- = strictly negative modes

realize lambda_+ P^{pm}_R lambda_+^{-1} exactly on the grid, and the
two-sheet projections are assembled channel-wise:

    P^{pm} f = Pt^{pm} f_E + tau lambda_+^{-2} Pt^{pm}(lambda_+^2 f_O).

A function is analytic on the upper pullback iff both channels have only
nonnegative modes; analytic on the lower pullback iff the even channel has
only nonpositive modes and the weighted odd channel only modes <= -2 (the
mode -1 direction is the simple pole at the branch point -i, measured by
the alpha functional).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import elliprj

from .errors import (AliasWarning, ConfigError, NotInvertibleError,
                     ResolutionError, SheetIndexError)
from .surface import SurfaceParams, lattice_reduce

ALIAS_TOL = 1e-8
INVERT_TOL = 1e-9


@dataclass(frozen=True)
class GammaGrid:
    """Shared quadrature grid for both sheet contours.

    theta[j] = -pi + 2 pi (j+1)/n, xi = -cot(theta/2); the infinity node
    sits at theta = 0 (index ``inf_index``) and carries xi = inf.  weights
    are the Jacobian weights for integration in dxi over the real line;
    the infinity-node entry is 0 and decaying integrands supply their
    (1+xi^2)-rescaled limit through :meth:`integrate`.
    """

    n: int
    theta: np.ndarray
    xi: np.ndarray
    weights: np.ndarray
    inf_index: int

    def integrate(self, values, inf_limit=0.0):
        """Integral over the real line of a sampled function.

        ``inf_limit`` is the limit of (1+xi^2)*f(xi) at infinity (0 for
        functions decaying faster than 1/xi^2).
        """
        v = np.asarray(values)
        total = np.sum(np.delete(v * self.weights, self.inf_index))
        return total + (np.pi / self.n) * inf_limit

    @property
    def finite(self):
        m = np.ones(self.n, dtype=bool)
        m[self.inf_index] = False
        return m


def make_grid(n):
    """Uniform Cayley-chart grid with n nodes per sheet (power of two >= 64)."""
    n = int(n)
    if n < 64 or (n & (n - 1)) != 0:
        raise ConfigError(f"grid size must be a power of two >= 64; got {n}")
    j = np.arange(1, n + 1)
    theta = -np.pi + 2.0 * np.pi * j / n
    inf_index = int(np.argmin(np.abs(theta)))
    xi = np.empty(n)
    fin = np.ones(n, dtype=bool)
    fin[inf_index] = False
    xi[fin] = -1.0 / np.tan(theta[fin] / 2.0)
    xi[inf_index] = np.inf
    weights = np.zeros(n)
    weights[fin] = np.pi / n * (1.0 + xi[fin] ** 2)
    return GammaGrid(n=n, theta=theta, xi=xi, weights=weights, inf_index=inf_index)


class _Geometry:
    """Per-(k0, n) arrays shared by all contour operations."""

    def __init__(self, params: SurfaceParams, grid: GammaGrid):
        self.params = params
        self.grid = grid
        n = grid.n
        k0 = params.k0
        fin = grid.finite
        xi = grid.xi
        self.fin = fin
        rho = np.empty(n)
        rho[fin] = np.sqrt((1 + xi[fin] ** 2) * (k0 ** 2 + xi[fin] ** 2))
        rho[grid.inf_index] = np.inf
        self.rho = rho
        lam_p = xi + 1j

        def limited(values_fin, limit):
            out = np.empty(n, dtype=complex)
            out[fin] = values_fin
            out[grid.inf_index] = limit
            return out

        # lambda_+^2 / (2 rho): multiplies (f1 - f2) to give the weighted odd
        # channel; limit 1/2 at infinity
        self.lp2_over_2rho = limited(lam_p[fin] ** 2 / (2 * rho[fin]), 0.5)
        # rho / lambda_+^2 on sheet 1 (negate for sheet 2); limit 1
        self.rho_over_lp2 = limited(rho[fin] / lam_p[fin] ** 2, 1.0)
        # (1 + xi^2)/rho: Jacobian for integrals of dxi/tau; limit 1
        self.opx2_over_rho = limited((1 + xi[fin] ** 2) / rho[fin], 1.0)
        # p1/(2 rho) and p2/(2 rho) for the matrix lift; both limits 1/2
        p1 = (xi + 1j) * (xi + 1j * k0)
        p2 = (xi - 1j) * (xi - 1j * k0)
        self.p1_over_2rho = limited(p1[fin] / (2 * rho[fin]), 0.5)
        self.p2_over_2rho = limited(p2[fin] / (2 * rho[fin]), 0.5)

        # FFT bookkeeping: node j sits at fft position (j + 1 + n/2) mod n
        a_idx = np.arange(n)
        self.fft_pos = (a_idx + 1 + n // 2) % n
        self.freqs = np.fft.fftfreq(n, d=1.0 / n).astype(int)

        # traversal in increasing-xi order starting at the infinity node
        i_inf = grid.inf_index
        self.order = np.concatenate(([i_inf], np.arange(i_inf + 1, n),
                                     np.arange(0, i_inf)))
        th_hat = np.empty(n)
        th_hat[self.order[0]] = 0.0
        th = grid.theta[self.order[1:]]
        th_hat[self.order[1:]] = np.where(th > 0, th, th + 2 * np.pi)
        self.theta_hat = th_hat

        # correction kernel for the Behnke-Stein projections: the function
        # Psi = (1/(2 pi i)) (tau/(xi+i)) * J(xi) on sheet 1, where J is the
        # Cauchy transform of the basic cycle over the segment [-i, i].
        self.psi1 = self._psi_sheet1()

    def _psi_sheet1(self):
        params, grid = self.params, self.grid
        k0, K = params.k0, params.K
        k2 = params.modulus ** 2
        n = grid.n
        xi = grid.xi
        fin = self.fin
        J = np.empty(n, dtype=complex)
        xs = xi[fin]
        nz = np.abs(xs) > 0
        x = xs[nz]
        # closed form via Carlson's R_J; pole part handled analytically
        W = (K - elliprj(0.0, 1.0 - k2, 1.0, 1.0 + 1.0 / x ** 2) / (3 * x ** 2)) \
            / (k0 * x ** 2)
        vals = np.empty(len(xs), dtype=complex)
        vals[nz] = 2j * K / k0 + 2 * x * (1 - 1j * x) * W
        # at xi = 0 the contour meets the cycle; use the limit from xi -> 0+
        vals[~nz] = 2j * K / k0 + np.pi / k0
        J[fin] = vals
        J[grid.inf_index] = 0.0
        psi = np.empty(n, dtype=complex)
        psi[fin] = (1.0 / (2j * np.pi)) * (self.rho[fin] / (xi[fin] + 1j)) * J[fin]
        psi[grid.inf_index] = (1.0 / (2j * np.pi)) * (2 * K / k0)
        return psi

    # low-level Fourier splitting -------------------------------------

    def modes(self, v):
        V = np.empty(self.grid.n, dtype=complex)
        V[self.fft_pos] = v
        return np.fft.fft(V) / self.grid.n

    def from_modes(self, c):
        return np.fft.ifft(c * self.grid.n)[self.fft_pos]

    def split(self, v, sign):
        c = self.modes(v)
        keep = self.freqs >= 0 if sign > 0 else self.freqs < 0
        return self.from_modes(np.where(keep, c, 0.0))

    def alias_check(self, v, label=""):
        c = self.modes(v)
        total = np.sum(np.abs(c) ** 2)
        if total == 0:
            return
        top = np.abs(self.freqs) >= (3 * self.grid.n) // 8
        frac = np.sum(np.abs(c[top]) ** 2) / total
        if frac > ALIAS_TOL:
            warnings.warn(
                f"top-quarter spectrum carries {frac:.2e} of the energy {label}",
                AliasWarning, stacklevel=3)


_GEOM_CACHE: dict = {}


def geometry(params: SurfaceParams, grid: GammaGrid) -> _Geometry:
    key = (params.k0, grid.n)
    geom = _GEOM_CACHE.get(key)
    if geom is None:
        geom = _Geometry(params, grid)
        _GEOM_CACHE[key] = geom
    return geom


class BoundaryFunction:
    """A symbol on the contour: paired sample vectors over the shared grid.

    f1 and f2 are the restrictions to the sheet-1 and sheet-2 contours.
    The even/odd decomposition f = f_E + tau f_O is available through
    :attr:`fE` and :attr:`fO`; the weighted odd channel lambda_+^2 f_O used
    by the projections is computed with its analytic infinity limit.
    """

    __slots__ = ("params", "grid", "f1", "f2", "_geom")

    def __init__(self, params, grid, f1, f2):
        self.params = params
        self.grid = grid
        self.f1 = np.asarray(f1, dtype=complex)
        self.f2 = np.asarray(f2, dtype=complex)
        if self.f1.shape != (grid.n,) or self.f2.shape != (grid.n,):
            raise ConfigError("sample vectors must match the grid size")
        self._geom = geometry(params, grid)

    # construction helpers ---------------------------------------------

    @classmethod
    def from_even_odd(cls, params, grid, fE, weighted_fO):
        """Build from the even channel and the weighted odd channel
        h = lambda_+^2 f_O (both sampled on the grid)."""
        geom = geometry(params, grid)
        odd = geom.rho_over_lp2 * np.asarray(weighted_fO, dtype=complex)
        fE = np.asarray(fE, dtype=complex)
        return cls(params, grid, fE + odd, fE - odd)

    @classmethod
    def constant(cls, params, grid, value=1.0):
        v = np.full(grid.n, complex(value))
        return cls(params, grid, v, v.copy())

    # involution and algebra ---------------------------------------------

    def star(self):
        """Composition with the sheet swap (xi, tau) -> (xi, -tau)."""
        return BoundaryFunction(self.params, self.grid, self.f2.copy(), self.f1.copy())

    def restriction(self, sheet):
        return self.f1 if sheet == 1 else self.f2

    @property
    def fE(self):
        return 0.5 * (self.f1 + self.f2)

    @property
    def fO(self):
        """Odd part; at the infinity node the limit of (f1-f2)/(2 rho)."""
        geom = self._geom
        out = np.empty(self.grid.n, dtype=complex)
        fin = geom.fin
        out[fin] = (self.f1[fin] - self.f2[fin]) / (2.0 * geom.rho[fin])
        out[self.grid.inf_index] = 0.0
        return out

    @property
    def weighted_fO(self):
        """lambda_+^2 f_O with its infinity limit (f1-f2)/2."""
        return self._geom.lp2_over_2rho * (self.f1 - self.f2)

    def __mul__(self, other):
        if isinstance(other, BoundaryFunction):
            return BoundaryFunction(self.params, self.grid,
                                    self.f1 * other.f1, self.f2 * other.f2)
        return BoundaryFunction(self.params, self.grid,
                                self.f1 * other, self.f2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, BoundaryFunction):
            return BoundaryFunction(self.params, self.grid,
                                    self.f1 / other.f1, self.f2 / other.f2)
        return BoundaryFunction(self.params, self.grid,
                                self.f1 / other, self.f2 / other)

    def __pow__(self, k):
        return BoundaryFunction(self.params, self.grid, self.f1 ** k, self.f2 ** k)

    def __sub__(self, other):
        return BoundaryFunction(self.params, self.grid,
                                self.f1 - other.f1, self.f2 - other.f2)

    def exp(self):
        return BoundaryFunction(self.params, self.grid,
                                np.exp(self.f1), np.exp(self.f2))

    def max_abs(self):
        return float(max(np.max(np.abs(self.f1)), np.max(np.abs(self.f2))))

    def min_abs(self):
        return float(min(np.min(np.abs(self.f1)), np.min(np.abs(self.f2))))


def decompose(f: BoundaryFunction):
    """Even/odd parts (f_E, f_O) of a boundary function."""
    return f.fE, f.fO


def riesz_project(params, grid, h, sign):
    """Half-line Cauchy projection P^{pm}_R of samples on the real line.

    Transported to the circle, the conjugated projections split at the
    constant mode: the plus projection keeps modes >= 0 after the
    lambda_+ weighting, which makes P^-(1/(xi+i)) = 0 and P^- exact on
    functions analytic below the line and vanishing at -i.
    """
    geom = geometry(params, grid)
    h = np.asarray(h, dtype=complex)
    geom.alias_check(h, "(riesz_project)")
    lam = grid.xi + 1j
    fin = geom.fin
    hw = np.empty(grid.n, dtype=complex)
    hw[fin] = h[fin] / lam[fin]
    hw[grid.inf_index] = 0.0
    out = geom.split(hw, sign)
    res = np.empty(grid.n, dtype=complex)
    res[fin] = out[fin] * lam[fin]
    # value at infinity: lambda_+ * (split h/lambda_+) -> finite only through
    # the mode structure; recover it from the split of h itself
    res[grid.inf_index] = geom.split(h, sign)[grid.inf_index]
    return res


def project_gamma(f: BoundaryFunction, sign):
    """Two-sheet Cauchy projection, assembled channel-wise."""
    geom = f._geom
    fE = f.fE
    h = f.weighted_fO
    geom.alias_check(fE, "(even channel)")
    geom.alias_check(h, "(odd channel)")
    pe = geom.split(fE, sign)
    ph = geom.split(h, sign)
    odd = geom.rho_over_lp2 * ph
    return BoundaryFunction(f.params, f.grid, pe + odd, pe - odd)


def alpha_functional(f: BoundaryFunction):
    """The residue functional alpha_f = (k0 / 4Ki) * integral of f/tau.

    Collapses to the odd part: (k0 / 2Ki) * integral of f_O over the line.
    Nonzero alpha_f is exactly the obstruction to the minus projection
    being pole-free at the branch point -i.
    """
    geom = f._geom
    params = f.params
    vals = geom.opx2_over_rho * (f.f1 - f.f2) * 0.5
    total = (np.pi / f.grid.n) * np.sum(vals)
    return complex(params.k0 / (2.0 * params.K * 1j) * total)


def project_gamma_tilde(f: BoundaryFunction, sign):
    """Behnke-Stein projections: the plain projection corrected by the
    cycle kernel so the result extends analytically off the basic cycle.

    Returns ``(projected, jump)`` where ``jump`` is alpha_f, the jump of
    the analytic extension across the cycle over [-i, i].
    """
    al = alpha_functional(f)
    g = project_gamma(f, sign)
    geom = f._geom
    s = -1.0 if sign > 0 else 1.0
    corr = s * al * geom.psi1
    return BoundaryFunction(f.params, f.grid, g.f1 + corr, g.f2 - corr), al


def _continuous_log(f: BoundaryFunction, sheet, invert_tol=INVERT_TOL):
    """Log samples continuous along the curve (wraparound jump at the
    infinity node) and the winding index.  Raises if |f| dips too low or
    the grid cannot resolve the phase."""
    geom = f._geom
    v = f.restriction(sheet)[geom.order]
    amax, amin = np.max(np.abs(v)), np.min(np.abs(v))
    if amin <= invert_tol * amax:
        raise NotInvertibleError(
            f"sheet {sheet} samples dip to {amin:.2e} (max {amax:.2e})")
    ang = np.angle(v)
    steps = np.diff(ang)
    steps -= 2 * np.pi * np.round(steps / (2 * np.pi))
    if np.max(np.abs(steps)) >= np.pi * (1 - 1e-9):
        raise ResolutionError("phase step >= pi between adjacent nodes; refine the grid")
    ph = np.concatenate(([ang[0]], ang[0] + np.cumsum(steps)))
    wrap = np.angle(v[0] * np.exp(-1j * ph[-1]))
    ind = int(round((ph[-1] + wrap - ph[0]) / (2 * np.pi)))
    out = np.empty(f.grid.n, dtype=complex)
    out[geom.order] = np.log(np.abs(v)) + 1j * ph
    return out, ind


def winding_index(f: BoundaryFunction, sheet, invert_tol=INVERT_TOL):
    """Winding of the argument of f along one sheet contour."""
    _, ind = _continuous_log(f, sheet, invert_tol)
    return ind


def continuous_log(f: BoundaryFunction, m_shift=0):
    """Per-sheet continuous logarithm as a BoundaryFunction.

    Requires winding zero on both sheets.  ``m_shift`` subtracts 2 pi i m
    from the sheet-1 branch, the lattice-decomposition offset that makes
    the invariant land on the real period axis.
    """
    L1, i1 = _continuous_log(f, 1)
    L2, i2 = _continuous_log(f, 2)
    if i1 != 0 or i2 != 0:
        raise SheetIndexError(f"winding indices ({i1}, {i2}) nonzero; no continuous log")
    return BoundaryFunction(f.params, f.grid, L1 - 2j * np.pi * m_shift, L2)


def log_moment(f: BoundaryFunction):
    """The invariant (k0/2pi) * integral of log f / tau, allowing nonzero
    sheet windings (branch continuous off the infinity node).

    Returns (beta_raw, ind1, ind2).  The winding part is integrated
    analytically: subtracting i*ind*theta_hat makes the integrand smooth
    and periodic, and the subtracted ramp contributes i*ind*K' exactly.
    """
    geom = f._geom
    params = f.params
    L1, i1 = _continuous_log(f, 1)
    L2, i2 = _continuous_log(f, 2)
    u1 = (L1 - 1j * i1 * geom.theta_hat) * geom.opx2_over_rho
    u2 = (L2 - 1j * i2 * geom.theta_hat) * geom.opx2_over_rho
    sp = (np.pi / f.grid.n) * (np.sum(u1) - np.sum(u2))
    beta = params.k0 / (2 * np.pi) * sp + 1j * params.Kp * (i1 - i2)
    return complex(beta), i1, i2


def beta_invariant(f: BoundaryFunction, strict=True):
    """Torus invariant beta_f with a continuous log on each sheet.

    Returns ``(beta_raw, beta_tilde)``; with ``strict`` the sheet windings
    must vanish, otherwise the extended branch convention of
    :func:`log_moment` applies.
    """
    beta, i1, i2 = log_moment(f)
    if strict and (i1 != 0 or i2 != 0):
        raise SheetIndexError(
            f"beta invariant needs winding (0, 0); got ({i1}, {i2})")
    return beta, lattice_reduce(f.params, beta)


def channel_modes(f: BoundaryFunction):
    """Fourier coefficients of the even and weighted-odd channels."""
    geom = f._geom
    return geom.modes(f.fE), geom.modes(f.weighted_fO), geom.freqs


def analyticity_defects(f: BoundaryFunction):
    """Relative off-side spectral energy of a boundary function.

    Returns ``(plus_defect, minus_defect)``: the fraction of channel energy
    violating upper-half (plus) or lower-half (minus) analyticity.  The
    minus test flags weighted-odd modes >= -1, so a simple pole at the
    branch point -i counts as a defect.
    """
    cE, cH, freqs = channel_modes(f)
    tot = np.sum(np.abs(cE) ** 2) + np.sum(np.abs(cH) ** 2)
    if tot == 0:
        return 0.0, 0.0
    plus_bad = np.sum(np.abs(cE[freqs < 0]) ** 2) + np.sum(np.abs(cH[freqs < 0]) ** 2)
    minus_bad = np.sum(np.abs(cE[freqs > 0]) ** 2) + np.sum(np.abs(cH[freqs >= -1]) ** 2)
    return float(np.sqrt(plus_bad / tot)), float(np.sqrt(minus_bad / tot))


def cauchy_interior(f: BoundaryFunction, xi, tau, sign):
    """Diagnostic interior value of the Cauchy-type projection at a point
    off the contour, by plain Gauss-panel quadrature of the defining
    kernel.  Not spectrally accurate; intended for spot checks only."""
    grid = f.grid
    geom = f._geom
    fin = geom.fin
    xs = grid.xi[fin]
    w = grid.weights[fin] / (1.0 + xs ** 2)  # plain dxi weights
    lam0 = xs + 1j
    first = np.sum(w * ((f.f1[fin] + f.f2[fin]) / lam0) / (xs - xi))
    second = np.sum(w * (lam0 * (f.f1[fin] - f.f2[fin]) / geom.rho[fin]) / (xs - xi))
    pref = 1.0 / (4j * np.pi)
    val = (xi + 1j) * first + (tau / (xi + 1j)) * second
    return (pref if sign > 0 else -pref) * val
