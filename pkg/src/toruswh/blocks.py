"""Closed-form building blocks on the surface: r_nu, alpha_pm, S, q.

Every block knows how to restrict itself to the two sheet contours of a
grid (producing a BoundaryFunction) and, where meaningful, how to evaluate
at individual surface points.  The divisor-defined block S is realized as
a quotient of first Jacobi theta functions in the Abel-Jacobi coordinate,
which is automatically elliptic because its divisor sums to zero exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ellipkinc

from .contour import BoundaryFunction, geometry
from .elliptic import theta1
from .errors import DomainError, InternalError, PoleError, PoleOnContourError
from .surface import SurfaceParams, SurfacePoint, rho_branches, sigma_map


@dataclass(frozen=True)
class RationalSurfaceFunction:
    """(A(xi) + B(xi) tau) / C(xi) with polynomial coefficient lists.

    Coefficients are stored lowest-degree first.  Degrees are tracked so
    the value at the two infinities (tau ~ +-xi^2) is computable.
    """

    params: SurfaceParams
    numA: tuple
    numB: tuple
    den: tuple
    label: str = "rational"

    def _polyval(self, coeffs, x):
        out = np.zeros_like(np.asarray(x, dtype=complex))
        for c in reversed(coeffs):
            out = out * x + c
        return out

    def eval_point(self, P: SurfacePoint):
        if P.at_infinity:
            return self.value_at_infinity(P.sheet)
        x = complex(P.xi)
        den = self._polyval(self.den, x)
        if den == 0:
            raise PoleError(f"{self.label} has a pole at xi={x}")
        return (self._polyval(self.numA, x) + self._polyval(self.numB, x) * P.tau) / den

    def value_at_infinity(self, sheet):
        """Limit along the sheet, using tau ~ s*xi^2 (s = +1 on sheet 1)."""
        s = 1.0 if sheet == 1 else -1.0
        degA = _degree(self.numA)
        degB = _degree(self.numB)
        degC = _degree(self.den)
        top = max(degA, degB + 2)
        if top > degC:
            raise PoleOnContourError(f"{self.label} has a pole at infinity")
        lead = 0.0 + 0.0j
        if degA == top and degA >= 0:
            lead += self.numA[degA]
        if degB + 2 == top and degB >= 0:
            lead += s * self.numB[degB]
        return lead / self.den[degC] if top == degC else 0.0 + 0.0j


def _degree(coeffs):
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i] != 0:
            return i
    return -1


@dataclass(frozen=True)
class ThetaEllipticFunction:
    """Elliptic function given by a degree-zero divisor in lattice
    coordinates, as a theta-function quotient times a normalization."""

    params: SurfaceParams
    zeros: tuple          # (point, multiplicity) in lattice coordinates
    poles: tuple
    normalization: complex = 1.0 + 0.0j

    def __post_init__(self):
        zsum = sum(m * z for z, m in self.zeros) - sum(m * z for z, m in self.poles)
        deg = sum(m for _, m in self.zeros) - sum(m for _, m in self.poles)
        if deg != 0 or abs(zsum) > 1e-12 * self.params.K:
            raise InternalError("divisor must have degree zero and zero sum")

    def raw_quotient(self, z):
        p = self.params
        q = p.nome
        scale = np.pi / (4.0 * p.K)
        z = np.asarray(z, dtype=complex)
        num = np.ones_like(z)
        for z0, m in self.zeros:
            num = num * theta1(scale * (z - z0), q) ** m
        den = np.ones_like(z)
        for z0, m in self.poles:
            den = den * theta1(scale * (z - z0), q) ** m
        return num / den

    def eval_lattice(self, z):
        return self.normalization * self.raw_quotient(z)

    def eval_point(self, P: SurfacePoint, abel=None):
        """Value at a surface point; ``abel`` may supply the precomputed
        lattice coordinate to avoid the path integral."""
        from .surface import abel_jacobi

        z = abel if abel is not None else abel_jacobi(self.params, P)
        return complex(self.eval_lattice(z))


def lattice_coords_on_gamma(params, grid):
    """Abel-Jacobi coordinates of the grid nodes on both sheet contours.

    Sheet 1 runs down the segment [iK', -iK'], sheet 2 up [2K-iK', 2K+iK'];
    both are closed through the infinity node.  In closed form through the
    incomplete elliptic integral of the first kind.
    """
    kp2 = params.cmodulus ** 2
    n = grid.n
    z1 = np.empty(n, dtype=complex)
    fin = grid.finite
    z1[fin] = -1j * ellipkinc(np.arctan(grid.xi[fin]), kp2)
    z1[grid.inf_index] = -1j * params.Kp
    z2 = 2.0 * params.K - z1
    return z1, z2


def make_S(params):
    """The odd-index-fixing block: double zero at sigma(-K/5), simple poles
    at sigma(K) and sigma(-7K/5), normalized to 1 at sigma(iK' + K/3).

    The divisor sums to zero exactly, so the theta quotient is elliptic and
    single-valued; the normalization point is well away from the divisor.
    """
    K = params.K
    raw = ThetaEllipticFunction(
        params,
        zeros=((-K / 5.0, 2),),
        poles=((K, 1), (-7.0 * K / 5.0, 1)),
    )
    anchor = 1j * params.Kp + K / 3.0
    c = 1.0 / raw.raw_quotient(np.array([anchor]))[0]
    return ThetaEllipticFunction(params, raw.zeros, raw.poles, normalization=c)


def make_r_nu(params, beta):
    """Two-zero/two-pole rational block with torus invariant beta.

    beta must lie in the inner rectangle (|Re| < K, Im in (-K', K']) and be
    nonzero.  The zero location is z0 = sigma(-K - beta) (the sign makes
    the log integral of the block equal +beta under the increasing-xi
    orientation of the contour); nu = -tau0/((z0+i)(z0-ik0)), and

        r_nu = nu + tau / ((xi+i)(xi - i k0)).

    Returns ``(block, meta)`` with meta = dict(nu, z0, tau0, beta).
    """
    K, Kp, k0 = params.K, params.Kp, params.k0
    b = complex(beta)
    tol = params.tol_lattice
    if abs(b) <= tol:
        raise DomainError("beta must be nonzero for the rational block")
    if not (abs(b.real) < K + tol and -Kp - tol < b.imag <= Kp + tol):
        raise DomainError(f"beta={b} outside the inner rectangle")
    P0 = sigma_map(params, -K - b)
    z0, tau0 = complex(P0.xi), complex(P0.tau)
    if P0.at_infinity:
        raise DomainError(f"beta={b} degenerates to an infinite zero location")
    if z0.imag >= 1e-12:
        raise InternalError(f"zero location z0={z0} not in the lower half-plane")
    denom = (z0 + 1j) * (z0 - 1j * k0)
    nu = -tau0 / denom
    if abs(nu * nu - 1.0) < 1e-10:
        raise InternalError("nu^2 = 1 is impossible for beta in the inner rectangle")
    # denominator (xi+i)(xi-ik0) = xi^2 + i(1-k0) xi + k0, low degree first
    den = (k0, 1j * (1.0 - k0), 1.0)
    block = RationalSurfaceFunction(
        params,
        numA=tuple(nu * c for c in den),
        numB=(1.0,),
        den=den,
        label="r_nu",
    )
    meta = {"nu": nu, "z0": z0, "tau0": tau0, "beta": b}
    return block, meta


def alpha_plus_boundary(params, grid):
    """Boundary restrictions of the plus meromorphic unit
    C + tau/((xi-i) rho_plus): sheet 1 gives C + rho_minus/(xi-i)."""
    C = np.sqrt((1.0 + params.k0) / 2.0)
    n = grid.n
    fin = grid.finite
    x = grid.xi[fin]
    rm = _rho_minus_real(params, x)
    f1 = np.empty(n, dtype=complex)
    f2 = np.empty(n, dtype=complex)
    f1[fin] = C + rm / (x - 1j)
    f2[fin] = C - rm / (x - 1j)
    f1[grid.inf_index] = C + 1.0
    f2[grid.inf_index] = C - 1.0
    return BoundaryFunction(params, grid, f1, f2)


def alpha_minus_boundary(params, grid):
    """Boundary restrictions of the minus meromorphic unit
    C + tau/((xi+i) rho_minus): sheet 1 gives C + rho_plus/(xi+i)."""
    C = np.sqrt((1.0 + params.k0) / 2.0)
    n = grid.n
    fin = grid.finite
    x = grid.xi[fin]
    rp = _rho_plus_real(params, x)
    f1 = np.empty(n, dtype=complex)
    f2 = np.empty(n, dtype=complex)
    f1[fin] = C + rp / (x + 1j)
    f2[fin] = C - rp / (x + 1j)
    f1[grid.inf_index] = C + 1.0
    f2[grid.inf_index] = C - 1.0
    return BoundaryFunction(params, grid, f1, f2)


def _rho_minus_real(params, x):
    k0 = params.k0
    mid = 1j * (1.0 + k0) / 2.0
    d = 1j * (k0 - 1.0) / 2.0
    w = x - mid
    return w * np.sqrt(1.0 - (d / w) ** 2)


def _rho_plus_real(params, x):
    k0 = params.k0
    mid = -1j * (1.0 + k0) / 2.0
    d = -1j * (k0 - 1.0) / 2.0
    w = x - mid
    return w * np.sqrt(1.0 - (d / w) ** 2)


def alpha_pm(params, sign):
    """Evaluable plus/minus meromorphic unit on the surface minus one
    branch point.  Returns an object with eval_point and boundary(grid)."""
    return _AlphaUnit(params, +1 if sign in (1, "+", "plus") else -1)


@dataclass(frozen=True)
class _AlphaUnit:
    params: SurfaceParams
    sign: int

    @property
    def C(self):
        return np.sqrt((1.0 + self.params.k0) / 2.0)

    def eval_point(self, P: SurfacePoint):
        if P.at_infinity:
            return self.C + (1.0 if P.sheet == 1 else -1.0)
        xi = complex(P.xi)
        pole = 1j if self.sign > 0 else -1j
        if abs(xi - pole) < 1e-12:
            raise PoleError(f"alpha_{'+' if self.sign > 0 else '-'} has its pole at {pole}")
        _, rp, rm = rho_branches(self.params, xi)
        if self.sign > 0:
            return self.C + P.tau / ((xi - 1j) * rp)
        return self.C + P.tau / ((xi + 1j) * rm)

    def boundary(self, grid):
        if self.sign > 0:
            return alpha_plus_boundary(self.params, grid)
        return alpha_minus_boundary(self.params, grid)


def lambda_ratio_boundary(params, grid):
    """(xi - i)/(xi + i) on both sheets (the classical index carrier)."""
    n = grid.n
    fin = grid.finite
    v = np.empty(n, dtype=complex)
    v[fin] = (grid.xi[fin] - 1j) / (grid.xi[fin] + 1j)
    v[grid.inf_index] = 1.0
    return BoundaryFunction(params, grid, v, v.copy())


def q_ratio(params):
    """q = (xi+i)(xi+ik0) / ((xi-i)(xi-ik0)) as a rational block."""
    k0 = params.k0
    return RationalSurfaceFunction(
        params,
        numA=(-k0, 1j * (1 + k0), 1.0),
        numB=(),
        den=(-k0, -1j * (1 + k0), 1.0),
        label="q",
    )


def aplus_unit_boundary(params, grid):
    """The invertible-plus unit alpha_+^{-1} (alpha_+)_* with sheet
    windings (-1, +1); its log integral sits at 2K on the torus."""
    ap = alpha_plus_boundary(params, grid)
    return ap.star() / ap


def eval_on_gamma(fn, grid):
    """Sample a surface function on both sheet contours.

    Supports RationalSurfaceFunction, ThetaEllipticFunction and the alpha
    units.  The infinity node is evaluated in the reciprocal chart.
    """
    if isinstance(fn, RationalSurfaceFunction):
        return _rational_on_gamma(fn, grid)
    if isinstance(fn, ThetaEllipticFunction):
        return _theta_on_gamma(fn, grid)
    if isinstance(fn, _AlphaUnit):
        return fn.boundary(grid)
    raise TypeError(f"cannot sample object of type {type(fn)!r}")


def _rational_on_gamma(fn: RationalSurfaceFunction, grid):
    params = fn.params
    geom = geometry(params, grid)
    fin = grid.finite
    x = grid.xi[fin]
    A = fn._polyval(fn.numA, x)
    B = fn._polyval(fn.numB, x) if fn.numB else np.zeros_like(x, dtype=complex)
    Cv = fn._polyval(fn.den, x)
    if np.min(np.abs(Cv)) < 1e-12 * max(1.0, np.max(np.abs(Cv))):
        raise PoleOnContourError(f"{fn.label} has a pole on the contour")
    rho = geom.rho[fin]
    n = grid.n
    f1 = np.empty(n, dtype=complex)
    f2 = np.empty(n, dtype=complex)
    f1[fin] = (A + B * rho) / Cv
    f2[fin] = (A - B * rho) / Cv
    f1[grid.inf_index] = fn.value_at_infinity(1)
    f2[grid.inf_index] = fn.value_at_infinity(2)
    return BoundaryFunction(params, grid, f1, f2)


def _theta_on_gamma(fn: ThetaEllipticFunction, grid):
    params = fn.params
    z1, z2 = lattice_coords_on_gamma(params, grid)
    return BoundaryFunction(params, grid,
                            fn.eval_lattice(z1), fn.eval_lattice(z2))
