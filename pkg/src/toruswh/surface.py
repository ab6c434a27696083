"""Geometry of the genus-1 surface tau^2 = (1+xi^2)(k0^2+xi^2).

The surface is a two-sheeted cover of the extended plane with branch cuts
[i, i*k0] and [-i, -i*k0].  Sheet 1 carries tau = rho(xi) with Re rho >= 0,
sheet 2 carries tau = -rho(xi).  The uniformizing map and its inverse are

    sigma(z)  = (i sn(z, k), k0 cn(z, k) dn(z, k)),   k = 1/k0,
    abel_jacobi(P) = (k0/i) * integral from (0, k0) to P of dxi/tau  mod L,

with period lattice L = Z*4K + Z*2iK'.  sigma is evaluated in closed form;
abel_jacobi integrates along a cut-avoiding path, which keeps the two maps
independently testable against each other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .elliptic import complete_K, jacobi_complex, nome
from .errors import BranchCutError, ConvergenceError, DomainError

POINT_TOL = 1e-9


class Region(enum.Enum):
    """Position of a lattice-reduced invariant in the fundamental rectangle."""

    ZERO = 0
    P1 = 1
    INTERIOR2 = 2
    EDGE3 = 3

    @property
    def k(self):
        return self.value if self is not Region.ZERO else 0


@dataclass(frozen=True)
class SurfaceParams:
    """Curve constant and derived elliptic data; immutable and shareable."""

    k0: float
    K: float
    Kp: float

    @property
    def modulus(self):
        return 1.0 / self.k0

    @property
    def cmodulus(self):
        k = self.modulus
        return np.sqrt((1.0 - k) * (1.0 + k))

    @property
    def branch_points(self):
        k0 = self.k0
        return (1j, -1j, 1j * k0, -1j * k0)

    @property
    def lattice_periods(self):
        return (4.0 * self.K, 2j * self.Kp)

    @property
    def nome(self):
        return nome(self.K, self.Kp)

    def p(self, xi):
        """The curve polynomial p(xi) = (1+xi^2)(k0^2+xi^2)."""
        xi = np.asarray(xi, dtype=complex)
        return (1.0 + xi * xi) * (self.k0 ** 2 + xi * xi)

    @property
    def tol_lattice(self):
        return 1e-7 * self.K


@dataclass(frozen=True)
class SurfacePoint:
    """A point (xi, tau) on the surface, or one of the two infinities.

    ``sheet`` is 1, 2 or the string "branch".  Points at infinity are
    flagged; there xi and tau are placeholders and the reciprocal chart
    u = 1/xi is the local parameter.
    """

    xi: complex
    tau: complex
    sheet: object
    at_infinity: bool = field(default=False)

    def involution(self):
        """The hyperelliptic sheet swap (xi, tau) -> (xi, -tau)."""
        if self.sheet == "branch":
            return self
        other = {1: 2, 2: 1}[self.sheet]
        return SurfacePoint(self.xi, -self.tau, other, self.at_infinity)


def make_surface(k0):
    """Build SurfaceParams for curve constant k0 > 1.

    K and K' are computed by the AGM with modulus k = 1/k0 and complementary
    modulus k' = sqrt(1 - 1/k0^2); the construction is deterministic.
    """
    k0 = float(k0)
    if not k0 > 1.0:
        raise DomainError(f"k0 must exceed 1 (branch points collide); got {k0}")
    k = 1.0 / k0
    kp = np.sqrt((1.0 - k) * (1.0 + k))
    return SurfaceParams(k0=k0, K=complete_K(k), Kp=complete_K(kp))


def _sqrt_cut_segment(xi, a, b, value_scale):
    """sqrt((xi-a)(xi-b)) with branch cut exactly on the segment [a, b].

    ``value_scale`` fixes the branch: the returned function behaves like
    value_scale * xi at infinity (value_scale is +1 here; kept explicit for
    clarity of the construction).
    """
    mid = 0.5 * (a + b)
    d = 0.5 * (b - a)
    w = xi - mid
    return value_scale * w * np.sqrt(1.0 - (d / w) ** 2)


def rho_branches(params, xi):
    """(rho, rho_plus, rho_minus) at a point xi off the relevant cuts.

    rho_plus = sqrt((xi+i)(xi+i k0)), analytic off [-i, -i k0], equal to
    i sqrt(k0) at 0; rho_minus = sqrt((xi-i)(xi-i k0)), analytic off
    [i, i k0], equal to -i sqrt(k0) at 0; rho = rho_minus * rho_plus has
    Re rho >= 0 near the reals.
    """
    k0 = params.k0
    xi = complex(xi)
    if xi.real == 0.0:
        t = xi.imag
        if 1.0 < t < k0:
            raise BranchCutError(f"xi={xi} lies inside the upper cut [i, i*k0]")
        if -k0 < t < -1.0:
            raise BranchCutError(f"xi={xi} lies inside the lower cut [-i, -i*k0]")
    rplus = _sqrt_cut_segment(xi, -1j, -1j * k0, 1.0)
    rminus = _sqrt_cut_segment(xi, 1j, 1j * k0, 1.0)
    return rminus * rplus, rplus, rminus


def rho_real(params, xi):
    """rho on the real line: the positive square root of p(xi)."""
    xi = np.asarray(xi, dtype=float)
    return np.sqrt((1.0 + xi * xi) * (params.k0 ** 2 + xi * xi))


def point_on_sheet(params, xi, sheet):
    """SurfacePoint over finite xi with tau chosen by the sheet label."""
    rho, _, _ = rho_branches(params, xi)
    if abs(rho) <= POINT_TOL * (1 + abs(xi) ** 2):
        return SurfacePoint(complex(xi), 0.0 + 0.0j, "branch")
    tau = rho if sheet == 1 else -rho
    return SurfacePoint(complex(xi), complex(tau), sheet)


def infinity_point(sheet):
    """SurfacePoint at infinity on the requested sheet (tau/xi^2 -> +-1)."""
    return SurfacePoint(np.inf, np.inf, sheet, at_infinity=True)


def check_point(params, P, tol=POINT_TOL):
    """Verify tau^2 = p(xi) within tolerance; raise DomainError otherwise."""
    if P.at_infinity:
        return
    err = abs(P.tau ** 2 - params.p(P.xi))
    if err > tol * (1.0 + abs(P.xi) ** 4):
        raise DomainError(f"point ({P.xi}, {P.tau}) is not on the curve (defect {err:.2e})")


def sigma_map(params, z):
    """Inverse Abel-Jacobi map: z in C  ->  point on the surface.

    Closed form through Jacobi elliptic functions with complex argument:
    xi = i sn(z, k), tau = k0 cn(z, k) dn(z, k), k = 1/k0.  Near the poles
    of sn (z = iK' mod L and z = 2K + iK' mod L) the image is a point at
    infinity on sheet 1 or sheet 2 respectively.
    """
    k0 = params.k0
    m = params.modulus ** 2
    zr = lattice_reduce(params, complex(z))
    # pole detection in the reduced rectangle
    for pole, sheet in ((1j * params.Kp, 1), (2 * params.K + 1j * params.Kp, 2)):
        d = zr - pole
        d = lattice_reduce(params, d + 2 * params.K + 1j * params.Kp) \
            - (2 * params.K + 1j * params.Kp)
        if abs(d) < 1e-12 * params.K:
            return infinity_point(sheet)
    sn, cn, dn = jacobi_complex(zr, m)
    xi = 1j * sn
    tau = k0 * cn * dn
    if not np.isfinite(xi) or not np.isfinite(tau):
        raise ConvergenceError(f"sigma_map failed at z={z}")
    if abs(tau) <= 1e-10 * (1 + abs(xi)) ** 2:
        return SurfacePoint(complex(xi), 0.0 + 0.0j, "branch")
    rho, _, _ = _rho_nocut(params, xi)
    sheet = 1 if abs(tau - rho) <= abs(tau + rho) else 2
    return SurfacePoint(complex(xi), complex(tau), sheet)


def _rho_nocut(params, xi):
    """rho branches without the on-cut rejection (continuity from Re xi > 0)."""
    k0 = params.k0
    xi = complex(xi)
    if xi.real == 0.0:
        xi = complex(1e-300, xi.imag) if abs(xi.imag) > 1.0 else xi
    rplus = _sqrt_cut_segment(xi, -1j, -1j * k0, 1.0)
    rminus = _sqrt_cut_segment(xi, 1j, 1j * k0, 1.0)
    return rminus * rplus, rplus, rminus


_GL_NODES, _GL_WEIGHTS = leggauss(24)


def _integrate_segment(params, a, b, tau_start, npanels):
    """Integral of dxi/tau along the straight segment [a, b] with tau
    continued by sign-continuity from tau_start; returns (value, tau_end)."""
    val = 0.0 + 0.0j
    tau_prev = tau_start
    for p in range(npanels):
        lo = a + (b - a) * p / npanels
        hi = a + (b - a) * (p + 1) / npanels
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        xs = mid + half * _GL_NODES
        taus = np.sqrt(params.p(xs))
        # continue the square root sign along the panel
        for i in range(len(xs)):
            if abs(taus[i] - tau_prev) > abs(taus[i] + tau_prev):
                taus[i] = -taus[i]
            tau_prev = taus[i]
        val += half * np.sum(_GL_WEIGHTS / taus)
    return val, tau_prev


def _integrate_to_branch(params, a, bp, tau_start, npanels):
    """Integral of dxi/tau from a to a branch point bp (tau -> 0 endpoint).

    Substitutes xi = bp + (a-bp) s^2 so the inverse-square-root endpoint
    singularity becomes smooth.
    """
    val = 0.0 + 0.0j
    tau_prev = tau_start
    dirv = a - bp
    # integrate s from 1 down to 0; dxi = 2 s dirv ds
    for p in range(npanels):
        s_hi = 1.0 - p / npanels
        s_lo = 1.0 - (p + 1) / npanels
        mid = 0.5 * (s_lo + s_hi)
        half = 0.5 * (s_hi - s_lo)
        ss = mid + half * _GL_NODES[::-1]
        xs = bp + dirv * ss ** 2
        taus = np.sqrt(params.p(xs))
        for i in range(len(xs)):
            if abs(taus[i] - tau_prev) > abs(taus[i] + tau_prev):
                taus[i] = -taus[i]
            tau_prev = taus[i]
        val += -half * np.sum(_GL_WEIGHTS * 2.0 * ss * dirv / taus)
    return val, 0.0 + 0.0j


def abel_jacobi(params, P, path_hint=None):
    """Abel-Jacobi coordinate of a surface point, reduced to the fundamental
    rectangle.

    Numerical path integration of (k0/i) dxi/tau from the base point
    (0, k0) along a piecewise-linear path avoiding the cuts by a margin of
    0.1*min(1, k0-1).  If the continued square root ends on the opposite
    sheet from P, the involution relation A_J(P*) = 2K - A_J(P) mod L is
    applied instead of rerouting.
    """
    k0 = params.k0
    if P.at_infinity:
        z = 1j * params.Kp if P.sheet == 1 else 2 * params.K + 1j * params.Kp
        return lattice_reduce(params, z)
    check_point(params, P)
    target = complex(P.xi)
    margin = 0.1 * min(1.0, k0 - 1.0)

    waypoints = [0.0 + 0.0j]
    if path_hint:
        waypoints.extend(complex(w) for w in path_hint)
    on_axis = abs(target.real) < margin and abs(target.imag) >= 1.0 - margin
    if on_axis and not path_hint:
        # dodge the cut; both side approaches are tried and matched below
        side = margin if target.real >= 0 else -margin
        waypoints.append(side + 0.0j)
        waypoints.append(side + 1j * target.imag)

    is_branch = min(abs(target - b) for b in params.branch_points) < 1e-12

    def run(ws):
        tau_prev = complex(k0)
        total = 0.0 + 0.0j
        pts = ws + [target]
        for a, b in zip(pts[:-1], pts[1:]):
            if a == b:
                continue
            npan = max(4, int(8 * abs(b - a)))
            if b == target and is_branch:
                seg, tau_prev = _integrate_to_branch(params, a, b, tau_prev, npan)
            else:
                seg, tau_prev = _integrate_segment(params, a, b, tau_prev, npan)
            total += seg
        return (k0 / 1j) * total, tau_prev

    z, tau_end = run(waypoints)
    if P.sheet == "branch" or is_branch:
        return lattice_reduce(params, z)
    if abs(tau_end - P.tau) > abs(tau_end + P.tau):
        z = 2.0 * params.K - z
    return lattice_reduce(params, z)


def lattice_reduce(params, beta):
    """Representative of beta modulo L in the half-open fundamental rectangle
    Re in (-2K, 2K], Im in (-K', K']."""
    beta = complex(beta)
    K, Kp = params.K, params.Kp
    nre = np.ceil((beta.real - 2 * K) / (4 * K) - 1e-12)
    mim = np.ceil((beta.imag - Kp) / (2 * Kp) - 1e-12)
    return beta - 4 * K * nre - 2j * Kp * mim


def lattice_decompose(params, beta):
    """Split beta = beta_tilde + 4nK + 2imK' with beta_tilde reduced."""
    bt = lattice_reduce(params, beta)
    delta = complex(beta) - bt
    n = int(round(delta.real / (4 * params.K)))
    m = int(round(delta.imag / (2 * params.Kp)))
    return bt, n, m


def classify_region(params, beta_tilde, tol=None):
    """Region of a reduced invariant: Zero, P1, Interior2 or Edge3.

    Ties at region boundaries resolve toward the lower root order k; the
    2K edge is detected on both wrapped sides of the rectangle.
    """
    if tol is None:
        tol = params.tol_lattice
    bt = complex(beta_tilde)
    K = params.K
    if abs(bt) <= tol:
        return Region.ZERO
    if abs(bt.real) <= K + tol:
        return Region.P1
    if min(abs(bt.real - 2 * K), abs(bt.real + 2 * K)) <= tol:
        return Region.EDGE3
    return Region.INTERIOR2
