"""2x2 layer: symbols in normal form, the surface-symbol isomorphism,
Toeplitz kernels, the closed-form middle-factor table and assembly of
full matrix Wiener-Hopf factorizations.

A matrix symbol in normal form is G = [[alpha, delta], [q delta, alpha]]
with q = p1/p2, p1 = (xi+i)(xi+ik0), p2 = (xi-i)(xi-ik0).  The scalar
surface symbol g = alpha + (tau/p2) delta determines G through the group
isomorphism; scalar factorizations lift entrywise, and the finitely many
rational/algebraic middle factors admit exact closed-form factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import blocks
from .contour import (BoundaryFunction, GammaGrid, geometry, log_moment,
                      winding_index)
from .errors import (DegenerateError, NotInvertibleError, UnsupportedFormError)
from .scalarfact import (Kind, classify, meromorphic_factorization,
                         special_factorization)
from .surface import SurfaceParams, lattice_reduce

DET_TOL = 1e-9


class Mat2:
    """2x2 matrix of samples, shape (2, 2, n)."""

    __slots__ = ("a",)

    def __init__(self, a):
        self.a = np.asarray(a, dtype=complex)

    @classmethod
    def identity(cls, n):
        a = np.zeros((2, 2, n), dtype=complex)
        a[0, 0] = 1.0
        a[1, 1] = 1.0
        return cls(a)

    @classmethod
    def diag(cls, d1, d2):
        d1 = np.asarray(d1, dtype=complex)
        d2 = np.asarray(d2, dtype=complex)
        a = np.zeros((2, 2, len(d1)), dtype=complex)
        a[0, 0] = d1
        a[1, 1] = d2
        return cls(a)

    def __matmul__(self, other):
        return Mat2(np.einsum("ij...,jk...->ik...", self.a, other.a))

    def det(self):
        return self.a[0, 0] * self.a[1, 1] - self.a[0, 1] * self.a[1, 0]

    def inv(self):
        d = self.det()
        out = np.empty_like(self.a)
        out[0, 0] = self.a[1, 1] / d
        out[1, 1] = self.a[0, 0] / d
        out[0, 1] = -self.a[0, 1] / d
        out[1, 0] = -self.a[1, 0] / d
        return Mat2(out)

    def apply(self, v1, v2):
        return (self.a[0, 0] * v1 + self.a[0, 1] * v2,
                self.a[1, 0] * v1 + self.a[1, 1] * v2)

    def max_abs_diff(self, other):
        return float(np.max(np.abs(self.a - other.a)))


@dataclass
class MatrixSymbol:
    """Normal-form symbol: alpha/delta samples on the grid (infinity-node
    entries are the limits along the line)."""

    params: SurfaceParams
    grid: GammaGrid
    alpha: np.ndarray
    delta: np.ndarray
    label: str = "matrix-symbol"

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=complex)
        self.delta = np.asarray(self.delta, dtype=complex)
        det = self.det_samples()
        dmax = np.max(np.abs(det))
        if np.min(np.abs(det)) <= DET_TOL * dmax:
            raise NotInvertibleError(f"{self.label}: det dips below tolerance")

    def _q(self):
        geom = geometry(self.params, self.grid)
        return geom.p1_over_2rho / geom.p2_over_2rho

    def det_samples(self):
        return self.alpha ** 2 - self._q() * self.delta ** 2

    def matrix(self):
        q = self._q()
        a = np.empty((2, 2, self.grid.n), dtype=complex)
        a[0, 0] = self.alpha
        a[0, 1] = self.delta
        a[1, 0] = q * self.delta
        a[1, 1] = self.alpha
        return Mat2(a)

    def det_index(self):
        det = self.det_samples()
        bf = BoundaryFunction(self.params, self.grid, det, det.copy())
        return winding_index(bf, 1)

    @property
    def m_det(self):
        """Determinant index reduced to {0, 1} (normal-form convention)."""
        return self.det_index() % 2


def sigma_symbol(G: MatrixSymbol) -> BoundaryFunction:
    """Scalar surface symbol g = alpha + (tau/p2) delta on both sheets."""
    geom = geometry(G.params, G.grid)
    rho_over_p2 = 1.0 / (2.0 * geom.p2_over_2rho)
    odd = rho_over_p2 * G.delta
    return BoundaryFunction(G.params, G.grid, G.alpha + odd, G.alpha - odd)


def inverse_iso(g: BoundaryFunction, label="lifted") -> MatrixSymbol:
    """Inverse isomorphism: g -> [[g_E, p2 g_O], [p1 g_O, g_E]]."""
    geom = geometry(g.params, g.grid)
    diff = g.f1 - g.f2
    return MatrixSymbol(g.params, g.grid,
                        alpha=g.fE, delta=geom.p2_over_2rho * diff, label=label)


def lift_matrix(g: BoundaryFunction) -> Mat2:
    """The 2x2 lift [[g_E, p2 g_O], [p1 g_O, g_E]] as samples (no
    invertibility check; used for factor matrices)."""
    geom = geometry(g.params, g.grid)
    diff = g.f1 - g.f2
    a = np.empty((2, 2, g.grid.n), dtype=complex)
    a[0, 0] = g.fE
    a[0, 1] = geom.p2_over_2rho * diff
    a[1, 0] = geom.p1_over_2rho * diff
    a[1, 1] = g.fE
    return Mat2(a)


# ----------------------------------------------------------------------
# closed-form middle factors
# ----------------------------------------------------------------------

class _Ctx:
    """Rational/algebraic atoms for the closed-form factors.

    Every atom tends to 1 at infinity, so sampling on a grid sets the
    infinity-node entry to 1 exactly.
    """

    def __init__(self, params, x, inf_mask=None, nu=None, z0=None):
        k0 = params.k0
        self.k0 = k0
        self.nu = complex(nu) if nu is not None else None
        self.z0 = complex(z0) if z0 is not None else None
        self.C = np.sqrt((1.0 + k0) / 2.0)
        x = np.asarray(x, dtype=complex)
        if inf_mask is None:
            inf_mask = np.zeros(x.shape, dtype=bool)
        one = np.ones_like(x)
        xs = np.where(inf_mask, 1.0, x)
        rm = blocks._rho_minus_real(params, xs)
        rp = blocks._rho_plus_real(params, xs)

        def ratio(num, den):
            return np.where(inf_mask, one, num / den)

        self.one = one
        self.zero = np.zeros_like(x)
        self.lr = ratio(xs - 1j, xs + 1j)                  # (xi-i)/(xi+i)
        self.rk = ratio(xs + 1j * k0, xs - 1j * k0)        # (xi+ik0)/(xi-ik0)
        self.qbar = self.lr * self.rk                      # (xi-i)(xi+ik0)/((xi+i)(xi-ik0))
        self.pik0 = ratio(xs + 1j * k0, xs + 1j)           # (xi+ik0)/(xi+i)
        self.mik0 = ratio(xs - 1j, xs - 1j * k0)           # (xi-i)/(xi-ik0)
        self.pok0 = ratio(xs + 1j, xs - 1j * k0)           # (xi+i)/(xi-ik0)
        self.am01 = ratio(rm, xs + 1j)                     # rho_-/(xi+i)
        self.am10 = ratio(xs + 1j * k0, rm)                # (xi+ik0)/rho_-
        self.ap01 = ratio(xs - 1j * k0, rp)                # (xi-ik0)/rho_+
        self.ap10 = ratio(rp, xs - 1j)                     # rho_+/(xi-i)
        self.atm01 = ratio(xs - 1j * k0, rm)               # (xi-ik0)/rho_-
        self.atp10 = ratio(rp, xs + 1j)                    # rho_+/(xi+i)
        if z0 is not None:
            w0 = k0 / self.z0
            self.e1 = ratio(xs - w0, xs - 1j * k0)         # (xi-k0/z0)/(xi-ik0)
            self.e2 = ratio(xs - 1j, xs - self.z0)         # (xi-i)/(xi-z0)
            self.e3 = ratio(xs + 1j, xs - self.z0)         # (xi+i)/(xi-z0)
            self.e4 = 1.0 / self.e3                        # (xi-z0)/(xi+i)
            self.e7 = ratio(xs + 1j, xs - w0)              # (xi+i)/(xi-k0/z0)
            self.e8 = ratio(xs - 1j * k0, xs - self.z0)    # (xi-ik0)/(xi-z0)
            self.e11 = ratio((xs - 1j) * (xs - w0),
                             (xs + 1j) * (xs - 1j * k0))


def _ctx_for_grid(params, grid, nu=None, z0=None):
    mask = ~grid.finite
    return _Ctx(params, np.where(mask, 1.0, grid.xi), mask, nu=nu, z0=z0)


def _mat(entries):
    ((a00, a01), (a10, a11)) = entries
    a = np.empty((2, 2) + np.shape(a00), dtype=complex)
    a[0, 0] = a00
    a[0, 1] = a01
    a[1, 0] = a10
    a[1, 1] = a11
    return Mat2(a)


def _R_matrix(c):
    return _mat(((c.nu * c.one, c.lr), (c.rk, c.nu * c.one)))


def _A_minus_matrix(c):
    return _mat(((c.C * c.one, c.am01), (c.am10, c.C * c.one)))


def _A_plus_matrix(c):
    return _mat(((c.C * c.one, c.ap01), (c.ap10, c.C * c.one)))


def _R_minus(c):
    nu = c.nu
    return _mat(((nu * c.one, c.zero),
                 (c.rk, (1 - nu ** 2) / nu * c.e1)))


def _R_plus(c):
    nu = c.nu
    return _mat(((c.one, (1 / nu) * c.lr),
                 (c.zero, -c.e4)))


def _R0_minus(c):
    return _mat(((c.zero, c.one), (c.mik0, c.zero)))


def _R0_plus(c):
    return _mat(((c.pik0, c.zero), (c.zero, c.one)))


def _Rt_minus(c):
    nu = c.nu
    return _mat(((c.one, c.zero),
                 (nu * c.one, -(nu ** 2 - 1) * c.e1)))


def _Rt_plus(c):
    nu = c.nu
    return _mat(((nu * c.one, c.one), (c.e4, c.zero)))


def _T_plus(c):
    if c.nu == 0:
        return _R0_plus(c)
    return _mat(((c.one, (1 / c.nu) * c.one), (c.zero, -c.e4)))


def _A_tilde_minus(c):
    return _mat(((c.C * c.one, c.atm01), (c.am10, c.C / c.lr)))


def _A_tilde_plus(c):
    return _mat(((c.C * c.one, c.ap01), (c.atp10, c.C * c.lr)))


def _B_minus(c):
    return _mat(((c.C / c.lr, c.atm01), (c.am10, c.C * c.one)))


def _R2_parts(c):
    """Canonical factorization entries of the squared rational block,
    including the two evaluation constants."""
    nu, z0, k0 = c.nu, c.z0, c.k0
    w0 = k0 / z0

    def at(x):
        return nu ** 2 + (x - 1j) * (x + 1j * k0) / ((x + 1j) * (x - 1j * k0))

    B = (1 / nu) * ((w0 - 1j * k0) / (w0 - z0)) * at(w0)
    Bt = -(1 / nu) * (((z0 + 1j) * (z0 - 1j * k0)) / ((z0 - 1j) * (z0 - w0))) * at(z0)
    qb = c.qbar
    r21p = -(1 / (nu ** 2 - 1)) * (c.e3 * c.e7) * (c.e8 * (nu ** 2 + qb) - B * nu)
    r11p = (1 / nu) * c.e2 - (1 / nu) * c.lr * r21p
    r22p = Bt * nu / (nu ** 2 - 1) * c.e3 ** 2
    r12p = (1 / nu) * c.e3 - (1 / nu) * c.lr * r22p
    r11m = B * c.mik0
    r21m = B * nu * c.pok0 - (nu ** 2 - 1) * c.e1
    r12m = (1 / nu) * c.e3 * (nu * Bt * c.e11 + nu ** 2 + qb)
    r22m = c.e3 * (2 * c.rk + Bt * nu * c.e1)
    minus = _mat(((r11m, r12m), (r21m, r22m)))
    plus_named = _mat(((r11p, r12p), (r21p, r22p)))
    rtil_minus = _mat(((B * c.pok0, r12m),
                       (r21m, nu * r12m - (nu ** 2 - 1) * c.e1)))
    return minus, plus_named, rtil_minus, B, Bt


def _Q_pair(c):
    nu = c.nu
    vr = 2j * nu / (1j - c.z0)
    Qm = _mat(((vr * c.one, vr / c.lr - 1.0), (c.one, 1.0 / c.lr)))
    Qp = _mat(((c.e3, c.e3),
               (vr / c.lr - nu * c.e3 / c.lr,
                (vr - nu * c.e3) / c.lr - 1.0)))
    return Qm, Qp, vr


@dataclass
class MiddleWH:
    """Closed-form factorization M = minus * diag((lr)^d1, (lr)^d2) * plus
    of a middle form A_-^s R_nu^t A_+^v."""

    s: int
    t: int
    v: int
    nu: complex
    z0: complex
    minus: Mat2
    d: tuple
    plus: Mat2
    lr: np.ndarray
    provenance: list = field(default_factory=list)

    def d_matrix(self):
        return Mat2.diag(self.lr ** self.d[0], self.lr ** self.d[1])

    def product(self):
        return self.minus @ self.d_matrix() @ self.plus


def middle_matrix(params, grid_or_x, s, t, v, nu=0.0, z0=None):
    """Samples of the middle form A_-^s R_nu^t A_+^v itself."""
    ctx = _ctx_arg(params, grid_or_x, nu, z0)
    n = ctx.one.shape[0]
    out = Mat2.identity(n)
    for _ in range(s):
        out = out @ _A_minus_matrix(ctx)
    for _ in range(t):
        out = out @ _R_matrix(ctx)
    for _ in range(v):
        out = out @ _A_plus_matrix(ctx)
    return out


def _ctx_arg(params, grid_or_x, nu, z0):
    if isinstance(grid_or_x, GammaGrid):
        return _ctx_for_grid(params, grid_or_x, nu=nu, z0=z0)
    return _Ctx(params, np.asarray(grid_or_x, dtype=complex), nu=nu, z0=z0)


def middle_factor_wh(params, grid_or_x, s, t, v, nu=0.0, z0=None):
    """Closed-form Wiener-Hopf factorization of A_-^s R_nu^t A_+^v.

    Supported forms: (s,t,v) in {(0,0,0), (0,1,0), (0,2,0), (1,0,1),
    (1,1,1)} (even determinant index) and {(1,0,0), (1,1,0), (1,2,0),
    (2,0,1), (2,1,1)} (odd).  Factors are sampled on the grid or at the
    given real abscissas; ``d`` holds the partial indices of the diagonal
    middle term.  Degenerate nu = 0 cases fall back to the rational forms
    where one exists; the A_-^2 R_0 A_+ corner has none and raises.
    """
    c = _ctx_arg(params, grid_or_x, nu, z0)
    nu = complex(nu)
    key = (s, t, v)
    n = c.one.shape[0]
    ident = Mat2.identity(n)

    if key == (0, 0, 0):
        return MiddleWH(s, t, v, nu, z0, ident, (0, 0), Mat2.identity(n),
                        c.lr, ["identity"])
    if key == (0, 1, 0):
        if nu != 0:
            return MiddleWH(s, t, v, nu, z0, _R_minus(c), (0, 0), _R_plus(c),
                            c.lr, ["canonical:R_nu"])
        return MiddleWH(s, t, v, nu, z0, _R0_minus(c), (-1, 1), _R0_plus(c),
                        c.lr, ["non-canonical:R_0"])
    if key == (0, 2, 0):
        if nu != 0:
            minus, plus_named, _, _, _ = _R2_parts(c)
            return MiddleWH(s, t, v, nu, z0, minus, (0, 0), plus_named.inv(),
                            c.lr, ["canonical:R_nu^2"])
        return MiddleWH(s, t, v, nu, z0, Mat2.diag(c.mik0, c.mik0), (0, 0),
                        Mat2.diag(c.pik0, c.pik0), c.lr, ["scalar:R_0^2"])
    if key == (1, 0, 1):
        return MiddleWH(s, t, v, nu, z0, _A_tilde_minus(c), (0, 0),
                        _A_tilde_plus(c), c.lr, ["canonical:A_-A_+"])
    if key == (1, 1, 1):
        mi = _A_tilde_minus(c) @ _Rt_minus(c)
        pl = _Rt_plus(c) @ _A_tilde_plus(c)
        return MiddleWH(s, t, v, nu, z0, mi, (0, 0), pl, c.lr,
                        ["canonical:A_-R_nuA_+"])
    if key == (1, 0, 0):
        return MiddleWH(s, t, v, nu, z0, _A_tilde_minus(c), (0, 1),
                        Mat2.identity(n), c.lr, ["non-canonical:A_-"])
    if key == (1, 1, 0):
        Qm, Qp, _ = _Q_pair(c)
        mi = _A_tilde_minus(c) @ _Rt_minus(c) @ Qm
        return MiddleWH(s, t, v, nu, z0, mi, (0, 1), Qp.inv(), c.lr,
                        ["non-canonical:A_-R_nu"])
    if key == (1, 2, 0):
        if nu != 0:
            _, plus_named, rtil_minus, _, _ = _R2_parts(c)
            mi = _A_tilde_minus(c) @ rtil_minus
            return MiddleWH(s, t, v, nu, z0, mi, (1, 0), plus_named.inv(),
                            c.lr, ["non-canonical:A_-R_nu^2"])
        mi = _A_tilde_minus(c) @ Mat2.diag(c.mik0, c.mik0)
        return MiddleWH(s, t, v, nu, z0, mi, (0, 1),
                        Mat2.diag(c.pik0, c.pik0), c.lr,
                        ["non-canonical:A_-R_0^2"])
    if key == (2, 0, 1):
        mi = _A_tilde_minus(c) @ _B_minus(c)
        return MiddleWH(s, t, v, nu, z0, mi, (1, 0), _A_tilde_plus(c), c.lr,
                        ["non-canonical:A_-^2A_+"])
    if key == (2, 1, 1):
        if nu == 0:
            raise DegenerateError(
                "A_-^2 R_0 A_+ has no closed form in the table (nu = 0)")
        mi = _A_tilde_minus(c) @ _B_minus(c) @ _R_minus(c)
        pl = _T_plus(c) @ _A_tilde_plus(c)
        return MiddleWH(s, t, v, nu, z0, mi, (1, 0), pl, c.lr,
                        ["non-canonical:A_-^2R_nuA_+"])
    raise UnsupportedFormError(
        f"middle form A_-^{s} R_nu^{t} A_+^{v} not in the table")


# ----------------------------------------------------------------------
# kernel of the Toeplitz operator
# ----------------------------------------------------------------------

@dataclass
class ToeplitzKernel:
    """Kernel data of the block Toeplitz operator with symbol G."""

    trivial: bool
    reason: str = ""
    phi_plus: tuple = ()
    phi_minus: tuple = ()
    generator: tuple = ()
    g_minus: BoundaryFunction = None
    g_plus: BoundaryFunction = None


def _line_plus_tail(params, grid, values):
    """Relative upper-half-plane spectral energy of a decaying line
    function (membership test for the minus Hardy space)."""
    geom = geometry(params, grid)
    c = geom.modes(np.asarray(values, dtype=complex))
    tot = np.sum(np.abs(c) ** 2)
    if tot == 0:
        return 0.0
    bad = np.sum(np.abs(c[geom.freqs >= 1]) ** 2)
    return float(np.sqrt(bad / tot))


def toeplitz_kernel(G: MatrixSymbol, tol_lattice=None):
    """Kernel basis of the Toeplitz operator, or the trivial certificate.

    For determinant index 1 the kernel is always trivial.  For index 0 the
    kernel is nontrivial exactly when the invariant of the surface symbol
    sits at 2nK + iK' on the torus (n the sheet-1 winding); the basis is
    produced from the factorization g = g_- r_0 g_+.
    """
    params, grid = G.params, G.grid
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    g = sigma_symbol(G)
    m = G.det_index()
    if m % 2 == 1:
        return ToeplitzKernel(True, reason="odd determinant index")
    beta, n1, n2 = log_moment(g)
    target = 2 * n1 * params.K + 1j * params.Kp
    gap = lattice_reduce(params, beta - target)
    if abs(gap) > tol_lattice:
        return ToeplitzKernel(
            True, reason=f"invariant off the kernel locus by {abs(gap):.3e}")
    # normalize the windings away with the invertible plus unit, then the
    # invariant sits at iK' and the factorization has the r_0 middle block
    f = g
    if n1:
        f = g * (blocks.aplus_unit_boundary(params, grid) ** n1)
    fact = meromorphic_factorization(f, tol_lattice)
    if fact.middle.k != 1 or abs(fact.middle.nu) > 1e-8:
        raise NotInvertibleError(
            "kernel factorization did not produce the degenerate rational block")
    g_minus = fact.f_minus * (blocks.alpha_minus_boundary(params, grid)
                              ** fact.middle.l_att)
    g_plus = fact.f_plus
    if n1:
        g_plus = g_plus * (blocks.aplus_unit_boundary(params, grid) ** (-n1))
    # basis vectors from the even/odd channels of the outer factors
    geom = geometry(params, grid)
    gp_inv = BoundaryFunction(params, grid, 1.0 / g_plus.f1, 1.0 / g_plus.f2)
    fin = grid.finite
    x = grid.xi
    rat_pk = np.empty(grid.n, dtype=complex)
    rat_pk[fin] = (x[fin] + 1j) / (x[fin] + 1j * params.k0)
    rat_pk[grid.inf_index] = 1.0
    rat_mk = np.empty(grid.n, dtype=complex)
    rat_mk[fin] = (x[fin] + 1j) / (x[fin] - 1j * params.k0)
    rat_mk[grid.inf_index] = 1.0
    phi_plus = (rat_pk * gp_inv.fE, gp_inv.weighted_fO)
    gm_odd = geom.opx2_over_rho * 0.5 * (g_minus.f1 - g_minus.f2)
    phi_minus = (gm_odd, rat_mk * g_minus.fE)
    lam_inv = np.empty(grid.n, dtype=complex)
    lam_inv[fin] = 1.0 / (x[fin] + 1j)
    lam_inv[grid.inf_index] = 0.0
    generator = (lam_inv * phi_plus[0], lam_inv * phi_plus[1])
    return ToeplitzKernel(False, reason="kernel locus hit",
                          phi_plus=phi_plus, phi_minus=phi_minus,
                          generator=generator, g_minus=g_minus, g_plus=g_plus)


def kernel_image_plus_tail(G: MatrixSymbol, kernel: ToeplitzKernel):
    """Max upper-half-plane tail of the two components of G applied to the
    kernel generator (both must lie in the minus Hardy space)."""
    v1, v2 = G.matrix().apply(*kernel.generator)
    return max(_line_plus_tail(G.params, G.grid, v1),
               _line_plus_tail(G.params, G.grid, v2))


# ----------------------------------------------------------------------
# full matrix factorization
# ----------------------------------------------------------------------

@dataclass
class MatrixFactorization:
    G_minus: Mat2
    D: tuple                  # partial indices (k1, k2)
    G_plus: Mat2
    residual: float
    provenance: list
    middle: MiddleWH = None
    scalar: object = None

    def d_matrix(self, params, grid):
        lr = blocks.lambda_ratio_boundary(params, grid).f1
        return Mat2.diag(lr ** self.D[0], lr ** self.D[1])

    def reconstruct(self, params, grid):
        return self.G_minus @ self.d_matrix(params, grid) @ self.G_plus


def matrix_wh_factorization(G: MatrixSymbol, tol_lattice=None):
    """Assemble G = G_- D G_+ from the scalar factorization of the surface
    symbol and the closed-form middle-factor table.

    Determinant indices outside {0, 1} are normalized away by a rational
    scalar power of (xi-i)/(xi+i) (recorded in provenance); the stripped
    power shifts both partial indices back at the end.
    """
    params, grid = G.params, G.grid
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    prov = []
    g = sigma_symbol(G)
    m_full = G.det_index()
    strip = m_full // 2
    if strip:
        lr = blocks.lambda_ratio_boundary(params, grid)
        g = g * (lr ** (-strip))
        prov.append(f"det-normalization:strip-{strip}")

    fact = meromorphic_factorization(g, tol_lattice)
    mid = fact.middle
    s = mid.l_att
    t = mid.k
    v = mid.aplus_in_plus
    wh = middle_factor_wh(params, grid, s, t, v, nu=mid.nu, z0=mid.z0)
    prov.extend(wh.provenance)

    g_plus_hol = fact.f_plus
    if v:
        g_plus_hol = g_plus_hol / (blocks.alpha_plus_boundary(params, grid) ** v)
    Gm = lift_matrix(fact.f_minus) @ wh.minus
    Gp = wh.plus @ lift_matrix(g_plus_hol)
    shift = mid.k_tilde + strip
    D = (wh.d[0] + shift, wh.d[1] + shift)
    prov.append(f"scalar:{fact.cls.kind}")

    out = MatrixFactorization(Gm, D, Gp, 0.0, prov, middle=wh, scalar=fact)
    rec = out.reconstruct(params, grid)
    out.residual = rec.max_abs_diff(G.matrix())
    return out


def commutative_canonical_test(G: MatrixSymbol, tol_lattice=None):
    """True iff G factors canonically with both factors in the normal-form
    class, i.e. iff the surface symbol has a special factorization.
    Returns ``(flag, factors)``; factors is the lifted pair or None."""
    g = sigma_symbol(G)
    cls = classify(g, tol_lattice)
    if cls.kind != Kind.SPECIAL:
        return False, None
    fact = special_factorization(g, tol_lattice)
    return True, (inverse_iso(fact.f_minus, "canonical-minus"),
                  inverse_iso(fact.f_plus, "canonical-plus"))


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------

def example1_symbol(params, grid, t):
    """The exponential-of-rational-generator family: alpha = cosh(t w),
    delta = sinh(t w) (1+xi^2)(xi-ik0)/(rho (xi+i)), w = rho/(1+xi^2)."""
    geom = geometry(params, grid)
    fin = grid.finite
    x = grid.xi
    n = grid.n
    w = np.empty(n)
    w[fin] = geom.rho[fin] / (1.0 + x[fin] ** 2)
    w[grid.inf_index] = 1.0
    alpha = np.cosh(t * w).astype(complex)
    fac = np.empty(n, dtype=complex)
    fac[fin] = (1.0 + x[fin] ** 2) * (x[fin] - 1j * params.k0) \
        / (geom.rho[fin] * (x[fin] + 1j))
    fac[grid.inf_index] = 1.0
    delta = np.sinh(t * w) * fac
    return MatrixSymbol(params, grid, alpha, delta, label=f"example1(t={t})")


def r_nu_symbol(params, grid, beta):
    """Lift of the rational block with invariant beta."""
    rb, meta = blocks.make_r_nu(params, beta)
    g = blocks.eval_on_gamma(rb, grid)
    G = inverse_iso(g, label="R_nu")
    return G, meta


def r0_symbol(params, grid):
    """Lift of the degenerate rational block (alpha = 0)."""
    fin = grid.finite
    x = grid.xi
    n = grid.n
    delta = np.empty(n, dtype=complex)
    delta[fin] = (x[fin] - 1j) / (x[fin] + 1j)
    delta[grid.inf_index] = 1.0
    return MatrixSymbol(params, grid, np.zeros(n, dtype=complex), delta, label="R_0")


def a_pm_symbol(params, grid, sign):
    """Lift of the plus or minus meromorphic unit."""
    bf = (blocks.alpha_plus_boundary(params, grid) if sign > 0
          else blocks.alpha_minus_boundary(params, grid))
    return inverse_iso(bf, label="A_+" if sign > 0 else "A_-")


def example2_symbol(params, grid):
    """Odd determinant-index preset: the inverse plus unit times a special
    exponential, with sheet windings (0, 1)."""
    ap = blocks.alpha_plus_boundary(params, grid)
    geom = geometry(params, grid)
    fin = grid.finite
    x = grid.xi
    n = grid.n
    c = 4.0 * params.K / params.k0
    e = np.empty(n, dtype=complex)
    e[fin] = np.exp(c * geom.rho[fin] / (1.0 + x[fin] ** 2))
    e[grid.inf_index] = np.exp(c)
    gsp = BoundaryFunction(params, grid, e, 1.0 / e)
    g = gsp / ap
    return inverse_iso(g, label="example2")
