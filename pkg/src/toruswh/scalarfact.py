"""Scalar factorization engine on the two-sheet contour.

Pipeline: sheet windings -> index normalization by the rational carrier
(lambda_-/lambda_+)^ktilde, the divisor block S and the invertible-plus
unit -> torus invariant and its lattice reduction -> root order k and the
rational block r_nu -> outer factors as exponentials of the corrected
projections.  A meromorphic variant trades high-order rational middle
factors for outer factors carrying one simple branch-point pole each.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import blocks
from .contour import (BoundaryFunction, alpha_functional, analyticity_defects,
                      beta_invariant, continuous_log, log_moment,
                      project_gamma_tilde, winding_index)
from .errors import ConditionError, NotInvertibleError
from .surface import Region, classify_region, lattice_decompose, lattice_reduce


class Kind:
    SPECIAL = "special"
    HOLOMORPHIC = "holomorphic"
    MSPECIAL = "m-special"
    MEROMORPHIC = "meromorphic"


@dataclass(frozen=True)
class FactorizationClass:
    """Discrete classification data of a symbol."""

    n1: int
    n2: int
    k_tilde: int
    l: int
    m_exp: int
    beta: complex
    beta_tilde: complex
    k: int
    kind: str
    region: Region
    snap_distance: float = 0.0


@dataclass
class MiddleFactor:
    """Symbolic descriptor of the middle factor and outer attachments.

    The middle factor used for reconstruction is

        alpha_minus^l_att * (lambda_-/lambda_+)^k_tilde * r_nu^k * S^S_pow,

    while ``aplus_in_plus`` records an alpha_plus unit and
    ``aplus_unit_pow`` powers of the invertible unit
    alpha_+^{-1}(alpha_+)_* that live inside the plus outer factor.
    """

    k: int = 0
    nu: complex = 0.0
    z0: complex = 0.0
    beta_nu: complex = 0.0
    k_tilde: int = 0
    S_pow: int = 0
    l_att: int = 0
    aplus_in_plus: int = 0
    aplus_unit_pow: int = 0

    def rational_part(self, params, grid):
        """Samples of the rational middle factor (without attachments)."""
        out = BoundaryFunction.constant(params, grid, 1.0)
        if self.k:
            rb, _ = blocks.make_r_nu(params, self.beta_nu)
            out = out * (blocks.eval_on_gamma(rb, grid) ** self.k)
        if self.k_tilde:
            out = out * (blocks.lambda_ratio_boundary(params, grid) ** self.k_tilde)
        if self.S_pow:
            out = out * (blocks.eval_on_gamma(blocks.make_S(params), grid) ** self.S_pow)
        return out

    def full_middle(self, params, grid):
        """Rational part times the minus-side meromorphic attachment."""
        out = self.rational_part(params, grid)
        if self.l_att:
            out = out * (blocks.alpha_minus_boundary(params, grid) ** self.l_att)
        return out


@dataclass
class ScalarFactorization:
    """Outer boundary factors, middle descriptor and diagnostics."""

    f_minus: BoundaryFunction
    f_plus: BoundaryFunction
    middle: MiddleFactor
    residual: float
    cls: FactorizationClass
    provenance: list = field(default_factory=list)

    def reconstruct(self):
        mid = self.middle.full_middle(self.f_minus.params, self.f_minus.grid)
        return self.f_minus * mid * self.f_plus


def _norm_exponents(n1, n2, variant):
    """Index-normalization exponents; the meromorphic variant shifts the
    plus-unit count by one for odd total index."""
    total = n1 + n2
    if total % 2 == 0:
        return total // 2, 0, (n1 - n2) // 2
    if variant == "holomorphic":
        return (total - 1) // 2, 1, (n1 - n2 - 1) // 2
    return (total - 1) // 2, 1, (n1 - n2 + 1) // 2


def _normalized_symbol(f, k_tilde, l, m, minus_unit=False):
    """f * (lambda_-/lambda_+)^{-k_tilde} * (S^l | alpha_-^{-l}) * unit^m."""
    params, grid = f.params, f.grid
    out = f
    if k_tilde:
        out = out * (blocks.lambda_ratio_boundary(params, grid) ** (-k_tilde))
    if l:
        if minus_unit:
            out = out * (blocks.alpha_minus_boundary(params, grid) ** (-l))
        else:
            out = out * (blocks.eval_on_gamma(blocks.make_S(params), grid) ** l)
    if m:
        out = out * (blocks.aplus_unit_boundary(params, grid) ** m)
    return out


def classify(f: BoundaryFunction, tol_lattice=None):
    """Winding indices, normalized invariant and factorization type.

    The symbol is normalized to winding (0, 0) with the rational carrier,
    the divisor block S (odd total index) and the invertible plus unit;
    beta of the normalized symbol determines the root order k and the kind.
    """
    params = f.params
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    n1 = winding_index(f, 1)
    n2 = winding_index(f, 2)
    k_tilde, l, m = _norm_exponents(n1, n2, "holomorphic")
    fn = _normalized_symbol(f, k_tilde, l, m)
    beta, _ = beta_invariant(fn)
    bt = lattice_reduce(params, beta)
    region = classify_region(params, bt, tol_lattice)
    snap = 0.0
    if region is Region.EDGE3:
        snap = float(min(abs(bt.real - 2 * params.K), abs(bt.real + 2 * params.K)))
        bt = complex(2 * params.K, bt.imag)
    if region is Region.ZERO:
        kind = Kind.SPECIAL
    elif min(abs(bt - 2 * params.K), abs(bt + 2 * params.K)) <= tol_lattice:
        kind = Kind.MSPECIAL
    elif abs(bt.real) <= params.K + tol_lattice:
        kind = Kind.HOLOMORPHIC
    else:
        kind = Kind.MEROMORPHIC
    return FactorizationClass(n1=n1, n2=n2, k_tilde=k_tilde, l=l, m_exp=m,
                              beta=beta, beta_tilde=bt, k=region.k, kind=kind,
                              region=region, snap_distance=snap)


def _special_core(f: BoundaryFunction, tol_lattice, context=""):
    """Outer factors of a winding-(0,0) symbol whose invariant sits on the
    period lattice.  Returns (f_minus, f_plus, beta_reduced)."""
    params = f.params
    beta, i1, i2 = log_moment(f)
    if i1 != 0 or i2 != 0:
        raise NotInvertibleError(
            f"special factorization needs winding (0, 0); got ({i1}, {i2}) {context}")
    bt, n_lat, m_lat = lattice_decompose(params, beta)
    if abs(bt) > tol_lattice:
        raise ConditionError(
            f"invariant {beta:.6g} is off the period lattice by {abs(bt):.3e} "
            f"(reduced {bt:.6g}) {context}")
    logf = continuous_log(f, m_shift=m_lat)
    hol_plus, _ = project_gamma_tilde(logf, +1)
    hol_minus, _ = project_gamma_tilde(logf, -1)
    return hol_minus.exp(), hol_plus.exp(), bt


def special_factorization(f: BoundaryFunction, tol_lattice=None):
    """Factorization with trivial middle factor; the invariant must lie on
    the period lattice within tolerance, else ConditionError."""
    params = f.params
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    cls = classify(f, tol_lattice)
    if cls.n1 != 0 or cls.n2 != 0:
        raise NotInvertibleError(
            f"special factorization needs winding (0, 0); got ({cls.n1}, {cls.n2})")
    fm, fp, _ = _special_core(f, tol_lattice)
    fact = ScalarFactorization(fm, fp, MiddleFactor(), 0.0, cls, ["special"])
    fact.residual = _residual(f, fact)
    return fact


def holomorphic_factorization(f: BoundaryFunction, tol_lattice=None):
    """Full pipeline; always succeeds for invertible Hoelder symbols."""
    params, grid = f.params, f.grid
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    cls = classify(f, tol_lattice)
    prov = []
    fn = _normalized_symbol(f, cls.k_tilde, cls.l, cls.m_exp)
    k = cls.k
    mid = MiddleFactor(k_tilde=cls.k_tilde, S_pow=-cls.l,
                       aplus_unit_pow=-cls.m_exp)
    if k == 0:
        g = fn
        prov.append("special-core")
    else:
        beta_nu = cls.beta_tilde / k
        rb, meta = blocks.make_r_nu(params, beta_nu)
        mid.k, mid.nu, mid.z0, mid.beta_nu = k, meta["nu"], meta["z0"], beta_nu
        g = fn / (blocks.eval_on_gamma(rb, grid) ** k)
        prov.append(f"rational-block^{k}")
    fm, fp, _ = _special_core(g, tol_lattice, context="(after root extraction)")
    if cls.m_exp:
        fp = fp * (blocks.aplus_unit_boundary(params, grid) ** (-cls.m_exp))
        prov.append("plus-unit-absorption")
    if cls.l:
        prov.append("divisor-block")
    fact = ScalarFactorization(fm, fp, mid, 0.0, cls, prov)
    fact.residual = _residual(f, fact)
    return fact


def meromorphic_factorization(f: BoundaryFunction, tol_lattice=None):
    """Meromorphic variant: for invariants in the outer half of the
    rectangle the outer factors absorb one branch-point pole each and the
    rational middle factor drops to order at most one."""
    params, grid = f.params, f.grid
    if tol_lattice is None:
        tol_lattice = params.tol_lattice
    n1 = winding_index(f, 1)
    n2 = winding_index(f, 2)
    k_tilde, l, m = _norm_exponents(n1, n2, "meromorphic")
    f0 = _normalized_symbol(f, k_tilde, l, m, minus_unit=True)
    beta0, _ = beta_invariant(f0)
    bt0 = lattice_reduce(params, beta0)
    prov = ["minus-unit-normalization"] if l else []
    K = params.K
    mid = MiddleFactor(k_tilde=k_tilde, l_att=l, aplus_unit_pow=-m)

    if abs(bt0.real) <= K + tol_lattice or abs(bt0) <= tol_lattice:
        # inner rectangle (boundary included): same root structure as the
        # holomorphic pipeline, holomorphic outer factors
        k = classify_region(params, bt0, tol_lattice).k
        g = f0
        if k:
            beta_nu = bt0 / k
            rb, meta = blocks.make_r_nu(params, beta_nu)
            mid.k, mid.nu, mid.z0, mid.beta_nu = k, meta["nu"], meta["z0"], beta_nu
            g = f0 / (blocks.eval_on_gamma(rb, grid) ** k)
            prov.append(f"rational-block^{k}")
        Fm, Fp, _ = _special_core(g, tol_lattice, "(meromorphic, inner)")
        kind = Kind.SPECIAL if k == 0 else Kind.HOLOMORPHIC
    else:
        # outer region: divide both meromorphic units out; the reduced
        # invariant lands back in the inner rectangle with k in {0, 1}
        F = f0 / (blocks.alpha_minus_boundary(params, grid)
                  * blocks.alpha_plus_boundary(params, grid))
        betaF, _ = beta_invariant(F)
        btF = lattice_reduce(params, betaF)
        k = classify_region(params, btF, tol_lattice).k
        if k not in (0, 1):
            raise ConditionError(
                f"reduced invariant {btF:.6g} escaped the inner rectangle")
        g = F
        if k:
            rb, meta = blocks.make_r_nu(params, btF)
            mid.k, mid.nu, mid.z0, mid.beta_nu = k, meta["nu"], meta["z0"], btF
            g = F / blocks.eval_on_gamma(rb, grid)
            prov.append("rational-block^1")
        Fm, Fp, _ = _special_core(g, tol_lattice, "(meromorphic, outer)")
        mid.l_att += 1
        mid.aplus_in_plus = 1
        Fp = blocks.alpha_plus_boundary(params, grid) * Fp
        prov.append("meromorphic-attachments")
        kind = Kind.MSPECIAL if k == 0 else Kind.MEROMORPHIC

    if m:
        Fp = Fp * (blocks.aplus_unit_boundary(params, grid) ** (-m))
        prov.append("plus-unit-absorption")

    cls = FactorizationClass(n1=n1, n2=n2, k_tilde=k_tilde, l=l, m_exp=m,
                             beta=beta0, beta_tilde=bt0, k=mid.k, kind=kind,
                             region=classify_region(params, bt0, tol_lattice))
    fact = ScalarFactorization(Fm, Fp, mid, 0.0, cls, prov)
    fact.residual = _residual(f, fact)
    return fact


def _residual(f, fact):
    rec = fact.reconstruct()
    return float(max(np.max(np.abs(rec.f1 - f.f1)), np.max(np.abs(rec.f2 - f.f2))))


@dataclass
class VerificationReport:
    residual: float
    relative_residual: float
    plus_tail: float
    minus_tail: float
    plus_margin: float
    minus_margin: float
    alpha_minus_factor: complex
    indices: tuple
    passed: bool


def verify_factorization(f: BoundaryFunction, fact: ScalarFactorization,
                         tol_residual=1e-7, tol_tail=1e-7):
    """Reconstruction residual, analyticity tails and invertibility margins.

    Meromorphic attachments and absorbed units are divided out of the plus
    factor before the strict tail test, so the report measures exactly the
    holomorphic content; the minus-side test also flags a residual
    branch-point pole through the weighted odd channel.
    """
    params, grid = f.params, f.grid
    residual = _residual(f, fact)
    scale = max(1.0, f.max_abs())
    fp = fact.f_plus
    fm = fact.f_minus
    if fact.middle.aplus_unit_pow:
        fp = fp / (blocks.aplus_unit_boundary(params, grid)
                   ** fact.middle.aplus_unit_pow)
    if fact.middle.aplus_in_plus:
        fp = fp / (blocks.alpha_plus_boundary(params, grid)
                   ** fact.middle.aplus_in_plus)
    plus_tail = analyticity_defects(fp)[0]
    minus_tail = analyticity_defects(fm)[1]
    alpha_fm = alpha_functional(fm)
    inds = (winding_index(fp, 1), winding_index(fp, 2),
            winding_index(fm, 1), winding_index(fm, 2))
    passed = (residual / scale <= tol_residual and plus_tail <= tol_tail
              and minus_tail <= tol_tail)
    return VerificationReport(
        residual=residual,
        relative_residual=residual / scale,
        plus_tail=plus_tail,
        minus_tail=minus_tail,
        plus_margin=fp.min_abs(),
        minus_margin=fm.min_abs(),
        alpha_minus_factor=alpha_fm,
        indices=inds,
        passed=bool(passed),
    )
