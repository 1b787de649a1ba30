"""Concomitants, fundamental invariants and the ternary-cubic invariants.

Everything here is driven by transvectants of the ground form f with the
pairing forms P_alpha = sum xi_i x_i, P_beta = sum eta_j y_j and
P_gamma = sum zeta_k z_k.  The degree-6/9/12 invariants are full
contractions of those concomitants; their normalization constants are not
trusted from any printed source but fixed once by an exact calibration
against the closed normal-form formulas, and recorded in a machine
readable report (see `calibration`).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import NamedTuple

import numpy as np

from .cyclotomic import EPS, EPS_COMPLEX, Cyclo
from .poly_engine import (
    PERMS3,
    MultiPoly,
    VariableRef,
    group_catalog,
    make_catalog,
    transvectant,
)
from .qutrit_state import (
    ParameterTriple,
    State,
    normal_form_amplitudes,
    slice_cubic,
    trilinear_form,
)

_PAIRS = {"alpha": ("x", "xi"), "beta": ("y", "eta"), "gamma": ("z", "zeta")}
FULL_CATALOG = group_catalog(("x", "y", "z", "xi", "eta", "zeta"))


class CalibrationError(RuntimeError):
    """A fitted constant failed to be constant across calibration inputs."""


class InvariantSet(NamedTuple):
    """Values of the fundamental invariants of one state."""

    i6: complex
    i9: complex
    i12: complex
    i18: complex
    delta: complex


class AronholdPair(NamedTuple):
    """Degree-4 and degree-6 invariants of a ternary cubic."""

    s: complex
    t: complex


class CValues(NamedTuple):
    """Closed-form invariant values of the normal form with parameters (u,v,w)."""

    c6: complex
    c9: complex
    c12: complex
    c18: complex
    c12_prime: complex


@dataclass(frozen=True)
class ConcomitantBundle:
    """The named concomitants of one state, as polynomials in the six groups."""

    f: MultiPoly
    p_alpha: MultiPoly
    p_beta: MultiPoly
    p_gamma: MultiPoly
    q_alpha: MultiPoly
    q_beta: MultiPoly
    q_gamma: MultiPoly
    b_alpha: MultiPoly
    b_beta: MultiPoly
    b_gamma: MultiPoly
    c_alpha_beta: MultiPoly
    c_beta_alpha: MultiPoly
    c_alpha_gamma: MultiPoly
    c_gamma_alpha: MultiPoly
    c_beta_gamma: MultiPoly
    c_gamma_beta: MultiPoly
    d_alpha: MultiPoly
    d_beta: MultiPoly
    d_gamma: MultiPoly
    e_alpha: MultiPoly
    e_beta: MultiPoly
    e_gamma: MultiPoly
    g_alpha: MultiPoly
    g_beta: MultiPoly
    g_gamma: MultiPoly
    h: MultiPoly

    def as_dict(self):
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def pairing_form(name: str, exact: bool = False) -> MultiPoly:
    """P_alpha / P_beta / P_gamma: the pairing of a covariant group with its dual."""
    cov, con = _PAIRS[name]
    catalog = group_catalog((cov, con))
    one = Fraction(1) if exact else 1.0 + 0.0j
    poly = MultiPoly.zero(catalog)
    for i in (1, 2, 3):
        poly = poly + (MultiPoly.variable(VariableRef(cov, i), catalog)
                       * MultiPoly.variable(VariableRef(con, i), catalog)).scale(one)
    return poly


def _is_exact(f: MultiPoly) -> bool:
    for c in f.terms.values():
        return isinstance(c, (int, Fraction, Cyclo))
    return False


def bundle_from_form(f: MultiPoly) -> ConcomitantBundle:
    """All concomitants of a trilinear form, from their transvectant recipes."""
    exact = _is_exact(f)
    pa, pb, pg = (pairing_form(n, exact) for n in ("alpha", "beta", "gamma"))
    cat = make_catalog(set(FULL_CATALOG) | set(f.catalog))
    f_, pa_, pb_, pg_ = (p.with_catalog(cat) for p in (f, pa, pb, pg))

    qa = transvectant(f_, f_, pb_ * pg_, upper=(0, 1, 1))
    qb = transvectant(f_, f_, pa_ * pg_, upper=(1, 0, 1))
    qg = transvectant(f_, f_, pa_ * pb_, upper=(1, 1, 0))

    ba = transvectant(f_, f_, f_, upper=(0, 1, 1))
    bb = transvectant(f_, f_, f_, upper=(1, 0, 1))
    bg = transvectant(f_, f_, f_, upper=(1, 1, 0))

    quarter = Fraction(1, 4)
    cab = transvectant(f_, f_, f_ * pb_, upper=(1, 1, 0)).scale(quarter)
    cba = transvectant(f_, f_, f_ * pa_, upper=(1, 1, 0)).scale(quarter)
    cag = transvectant(f_, f_, f_ * pg_, upper=(1, 0, 1)).scale(quarter)
    cga = transvectant(f_, f_, f_ * pa_, upper=(1, 0, 1)).scale(quarter)
    cbg = transvectant(f_, f_, f_ * pg_, upper=(0, 1, 1)).scale(quarter)
    cgb = transvectant(f_, f_, f_ * pb_, upper=(0, 1, 1)).scale(quarter)

    da = transvectant(f_ * pb_, f_ * pg_, f_, upper=(1, 1, 1)).scale(Fraction(-2))
    db = transvectant(f_ * pa_, f_ * pg_, f_, upper=(1, 1, 1)).scale(Fraction(2))
    dg = transvectant(f_ * pa_, f_ * pb_, f_, upper=(1, 1, 1)).scale(Fraction(-2))

    ea = transvectant(qa, f_, pa_, upper=(1, 0, 0))
    eb = transvectant(qb, f_, pb_, upper=(0, 1, 0))
    eg = transvectant(qg, f_, pg_, upper=(0, 0, 1))

    t38, t516 = Fraction(-3, 8), Fraction(5, 16)
    ga = (transvectant(f_ * pb_, f_ * pg_, f_, upper=(0, 1, 1)).scale(t38)
          + transvectant(f_ * pb_ * pg_, f_, f_, upper=(0, 1, 1)).scale(t516))
    gb = (transvectant(f_ * pa_, f_ * pg_, f_, upper=(1, 0, 1)).scale(t38)
          + transvectant(f_ * pa_ * pg_, f_, f_, upper=(1, 0, 1)).scale(t516))
    gg = (transvectant(f_ * pa_, f_ * pb_, f_, upper=(1, 1, 0)).scale(t38)
          + transvectant(f_ * pa_ * pb_, f_, f_, upper=(1, 1, 0)).scale(t516))

    h = transvectant(f_ * pa_, f_ * pb_, f_ * pg_, upper=(1, 1, 1)).scale(Fraction(1, 2))

    return ConcomitantBundle(
        f=f_, p_alpha=pa_, p_beta=pb_, p_gamma=pg_,
        q_alpha=qa, q_beta=qb, q_gamma=qg,
        b_alpha=ba, b_beta=bb, b_gamma=bg,
        c_alpha_beta=cab, c_beta_alpha=cba, c_alpha_gamma=cag,
        c_gamma_alpha=cga, c_beta_gamma=cbg, c_gamma_beta=cgb,
        d_alpha=da, d_beta=db, d_gamma=dg,
        e_alpha=ea, e_beta=eb, e_gamma=eg,
        g_alpha=ga, g_beta=gb, g_gamma=gg,
        h=h,
    )


def build_concomitants(s: State) -> ConcomitantBundle:
    return bundle_from_form(s.form())


# --- raw (uncalibrated) invariant contractions -----------------------------

def invariant_raws(f: MultiPoly) -> dict:
    """The three fundamental full contractions, before normalization."""
    exact = _is_exact(f)
    cat = make_catalog(set(FULL_CATALOG) | set(f.catalog))
    pa, pb, pg = (pairing_form(n, exact).with_catalog(cat)
                  for n in ("alpha", "beta", "gamma"))
    f = f.with_catalog(cat)
    qa = transvectant(f, f, pb * pg, upper=(0, 1, 1))
    qb = transvectant(f, f, pa * pg, upper=(1, 0, 1))
    ea = transvectant(qa, f, pa, upper=(1, 0, 0))
    eb = transvectant(qb, f, pb, upper=(0, 1, 0))
    ba = transvectant(f, f, f, upper=(0, 1, 1))
    baf = ba * f.with_catalog(ba.catalog)
    return {
        "i6": transvectant(qa, qa, qa, upper=(2, 0, 0), lower=(0, 1, 1)).constant_value(),
        "i9": transvectant(ea, eb, eb, upper=(1, 1, 1), lower=(1, 1, 1)).constant_value(),
        "i12": transvectant(baf, baf, baf, upper=(4, 1, 1)).constant_value(),
    }


# --- closed normal-form formulas -------------------------------------------

def _msym(u, v, w, exps):
    total = 0
    for p in set(permutations(exps)):
        total = total + u ** p[0] * v ** p[1] * w ** p[2]
    return total


def c_formulas(u, v, w) -> CValues:
    """Closed-form invariants of the normal form, scalar-generic (works for
    complex floats and for exact rationals/cyclotomics alike)."""
    psi = u ** 3 + v ** 3 + w ** 3
    phi = u * v * w
    lam = 216 * phi ** 3
    c6 = _msym(u, v, w, (6, 0, 0)) - 10 * _msym(u, v, w, (3, 3, 0))
    c9 = (u ** 3 - v ** 3) * (u ** 3 - w ** 3) * (v ** 3 - w ** 3)
    c12 = (_msym(u, v, w, (12, 0, 0)) + 4 * _msym(u, v, w, (9, 3, 0))
           + 6 * _msym(u, v, w, (6, 6, 0)) + 228 * _msym(u, v, w, (6, 3, 3)))
    c18 = psi ** 6 - Fraction(5, 2) * lam * psi ** 3 - Fraction(1, 8) * lam ** 2
    c12p = c12_prime(u, v, w)
    return CValues(c6, c9, c12, c18, c12p)


def c12_prime(u, v, w):
    """Product of the twelve linear forms u v w (eps^a u + eps^b v + w)."""
    exact = not any(isinstance(t, (complex, float)) for t in (u, v, w))
    eps = EPS if exact else EPS_COMPLEX
    total = u * v * w
    for a in range(3):
        for b in range(3):
            total = total * (eps ** a * u + eps ** b * v + w)
    if isinstance(total, Cyclo) and total.is_rational():
        return total.as_fraction()
    return total


@lru_cache(maxsize=None)
def c_polynomials():
    """C6, C9, C12 as exact polynomials in (u, v, w), stored over the x-group
    variables x1, x2, x3 (the parameter space is three dimensional)."""
    cat = group_catalog(("x",))

    def poly(term_map):
        return MultiPoly(cat, {e: Fraction(c) for e, c in term_map.items()})

    def msym_poly(exps, coeff):
        return {p: Fraction(coeff) for p in set(permutations(exps))}

    c6 = poly({**msym_poly((6, 0, 0), 1), **msym_poly((3, 3, 0), -10)})
    u3 = poly({(3, 0, 0): 1})
    v3 = poly({(0, 3, 0): 1})
    w3 = poly({(0, 0, 3): 1})
    c9 = (u3 - v3) * (u3 - w3) * (v3 - w3)
    c12 = poly({**msym_poly((12, 0, 0), 1), **msym_poly((9, 3, 0), 4),
                **msym_poly((6, 6, 0), 6), **msym_poly((6, 3, 3), 228)})
    return c6, c9, c12


@lru_cache(maxsize=None)
def _jacobian_polynomial() -> MultiPoly:
    """det d(C6,C9,C12)/d(u,v,w) as an exact polynomial."""
    c6, c9, c12 = c_polynomials()
    cols = [[p.diff(VariableRef("x", i)) for i in (1, 2, 3)] for p in (c6, c9, c12)]
    det = None
    for sigma, sign in PERMS3:
        term = cols[0][sigma[0]] * cols[1][sigma[1]] * cols[2][sigma[2]]
        term = term if sign > 0 else -term
        det = term if det is None else det + term
    return det


class JacobianCheck(NamedTuple):
    jacobian: complex
    c12_prime_sq: complex
    ratio: complex | None


def jacobian_check(t: ParameterTriple | tuple) -> JacobianCheck:
    """Jacobian of (C6, C9, C12) at t and its ratio to C12'**2; the ratio is
    None (flagged) on the twelve mirror planes where C12' vanishes."""
    u, v, w = t
    jac_poly = _jacobian_polynomial()
    point = {VariableRef("x", i + 1): val for i, val in enumerate((u, v, w))}
    jac = jac_poly.eval(point)
    c12p = c12_prime(u, v, w)
    c12p_sq = c12p * c12p
    if not c12p_sq:
        return JacobianCheck(jac, c12p_sq, None)
    exact = not any(isinstance(x, (complex, float)) for x in (u, v, w))
    ratio = Fraction(jac) / Fraction(c12p_sq) if exact else jac / c12p_sq
    return JacobianCheck(jac, c12p_sq, ratio)


# --- Aronhold invariants of a ternary cubic ---------------------------------

def _cubic_coeff_map(cubic: MultiPoly) -> dict:
    """Exponent->coefficient map of a cubic in one group; validates shape."""
    groups = {v.group for v in cubic.variables_present()}
    if len(groups) > 1:
        raise ValueError("cubic must involve a single variable group")
    coeffs = {}
    for exps, coeff in cubic.terms.items():
        key = [0, 0, 0]
        tot = 0
        for v, e in zip(cubic.catalog, exps):
            if e:
                key[v.index - 1] += e
                tot += e
        if tot != 3:
            raise ValueError("polynomial is not homogeneous of degree 3")
        key = tuple(key)
        coeffs[key] = coeffs.get(key, 0) + coeff
    return coeffs


def _sym_tensor(coeffs: dict):
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for (e1, e2, e3), val in coeffs.items():
        idx = [0] * e1 + [1] * e2 + [2] * e3
        arrangements = set(permutations(idx))
        share = val / len(arrangements)
        for (i, j, k) in arrangements:
            c[i][j][k] = share
    return c


def _bracket_contract(t1, t2, t3, t4):
    """Full contraction of four symmetric cubic tensors against the bracket
    monomial (123)(124)(134)(234)."""
    total = 0
    for s1, g1 in PERMS3:
        for s2, g2 in PERMS3:
            a = t1[s1[0]][s2[0]]
            b = t2[s1[1]][s2[1]]
            for s3, g3 in PERMS3:
                aa = a[s3[0]]
                if not aa:
                    continue
                c = t3[s1[2]][s3[1]]
                g123 = g1 * g2 * g3
                for s4, g4 in PERMS3:
                    v = aa * b[s4[0]] * c[s4[1]] * t4[s2[2]][s3[2]][s4[2]]
                    if v:
                        total = total + g123 * g4 * v
    return total


def _hessian_coeffs(coeffs: dict) -> dict:
    """Coefficient map of the Hessian cubic det(d^2 F / dx_a dx_b)."""
    h = [[[0] * 3 for _ in range(3)] for _ in range(3)]  # h[a][b][i] x_i
    for e, val in coeffs.items():
        for a in range(3):
            for b in range(3):
                ee = list(e)
                if ee[a] == 0:
                    continue
                fac = ee[a]
                ee[a] -= 1
                if ee[b] == 0:
                    continue
                fac *= ee[b]
                ee[b] -= 1
                h[a][b][ee.index(1)] += val * fac
    out: dict = {}
    for sigma, sign in PERMS3:
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    v = h[0][sigma[0]][i] * h[1][sigma[1]][j] * h[2][sigma[2]][k]
                    if v:
                        key = [0, 0, 0]
                        key[i] += 1
                        key[j] += 1
                        key[k] += 1
                        key = tuple(key)
                        out[key] = out.get(key, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def aronhold_from_coeffs(coeffs: dict) -> AronholdPair:
    cal = calibration()
    c = _sym_tensor(coeffs)
    s_raw = _bracket_contract(c, c, c, c)
    ch = _sym_tensor(_hessian_coeffs(coeffs))
    t_raw = _bracket_contract(c, c, c, ch)
    return AronholdPair(s_raw * cal["aronhold_s_scale"], t_raw * cal["aronhold_t_scale"])


def aronhold(cubic: MultiPoly) -> AronholdPair:
    """Aronhold S and T of a ternary cubic given as a one-group polynomial."""
    return aronhold_from_coeffs(_cubic_coeff_map(cubic))


def discriminant_delta(s_val, t_val):
    """The degree-36 discriminant invariant from a cubic's (S, T)."""
    return calibration()["delta_scale"] * (64 * s_val ** 3 + t_val ** 2)


# --- calibrated invariants ---------------------------------------------------

def invariants(s: State) -> InvariantSet:
    """Fundamental invariants (I6, I9, I12), the derived I18 and the
    discriminant Delta of a state, via transvectants of its form."""
    cal = calibration()
    raws = invariant_raws(s.form())
    i6 = complex(cal["i6_scale"]) * raws["i6"]
    i9 = complex(cal["i9_scale"]) * raws["i9"]
    i12 = complex(cal["i12_scale"]) * raws["i12"]
    i18 = i18_from_fundamentals(i6, i9, i12)
    ar = aronhold(slice_cubic(s, "x"))
    delta = discriminant_delta(ar.s, ar.t)
    return InvariantSet(i6, i9, i12, i18, delta)


def i18_from_fundamentals(i6, i9, i12):
    """I18 as the unique weighted-degree-18 combination of the fundamentals
    matching the normal-form equation system."""
    cal = calibration()
    p, q, r = cal["i18_coeff_i6_cubed"], cal["i18_coeff_i6_i12"], cal["i18_coeff_i9_sq"]
    if isinstance(i6, (complex, float)) or isinstance(i9, (complex, float)) \
            or isinstance(i12, (complex, float)):
        p, q, r = float(p), float(q), float(r)
    return p * i6 ** 3 + q * i6 * i12 + r * i9 ** 2


def invariants_of_triple(u, v, w) -> InvariantSet:
    """InvariantSet of the normal form with parameters (u, v, w), from the
    closed formulas (I18 from the equation system, Delta = C12'**3)."""
    c = c_formulas(u, v, w)
    return InvariantSet(c.c6, c.c9, c.c12, c.c18, c.c12_prime ** 3)


def is_semistable(s: State, tol: float = 1e-8):
    """True iff some fundamental invariant is nonzero at scale; returns the
    (flag, witness-name) pair."""
    inv = invariants(s)
    norm = math.sqrt(s.norm_sq)
    scaled = [
        (abs(inv.i6) ** (1 / 6), "I6"),
        (abs(inv.i9) ** (1 / 9), "I9"),
        (abs(inv.i12) ** (1 / 12), "I12"),
    ]
    best, witness = max(scaled)
    if best > tol * norm:
        return True, witness
    return False, None


def projective_point(s: State, vanish_tol: float = 1e-10):
    """Weighted projective coordinates (I6 : I9 : I12), canonicalized so the
    first nonvanishing invariant equals 1 and the residual root-of-unity
    ambiguity is fixed deterministically.

    An invariant of degree d counts as vanishing when it is below
    vanish_tol * norm**d, the relative accuracy of the contraction; this is
    deliberately looser than the semistability witness rule, which would
    treat numerical noise on a true zero as a nonzero leading invariant.
    """
    inv = invariants(s)
    norm = math.sqrt(s.norm_sq)
    if norm == 0:
        raise ValueError("zero state has no projective invariant point")

    def vanishes(value, degree):
        return abs(value) <= vanish_tol * norm ** degree

    def lex_max(candidates):
        return max(candidates, key=lambda c: (round(c.real, 12), round(c.imag, 12)))

    if not vanishes(inv.i6, 6):
        t9 = inv.i6 ** (-1.5)      # t**9 for t = i6**(-1/6)
        t12 = inv.i6 ** (-2.0)     # t**12
        i9n = inv.i9 * t9
        i9n = lex_max([i9n, -i9n])  # remaining sixth-root ambiguity is a sign
        return (1.0 + 0.0j, i9n, inv.i12 * t12)
    if not vanishes(inv.i9, 9):
        i12n = inv.i12 * inv.i9 ** (-12.0 / 9.0)
        cube = cmath.exp(2j * cmath.pi / 3)
        i12n = lex_max([i12n, i12n * cube, i12n * cube ** 2])
        return (0.0 + 0.0j, 1.0 + 0.0j, i12n)
    if not vanishes(inv.i12, 12):
        return (0.0 + 0.0j, 0.0 + 0.0j, 1.0 + 0.0j)
    raise ValueError("state is not semi-stable: all fundamental invariants vanish")


# --- syzygies ----------------------------------------------------------------

SYZYGY_NAMES = (
    "h + e_alpha - e_gamma + d_beta*p_beta",
    "h + e_beta - e_alpha + d_gamma*p_gamma",
    "h + e_gamma - e_beta + d_alpha*p_alpha",
    "3*c_alpha_beta - b_gamma*p_beta",
    "3*c_beta_alpha - b_gamma*p_alpha",
    "3*c_alpha_gamma - b_beta*p_gamma",
    "3*c_gamma_alpha - b_beta*p_alpha",
    "3*c_beta_gamma - b_alpha*p_gamma",
    "3*c_gamma_beta - b_alpha*p_beta",
    "6*g_alpha - 3*q_alpha*f + b_alpha*p_beta*p_gamma",
    "6*g_beta - 3*q_beta*f + b_beta*p_alpha*p_gamma",
    "6*g_gamma - 3*q_gamma*f + b_gamma*p_alpha*p_beta",
)


def _syzygy_parts(b: ConcomitantBundle):
    return (
        (b.h, b.e_alpha, -b.e_gamma, b.d_beta * b.p_beta),
        (b.h, b.e_beta, -b.e_alpha, b.d_gamma * b.p_gamma),
        (b.h, b.e_gamma, -b.e_beta, b.d_alpha * b.p_alpha),
        (b.c_alpha_beta.scale(Fraction(3)), -(b.b_gamma * b.p_beta)),
        (b.c_beta_alpha.scale(Fraction(3)), -(b.b_gamma * b.p_alpha)),
        (b.c_alpha_gamma.scale(Fraction(3)), -(b.b_beta * b.p_gamma)),
        (b.c_gamma_alpha.scale(Fraction(3)), -(b.b_beta * b.p_alpha)),
        (b.c_beta_gamma.scale(Fraction(3)), -(b.b_alpha * b.p_gamma)),
        (b.c_gamma_beta.scale(Fraction(3)), -(b.b_alpha * b.p_beta)),
        (b.g_alpha.scale(Fraction(6)), -(b.q_alpha * b.f).scale(Fraction(3)),
         b.b_alpha * b.p_beta * b.p_gamma),
        (b.g_beta.scale(Fraction(6)), -(b.q_beta * b.f).scale(Fraction(3)),
         b.b_beta * b.p_alpha * b.p_gamma),
        (b.g_gamma.scale(Fraction(6)), -(b.q_gamma * b.f).scale(Fraction(3)),
         b.b_gamma * b.p_alpha * b.p_beta),
    )


def random_evaluation_point(seed: int) -> dict:
    """Seeded standard-normal complex assignment of all 18 slot-1 variables."""
    rng = np.random.Generator(np.random.PCG64(seed))
    point = {}
    for v in FULL_CATALOG:
        point[v] = complex(rng.standard_normal(), rng.standard_normal())
    return point


def syzygy_residuals(s: State, seed: int = 0, point: dict | None = None):
    """Evaluate all twelve syzygies at one random point of the 18 variables;
    each residual is reported relative to its largest constituent term."""
    bundle = build_concomitants(s)
    if point is None:
        point = random_evaluation_point(seed)
    results = []
    for name, parts in zip(SYZYGY_NAMES, _syzygy_parts(bundle)):
        values = [p.eval(point) for p in parts]
        total = sum(values)
        scale = max(abs(v) for v in values)
        residual = 0.0 if scale == 0 else abs(total) / scale
        results.append((name, residual))
    return results


# --- one-time exact calibration ----------------------------------------------

_CAL_TRIPLES = ((1, 2, 3), (2, 1, 1), (1, -1, 3), (3, 1, -2))


def _fit_constant(pairs, name):
    """pairs: (raw, target) exact values; returns target/raw, constant across
    all pairs with nonzero raw."""
    ratios = {Fraction(t) / Fraction(r) for r, t in pairs if r != 0}
    targets_without_raw = [t for r, t in pairs if r == 0 and t != 0]
    if targets_without_raw or len(ratios) != 1:
        raise CalibrationError(f"constant {name} is not constant: {ratios}")
    return next(iter(ratios))


@lru_cache(maxsize=None)
def calibration() -> dict:
    """Exact one-time calibration of every normalization constant, done on
    rational normal forms and rational Hesse cubics.  Returns a read-only
    dict of Fractions (see `calibration_report` for the JSON form)."""
    data: dict = {}

    raws = []
    targets = []
    for (u, v, w) in _CAL_TRIPLES:
        uf, vf, wf = Fraction(u), Fraction(v), Fraction(w)
        f = trilinear_form(normal_form_amplitudes(uf, vf, wf))
        raws.append(invariant_raws(f))
        targets.append(c_formulas(uf, vf, wf))

    data["i6_scale"] = _fit_constant(
        [(r["i6"], t.c6) for r, t in zip(raws, targets)], "i6_scale")
    data["i9_scale"] = _fit_constant(
        [(r["i9"], t.c9) for r, t in zip(raws, targets)], "i9_scale")
    data["i12_scale"] = _fit_constant(
        [(r["i12"], t.c12) for r, t in zip(raws, targets)], "i12_scale")

    # I18 = p*I6^3 + q*I6*I12 + r*I9^2, solved exactly from three normal forms
    # and verified on the fourth.
    rows = []
    rhs = []
    for r, t in zip(raws, targets):
        i6 = data["i6_scale"] * r["i6"]
        i9 = data["i9_scale"] * r["i9"]
        i12 = data["i12_scale"] * r["i12"]
        rows.append((i6 ** 3, i6 * i12, i9 ** 2))
        rhs.append(Fraction(t.c18))
    p, q, r_ = _solve3(rows[:3], rhs[:3])
    for row, target in zip(rows, rhs):
        if p * row[0] + q * row[1] + r_ * row[2] != target:
            raise CalibrationError("i18 combination failed verification")
    data["i18_coeff_i6_cubed"] = p
    data["i18_coeff_i6_i12"] = q
    data["i18_coeff_i9_sq"] = r_

    # Aronhold scales from exact Hesse cubics -phi*(x^3+y^3+z^3) + psi*xyz,
    # where 6^4 S = -psi(psi^3 + (6 phi)^3) and
    # 6^6 T = (6 phi)^6 + 20 (6 phi)^3 psi^3 - 8 psi^6.
    s_pairs = []
    t_pairs = []
    for (phi, psi) in ((0, 1), (1, 1), (1, 2), (-1, 0), (2, 3)):
        coeffs = {(3, 0, 0): Fraction(-phi), (0, 3, 0): Fraction(-phi),
                  (0, 0, 3): Fraction(-phi), (1, 1, 1): Fraction(psi)}
        c = _sym_tensor(coeffs)
        s_raw = _bracket_contract(c, c, c, c)
        t_raw = _bracket_contract(c, c, c, _sym_tensor(_hessian_coeffs(coeffs)))
        s_target = Fraction(-psi * (psi ** 3 + 216 * phi ** 3), 1296)
        t_target = Fraction(46656 * phi ** 6 + 4320 * phi ** 3 * psi ** 3 - 8 * psi ** 6, 46656)
        s_pairs.append((s_raw, s_target))
        t_pairs.append((t_raw, t_target))
    data["aronhold_s_scale"] = _fit_constant(s_pairs, "aronhold_s_scale")
    data["aronhold_t_scale"] = _fit_constant(t_pairs, "aronhold_t_scale")

    # Discriminant scale: Delta = delta_scale * (64 S^3 + T^2), pinned by
    # Delta = C12'^3 on normal forms.
    d_pairs = []
    for (u, v, w) in _CAL_TRIPLES:
        uf, vf, wf = Fraction(u), Fraction(v), Fraction(w)
        phi = uf * vf * wf
        psi = uf ** 3 + vf ** 3 + wf ** 3
        coeffs = {(3, 0, 0): -phi, (0, 3, 0): -phi, (0, 0, 3): -phi, (1, 1, 1): psi}
        c = _sym_tensor(coeffs)
        s_val = data["aronhold_s_scale"] * _bracket_contract(c, c, c, c)
        t_val = data["aronhold_t_scale"] * _bracket_contract(
            c, c, c, _sym_tensor(_hessian_coeffs(coeffs)))
        disc = 64 * s_val ** 3 + t_val ** 2
        d_pairs.append((disc, Fraction(c12_prime(uf, vf, wf)) ** 3))
    data["delta_scale"] = _fit_constant(d_pairs, "delta_scale")

    # I18 = i18_vs_t_scale * 6^6 T on normal forms (recorded, not used).
    t18_pairs = []
    for (u, v, w), row, target in zip(_CAL_TRIPLES, rows, rhs):
        uf, vf, wf = Fraction(u), Fraction(v), Fraction(w)
        phi, psi = uf * vf * wf, uf ** 3 + vf ** 3 + wf ** 3
        t66 = 46656 * phi ** 6 + 4320 * phi ** 3 * psi ** 3 - 8 * psi ** 6
        t18_pairs.append((t66, target))
    data["i18_vs_66t_scale"] = _fit_constant(t18_pairs, "i18_vs_66t_scale")

    # Jacobian of (C6, C9, C12) over C12'^2 (recorded constant).
    j_pairs = []
    for (u, v, w) in ((1, 2, 3), (2, 1, -3)):
        chk = jacobian_check((Fraction(u), Fraction(v), Fraction(w)))
        j_pairs.append((chk.c12_prime_sq, Fraction(chk.jacobian)))
    data["jacobian_vs_c12_prime_sq"] = _fit_constant(j_pairs, "jacobian_vs_c12_prime_sq")

    # delta identity: a^3 - 3ab + 2c = delta_vs_c9_sq * C9^2.
    dd_pairs = []
    for r, t in zip(raws, targets):
        a, b, c = Fraction(t.c6), Fraction(t.c12), Fraction(t.c18)
        dd_pairs.append((Fraction(t.c9) ** 2, a ** 3 - 3 * a * b + 2 * c))
    data["delta_vs_c9_sq"] = _fit_constant(dd_pairs, "delta_vs_c9_sq")

    # resolution of the I9 contraction variant: (E_a, E_b, E_g) vanishes
    # identically, (E_a, E_b, E_b) carries the invariant.
    data["i9_variant"] = "e_alpha,e_beta,e_beta"
    return data


def _solve3(rows, rhs):
    """Exact 3x3 linear solve by Cramer's rule."""
    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    d = det3(rows)
    if d == 0:
        raise CalibrationError("singular system while fitting i18 combination")
    sols = []
    for col in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][col] = rhs[i]
        sols.append(Fraction(det3(m)) / Fraction(d))
    return tuple(sols)


def calibration_report() -> dict:
    """JSON-ready calibration report: exact constants as fraction strings."""
    report = {}
    for name, value in calibration().items():
        if isinstance(value, Fraction):
            report[name] = str(value)
        else:
            report[name] = value
    return report


def write_calibration_report(path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(calibration_report(), fh, indent=2, sort_keys=True)
        fh.write("\n")
