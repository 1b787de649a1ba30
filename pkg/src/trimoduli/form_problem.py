"""The form problem: normal-form parameters from invariant values.

Given (a, b, c) = (I6, I12, I18) and optionally the alternating I9, the
parameters (u, v, w) are recovered by a radical chain: a quartic for
psi^2 = (u^3+v^3+w^3)^2, then one cubic per psi-branch whose roots are
{u^3, v^3, w^3}, then cube roots.  Generic inputs give 1296 raw triples of
which the I9 sign selects 648; degenerate strata collapse to 216, 72, 27
or 1 points realizing regular complex polytopes.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import reflection_group

_OMEGA = cmath.exp(2j * cmath.pi / 3)

POLYTOPE_LABELS = {
    648: "generic",
    216: "edges-2{4}3{3}3",
    72: "hessian-edge-centers",
    27: "hessian-vertices",
    1: "origin",
}

CANONICAL_CASES = {
    "hessian-vertices": (12.0, 0.0, 0.0, -2.0),
    "hessian-edge-centers": (1.0, 1.0, 1.0, 0.0),
    "edges-2{4}3{3}3": (1.0, 0.25, -0.125, 0.0),
}


class FormProblemError(ValueError):
    """Inconsistent input data or a failed internal verification."""


@dataclass(frozen=True)
class FormProblemInput:
    a: complex
    b: complex
    c: complex
    i9: complex | None = None
    tol: float = 1e-6


@dataclass(frozen=True)
class PsiBranch:
    psi: complex
    lam: complex
    chi: complex
    e3: complex
    multiplicity: int
    residuals: tuple[float, float, float]


@dataclass
class OrbitClass:
    count: int
    polytope_label: str
    stabilizer_label: str
    stabilizer_order: int
    d_discriminant: complex
    delta: complex
    i9_used: complex
    case_tree_prediction: int | None
    case_tree_agrees: bool


@dataclass
class SolutionSet:
    triples: list[tuple[complex, complex, complex]]
    raw_count: int
    filtered_count: int | None = None
    orbit_class: OrbitClass | None = None
    dropped: int = 0
    branches: list[PsiBranch] = field(default_factory=list)


# --- closed-root solvers ------------------------------------------------------

def solve_quadratic(a, b, c) -> list[complex]:
    """Roots of a x^2 + b x + c, complex coefficients."""
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0:
        if b == 0:
            if c == 0:
                return []
            raise FormProblemError("constant polynomial has no roots")
        return [-c / b]
    sq = cmath.sqrt(b * b - 4 * a * c)
    # pick the branch that avoids cancellation in b +/- sq
    u = b + sq if abs(b + sq) >= abs(b - sq) else b - sq
    if u == 0:  # b == 0 and discriminant == 0
        return [0j, 0j]
    q = -u / 2
    return [q / a, c / q]


def _root_scale(coeffs) -> float:
    """Characteristic root magnitude max_k |a_k/a_n|^(1/(n-k)); keeps the
    closed formulas inside floating-point range for badly scaled inputs."""
    lead = abs(complex(coeffs[0]))
    n = len(coeffs) - 1
    best = 0.0
    for k, c in enumerate(coeffs[1:], start=1):
        mag = abs(complex(c))
        if mag:
            best = max(best, (mag / lead) ** (1.0 / k))
    return best


def solve_cubic_radicals(a3, a2, a1, a0) -> list[complex]:
    """Roots of a cubic by the closed (Cardano) formula; degenerate leading
    coefficients reduce the degree."""
    if a3 == 0:
        return solve_quadratic(a2, a1, a0)
    lam = _root_scale([a3, a2, a1, a0])
    if lam == 0.0:
        return [0j, 0j, 0j]
    if not (0.5 < lam < 2.0):
        scaled = solve_cubic_radicals(1.0, complex(a2) / complex(a3) / lam,
                                      complex(a1) / complex(a3) / lam ** 2,
                                      complex(a0) / complex(a3) / lam ** 3)
        return [lam * r for r in scaled]
    b = complex(a2) / complex(a3)
    c = complex(a1) / complex(a3)
    d = complex(a0) / complex(a3)
    p = c - b * b / 3
    q = 2 * b ** 3 / 27 - b * c / 3 + d
    shift = -b / 3
    if p == 0 and q == 0:
        return [shift, shift, shift]
    disc = q * q + 4 * p ** 3 / 27
    sq = cmath.sqrt(disc)
    u3 = (-q + sq) / 2
    u3_alt = (-q - sq) / 2
    if abs(u3_alt) > abs(u3):
        u3 = u3_alt
    u = u3 ** (1.0 / 3.0)
    roots = []
    for k in range(3):
        uk = u * _OMEGA ** k
        roots.append(uk - p / (3 * uk) + shift)
    return roots


def solve_quartic_radicals(a4, a3, a2, a1, a0) -> list[complex]:
    """Roots of a quartic by the closed (Ferrari) formula; degenerate leading
    coefficients reduce the degree."""
    if a4 == 0:
        return solve_cubic_radicals(a3, a2, a1, a0)
    lam = _root_scale([a4, a3, a2, a1, a0])
    if lam == 0.0:
        return [0j, 0j, 0j, 0j]
    if not (0.5 < lam < 2.0):
        a4c = complex(a4)
        scaled = solve_quartic_radicals(1.0, complex(a3) / a4c / lam,
                                        complex(a2) / a4c / lam ** 2,
                                        complex(a1) / a4c / lam ** 3,
                                        complex(a0) / a4c / lam ** 4)
        return [lam * r for r in scaled]
    b = complex(a3) / complex(a4)
    c = complex(a2) / complex(a4)
    d = complex(a1) / complex(a4)
    e = complex(a0) / complex(a4)
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b ** 3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b ** 4 / 256
    shift = -b / 4
    y0 = max(abs(p) ** 0.5, abs(q) ** (1 / 3), abs(r) ** 0.25)
    if y0 == 0.0:
        return [shift] * 4
    if abs(q) <= 1e-14 * y0 ** 3:
        ys = []
        for z in solve_quadratic(1, p, r):
            s = cmath.sqrt(z)
            ys.extend([s, -s])
        if len(ys) < 4:  # p == r == 0
            ys = [0j] * 4
    else:
        ms = solve_cubic_radicals(8, 8 * p, 2 * p * p - 8 * r, -q * q)
        m = max(ms, key=abs)
        s = cmath.sqrt(2 * m)
        half = p / 2 + m
        ys = (solve_quadratic(1, s, half - q / (2 * s))
              + solve_quadratic(1, -s, half + q / (2 * s)))
    return [y + shift for y in ys]


def _poly_eval(coeffs, x):
    total = 0j
    for c in coeffs:
        total = total * x + complex(c)
    return total


def _poly_derivative(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def companion_roots(coeffs) -> list[complex]:
    """Eigenvalue root-finder (numpy companion matrix); test oracle only."""
    return [complex(r) for r in np.roots([complex(c) for c in coeffs])]


def cluster_roots(roots, coeffs=None, rel_tol: float = 2e-5):
    """Group nearly equal roots into (value, multiplicity) clusters.

    Closed-form solvers split an exact m-fold root into m points spread by
    roughly eps**(1/m); clustering under a relative tolerance restores the
    multiplicity, and the cluster mean is polished by Newton steps on the
    (m-1)-th derivative when the polynomial is supplied.
    """
    if not roots:
        return []
    scale = max(abs(r) for r in roots)
    tol = rel_tol * max(scale, 1e-300)
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        for cl in clusters:
            if abs(r - cl[0] / cl[1]) <= tol:
                cl[0] += r
                cl[1] += 1
                break
        else:
            clusters.append([r, 1])
    out = []
    for total, mult in clusters:
        value = total / mult
        if coeffs is not None and mult > 1:
            value = _refine_multiple_root(coeffs, value, mult)
        out.append((value, mult))
    return out


def _refine_multiple_root(coeffs, x, mult, steps: int = 4):
    """Newton iteration on the (mult-1)-th derivative, where an m-fold root
    of the polynomial is a simple root."""
    d = [complex(c) for c in coeffs]
    for _ in range(mult - 1):
        d = _poly_derivative(d)
    dd = _poly_derivative(d)
    for _ in range(steps):
        denom = _poly_eval(dd, x)
        if denom == 0:
            break
        step = _poly_eval(d, x) / denom
        x = x - step
        if abs(step) < 1e-16 * max(1.0, abs(x)):
            break
    return x


# --- the psi system -----------------------------------------------------------

def _fast_cvalues(u, v, w):
    """(C6, C9, C12, C18) via the symmetric-function forms."""
    u3, v3, w3 = u ** 3, v ** 3, w ** 3
    psi = u3 + v3 + w3
    chi = u3 * v3 + u3 * w3 + v3 * w3
    lam = 216 * u3 * v3 * w3
    c6 = psi * psi - 12 * chi
    c9 = (u3 - v3) * (u3 - w3) * (v3 - w3)
    c12 = psi ** 4 + lam * psi
    c18 = psi ** 6 - 2.5 * lam * psi ** 3 - 0.125 * lam * lam
    return c6, c9, c12, c18


def solve_psi_system(inp: FormProblemInput) -> list[PsiBranch]:
    """All consistent branches (psi, lambda, chi) of the invariant system."""
    a, b, c = complex(inp.a), complex(inp.b), complex(inp.c)
    coeffs = [27.0, 0.0, -18 * b, -8 * c, -b * b]
    roots = solve_quartic_radicals(*coeffs)
    clustered = cluster_roots(roots, coeffs)
    root_scale = max((abs(r) for r, _ in clustered), default=0.0)

    candidates: list[tuple[complex, complex, int]] = []
    for big_psi, mult in clustered:
        if abs(big_psi) <= 1e-9 * max(root_scale, 1e-300) or big_psi == 0:
            # psi = 0 branch: lambda decouples to both square roots of -8c
            lam0 = cmath.sqrt(-8 * c)
            lams = [lam0] if lam0 == 0 else [lam0, -lam0]
            for lam in lams:
                candidates.append((0j, lam, mult))
        else:
            psi0 = cmath.sqrt(big_psi)
            for psi in (psi0, -psi0):
                lam = (b - psi ** 4) / psi
                candidates.append((psi, lam, mult))

    # deduplicate branches (e.g. the double sign on an exactly zero root)
    psi_scale = max((abs(p) for p, _, _ in candidates), default=0.0)
    lam_scale = max((abs(l) for _, l, _ in candidates), default=0.0)
    ptol = 1e-8 * max(psi_scale, 1e-300)
    ltol = 1e-8 * max(lam_scale, 1e-300)
    merged: list[list] = []
    for psi, lam, mult in candidates:
        for entry in merged:
            if abs(psi - entry[0]) <= ptol and abs(lam - entry[1]) <= ltol:
                entry[2] = max(entry[2], mult)
                break
        else:
            merged.append([psi, lam, mult])

    branches = []
    for psi, lam, mult in merged:
        chi = (psi * psi - a) / 12
        res1 = abs(psi * psi - 12 * chi - a) / max(abs(psi) ** 2, 12 * abs(chi), abs(a), 1.0)
        res2 = abs(psi ** 4 + lam * psi - b) / max(abs(psi) ** 4, abs(lam * psi), abs(b), 1.0)
        res3 = (abs(psi ** 6 - 2.5 * lam * psi ** 3 - 0.125 * lam * lam - c)
                / max(abs(psi) ** 6, 2.5 * abs(lam) * abs(psi) ** 3,
                      0.125 * abs(lam) ** 2, abs(c), 1.0))
        if max(res1, res2, res3) <= inp.tol:
            branches.append(PsiBranch(psi, lam, chi, lam / 216, mult, (res1, res2, res3)))
    return branches


def enumerate_triples(branches, inp: FormProblemInput) -> SolutionSet:
    """All (u, v, w) from the branch cubics: orderings of {u^3, v^3, w^3}
    times all cube-root choices, globally deduplicated, each candidate
    verified to reproduce (a, b, c)."""
    a, b, c = complex(inp.a), complex(inp.b), complex(inp.c)
    # characteristic parameter size; relative errors are judged against it
    s = max(abs(a) ** (1 / 6), abs(b) ** (1 / 12), abs(c) ** (1 / 18), 1e-30)
    den6, den12, den18 = max(abs(a), s ** 6), max(abs(b), s ** 12), max(abs(c), s ** 18)
    candidates: list[tuple[complex, complex, complex]] = []
    dropped = 0

    for br in branches:
        coeffs = [1.0, -br.psi, br.chi, -br.lam / 216]
        roots = solve_cubic_radicals(*coeffs)
        clustered = cluster_roots(roots, coeffs)
        cube_scale = max((abs(r) for r, _ in clustered), default=0.0)
        expanded: list[complex] = []
        for r, m in clustered:
            expanded.extend([r] * m)
        choices = []
        for r in expanded:
            if abs(r) <= 1e-9 * max(cube_scale, 1e-300):
                choices.append((0j,))
            else:
                base = r ** (1.0 / 3.0)
                choices.append((base, base * _OMEGA, base * _OMEGA ** 2))
        seen_orders = set()
        for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            order = (expanded[perm[0]], expanded[perm[1]], expanded[perm[2]])
            # repeated roots are identical floats after clustering, so exact
            # values dedup the orderings at any overall scale
            if order in seen_orders:
                continue
            seen_orders.add(order)
            pick = (choices[perm[0]], choices[perm[1]], choices[perm[2]])
            for cu in pick[0]:
                for cv in pick[1]:
                    for cw in pick[2]:
                        c6, _, c12, c18 = _fast_cvalues(cu, cv, cw)
                        if (abs(c6 - a) <= inp.tol * den6
                                and abs(c12 - b) <= inp.tol * den12
                                and abs(c18 - c) <= inp.tol * den18):
                            candidates.append((cu, cv, cw))
                        else:
                            dropped += 1

    triples = _dedup_triples(candidates)
    return SolutionSet(triples=triples, raw_count=len(triples),
                       dropped=dropped, branches=list(branches))


def _dedup_triples(candidates, rel_tol: float = 1e-8):
    if not candidates:
        return []
    pts = np.array(candidates)
    flat = np.column_stack([pts.real, pts.imag])
    if len(candidates) == 1:
        diameter = 0.0
    else:
        lo, hi = flat.min(axis=0), flat.max(axis=0)
        diameter = float(np.linalg.norm(hi - lo))
    tol = rel_tol * max(diameter, 1e-12)

    from scipy.spatial import cKDTree

    tree = cKDTree(flat)
    pairs = tree.query_pairs(tol)
    parent = list(range(len(candidates)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(len(candidates)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        mean = pts[members].mean(axis=0)
        out.append(tuple(complex(z) for z in mean))
    out.sort(key=lambda t: tuple((z.real, z.imag) for z in t))
    return out


def filter_sign(raw: SolutionSet, i9: complex, tol: float = 1e-6) -> SolutionSet:
    """Keep the triples whose alternating invariant matches i9.

    The comparison threshold is tol times the natural degree-9 scale of the
    solution set (with |i9| as a lower bound), so the two sign classes stay
    separated whatever the overall normalization of the input."""
    pt_scale = max((abs(z) for t in raw.triples for z in t), default=0.0)
    threshold = tol * max(abs(i9), pt_scale ** 9, 1e-300)
    kept = []
    for t in raw.triples:
        _, c9, _, _ = _fast_cvalues(*t)
        if abs(c9 - i9) < threshold:
            kept.append(t)
    if not kept:
        raise FormProblemError(
            f"no solutions match the sign datum i9={i9}: inconsistent input")
    return SolutionSet(triples=kept, raw_count=raw.raw_count,
                       filtered_count=len(kept), dropped=raw.dropped,
                       branches=raw.branches)


def infer_i9(inp: FormProblemInput) -> complex:
    """A representative i9 from the identity delta = 432 * I9^2 (either sign
    class gives the same count and classification)."""
    a, b, c = complex(inp.a), complex(inp.b), complex(inp.c)
    delta = a ** 3 - 3 * a * b + 2 * c
    scale = max(abs(a) ** 3, abs(b) ** 1.5, abs(c), 1e-300)
    if abs(delta) <= 1e-10 * scale:
        return 0j
    return cmath.sqrt(delta / 432)


def solve(inp: FormProblemInput) -> SolutionSet:
    """Full radical chain with the sign filter; the i9 datum is inferred from
    delta when absent."""
    branches = solve_psi_system(inp)
    raw = enumerate_triples(branches, inp)
    i9 = inp.i9 if inp.i9 is not None else infer_i9(inp)
    return filter_sign(raw, complex(i9), inp.tol)


def solve_for_triple(t, tol: float = 1e-6) -> SolutionSet:
    """Solve the form problem for the invariants of a known triple."""
    c6, c9, c12, c18 = _fast_cvalues(*(complex(z) for z in t))
    return solve(FormProblemInput(c6, c12, c18, i9=c9, tol=tol))


def _case_tree_prediction(inp: FormProblemInput, i9: complex) -> int | None:
    """The printed case analysis (advisory; enumeration is authoritative)."""
    a, b, c = complex(inp.a), complex(inp.b), complex(inp.c)
    s = max(abs(a) ** (1 / 6), abs(b) ** (1 / 12), abs(c) ** (1 / 18), 1e-30)

    def near(x, y, degree):
        return abs(x - y) <= 1e-9 * s ** degree

    d_val = b ** 2 * (b ** 3 - c ** 2) ** 4
    if not near(d_val, 0, 168):  # deg D = 2*12 + 4*36 = 168
        return 648
    if near(b, 0, 12):
        if not near(c, 0, 18):
            return 648
        return 27 if not near(a, 0, 6) else 1
    # b^3 = c^2 with b != 0
    if not near(i9, 0, 9):
        return 216
    if near(b, a * a / 4, 12) and near(c, -a ** 3 / 8, 18):
        return 216
    if near(b, a * a, 12) and near(c, a ** 3, 18):
        return 72
    return None


def classify(inp: FormProblemInput) -> OrbitClass:
    """Count and label the solution stratum; the enumerated count is
    authoritative, the printed case tree is recorded as advisory, and the
    stabilizer structure is verified on a sample triple."""
    i9 = complex(inp.i9) if inp.i9 is not None else infer_i9(inp)
    sol = solve(FormProblemInput(inp.a, inp.b, inp.c, i9, inp.tol))
    count = sol.filtered_count
    a, b, c = complex(inp.a), complex(inp.b), complex(inp.c)
    d_val = b ** 2 * (b ** 3 - c ** 2) ** 4
    delta = a ** 3 - 3 * a * b + 2 * c
    if count not in POLYTOPE_LABELS:
        raise FormProblemError(
            f"enumerated count {count} is outside the admissible strata")

    group = reflection_group.group_k()
    expected_order = 648 // count
    if count == 1:
        stab = group
    else:
        stab = reflection_group.stabilizer(group, sol.triples[0], tol=1e-6)
    label = reflection_group.stabilizer_type(stab)
    if stab.order != expected_order:
        raise FormProblemError(
            f"stabilizer order {stab.order} does not match 648/count={expected_order}")

    prediction = _case_tree_prediction(inp, i9)
    return OrbitClass(
        count=count,
        polytope_label=POLYTOPE_LABELS[count],
        stabilizer_label=label,
        stabilizer_order=stab.order,
        d_discriminant=d_val,
        delta=delta,
        i9_used=i9,
        case_tree_prediction=prediction,
        case_tree_agrees=(prediction == count) if prediction is not None else False,
    )


def emit_configuration(case: str, scale: complex = 1.0, path=None):
    """Solve the canonical inputs of a polytope case and optionally write the
    points as CSV rows (Re u, Im u, Re v, Im v, Re w, Im w)."""
    if case not in CANONICAL_CASES:
        raise FormProblemError(
            f"unknown case {case!r}; choose from {sorted(CANONICAL_CASES)}")
    a, b, c, i9 = CANONICAL_CASES[case]
    sol = solve(FormProblemInput(a, b, c, i9))
    expected = {"hessian-vertices": 27, "hessian-edge-centers": 72,
                "edges-2{4}3{3}3": 216}[case]
    if sol.filtered_count != expected:
        raise FormProblemError(
            f"{case}: got {sol.filtered_count} points, expected {expected}")

    # certify the points form a single orbit of the symmetry group
    group = reflection_group.group_k()
    orbit_pts = reflection_group.orbit(group, sol.triples[0], mode="float")
    if len(orbit_pts) != expected:
        raise FormProblemError(f"{case}: sample point orbit has {len(orbit_pts)} points")
    dist = set_distance(orbit_pts, sol.triples)
    pt_scale = max(abs(z) for t in sol.triples for z in t)
    if dist > 1e-6 * max(pt_scale, 1e-300):
        raise FormProblemError(f"{case}: solved points do not match the group orbit")

    triples = [tuple(z * complex(scale) for z in t) for t in sol.triples]
    if path is not None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re_u", "im_u", "re_v", "im_v", "re_w", "im_w"])
            for (u, v, w) in triples:
                writer.writerow([f"{q:.17g}" for q in
                                 (u.real, u.imag, v.real, v.imag, w.real, w.imag)])
    return triples


def set_distance(points_a, points_b) -> float:
    """Two-sided max point-to-set distance between triple sets in C^3."""
    from scipy.spatial import cKDTree

    fa = np.array([[z.real for z in t] + [z.imag for z in t] for t in points_a])
    fb = np.array([[z.real for z in t] + [z.imag for z in t] for t in points_b])
    da, _ = cKDTree(fb).query(fa)
    db, _ = cKDTree(fa).query(fb)
    return float(max(da.max(), db.max()))
