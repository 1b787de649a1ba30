import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trimoduli.cyclotomic import EPS, Cyclo
from trimoduli.poly_engine import (
    FactoredTriple,
    MultiPoly,
    PolyError,
    VariableRef,
    group_catalog,
    make_catalog,
    omega_apply,
    reslot,
    trace_collapse,
    transvectant,
    transvectant_naive,
)
from trimoduli.qutrit_state import normal_form_amplitudes, trilinear_form

X1, X2, X3 = (VariableRef("x", i) for i in (1, 2, 3))
CAT_X = group_catalog(("x",))
CAT_X3 = group_catalog(("x",), slots=(1, 2, 3))


def var(v, catalog, coeff=1):
    return MultiPoly.variable(v, catalog, coeff)


def random_poly(rng, catalog, max_terms=8, max_exp=2, exact=True):
    n = rng.integers(1, max_terms + 1)
    terms = {}
    for _ in range(n):
        exps = tuple(int(e) for e in rng.integers(0, max_exp + 1, size=len(catalog)))
        coeff = int(rng.integers(-5, 6))
        if coeff:
            terms[exps] = Fraction(coeff) if exact else complex(coeff)
    return MultiPoly(catalog, terms)


class TestScalars:
    def test_cyclotomic_defining_relation(self):
        assert EPS * EPS + EPS + 1 == Cyclo(0)
        assert EPS ** 3 == Cyclo(1)

    def test_conversion_is_ring_homomorphism(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = Cyclo(Fraction(int(rng.integers(-9, 10)), 7), Fraction(int(rng.integers(-9, 10)), 5))
            b = Cyclo(Fraction(int(rng.integers(-9, 10)), 3), Fraction(int(rng.integers(-9, 10)), 2))
            assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-12
            assert abs((a + b).to_complex() - (a.to_complex() + b.to_complex())) < 1e-12
        assert abs(EPS.to_complex() - complex(-0.5, 3 ** 0.5 / 2)) < 1e-15

    def test_inverse_and_conjugate(self):
        z = Cyclo(Fraction(2, 3), Fraction(-1, 4))
        assert z * z.inverse() == Cyclo(1)
        assert abs(z.conjugate().to_complex() - z.to_complex().conjugate()) < 1e-15

    @settings(max_examples=60, deadline=None)
    @given(*(st.fractions(min_value=-20, max_value=20) for _ in range(6)))
    def test_field_axioms_hypothesis(self, a1, b1, a2, b2, a3, b3):
        x, y, z = Cyclo(a1, b1), Cyclo(a2, b2), Cyclo(a3, b3)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x and x * y == y * x
        if x:
            assert x * x.inverse() == Cyclo(1)
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()


class TestPolyCore:
    def test_formal_derivative(self):
        p = var(X1, CAT_X) * var(X1, CAT_X) * var(X2, CAT_X)
        assert p.diff(X1) == var(X1, CAT_X).scale(2) * var(X2, CAT_X)

    def test_eval_pairing_at_unit_point(self):
        cat = group_catalog(("x", "xi"))
        p = MultiPoly.zero(cat)
        for i in (1, 2, 3):
            p = p + var(VariableRef("x", i), cat) * var(VariableRef("xi", i), cat)
        point = {VariableRef("x", i): 1 if i == 1 else 0 for i in (1, 2, 3)}
        point.update({VariableRef("xi", i): 1 if i == 1 else 0 for i in (1, 2, 3)})
        assert p.eval(point) == 1

    def test_eval_requires_full_assignment(self):
        p = var(X1, CAT_X)
        with pytest.raises(PolyError):
            p.eval({})

    def test_catalog_mismatch_rejected(self):
        p = var(X1, CAT_X)
        q = var(VariableRef("y", 1), group_catalog(("y",)))
        with pytest.raises(PolyError):
            _ = p + q
        with pytest.raises(PolyError):
            _ = p * q

    def test_variable_outside_catalog_rejected(self):
        p = var(X1, CAT_X)
        with pytest.raises(PolyError):
            p.diff(VariableRef("y", 1))
        with pytest.raises(PolyError):
            MultiPoly.variable(VariableRef("y", 1), CAT_X)

    def test_division_free(self):
        with pytest.raises(PolyError):
            var(X1, CAT_X) ** -1

    def test_serialization_deterministic(self):
        rng = np.random.default_rng(5)
        p = random_poly(rng, CAT_X)
        assert p.to_text() == MultiPoly(CAT_X, dict(p.terms)).to_text()
        assert p == MultiPoly(CAT_X, dict(reversed(list(p.terms.items()))))

    def test_zero_coefficients_pruned(self):
        p = MultiPoly(CAT_X, {(1, 0, 0): Fraction(0), (0, 1, 0): Fraction(2)})
        assert len(p.terms) == 1

    def test_degree_queries_per_group_and_slot(self):
        p = var(VariableRef("x", 1, 1), CAT_X3) * var(VariableRef("x", 1, 1), CAT_X3) \
            * var(VariableRef("x", 2, 2), CAT_X3)
        assert p.degree() == 3
        assert p.degree(group="x") == 3
        assert p.degree(group="x", slot=1) == 2
        assert p.degree(group="x", slot=2) == 1
        assert p.degree(group="x", slot=3) == 0
        assert p.degree(group="y") == 0


class TestOmega:
    def test_identity_permutation_survives(self):
        p = var(VariableRef("x", 1, 1), CAT_X3) * var(VariableRef("x", 2, 2), CAT_X3) \
            * var(VariableRef("x", 3, 3), CAT_X3)
        assert omega_apply(p, "x").constant_value() == 1

    def test_repeated_column_vanishes(self):
        p = var(VariableRef("x", 1, 1), CAT_X3) * var(VariableRef("x", 1, 2), CAT_X3) \
            * var(VariableRef("x", 3, 3), CAT_X3)
        assert omega_apply(p, "x").is_zero()

    def test_degree_deficit_gives_zero(self):
        p = var(VariableRef("x", 1, 1), CAT_X3) * var(VariableRef("x", 2, 2), CAT_X3) \
            * var(VariableRef("x", 3, 3), CAT_X3)
        assert omega_apply(p, "x", 2).is_zero()

    def test_missing_slots_rejected(self):
        with pytest.raises(PolyError):
            omega_apply(var(X1, CAT_X), "x")

    def test_linearity_on_random_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            p = random_poly(rng, CAT_X3, max_terms=5)
            q = random_poly(rng, CAT_X3, max_terms=5)
            assert omega_apply(p + q, "x") == omega_apply(p, "x") + omega_apply(q, "x")

    @settings(max_examples=40, deadline=None)
    @given(st.lists(
        st.tuples(st.tuples(*[st.integers(0, 1) for _ in range(9)]),
                  st.integers(-4, 4)),
        min_size=1, max_size=6))
    def test_linearity_hypothesis(self, raw_terms):
        terms = {}
        for exps, coeff in raw_terms:
            if coeff:
                terms[exps] = terms.get(exps, 0) + Fraction(coeff)
        p = MultiPoly(CAT_X3, terms)
        assert omega_apply(p.scale(Fraction(3)), "x") == omega_apply(p, "x").scale(Fraction(3))


class TestTrace:
    def test_slot_copies_identified(self):
        p = var(VariableRef("x", 1, 1), CAT_X3) * var(VariableRef("x", 1, 2), CAT_X3)
        traced = trace_collapse(p)
        assert traced == var(X1, CAT_X) * var(X1, CAT_X)

    def test_constant_unchanged(self):
        p = MultiPoly.constant(Fraction(7), CAT_X3)
        assert trace_collapse(p).constant_value() == 7

    def test_product_of_slotted_forms(self):
        f = trilinear_form(normal_form_amplitudes(Fraction(1), Fraction(2), Fraction(0)))
        cat = make_catalog(
            VariableRef(g, i, s) for g in ("x", "y", "z") for i in (1, 2, 3) for s in (1, 2, 3))
        prod = reslot(f, 1).with_catalog(cat) * reslot(f, 2).with_catalog(cat) \
            * reslot(f, 3).with_catalog(cat)
        assert trace_collapse(prod) == f * f * f


class TestTransvectant:
    def test_zero_budget_is_product(self):
        f = trilinear_form(normal_form_amplitudes(Fraction(1), Fraction(0), Fraction(2)))
        assert transvectant(f, f, f) == f * f * f

    def test_ground_form_contraction_value(self):
        # (f^2, f^2, f^2)^{222} = 1152 for the diagonal unit normal form
        f = trilinear_form(normal_form_amplitudes(Fraction(1), Fraction(0), Fraction(0)))
        f2 = f * f
        assert transvectant(f2, f2, f2, upper=(2, 2, 2)).constant_value() == 1152
        assert transvectant_naive(f2, f2, f2, upper=(2, 2, 2)).constant_value() == 1152

    def test_factors_must_be_slot_one(self):
        f = trilinear_form(normal_form_amplitudes(Fraction(1), Fraction(0), Fraction(0)))
        with pytest.raises(PolyError):
            FactoredTriple(reslot(f, 2), f, f, (0, 1, 1))

    def test_factored_matches_naive_exact(self):
        rng = np.random.default_rng(23)
        cat = group_catalog(("x", "y"))
        budgets = [(1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 0, 0)]
        for trial in range(25):
            f1 = random_poly(rng, cat, max_terms=6)
            f2 = random_poly(rng, cat, max_terms=6)
            f3 = random_poly(rng, cat, max_terms=6)
            upper = budgets[trial % len(budgets)]
            fast = transvectant(f1, f2, f3, upper=upper)
            slow = transvectant_naive(f1, f2, f3, upper=upper)
            assert fast == slow

    def test_factored_matches_naive_with_duals(self):
        rng = np.random.default_rng(29)
        cat = group_catalog(("x", "xi"))
        for _ in range(10):
            f1 = random_poly(rng, cat, max_terms=5)
            f2 = random_poly(rng, cat, max_terms=5)
            f3 = random_poly(rng, cat, max_terms=5)
            fast = transvectant(f1, f2, f3, upper=(1, 0, 0), lower=(1, 0, 0))
            slow = transvectant_naive(f1, f2, f3, upper=(1, 0, 0), lower=(1, 0, 0))
            assert fast == slow

    def test_factored_matches_naive_float(self):
        rng = np.random.default_rng(31)
        cat = group_catalog(("x", "y"))
        for _ in range(10):
            polys = []
            for _ in range(3):
                p = random_poly(rng, cat, max_terms=6, exact=False)
                noise = {e: c * (1 + 0.1j) for e, c in p.terms.items()}
                polys.append(MultiPoly(cat, noise))
            fast = transvectant(*polys, upper=(1, 1, 0))
            slow = transvectant_naive(*polys, upper=(1, 1, 0))
            fa, sl = dict(fast.term_items()), dict(slow.term_items())
            scale = max((abs(c) for c in sl.values()), default=1.0)
            for k in set(fa) | set(sl):
                assert abs(fa.get(k, 0) - sl.get(k, 0)) <= 1e-12 * scale

    def test_degree_bookkeeping(self):
        # dense generic forms, so the top-degree part cannot die structurally
        rng = np.random.default_rng(37)

        def dense_form(degree):
            terms = {}
            for exps in itertools.product(range(degree + 1), repeat=3):
                if sum(exps) == degree:
                    terms[exps] = Fraction(int(rng.integers(10 ** 5, 10 ** 6))
                                           * (-1 if rng.integers(2) else 1),
                                           int(rng.integers(1, 97)))
            return MultiPoly(CAT_X, terms)

        for degrees, n1 in (((2, 2, 2), 1), ((2, 2, 2), 2), ((3, 3, 3), 2),
                            ((3, 2, 2), 1), ((1, 1, 1), 1)):
            fs = [dense_form(d) for d in degrees]
            result = transvectant(*fs, upper=(n1, 0, 0))
            assert not result.is_zero()
            assert result.degree(group="x") == sum(degrees) - 3 * n1

    def test_exact_float_agreement(self):
        rng = np.random.default_rng(41)
        cat = group_catalog(("x", "y"))
        for _ in range(10):
            exact = [random_poly(rng, cat, max_terms=6) for _ in range(3)]
            floats = [p.to_complex() for p in exact]
            r_exact = transvectant(*exact, upper=(1, 1, 0)).to_complex()
            r_float = transvectant(*floats, upper=(1, 1, 0))
            ex, fl = dict(r_exact.term_items()), dict(r_float.term_items())
            scale = max((abs(c) for c in ex.values()), default=1.0)
            for k in set(ex) | set(fl):
                assert abs(ex.get(k, 0) - fl.get(k, 0)) <= 1e-10 * scale

    def test_substitute_linear_change(self):
        # (x1 + x2)^2 expanded via substitution
        p = var(X1, CAT_X) * var(X1, CAT_X)
        image = var(X1, CAT_X) + var(X2, CAT_X)
        q = p.substitute({X1: image, X2: var(X2, CAT_X), X3: var(X3, CAT_X)})
        assert q == image * image
