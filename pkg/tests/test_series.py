"""Series engine: recursion, quadrature conventions, closed forms."""

from fractions import Fraction

import numpy as np
import pytest

from qvlasov.parser import parse_potential
from qvlasov.potentials import resolve_potential
from qvlasov.ring import RingElem
from qvlasov.series import (SeriesTerm, TermBudgetError, WignerSeries,
                            build_series, closed_form_f1, integrate_term,
                            recursion_rhs)

from conftest import random_ring_elem


def cells_of(**kwargs):
    """Build a SeriesTerm from m<m>j<j>='expr' keyword cells."""
    cells = {}
    for key, expr in kwargs.items():
        m, j = key[1:].split("j")
        cells[(int(m), int(j))] = parse_potential(expr)
    return SeriesTerm(cells)


GOLDSTONE = parse_potential("-q^2/2 + q^4/4")


# frozen reference expansion of the double well's first correction:
# (1/48) [ (6 - 18 x^2) f0^(2) + (4H - 12H x^2 - 3x^4 + x^6) f0^(3) ]
F1_EXPECTED = cells_of(
    m0j2="(6 - 18*q^2)/48",
    m1j3="(4 - 12*q^2)/48",
    m0j3="(-3*q^4 + q^6)/48",
)

# frozen reference for the second correction, split by powers of H:
# (x^2/4608) [ 252(-2+3x^2) f0^(4) - 18(32H + (6-48H)x^2 - 16x^4 + 5x^6) f0^(5)
#   + (-96H^2 + 24H(-1+6H)x^2 + 80Hx^4 + (9-24H)x^6 - 6x^8 + x^10) f0^(6) ]
F2_EXPECTED = cells_of(
    m0j4="q^2/4608 * 252*(-2 + 3*q^2)",
    m1j5="q^2/4608 * (-18)*(32 - 48*q^2)",
    m0j5="q^2/4608 * (-18)*(6*q^2 - 16*q^4 + 5*q^6)",
    m2j6="q^2/4608 * (-96 + 144*q^2)",
    m1j6="q^2/4608 * (-24*q^2 + 80*q^4 - 24*q^6)",
    m0j6="q^2/4608 * (9*q^6 - 6*q^8 + q^10)",
)


# -------------------------------------------------------------- SeriesTerm ops

def test_dh_of_seed():
    assert SeriesTerm.unit().d_dh() == SeriesTerm({(0, 1): RingElem.one()})


def test_dh_product_rule():
    t = SeriesTerm({(2, 0): RingElem.one()})
    expected = SeriesTerm({(1, 0): RingElem.constant(2), (2, 1): RingElem.one()})
    assert t.d_dh() == expected


def test_dh_mixed_cell():
    t = SeriesTerm({(1, 3): RingElem.x(2)})
    expected = SeriesTerm({(0, 3): RingElem.x(2), (1, 4): RingElem.x(2)})
    assert t.d_dh() == expected


def test_mul_h_minus_v_power_zero_is_identity():
    t = cells_of(m1j2="q^3 - 2")
    assert t.mul_h_minus_v(GOLDSTONE, 0) == t


def test_mul_h_minus_v_single_power():
    t = SeriesTerm.unit()
    out = t.mul_h_minus_v(RingElem.x(2), 1)
    assert out == SeriesTerm({(1, 0): RingElem.one(), (0, 0): -RingElem.x(2)})


def test_mul_h_minus_v_square_matches_composition(rng):
    t = SeriesTerm({(0, 2): random_ring_elem(rng), (1, 0): random_ring_elem(rng)})
    once = t.mul_h_minus_v(GOLDSTONE, 1).mul_h_minus_v(GOLDSTONE, 1)
    assert t.mul_h_minus_v(GOLDSTONE, 2) == once


# ---------------------------------------------------------------- recursion

def test_rhs_zero_for_quadratic_potential():
    v = parse_potential("1 + 2*q + 3*q^2")
    terms = [SeriesTerm.unit()]
    for l in range(1, 5):
        source = recursion_rhs(v, terms, l)
        assert source.is_zero()
        terms.append(integrate_term(source, "uniform"))


def test_rhs_zero_for_zero_potential():
    terms = [SeriesTerm.unit()]
    for l in (1, 2, 3):
        assert recursion_rhs(RingElem.zero(), terms, l).is_zero()
        terms.append(SeriesTerm.zero())


def test_rhs_order_one_is_ddx_of_closed_form():
    source = recursion_rhs(GOLDSTONE, [SeriesTerm.unit()], 1)
    assert source == closed_form_f1(GOLDSTONE).d_dx()


def test_integrate_term_roundtrip(rng):
    t = SeriesTerm({(0, 2): random_ring_elem(rng), (1, 4): random_ring_elem(rng)})
    for convention in ("paper", "uniform"):
        assert integrate_term(t, convention).d_dx() == t


def test_integrate_term_uniform_vanishes_at_reference():
    source = recursion_rhs(GOLDSTONE, [SeriesTerm.unit()], 1)
    f1 = integrate_term(source, "uniform", Fraction(0))
    for _, c in f1.cells():
        assert c.eval_exact(Fraction(0)).is_zero()


# ------------------------------------------------------------- closed forms

def test_closed_form_f1_goldstone_matches_reference():
    assert closed_form_f1(GOLDSTONE) == F1_EXPECTED


def test_closed_form_f1_quadratic():
    a, b, c = Fraction(1), Fraction(2), Fraction(3)
    v = parse_potential("1 + 2*q + 3*q^2")
    expected = SeriesTerm({
        (0, 2): RingElem.constant(-c / 4),
        (0, 3): RingElem.constant((4 * a * c - b * b) / 24),
        (1, 3): RingElem.constant(-4 * c / 24),
    })
    assert closed_form_f1(v) == expected


def test_closed_form_f1_zero_potential():
    assert closed_form_f1(RingElem.zero()).is_zero()


# ------------------------------------------------------------- build_series

def test_build_series_goldstone_f2_matches_reference():
    series = build_series(GOLDSTONE, 2, "paper")
    assert series.terms[1] == F1_EXPECTED
    assert series.terms[2] == F2_EXPECTED


def test_f2_coefficients_vanish_quadratically_at_origin():
    series = build_series(GOLDSTONE, 2, "paper")
    for _, c in series.terms[2].cells():
        assert c.eval_exact(Fraction(0)).is_zero()
        assert c.ddx().eval_exact(Fraction(0)).is_zero()


def test_build_series_quadratic_uniform_degenerates(rng):
    for _ in range(5):
        a, b, c = (Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
                   for _ in range(3))
        v = (RingElem.constant(a) + RingElem.x().scale(b)
             + RingElem.x(2).scale(c))
        series = build_series(v, 4, "uniform")
        assert all(t.is_zero() for t in series.terms[1:])


def test_build_series_zeroth_term_is_seed():
    for conv in ("paper", "uniform"):
        series = build_series(GOLDSTONE, 3, conv)
        assert series.terms[0] == SeriesTerm.unit()


def test_uniform_terms_vanish_at_reference():
    series = build_series(GOLDSTONE, 3, "uniform")
    for term in series.terms[1:]:
        for _, c in term.cells():
            assert c.eval_exact(Fraction(0)).is_zero()


def test_conventions_differ_by_function_of_h_only():
    paper = build_series(GOLDSTONE, 1, "paper")
    uniform = build_series(GOLDSTONE, 1, "uniform")
    assert paper.terms[1].d_dx() == uniform.terms[1].d_dx()
    diff = paper.terms[1] - uniform.terms[1]
    for _, c in diff.cells():
        assert c.is_constant()


def test_max_deriv_order_bound():
    series = build_series(GOLDSTONE, 5, "paper")
    for l, term in enumerate(series.terms):
        assert term.max_deriv_order() <= 3 * l
    assert series.terms[5].max_deriv_order() <= 15


def test_parity_even_potentials():
    for text in ("goldstone", "quartic", "modulated:a=1/2"):
        series = build_series(resolve_potential(text), 2, "uniform")
        for term in series.terms:
            for _, c in term.cells():
                assert c.is_even_in_x(), text


def test_term_budget_enforced():
    with pytest.raises(TermBudgetError):
        build_series(GOLDSTONE, 3, "paper", term_budget=10)


def test_build_series_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_series(GOLDSTONE, -1)
    with pytest.raises(ValueError):
        build_series(GOLDSTONE, 1, "mixed")


# ------------------------------------------------------- linearity of terms

def test_representation_linearity_over_seeds(rng):
    # coefficients never depend on the seed, so evaluation is linear in it
    from qvlasov.seeds import CombinedSeed, SeedDistribution

    series = build_series(GOLDSTONE, 2, "paper")
    s1 = SeedDistribution("fd", z=1.0)
    s2 = SeedDistribution("mb", z=1.0)
    combo = CombinedSeed([(2.0, s1), (-1.0 / 3.0, s2)])
    xs = rng.uniform(-2, 2, 40)
    hs = rng.uniform(-1, 3, 40)
    for term in series.terms:
        lhs = term.evaluate(combo, xs, hs)
        rhs = 2.0 * term.evaluate(s1, xs, hs) - term.evaluate(s2, xs, hs) / 3.0
        scale = np.maximum(np.abs(rhs), 1e-12)
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)


# ------------------------------------------------------------ serialization

def test_series_json_roundtrip_is_exact():
    for text, conv in (("goldstone", "paper"), ("modulated:a=1/2", "uniform")):
        series = build_series(resolve_potential(text), 2, conv)
        doc = series.to_json()
        back = WignerSeries.from_json(doc)
        assert back.potential == series.potential
        assert back.order == series.order
        assert back.convention == series.convention
        assert back.x_ref == series.x_ref
        assert all(a == b for a, b in zip(back.terms, series.terms))
        assert back.to_json() == doc


def test_series_json_is_deterministic():
    a = build_series(GOLDSTONE, 3, "paper").to_json()
    b = build_series(GOLDSTONE, 3, "paper").to_json()
    assert a == b
