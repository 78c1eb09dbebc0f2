from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdforge.checks import check_gd_compat, cube, direct_residual
from gdforge.conformal import (
    ConformalStructure,
    DPoly,
    ZSeries,
    check_cross_term,
    check_jacobi,
    check_skew,
    compat_coefficient,
    degree_split,
    from_gd,
    jacobi_residual,
    to_gd,
    yplus,
)
from gdforge.errors import NotQuadratic
from gdforge.families import classified_bracket, diamond_xi, novikov_A
from gdforge.graded import BasisSpec, GDStructure, commutator_rule, window, zero_rule

FLAT = BasisSpec()
LEV = BasisSpec(levels=True)


def commutator_gd(circ):
    return GDStructure(commutator_rule(circ), circ, circ.space)


def series(terms, space):
    return ZSeries({((e,), d, k): c for (e, d, k), c in terms.items()}, ("z",), space)


def test_from_gd_b1_example():
    Y = from_gd(commutator_gd(novikov_A(1, FLAT)))
    x0 = FLAT.key(0)
    assert yplus(Y, x0, x0) == series({(-1, 1, x0): 1, (-2, 0, x0): 2}, FLAT)


def test_from_gd_b0_general_shape():
    Y = from_gd(commutator_gd(novikov_A(0, FLAT)))
    for a in range(-2, 3):
        for b in range(-2, 3):
            s = FLAT.key(a + b)
            want = series({(-1, 1, s): a, (-1, 0, s): a - b, (-2, 0, s): a + b}, FLAT)
            assert yplus(Y, FLAT.key(a), FLAT.key(b)) == want


def test_zero_structure():
    Y = from_gd(GDStructure(zero_rule(FLAT), zero_rule(FLAT), FLAT))
    keys = window(FLAT, 2)
    assert all(not Y.products(u, v) for u in keys for v in keys)
    assert check_skew(Y, [(u, v) for u in keys for v in keys]).passed
    assert check_jacobi(Y, cube(keys)).passed


def test_translation_left():
    Y = from_gd(commutator_gd(novikov_A(F(1, 2), LEV)))
    for u in window(LEV, 1, 1):
        for v in window(LEV, 1, 1):
            base = yplus(Y, u, v)
            d = {((e[0] - 1,), n, k): e[0] * c for (e, n, k), c in base.terms.items()}
            assert yplus(Y, DPoly.lift(u, 1, LEV), v) == ZSeries(d, ("z",), LEV)


def test_translation_right_b1_example():
    Y = from_gd(commutator_gd(novikov_A(1, FLAT)))
    x0 = FLAT.key(0)
    got = yplus(Y, x0, DPoly.lift(x0, 1, FLAT))
    assert got == series({(-1, 2, x0): 1, (-2, 1, x0): 3, (-3, 0, x0): 4}, FLAT)


def test_vanishing_products_kill_translates():
    Y = from_gd(GDStructure(zero_rule(FLAT), zero_rule(FLAT), FLAT))
    assert not yplus(Y, FLAT.key(1), DPoly.lift(FLAT.key(2), 3, FLAT))


def test_skew_b1_pair():
    Y = from_gd(commutator_gd(novikov_A(1, FLAT)))
    assert check_skew(Y, [(FLAT.key(0), FLAT.key(0))]).passed


@pytest.mark.parametrize("xi", [LEV.x(1), LEV.x(0) * 2 - LEV.x(-1, 1)])
def test_diamond_structures_are_conformal(xi):
    Y = from_gd(commutator_gd(diamond_xi(xi, LEV)))
    keys = window(LEV, 1, 1)
    assert check_skew(Y, [(u, v) for u in keys for v in keys]).passed
    assert check_jacobi(Y, cube(keys)).passed


def violating_gd():
    br = classified_bracket("gammaN-bnotin", LEV, b=F(1, 2), phi=0, lam=1)
    return GDStructure(br, novikov_A(F(1, 3), LEV), LEV)


def test_violation_shows_up_at_z1_z2_inverse():
    gd = violating_gd()
    Y = from_gd(gd)
    keys = window(LEV, 1, 1)
    ops = {"bracket": gd.bracket, "circ": gd.circ}
    seen = 0
    for u, v, w in cube(keys):
        direct = direct_residual("gd-compat", ops, (u, v, w), LEV)
        coeff = jacobi_residual(Y, u, v, w).coeff(-1, -1)
        assert coeff == DPoly.lift(direct, 1, LEV) * -1
        assert compat_coefficient(Y, u, v, w) == direct
        seen += bool(direct)
    assert seen >= 20


def test_degree_split_b0():
    Y = from_gd(commutator_gd(novikov_A(0, FLAT)))
    Y1, Y2 = degree_split(Y)
    for a in range(-2, 3):
        for b in range(-2, 3):
            u, v, s = FLAT.key(a), FLAT.key(b), FLAT.key(a + b)
            assert yplus(Y1, u, v) == series({(-1, 0, s): a - b}, FLAT)
            assert yplus(Y2, u, v) == series({(-1, 1, s): a, (-2, 0, s): a + b}, FLAT)
            assert yplus(Y1, u, v) + yplus(Y2, u, v) == yplus(Y, u, v)


def test_degree_split_pure_lie():
    br = classified_bracket("b-notin", FLAT, b=F(1, 2), phi=1)
    _, Y2 = degree_split(from_gd(GDStructure(br, zero_rule(FLAT), FLAT)))
    keys = window(FLAT, 2)
    assert all(not any(Y2.products(u, v)) for u in keys for v in keys)


def test_degree_split_rejects_cubic():
    x = FLAT.key(0)
    Y = ConformalStructure(lambda u, v: (DPoly({}), DPoly({}), DPoly({(0, x): 1})), FLAT)
    with pytest.raises(NotQuadratic):
        degree_split(Y).__getitem__(0).products(x, x)


def test_cross_term_passes_for_gd():
    Y1, Y2 = degree_split(from_gd(commutator_gd(novikov_A(F(-1, 2), LEV))))
    assert check_cross_term(Y1, Y2, cube(window(LEV, 1, 1))).passed


def test_cross_term_with_zero_bracket():
    Y1, Y2 = degree_split(from_gd(GDStructure(zero_rule(FLAT), novikov_A(2, FLAT), FLAT)))
    assert check_cross_term(Y1, Y2, cube(window(FLAT, 2))).passed


def test_violation_is_localized_in_cross_term():
    Y = from_gd(violating_gd())
    Y1, Y2 = degree_split(Y)
    triples = cube(window(LEV, 1, 1))
    assert check_jacobi(Y1, triples).passed
    assert check_jacobi(Y2, triples).passed
    assert not check_cross_term(Y1, Y2, triples).passed
    assert not check_gd_compat(violating_gd(), triples).passed


@pytest.mark.parametrize("b", [0, F(5, 2)])
def test_round_trip(b):
    gd = commutator_gd(novikov_A(b, LEV))
    back = to_gd(from_gd(gd))
    keys = window(LEV, 2, 2)
    for p in keys:
        for q in keys:
            assert back.bracket.on_keys(p, q) == gd.bracket.on_keys(p, q)
            assert back.circ.on_keys(p, q) == gd.circ.on_keys(p, q)


dpolys = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(-1, 1), st.integers(0, 1)),
    st.fractions(min_value=-3, max_value=3, max_denominator=3), max_size=3,
).map(lambda d: DPoly({(n, LEV.key(k, l)): c for (n, k, l), c in d.items()}, LEV))


@settings(max_examples=40, deadline=None)
@given(dpolys, dpolys)
def test_translation_on_random_dpolys(zeta, eta):
    Y = from_gd(commutator_gd(novikov_A(F(1, 3), LEV)))
    base = yplus(Y, zeta, eta)
    d = {((e[0] - 1,), n, k): e[0] * c for (e, n, k), c in base.terms.items()}
    assert yplus(Y, zeta.partial(), eta) == ZSeries(d, ("z",), LEV)
