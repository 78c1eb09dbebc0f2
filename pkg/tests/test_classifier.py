from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdforge.checks import check_gd_compat, check_lie_super
from gdforge.classifier import (
    Lattice,
    Window,
    b0_filter,
    build_system,
    candidate_rule,
    combine,
    jacobi_filter,
    lattice_b_in_bracket,
    lattice_novikov,
    match_family,
    predicted_family,
    exploratory_residuals,
    rule_vector,
    safe_triples,
    solve_and_project,
)
from gdforge.errors import CaseParameterMismatch
from gdforge.families import classified_bracket, novikov_A, star_product
from gdforge.graded import BasisSpec, GDStructure, zero_rule
from gdforge.linear import LinearSystem, solve_affine, span_rank
from oracles import compat_rows


def test_window_preconditions():
    for bad in ((2, 0, 0), (2, 0, 2), (3, 1, 2)):
        with pytest.raises(ValueError):
            Window(*bad)
    w = Window(4, 2, 1)
    assert (w.reach, w.support) == (6, 4)


def test_case_preconditions():
    with pytest.raises(CaseParameterMismatch):
        build_system("b-notin", 1, Window(3, 0, 1))
    with pytest.raises(CaseParameterMismatch):
        build_system("b0", 1, Window(3, 0, 1))
    with pytest.raises(CaseParameterMismatch):
        build_system("b-in", F(1, 2), Window(3, 0, 1))
    with pytest.raises(CaseParameterMismatch):
        build_system("gammaN-bnotin", 2, Window(3, 1, 1))


def test_novikov_over_lie_is_affine():
    cs = build_system("novikov-over-lie", 0, Window(4, 0, 2))
    assert not cs.system.homogeneous


def test_b0_golden_counts():
    # frozen after the first exact run; the row space is checked against the oracle below
    cs = build_system("b0", 0, Window(3, 0, 1))
    assert (len(cs.system.variables), len(cs.system.rows)) == (189, 908)


@pytest.mark.parametrize("case,b,w", [
    ("b-notin", F(1, 2), Window(2, 0, 1)),
    ("b0", 0, Window(3, 0, 1)),
    ("gammaN-bnotin", F(1, 2), Window(2, 1, 1)),
])
def test_rows_match_brute_force_expansion(case, b, w):
    spec = BasisSpec(levels=w.L > 0)
    oracle = compat_rows(novikov_A(b, spec), spec, w.N, w.L, w.reach, w.support)
    cs = build_system(case, b, w)
    mine = [{v: c for c, v in terms} for terms, _ in cs.system.rows]
    r = span_rank(oracle)
    assert r == span_rank(mine) == span_rank(oracle + mine)


def test_empty_system_is_full_space():
    sol = solve_affine(LinearSystem(("a", "b"), ()))
    assert sol.dimension == 2 and sol.particular == {}


def test_novikov_over_lie_unique_star():
    cs = build_system("novikov-over-lie", 0, Window(4, 0, 2))
    ps = solve_and_project(cs)
    assert ps.dimension == 0
    star = candidate_rule(cs, ps.particular, interior=True)
    ref = star_product(cs.spec)
    n = cs.window.N - cs.window.K
    keys = cs.window.keys(cs.spec, interior=True)
    for p in keys:
        for q in keys:
            if abs(p.k + q.k) <= n:
                assert star.on_keys(p, q) == ref.on_keys(p, q)
    fm = match_family(ps, predicted_family("novikov-over-lie"))
    assert fm.verdict == "both-containments"


def test_b_notin_window():
    cs = build_system("b-notin", F(1, 2), Window(4, 0, 2))
    ps = solve_and_project(cs)
    fm = match_family(ps, predicted_family("b-notin", F(1, 2)))
    assert ps.dimension == 1
    assert fm.verdict == "both-containments"
    assert fm.family_dimension == 1


def test_zero_bracket_is_in_the_family():
    cs = build_system("b-notin", F(1, 2), Window(3, 0, 1))
    zero = rule_vector(cs, zero_rule(cs.spec))
    assert zero == {}
    phi0 = rule_vector(cs, classified_bracket("b-notin", cs.spec, b=F(1, 2), phi=0))
    assert phi0 == {}


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([F(1, 2), F(-1, 3), F(3, 2)]),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_window_soundness_b_notin(b, phi):
    cs = build_system("b-notin", b, Window(3, 0, 1))
    vec = rule_vector(cs, classified_bracket("b-notin", cs.spec, b=b, phi=phi))
    assert all(r == 0 for r in cs.system.residual(vec))


@settings(max_examples=4, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=4),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_window_soundness_gammaN(phi, lam):
    b = F(1, 2)
    cs = build_system("gammaN-bnotin", b, Window(2, 1, 1))
    vec = rule_vector(cs, classified_bracket("gammaN-bnotin", cs.spec, b=b, phi=phi, lam=lam))
    assert all(r == 0 for r in cs.system.residual(vec))


@pytest.fixture(scope="module")
def b_in():
    cs = build_system("b-in", 1, Window(4, 0, 2))
    return cs, solve_and_project(cs)


def test_b_in_theta_direction_is_filtered(b_in):
    cs, ps = b_in
    assert ps.dimension == 2
    theta = next(v for v in ps.basis if any(s.k == p.k + q.k + 1 for (_, p, q, s) in v))
    triples = safe_triples(cs)
    cands, want = [], []
    for phi, t in product((1, 2, 0), (0, 1, F(-3, 2))):
        rule = classified_bracket("b-in", cs.spec, b=1, phi=phi)
        if t:
            rule = rule + candidate_rule(cs, combine((t, theta)))
        cands.append(rule)
        want.append(phi == 0 or t == 0)
    assert jacobi_filter(cands, triples).meta["passed"] == want


def test_zero_candidate_passes_filter(b_in):
    cs, _ = b_in
    assert jacobi_filter([zero_rule(cs.spec)], safe_triples(cs)).passed


def lattice_checks(lat, b, phi, theta, N=1, support=None):
    keys = [k for k in lat.box(N) if support is None or sum(map(bool, k.deg)) <= support]
    triples = list(product(keys, repeat=3))
    br = lattice_b_in_bracket(lat, b, phi, theta)
    gd = GDStructure(br, lattice_novikov(lat, b))
    return check_lie_super(br, triples).passed, check_gd_compat(gd, triples).passed


LAT3 = Lattice((1, F(1, 3), F(2, 7)))
B3 = (0, 0, 1)


def test_lattice_radical_form_passes():
    phi = LAT3.hom((2, F(1, 2), 0))
    assert lattice_checks(LAT3, B3, phi, LAT3.form([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])) == (True, True)


def test_lattice_hom_product_passes():
    phi = LAT3.hom((2, F(1, 2), 0))
    f1, f2 = LAT3.hom((1, 2, 0)), LAT3.hom((3, 0, -1))
    assert f1(B3) == 0 and f2(B3) == -1
    theta = lambda a, c: f1(a) * f2(c) - f1(c) * f2(a)  # noqa: E731
    assert lattice_checks(LAT3, B3, phi, theta) == (True, True)


def test_lattice_phi_of_b_kills_theta():
    phi = LAT3.hom((2, F(1, 2), 1))
    theta = LAT3.form([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    assert phi(B3) != 0
    assert lattice_checks(LAT3, B3, phi, theta)[0] is False
    assert lattice_checks(LAT3, B3, phi, lambda a, c: 0) == (True, True)


def test_lattice_misprinted_form_fails():
    phi = LAT3.hom((2, F(1, 2), 0))
    f1, f2 = LAT3.hom((1, 2, 0)), LAT3.hom((3, 0, -1))
    misprint = lambda a, c: f1(a) * f2(c) - f1(a) * f2(a)  # noqa: E731
    assert lattice_checks(LAT3, B3, phi, misprint) != (True, True)


def test_lattice_radical_condition_matters_in_rank_four():
    lat = Lattice((1, F(1, 3), F(2, 7), F(3, 11)))
    b = (0, 0, 0, 1)
    phi = lat.hom((2, F(1, 2), 1, 0))
    rad = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    notrad = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    assert lattice_checks(lat, b, phi, lat.form(rad), support=2) == (True, True)
    assert lattice_checks(lat, b, phi, lat.form(notrad), support=2)[0] is False


def test_b0_filter_agrees_with_family_conditions():
    ps = solve_and_project(build_system("b0", 0, Window(4, 0, 2)))
    rep = b0_filter(ps, count=6)
    assert rep.agree and all(rep.jacobi)


@pytest.mark.parametrize("b,w", [(0, Window(2, 2, 1)), (1, Window(3, 2, 1))])
def test_exploratory_b_in_levels(b, w):
    ps = solve_and_project(build_system("gammaN-bin", b, w))
    res = exploratory_residuals(ps)
    assert res
    assert all(r == 0 for v in res.values() for _, r in v)
