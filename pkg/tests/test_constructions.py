from fractions import Fraction as F
from itertools import islice, product

import pytest

from gdforge.checks import (
    check_gd_compat,
    check_lie_super,
    check_novikov_super,
    cube,
    direct_residual,
)
from gdforge.constructions import (
    NKey,
    PairKey,
    check_lie_combo,
    check_triple_bracket,
    gd_lie_poisson,
    gd_pair_construction,
    gd_semidirect_W,
    gd_theorem35,
    novikov_from_derivation,
    pair_condition_residual,
    pair_witness,
    standard_poisson,
    two_derivation_ops,
)
from gdforge.errors import (
    ConditionViolated,
    NonCommutingDerivations,
    NonConstantXi,
    OddDerivation,
    OddXi,
    TwistMismatch,
)
from gdforge.families import classified_bracket, novikov_A
from gdforge.graded import BasisSpec, Element, LinearMap, window
from gdforge.superalg import (
    Mono,
    SuperCommAlg,
    VectorField,
    derivation,
    euler,
    monomial_window,
    partial,
)

T = SuperCommAlg(1)
T2 = SuperCommAlg(2)
T3 = SuperCommAlg(3)
S11 = SuperCommAlg(1, 1)


def suite(gd, keys=None):
    triples = cube(keys if keys is not None else gd.keys)
    return [check_novikov_super(gd.circ, triples), check_lie_super(gd.bracket, triples),
            check_gd_compat(gd, triples)]


def passes(gd, keys=None):
    return all(r.passed for r in suite(gd, keys))


def scaled_euler(A, c, i=1):
    return derivation(A, {("t", i): A.t(i) * c})


# ---- Novikov products from derivations


def test_euler_product_matches_family():
    circ = novikov_from_derivation(T, euler(T))
    for a, b in product(range(-3, 4), repeat=2):
        assert circ(T.t(1, a), T.t(1, b)) == T.t(1, a + b) * b


def test_zero_derivation_gives_ordinary_product():
    circ = novikov_from_derivation(S11, derivation(S11, {}), 1)
    u, v = S11.theta(1), S11.t(1, 2)
    assert circ(u, v) == S11.mult()(u, v)
    assert check_novikov_super(circ, cube(monomial_window(S11, 1))).passed


def test_xi_t_product():
    circ = novikov_from_derivation(T, euler(T), T.t(1))
    assert circ(T.t(1, 2), T.t(1, 3)) == T.t(1, 5) * 3 + T.t(1, 6)
    assert check_novikov_super(circ, cube(monomial_window(T, 3))).passed


def test_super_novikov_from_even_derivation():
    d = derivation(S11, {("t", 1): S11.t(1), ("θ", 1): S11.theta(1) * 2})
    circ = novikov_from_derivation(S11, d, S11.t(1, -1))
    assert check_novikov_super(circ, cube(monomial_window(S11, 2))).passed


def test_parity_preconditions():
    with pytest.raises(OddDerivation):
        novikov_from_derivation(S11, partial(S11, ("θ", 1)))
    with pytest.raises(OddXi):
        novikov_from_derivation(S11, euler(S11), S11.theta(1))


# ---- W(A) ⋉ A


FIELDS = [VectorField(Mono((k,), ()), ("t", 1)) for k in (-1, 0, 1, 2)] + [
    VectorField(Mono((0,), (1,)), ("t", 1)),
    VectorField(Mono((1,), ()), ("θ", 1)),
    VectorField(Mono((0,), (1,)), ("θ", 1)),
]


def test_semidirect_products():
    gd = gd_semidirect_W(S11, [], monomial_window(S11, 1))
    sp = gd.space
    u, v = Element({NKey(1, Mono((1,), (1,))): 1}, sp), Element({NKey(1, Mono((2,), ())): 1}, sp)
    assert gd.circ(u, v) == Element({NKey(1, Mono((3,), (1,))): 1}, sp)
    d = Element({NKey(0, FIELDS[0]): 1}, sp)
    assert not gd.circ(d, Element({}, sp))


def test_semidirect_passes_full_suite():
    gd = gd_semidirect_W(S11, FIELDS, monomial_window(S11, 1))
    assert len([k for k in gd.keys if k.slot == 0]) >= 4
    assert passes(gd)


# ---- Lie-Poisson


def test_lie_poisson_euler():
    gd = gd_lie_poisson(T2, standard_poisson(T2), euler(T2), -2, monomial_window(T2, 1))
    assert passes(gd)
    gd4 = gd_lie_poisson(T2, standard_poisson(T2), euler(T2), -2,
                         [Mono((a, b), ()) for a in range(3) for b in range(3) if a + b <= 4])
    assert check_gd_compat(gd4, cube(gd4.keys)).passed


def test_lie_poisson_zero_derivation():
    gd = gd_lie_poisson(T2, standard_poisson(T2), derivation(T2, {}), 0, monomial_window(T2, 1))
    assert all(not gd.circ.on_keys(p, q) for p in gd.keys for q in gd.keys)
    assert passes(gd)


def test_lie_poisson_twist_mismatch():
    with pytest.raises(TwistMismatch) as exc:
        gd_lie_poisson(T2, standard_poisson(T2), euler(T2), 0)
    assert exc.value.residual


def test_lie_poisson_needs_constant_xi():
    with pytest.raises(NonConstantXi):
        gd_lie_poisson(T2, standard_poisson(T2), euler(T2), T2.t(1))


# ---- the pair construction


def test_pair_construction_succeeds():
    gd = gd_pair_construction(T, euler(T), T.t(1, 2), 0, 1)
    assert passes(gd)


def test_pair_with_zero_xi():
    gd = gd_pair_construction(T, euler(T), 0, T.t(1), 3)
    assert all(not gd.bracket.on_keys(p, q) for p in gd.keys for q in gd.keys)
    assert passes(gd)


def test_pair_condition_residual_partial():
    d = partial(T, ("t", 1))
    with pytest.raises(ConditionViolated) as exc:
        gd_pair_construction(T, d, T.t(1, 2), 0, 0)
    assert exc.value.residual == T.t(1) * -2


def test_pair_condition_residual_euler():
    with pytest.raises(ConditionViolated) as exc:
        gd_pair_construction(T, euler(T), T.t(1, 2), 0, 0)
    assert exc.value.residual == T.t(1, 2) * -2


@pytest.mark.parametrize("xi,e0,e1", [("t2", 0, 0), ("t2", 1, 0), ("t1", 0, 2), ("0", 1, 1)])
def test_witness_triple_carries_condition_residual(xi, e0, e1):
    xi = {"t2": T.t(1, 2), "t1": T.t(1), "0": T.scalar(0)}[xi]
    d = euler(T)
    gd = gd_pair_construction(T, d, xi, e0, e1, validate=False)
    res = pair_condition_residual(T, d, xi, e0, e1)
    got = direct_residual("gd-compat", {"bracket": gd.bracket, "circ": gd.circ},
                          pair_witness(T), gd.space)
    assert got == Element({PairKey(0, k): c for k, c in res.items()}, gd.space)


# ---- two commuting derivations


def test_two_derivation_examples():
    c = F(3, 2)
    ops = two_derivation_ops(T.mult(), scaled_euler(T, c), euler(T), b=F(1, 3))
    for a, b in product(range(-2, 3), repeat=2):
        u, v = T.t(1, a), T.t(1, b)
        assert not ops.bracket_12(u, v)
        assert ops.bracket_2(u, v) == T.t(1, a + b) * (b - a)
        assert ops.circ_2(u, v) == T.t(1, a + b) * (b + F(1, 3))
        assert not ops.bracket_1(u, u)


def test_non_commuting_derivations():
    with pytest.raises(NonCommutingDerivations):
        two_derivation_ops(T.mult(), partial(T, ("t", 1)), euler(T))


def ds3():
    return [scaled_euler(T3, 1, 1), scaled_euler(T3, 1, 2), scaled_euler(T3, 1, 3)]


def test_triple_bracket_identities():
    mons = monomial_window(T3, 1)
    triples = list(islice(product(mons, repeat=3), 0, None, 53))
    assert len(triples) >= 30
    rep = check_triple_bracket(T3.mult(), ds3(), triples, (1, 2, 3))
    assert rep.passed and rep.samples == len(triples)
    assert check_triple_bracket(T3.mult(), ds3(), triples, (1, 2, 2)).passed


def test_three_five_and_three_six():
    d1, d2, d3 = ds3()
    b = F(2, 5)
    mult = T3.mult()
    mons = monomial_window(T3, 1)
    ops3 = two_derivation_ops(mult, d1, d3, b, mons)
    ops12 = two_derivation_ops(mult, d1, d2, b, mons)
    for u, v, w in islice(product(mons, repeat=3), 0, None, 97):
        U, V, W = (Element({k: 1}, T3) for k in (u, v, w))
        br12 = ops12.bracket_12(U, V)
        r35 = direct_residual("gd-compat", {"bracket": ops12.bracket_12, "circ": ops3.circ_2},
                              (U, V, W), T3)
        assert r35 == mult(W, br12) * b
        r36 = direct_residual("gd-compat", {"bracket": ops12.bracket_1, "circ": ops12.circ_2},
                              (U, V, W), T3)
        assert r36 == mult(W, br12)


@pytest.mark.parametrize("lam", [0, 3, F(-1, 2)])
def test_lie_combo(lam):
    mons = monomial_window(T2, 1)
    d1, d2 = scaled_euler(T2, 1, 1), scaled_euler(T2, 1, 2)
    assert check_lie_combo(T2.mult(), d1, d2, lam, cube(mons)).passed


def test_two_derivation_gd_variant_a():
    d1, d2 = scaled_euler(T2, 1, 1), scaled_euler(T2, 1, 2)
    gd = gd_theorem35(T2.mult(), d1, d2, "a", keys=monomial_window(T2, 1))
    assert passes(gd)


def test_two_derivation_gd_equal_derivations():
    d = euler(T)
    gd = gd_theorem35(T.mult(), d, d, "a", keys=monomial_window(T, 2))
    ops = two_derivation_ops(T.mult(), d, d, 0, gd.keys)
    assert all(not ops.bracket_12.on_keys(p, q) for p in gd.keys for q in gd.keys)
    assert passes(gd)


@pytest.mark.parametrize("b", [F(1, 2), F(-3, 2)])
def test_two_derivation_gd_variant_b_reproduces_b_notin(b):
    spec = BasisSpec()
    phi = F(5, 3)
    keys = window(spec, 3)
    d1 = LinearMap(lambda p: {p: phi * p.degree / b}, spec)
    d2 = LinearMap(lambda p: {p: p.degree}, spec)
    from gdforge.families import assoc_A

    gd = gd_theorem35(assoc_A(spec), d1, d2, "b", b, keys)
    want_br = classified_bracket("b-notin", spec, b=b, phi=phi)
    want_circ = novikov_A(b, spec)
    for p in keys:
        for q in keys:
            assert gd.bracket.on_keys(p, q) == want_br.on_keys(p, q)
            assert gd.circ.on_keys(p, q) == want_circ.on_keys(p, q)
    assert passes(gd, keys)
