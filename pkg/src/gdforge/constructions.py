"""General GD constructions over Laurent-Grassmann algebras.

Each constructor returns a :class:`GDStructure` whose ``keys`` form its
declared sample window; the checkers in :mod:`gdforge.checks` run on
``cube(structure.keys)``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

from .checks import CheckReport, Failure, check_lie_super
from .errors import (
    ConditionViolated,
    NonCommutingDerivations,
    NonConstantXi,
    OddDerivation,
    OddXi,
    TwistMismatch,
)
from .graded import BilinearRule, Element, GDStructure, LinearMap, _as_element
from .linear import as_scalar
from .superalg import (
    Derivation,
    Mono,
    SuperCommAlg,
    VectorField,
    commutator,
    derivation,
    monomial_window,
)

__all__ = [
    "NKey",
    "PairKey",
    "PoissonStructure",
    "TwoDerivationOps",
    "check_lie_combo",
    "check_triple_bracket",
    "gd_lie_poisson",
    "gd_pair_construction",
    "gd_semidirect_W",
    "gd_theorem35",
    "novikov_from_derivation",
    "pair_condition_residual",
    "pair_witness",
    "standard_poisson",
    "triple_bracket",
    "triple_bracket_closed_form",
    "two_derivation_ops",
]


def _sign(e: int) -> int:
    return -1 if e & 1 else 1


def _even_part(x: Element, A) -> Element:
    return x.parity_parts().get(0, Element({}, A))


def novikov_from_derivation(A: SuperCommAlg, d: LinearMap, xi=0) -> BilinearRule:
    """u ∘ v = u·d(v) + ξ·u·v for an even derivation d and even ξ."""
    if d.parity:
        raise OddDerivation("the Novikov product needs an even derivation")
    xi = _as_algebra(A, xi)
    if 1 in xi.parity_parts():
        raise OddXi(f"ξ = {xi} has an odd component")
    mult = A.mult()

    def kernel(p: Mono, q: Mono):
        u = Element({p: 1}, A)
        v = Element({q: 1}, A)
        return (mult(u, d(v)) + mult(xi, mult(u, v))).terms

    return BilinearRule(kernel, A, "novikov-from-derivation", {"xi": str(xi)})


def _as_algebra(A: SuperCommAlg, x) -> Element:
    if isinstance(x, Element):
        return x
    return A.scalar(as_scalar(x))


# ---------------------------------------------------------------------------
# W(A) ⋉ A


@dataclass(frozen=True)
class SemidirectSpace:
    A: SuperCommAlg


class NKey(NamedTuple):
    """slot 0: a vector field c·∂_g; slot 1: a monomial of A."""

    slot: int
    key: Any

    @property
    def parity(self) -> int:
        return self.key.parity

    def __str__(self) -> str:
        return f"[{self.key}]" if self.slot == 0 else str(self.key)


def _field_derivation(A: SuperCommAlg, vf: VectorField) -> Derivation:
    return derivation(A, {vf.gen: Element({vf.coef: 1}, A)}, vf.parity)


def _fields_of(A: SuperCommAlg, f) -> Element:
    if isinstance(f, Derivation):
        return f.field()
    if isinstance(f, VectorField):
        return Element({f: 1}, ("W", A))
    return f


def gd_semidirect_W(A: SuperCommAlg, sample_fields: Iterable,
                    monomials: Iterable[Mono] | None = None) -> GDStructure:
    """W(A) ⊕ A with the semidirect bracket and the module product.

    [d1 + ξ1, d2 + ξ2] = [d1, d2] + d1(ξ2) - (-1)^{ij} d2(ξ1)
    (d1 + ξ1) ∘ (d2 + ξ2) = (-1)^{ij} ξ2·d1 + ξ1·ξ2
    """
    space = SemidirectSpace(A)
    mult = A.mult()

    def wrap(slot, terms):
        return {NKey(slot, k): c for k, c in terms.items()}

    def bracket(p: NKey, q: NKey):
        if p.slot == 0 and q.slot == 0:
            d = commutator(_field_derivation(A, p.key), _field_derivation(A, q.key))
            return wrap(0, d.field().terms)
        if p.slot == 0 and q.slot == 1:
            return wrap(1, _field_derivation(A, p.key).on_keys(q.key))
        if p.slot == 1 and q.slot == 0:
            s = -_sign(p.parity * q.parity)
            return {k: s * c for k, c in wrap(1, _field_derivation(A, q.key).on_keys(p.key)).items()}
        return {}

    def circ(p: NKey, q: NKey):
        if q.slot != 1:
            return {}
        if p.slot == 1:
            return wrap(1, mult.on_keys(p.key, q.key))
        s = _sign(p.parity * q.parity)
        out = {}
        for mono, c in mult.on_keys(q.key, p.key.coef).items():
            k = NKey(0, VectorField(mono, p.key.gen))
            out[k] = out.get(k, 0) + s * c
        return out

    keys = set()
    for f in sample_fields:
        keys.update(NKey(0, vf) for vf in _fields_of(A, f).terms)
    mons = monomial_window(A, 1) if monomials is None else monomials
    keys.update(NKey(1, m) for m in mons)
    return GDStructure(
        BilinearRule(bracket, space, "semidirect-bracket"),
        BilinearRule(circ, space, "semidirect-circ"),
        space,
        tuple(sorted(keys)),
    )


# ---------------------------------------------------------------------------
# Lie-Poisson


@dataclass(frozen=True)
class PoissonStructure:
    A: SuperCommAlg
    bracket: BilinearRule

    def leibniz_residual(self, u, v, w) -> Element:
        """[u, v·w] - [u, v]·w - (-1)^{|u||v|} v·[u, w] on homogeneous u, v."""
        A, br, m = self.A, self.bracket, self.A.mult()
        u, v, w = (_as_element(x, A) for x in (u, v, w))
        return br(u, m(v, w)) - m(br(u, v), w) - m(v, br(u, w)) * _sign(u.parity * v.parity)


def standard_poisson(A: SuperCommAlg, i: int = 1, j: int = 2) -> PoissonStructure:
    """{f, g} = ∂_i f · ∂_j g - ∂_j f · ∂_i g on two even variables."""
    di = derivation(A, {("t", i): A.one()})
    dj = derivation(A, {("t", j): A.one()})
    mult = A.mult()

    def kernel(p: Mono, q: Mono):
        f = Element({p: 1}, A)
        g = Element({q: 1}, A)
        return (mult(di(f), dj(g)) - mult(dj(f), di(g))).terms

    return PoissonStructure(A, BilinearRule(kernel, A, f"poisson(t{i},t{j})"))


def _constant(A: SuperCommAlg, xi):
    if not isinstance(xi, Element):
        return as_scalar(xi)
    if not A.is_constant(xi):
        raise NonConstantXi(f"ξ = {xi} is not a constant")
    return xi.coeff(Mono((0,) * A.p, ()))


def gd_lie_poisson(A: SuperCommAlg, P: PoissonStructure, d: LinearMap, xi,
                   monomials: Sequence[Mono] | None = None) -> GDStructure:
    """Bracket P and u ∘ v = u·d(v) + ξ·u·v, after checking
    d[u, v] = [d(u), v] + [u, d(v)] + ξ[u, v] on every monomial pair."""
    if d.parity:
        raise OddDerivation("the twisted derivation must be even")
    c = _constant(A, xi)
    mons = list(monomial_window(A, 1) if monomials is None else monomials)
    br = P.bracket
    for p in mons:
        for q in mons:
            u, v = Element({p: 1}, A), Element({q: 1}, A)
            res = d(br(u, v)) - br(d(u), v) - br(u, d(v)) - br(u, v) * c
            if res:
                raise TwistMismatch(u, v, res)
    circ = novikov_from_derivation(A, d, c)
    return GDStructure(br, circ, A, tuple(mons))


# ---------------------------------------------------------------------------
# A × A with a parity split


@dataclass(frozen=True)
class PairSpace:
    A: SuperCommAlg


class PairKey(NamedTuple):
    """(slot, monomial): slot 0 is the even copy, slot 1 the odd copy."""

    slot: int
    mono: Mono

    @property
    def parity(self) -> int:
        return self.slot

    def __str__(self) -> str:
        return f"({self.mono})_{self.slot}"


def pair_condition_residual(A: SuperCommAlg, d: LinearMap, xi, eta0, eta1) -> Element:
    """2ξη₁ - ξη₀ - d(ξ)."""
    m = A.mult()
    xi, eta0, eta1 = (_as_algebra(A, x) for x in (xi, eta0, eta1))
    return m(xi, eta1) * 2 - m(xi, eta0) - d(xi)


def gd_pair_construction(A: SuperCommAlg, d: LinearMap, xi, eta0, eta1, *,
                         validate: bool = True,
                         monomials: Sequence[Mono] | None = None) -> GDStructure:
    """Structure on A×A: [(u0,u1),(v0,v1)] = (ξu1v1, 0) and
    (u0,u1)∘(v0,v1) = (u0(dv0+η0v0), u1(dv0+η0v0) + u0(dv1+η1v1))."""
    if A.q:
        raise ValueError("the pair construction needs a commutative base algebra (q = 0)")
    if validate:
        res = pair_condition_residual(A, d, xi, eta0, eta1)
        if res:
            raise ConditionViolated("2ξη₁ = ξη₀ + d(ξ)", res)
    m = A.mult()
    xi, eta0, eta1 = (_as_algebra(A, x) for x in (xi, eta0, eta1))
    space = PairSpace(A)

    def lift(slot, x: Element):
        return {PairKey(slot, k): c for k, c in x.terms.items()}

    def bracket(p: PairKey, q: PairKey):
        if p.slot == 1 and q.slot == 1:
            return lift(0, m(xi, m(Element({p.mono: 1}, A), Element({q.mono: 1}, A))))
        return {}

    def circ(p: PairKey, q: PairKey):
        u = Element({p.mono: 1}, A)
        v = Element({q.mono: 1}, A)
        if q.slot == 0:
            return lift(p.slot, m(u, d(v) + m(eta0, v)))
        if p.slot == 0:
            return lift(1, m(u, d(v) + m(eta1, v)))
        return {}

    mons = monomial_window(A, 2) if monomials is None else monomials
    keys = tuple(PairKey(s, k) for s in (0, 1) for k in mons)
    return GDStructure(
        BilinearRule(bracket, space, "pair-bracket"),
        BilinearRule(circ, space, "pair-circ"),
        space,
        keys,
    )


def pair_witness(A: SuperCommAlg) -> tuple:
    """The triple (u, v, w) = ((0,1), (0,1), (1,0)) whose compatibility
    residual is (2ξη₁ - ξη₀ - d(ξ), 0)."""
    one = Mono((0,) * A.p, ())
    space = PairSpace(A)
    u = Element({PairKey(1, one): 1}, space)
    w = Element({PairKey(0, one): 1}, space)
    return u, u, w


# ---------------------------------------------------------------------------
# products from two commuting derivations


@dataclass(frozen=True)
class TwoDerivationOps:
    bracket_12: BilinearRule
    bracket_1: BilinearRule
    bracket_2: BilinearRule
    circ_1: BilinearRule
    circ_2: BilinearRule


def _check_commuting(ds: Sequence[LinearMap], keys) -> None:
    for a in range(len(ds)):
        for b in range(a + 1, len(ds)):
            for k in keys:
                res = ds[a](ds[b](k)) - ds[b](ds[a](k))
                if res:
                    raise NonCommutingDerivations(k, res)


def _default_keys(mult: BilinearRule, keys):
    if keys is not None:
        return list(keys)
    if isinstance(mult.space, SuperCommAlg):
        return monomial_window(mult.space, 2)
    raise ValueError("pass sample keys for a non-Laurent algebra")


def _bracket_ij(mult, di, dj, name):
    space = mult.space

    def kernel(p, q):
        u, v = Element({p: 1}, space), Element({q: 1}, space)
        return (mult(di(u), dj(v)) - mult(dj(u), di(v))).terms

    return BilinearRule(kernel, space, name)


def _bracket_i(mult, di, name):
    space = mult.space

    def kernel(p, q):
        u, v = Element({p: 1}, space), Element({q: 1}, space)
        return (mult(u, di(v)) - mult(di(u), v)).terms

    return BilinearRule(kernel, space, name)


def _circ_ib(mult, di, b, name):
    space = mult.space
    b = as_scalar(b)

    def kernel(p, q):
        u, v = Element({p: 1}, space), Element({q: 1}, space)
        return mult(u, di(v) + v * b).terms

    return BilinearRule(kernel, space, name, {"b": b})


def two_derivation_ops(mult: BilinearRule, d1: LinearMap, d2: LinearMap, b=0,
                       keys: Iterable | None = None) -> TwoDerivationOps:
    """[u,v]_{1,2} = d1(u)d2(v) - d2(u)d1(v), [u,v]_i = u d_i(v) - d_i(u) v,
    u ∘_{i,b} v = u (d_i + b)(v) on a commutative algebra with product ``mult``."""
    if d1.parity or d2.parity:
        raise OddDerivation("both derivations must be even")
    _check_commuting((d1, d2), _default_keys(mult, keys))
    return TwoDerivationOps(
        _bracket_ij(mult, d1, d2, "[,]_12"),
        _bracket_i(mult, d1, "[,]_1"),
        _bracket_i(mult, d2, "[,]_2"),
        _circ_ib(mult, d1, b, "o_1b"),
        _circ_ib(mult, d2, b, "o_2b"),
    )


def gd_theorem35(mult: BilinearRule, d1: LinearMap, d2: LinearMap, variant: str, b=0,
                 keys: Iterable | None = None) -> GDStructure:
    """variant "a": ([,]_{1,2} + [,]_2, ∘_{2,0});
    variant "b": ([,]_{2,1} + b[,]_1, ∘_{2,b})."""
    sample = _default_keys(mult, keys)
    if variant == "a":
        ops = two_derivation_ops(mult, d1, d2, 0, sample)
        bracket = ops.bracket_12 + ops.bracket_2
    elif variant == "b":
        ops = two_derivation_ops(mult, d1, d2, b, sample)
        bracket = _bracket_ij(mult, d2, d1, "[,]_21") + ops.bracket_1.scaled(b)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return GDStructure(bracket, ops.circ_2, mult.space, tuple(sample))


def triple_bracket_closed_form(mult: BilinearRule, ds: Sequence[LinearMap],
                               i: int, j: int, l: int, u, v, w) -> Element:
    """Signed sum of the six products d_a(u) d_b(v) d_c(w) over orderings of (i, j, l)."""
    space = mult.space
    u, v, w = (_as_element(x, space) for x in (u, v, w))
    d = {n: ds[n - 1] for n in (i, j, l)}

    def term(a, b, c):
        return mult(mult(d[a](u), d[b](v)), d[c](w))

    return (term(i, l, j) + term(j, i, l) + term(l, j, i)
            - term(i, j, l) - term(j, l, i) - term(l, i, j))


def triple_bracket(mult: BilinearRule, ds: Sequence[LinearMap],
                   i: int, j: int, l: int, u, v, w) -> Element:
    """[[u,v]_{i,j},w]_l + [[u,v]_l,w]_{i,j} summed cyclically over (u, v, w)."""
    space = mult.space
    u, v, w = (_as_element(x, space) for x in (u, v, w))
    bij = _bracket_ij(mult, ds[i - 1], ds[j - 1], "")
    bl = _bracket_i(mult, ds[l - 1], "")
    total = Element({}, space)
    for a, b, c in ((u, v, w), (v, w, u), (w, u, v)):
        total = total + bl(bij(a, b), c) + bij(bl(a, b), c)
    return total


def _triples_of(sample) -> list:
    return list(sample)


def check_triple_bracket(mult: BilinearRule, ds: Sequence[LinearMap], triples,
                         ijl: tuple = (1, 2, 3), limit: int | None = 100) -> CheckReport:
    """Per triple: the six-term bracket sum minus its closed form, and the
    sum with indices (i, j, j), which must vanish."""
    _check_commuting(ds, {k for t in _triples_of(triples) for k in t if not isinstance(k, Element)})
    i, j, l = ijl
    failures, count, n = [], 0, 0
    for t in _triples_of(triples):
        n += 1
        parts = (
            ("closed-form", triple_bracket(mult, ds, i, j, l, *t)
             - triple_bracket_closed_form(mult, ds, i, j, l, *t)),
            ("ijj-vanishing", triple_bracket(mult, ds, i, j, j, *t)),
        )
        for part, res in parts:
            if res:
                count += 1
                if limit is None or len(failures) < limit:
                    failures.append(Failure(part, t, res))
    return CheckReport("triple-bracket", n, tuple(failures), count,
                       ("closed-form", "ijj-vanishing"), {"ijl": list(ijl)})


def check_lie_combo(mult: BilinearRule, d1: LinearMap, d2: LinearMap, lam, triples,
                    limit: int | None = 100) -> CheckReport:
    """Lie axioms for [,]_{1,2} + λ[,]_1."""
    ops = two_derivation_ops(mult, d1, d2, 0, {k for t in _triples_of(triples) for k in t
                                              if not isinstance(k, Element)})
    lam = as_scalar(lam)
    bracket = ops.bracket_12 + ops.bracket_1.scaled(lam) if lam else ops.bracket_12
    return check_lie_super(bracket, triples, limit)
