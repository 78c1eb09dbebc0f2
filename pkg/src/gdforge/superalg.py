"""Laurent polynomials in even t_1..t_p tensor the Grassmann algebra on θ_1..θ_q."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple

from .errors import BasisMismatch
from .graded import BilinearRule, Element, LinearMap

__all__ = [
    "Derivation",
    "Mono",
    "SuperCommAlg",
    "VectorField",
    "commutator",
    "derivation",
    "euler",
    "field_from_values",
    "field_values",
    "monomial_window",
    "partial",
]


class Mono(NamedTuple):
    """t^exps θ_{odd[0]} θ_{odd[1]} ... with ``odd`` strictly increasing."""

    exps: tuple
    odd: tuple = ()

    @property
    def parity(self) -> int:
        return len(self.odd) & 1

    def __str__(self) -> str:
        parts = []
        for i, e in enumerate(self.exps, 1):
            if e == 1:
                parts.append(f"t{i}")
            elif e:
                parts.append(f"t{i}^{e}")
        parts.extend(f"θ{j}" for j in self.odd)
        return "*".join(parts) or "1"


def _merge_odd(a: tuple, b: tuple):
    """Sign and sorted union of two Grassmann words, or (0, None) if they overlap."""
    if not a or not b:
        return 1, a + b
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


@dataclass(frozen=True)
class SuperCommAlg:
    """C[t_1^{±1},...,t_p^{±1}] ⊗ Λ(θ_1,...,θ_q) over Q."""

    p: int
    q: int = 0

    def mono(self, exps: Iterable[int] = (), odd: Iterable[int] = ()) -> tuple[int, Mono]:
        """Sign and canonical monomial for t^exps times the word θ_{odd...}."""
        exps = tuple(exps) or (0,) * self.p
        word = tuple(odd)
        if len(exps) != self.p:
            raise BasisMismatch(f"expected {self.p} exponents")
        if any(not 1 <= j <= self.q for j in word) or len(set(word)) != len(word):
            raise ValueError(f"bad odd word {word}")
        inv = sum(1 for i, x in enumerate(word) for y in word[i + 1:] if x > y)
        return (-1 if inv & 1 else 1), Mono(exps, tuple(sorted(word)))

    def elem(self, terms: Mapping | Iterable = ()) -> Element:
        return Element(terms, self)

    def monomial(self, exps=(), odd=(), coeff=1) -> Element:
        sign, m = self.mono(exps, odd)
        return Element({m: sign * coeff}, self)

    def one(self) -> Element:
        return self.monomial()

    def t(self, i: int, power: int = 1) -> Element:
        exps = [0] * self.p
        exps[i - 1] = power
        return self.monomial(exps)

    def theta(self, j: int) -> Element:
        return self.monomial((), (j,))

    def scalar(self, c) -> Element:
        return self.monomial(coeff=c)

    @property
    def generators(self) -> tuple:
        return tuple(("t", i) for i in range(1, self.p + 1)) + tuple(
            ("θ", j) for j in range(1, self.q + 1)
        )

    def generator_element(self, g) -> Element:
        kind, i = g
        return self.t(i) if kind == "t" else self.theta(i)

    def mult(self) -> BilinearRule:
        def kernel(a: Mono, b: Mono):
            sign, word = _merge_odd(a.odd, b.odd)
            if not sign:
                return {}
            exps = tuple(x + y for x, y in zip(a.exps, b.exps))
            return {Mono(exps, word): sign}

        return _cached_rule(self, "mult", kernel)

    def is_constant(self, x: Element) -> bool:
        zero = Mono((0,) * self.p, ())
        return all(k == zero for k in x.terms)


_RULES: dict = {}


def _cached_rule(space, name, kernel) -> BilinearRule:
    key = (space, name)
    rule = _RULES.get(key)
    if rule is None:
        rule = _RULES[key] = BilinearRule(kernel, space, name)
    return rule


def monomial_window(A: SuperCommAlg, N: int, L: int | None = None) -> list[Mono]:
    """Monomials with exponents in [-N, N] and Grassmann words of length <= L."""
    L = A.q if L is None else L
    words = [w for r in range(min(L, A.q) + 1) for w in combinations(range(1, A.q + 1), r)]
    return [Mono(e, w) for e in product(range(-N, N + 1), repeat=A.p) for w in words]


class VectorField(NamedTuple):
    """The basis element coef · ∂/∂(generator) of W(A)."""

    coef: Mono
    gen: tuple  # ("t", i) or ("θ", j)

    @property
    def parity(self) -> int:
        return (self.coef.parity + (self.gen[0] == "θ")) & 1

    def __str__(self) -> str:
        g = f"t{self.gen[1]}" if self.gen[0] == "t" else f"θ{self.gen[1]}"
        return f"{self.coef}*d/d{g}"


def _gen_parity(g) -> int:
    return 1 if g[0] == "θ" else 0


class Derivation(LinearMap):
    """Derivation of a SuperCommAlg fixed by its values on the generators."""

    def __init__(self, A: SuperCommAlg, values: Mapping, parity: int = 0, name: str = ""):
        vals = {g: v for g, v in values.items() if v}
        for g, v in vals.items():
            for k in v.terms:
                if (k.parity + _gen_parity(g)) & 1 != parity:
                    raise ValueError(
                        f"value on {g} has the wrong parity for a derivation of parity {parity}"
                    )
        self.A = A
        self.values = vals
        super().__init__(self._apply_mono, A, parity, name)

    def _apply_mono(self, m: Mono):
        A, mult, vals = self.A, self.A.mult(), self.values
        total = Element({}, A)
        # d(t^e) θ_S: even variables first, then the Grassmann word left to right
        for i, e in enumerate(m.exps, 1):
            dv = vals.get(("t", i))
            if dv is None or not e:
                continue
            exps = list(m.exps)
            exps[i - 1] -= 1
            total = total + mult(dv, Element({Mono(tuple(exps), m.odd): e}, A))
        even = Element({Mono(m.exps, ()): 1}, A)
        unit = (0,) * A.p
        for r, j in enumerate(m.odd):
            dv = vals.get(("θ", j))
            if dv is None:
                continue
            left = Element({Mono(unit, m.odd[:r]): 1}, A)
            right = Element({Mono(unit, m.odd[r + 1:]): 1}, A)
            term = mult(mult(even, left), mult(dv, right))
            total = total - term if (self.parity and r & 1) else total + term
        return total.terms

    def field(self) -> Element:
        """The same derivation as an element of W(A)."""
        return field_from_values(self.A, self.values)

    def __repr__(self) -> str:
        return f"Derivation({self.name or '?'}, parity={self.parity})"


def derivation(A: SuperCommAlg, values: Mapping, parity: int = 0, name: str = "") -> Derivation:
    return Derivation(A, values, parity, name)


def euler(A: SuperCommAlg, weights: Iterable | None = None) -> Derivation:
    """Σ w_i t_i ∂_{t_i}; all weights 1 by default."""
    weights = [1] * A.p if weights is None else list(weights)
    return Derivation(
        A, {("t", i): A.t(i) * w for i, w in enumerate(weights, 1)}, 0, "euler"
    )


def partial(A: SuperCommAlg, gen) -> Derivation:
    return Derivation(A, {gen: A.one()}, _gen_parity(gen), f"d/d{gen[0]}{gen[1]}")


def commutator(d1: Derivation, d2: Derivation) -> Derivation:
    """The super commutator [d1, d2] = d1 d2 - (-1)^{|d1||d2|} d2 d1."""
    A = d1.A
    sign = -1 if d1.parity * d2.parity else 1
    vals = {}
    for g in A.generators:
        x = A.generator_element(g)
        vals[g] = d1(d2(x)) - d2(d1(x)) * sign
    return Derivation(A, vals, (d1.parity + d2.parity) & 1, f"[{d1.name},{d2.name}]")


def field_values(A: SuperCommAlg, field: Element) -> dict:
    """Generator values of the derivation represented by a W(A) element."""
    out: dict = {}
    for vf, c in field.items():
        out[vf.gen] = out.get(vf.gen, Element({}, A)) + Element({vf.coef: c}, A)
    return out


def field_from_values(A: SuperCommAlg, values: Mapping) -> Element:
    terms = {}
    for g, v in values.items():
        for mono, c in v.items():
            terms[VectorField(mono, g)] = c
    return Element(terms, ("W", A))
