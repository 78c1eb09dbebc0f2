"""Z2-graded sparse vectors, bilinear rules and linear maps.

Basis keys are hashable, totally ordered values exposing ``.parity``. The
A-type spaces use :class:`BasisIndex`; other spaces (Laurent-Grassmann
algebras, pair constructions) bring their own key types.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple

from .errors import BasisMismatch, NonHomogeneous
from .linear import as_scalar

__all__ = [
    "BasisIndex",
    "BasisSpec",
    "BilinearRule",
    "Element",
    "GDStructure",
    "LinearMap",
    "commutator_rule",
    "evaluate",
    "window",
    "zero_rule",
]

PARITY_RULES: dict[str, Callable[[int, int], int]] = {
    "even": lambda k, level: 0,
    "degree": lambda k, level: k & 1,
    "level": lambda k, level: level & 1,
}


class BasisIndex(NamedTuple):
    """The basis vector x_{k/m, level}."""

    k: int
    level: int
    parity: int
    m: int

    @property
    def degree(self) -> Fraction:
        return Fraction(self.k, self.m)

    def __str__(self) -> str:
        return f"x[{self.degree},{self.level}]"


@dataclass(frozen=True)
class BasisSpec:
    """Index family of A_{Δ,Γ}: Δ = (1/m)Z, Γ = N if ``levels`` else {0}.

    ``parity`` names a rule from :data:`PARITY_RULES`.
    """

    m: int = 1
    levels: bool = False
    parity: str = "even"

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("m must be positive")
        if self.parity not in PARITY_RULES:
            raise ValueError(f"unknown parity rule {self.parity!r}")

    def contains(self, s) -> bool:
        return (as_scalar(s) * self.m).denominator == 1

    def index(self, k: int, level: int = 0) -> BasisIndex | None:
        """Key for x_{k/m,level}, or None when the index is out of range."""
        if level < 0 or (level and not self.levels):
            return None
        return BasisIndex(k, level, PARITY_RULES[self.parity](k, level), self.m)

    def key(self, degree, level: int = 0) -> BasisIndex:
        d = as_scalar(degree) * self.m
        if d.denominator != 1:
            raise ValueError(f"degree {degree} is not in (1/{self.m})Z")
        key = self.index(int(d), level)
        if key is None:
            raise ValueError(f"level {level} is not available")
        return key

    def x(self, degree, level: int = 0) -> Element:
        return Element({self.key(degree, level): 1}, self)

    def zero(self) -> Element:
        return Element({}, self)


def window(spec: BasisSpec, N: int, L: int = 0) -> list[BasisIndex]:
    """Keys with |k| <= N and level <= L, ordered by (k, level)."""
    levels = range(L + 1) if spec.levels else range(1)
    return [spec.index(k, i) for k in range(-N, N + 1) for i in levels]


def _same_space(a, b):
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise BasisMismatch(f"elements live in different spaces: {a!r} vs {b!r}")


class Element:
    """Finite linear combination of basis keys with exact coefficients."""

    __slots__ = ("terms", "space")

    def __init__(self, terms: Mapping | Iterable = (), space: Any = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for k, c in items:
            c = as_scalar(c)
            if c:
                v = acc.get(k, 0) + c
                if v:
                    acc[k] = v
                else:
                    del acc[k]
        self.terms = acc
        self.space = space

    @classmethod
    def basis(cls, key, space: Any = None) -> Element:
        return cls({key: Fraction(1)}, space)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def items(self):
        return self.terms.items()

    def coeff(self, key) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, Element):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _merge(self, other: Element, sign: int) -> Element:
        space = _same_space(self.space, other.space)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + sign * c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        e = Element.__new__(Element)
        e.terms, e.space = out, space
        return e

    def __add__(self, other):
        if isinstance(other, Element):
            return self._merge(other, 1)
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Element):
            return self._merge(other, -1)
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self) -> Element:
        e = Element.__new__(Element)
        e.terms, e.space = {k: -c for k, c in self.terms.items()}, self.space
        return e

    def __mul__(self, c) -> Element:
        if isinstance(c, Element):
            return NotImplemented
        c = as_scalar(c)
        e = Element.__new__(Element)
        e.terms = {k: c * v for k, v in self.terms.items()} if c else {}
        e.space = self.space
        return e

    __rmul__ = __mul__

    def parity_parts(self) -> dict[int, Element]:
        parts: dict[int, dict] = {}
        for k, c in self.terms.items():
            parts.setdefault(k.parity, {})[k] = c
        return {p: Element(t, self.space) for p, t in sorted(parts.items())}

    @property
    def parity(self) -> int:
        ps = {k.parity for k in self.terms}
        if len(ps) > 1:
            raise NonHomogeneous("element mixes even and odd components")
        return ps.pop() if ps else 0

    def __repr__(self) -> str:
        return f"Element({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self:
            parts.append(str(k) if c == 1 else f"({c})*{k}")
        return " + ".join(parts)


def _as_element(x, space) -> Element:
    if isinstance(x, Element):
        return x
    return Element.basis(x, space)


class BilinearRule:
    """Bilinear product given by its values on pairs of basis keys.

    ``kernel(p, q)`` returns a mapping key -> scalar (zero terms allowed);
    results are memoized per key pair.
    """

    def __init__(
        self,
        kernel: Callable[[Any, Any], Mapping],
        space: Any = None,
        name: str = "",
        params: Mapping | None = None,
    ):
        self.kernel = kernel
        self.space = space
        self.name = name
        self.params = dict(params or {})
        self._cache: dict = {}

    def on_keys(self, p, q) -> dict:
        key = (p, q)
        hit = self._cache.get(key)
        if hit is None:
            hit = {k: as_scalar(c) for k, c in self.kernel(p, q).items() if c}
            self._cache[key] = hit
        return hit

    def __call__(self, a, b) -> Element:
        return evaluate(self, a, b)

    def __add__(self, other: BilinearRule) -> BilinearRule:
        space = _same_space(self.space, other.space)

        def kernel(p, q):
            out = dict(self.on_keys(p, q))
            for k, c in other.on_keys(p, q).items():
                out[k] = out.get(k, 0) + c
            return out

        return BilinearRule(kernel, space, f"({self.name})+({other.name})")

    def scaled(self, c) -> BilinearRule:
        c = as_scalar(c)

        def kernel(p, q):
            return {k: c * v for k, v in self.on_keys(p, q).items()}

        return BilinearRule(kernel, self.space, f"{c}*({self.name})")

    def __repr__(self) -> str:
        return f"BilinearRule({self.name or '?'})"


def evaluate(rule: BilinearRule, a, b) -> Element:
    """Bilinear extension of ``rule`` to elements (basis keys are accepted)."""
    a = _as_element(a, rule.space)
    b = _as_element(b, rule.space)
    space = _same_space(_same_space(rule.space, a.space), b.space)
    acc: dict = {}
    for p, c1 in a.terms.items():
        for q, c2 in b.terms.items():
            c = c1 * c2
            for k, v in rule.on_keys(p, q).items():
                acc[k] = acc.get(k, 0) + c * v
    return Element(acc, space)


def zero_rule(space: Any = None) -> BilinearRule:
    return BilinearRule(lambda p, q: {}, space, "zero")


def commutator_rule(circ: BilinearRule) -> BilinearRule:
    """[u,v] = u∘v - (-1)^{|u||v|} v∘u on basis keys."""

    def kernel(p, q):
        out = dict(circ.on_keys(p, q))
        sign = -1 if p.parity & q.parity else 1
        for k, c in circ.on_keys(q, p).items():
            out[k] = out.get(k, 0) - sign * c
        return out

    return BilinearRule(kernel, circ.space, f"commutator({circ.name})")


class LinearMap:
    """Linear operator given on basis keys; ``parity`` is its Z2 degree."""

    def __init__(self, on_key: Callable[[Any], Mapping], space: Any = None,
                 parity: int = 0, name: str = ""):
        self._on_key = on_key
        self.space = space
        self.parity = parity
        self.name = name
        self._cache: dict = {}

    def on_keys(self, p) -> dict:
        hit = self._cache.get(p)
        if hit is None:
            hit = {k: as_scalar(c) for k, c in self._on_key(p).items() if c}
            self._cache[p] = hit
        return hit

    def __call__(self, a) -> Element:
        a = _as_element(a, self.space)
        space = _same_space(self.space, a.space)
        acc: dict = {}
        for p, c in a.terms.items():
            for k, v in self.on_keys(p).items():
                acc[k] = acc.get(k, 0) + c * v
        return Element(acc, space)


@dataclass(frozen=True)
class GDStructure:
    bracket: BilinearRule
    circ: BilinearRule
    space: Any = None
    keys: tuple = field(default=(), compare=False)

    def __post_init__(self):
        _same_space(self.bracket.space, self.circ.space)
