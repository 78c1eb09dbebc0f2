"""Quadratic conformal superalgebras built from GD bialgebras.

Elements of R = C[∂]V are :class:`DPoly` values (sparse maps
(∂-power, basis key) -> scalar). Y⁺(u, z)v = Σ_n u₍ₙ₎v z^{-n-1} is evaluated
on all of R through the translation rules

    Y⁺(∂^a u, z) ∂^b v = (∂ - d/dz)^b (d/dz)^a Y⁺(u, z)v,

and the axioms are checked by exact residue calculus on Laurent polynomials.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from fractions import Fraction
from math import comb, factorial

try:  # exact rationals, an order of magnitude faster than Fraction in the residue loops
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

from .checks import CheckReport, Failure
from .errors import NotQuadratic
from .graded import BilinearRule, Element, GDStructure
from .linear import as_scalar

__all__ = [
    "ConformalStructure",
    "DPoly",
    "ZSeries",
    "check_cross_term",
    "check_jacobi",
    "check_skew",
    "compat_coefficient",
    "cross_term_residual",
    "degree_split",
    "from_gd",
    "jacobi_residual",
    "skew_residual",
    "to_gd",
    "yplus",
]


def _sign(e: int) -> int:
    return -1 if e & 1 else 1


def _acc(out: dict, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class DPoly:
    """A finite sum Σ ∂^n w_n with w_n ∈ V."""

    __slots__ = ("terms", "space")

    def __init__(self, terms: Mapping = (), space=None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for (n, k), c in items:
            if n < 0:
                raise ValueError("negative ∂-power")
            _acc(clean, (n, k), as_scalar(c))
        self.terms = clean
        self.space = space

    @classmethod
    def lift(cls, x, power: int = 0, space=None) -> DPoly:
        """∂^power x for x an Element or a basis key."""
        if isinstance(x, Element):
            return cls({(power, k): c for k, c in x.terms.items()}, x.space)
        return cls({(power, x): 1}, space)

    def coeff(self, power: int) -> Element:
        return Element({k: c for (n, k), c in self.terms.items() if n == power}, self.space)

    def partial(self, times: int = 1) -> DPoly:
        return DPoly({(n + times, k): c for (n, k), c in self.terms.items()}, self.space)

    @property
    def degree(self) -> int:
        return max((n for n, _ in self.terms), default=-1)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, DPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: DPoly) -> DPoly:
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return DPoly(out, self.space if self.space is not None else other.space)

    def __neg__(self) -> DPoly:
        return DPoly({k: -c for k, c in self.terms.items()}, self.space)

    def __sub__(self, other: DPoly) -> DPoly:
        return self + (-other)

    def __mul__(self, c) -> DPoly:
        c = as_scalar(c)
        return DPoly({k: c * v for k, v in self.terms.items()}, self.space)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"DPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (n, k), c in sorted(self.terms.items(), key=lambda t: (t[0][0], t[0][1])):
            d = "" if n == 0 else ("∂" if n == 1 else f"∂^{n}")
            parts.append(f"({c})*{d}{k}")
        return " + ".join(parts)


class ZSeries:
    """Laurent polynomial in the formal variables ``names`` with R coefficients.

    ``terms`` maps (exponent tuple, ∂-power, basis key) -> scalar.
    """

    __slots__ = ("terms", "names", "space")

    def __init__(self, terms: Mapping, names: Sequence[str] = ("z",), space=None):
        self.terms = {k: as_scalar(c) for k, c in terms.items() if c}
        self.names = tuple(names)
        self.space = space

    def coeff(self, *exps: int) -> DPoly:
        return DPoly(
            {(n, k): c for (e, n, k), c in self.terms.items() if e == exps}, self.space
        )

    @property
    def exponents(self) -> list[tuple]:
        return sorted({e for e, _, _ in self.terms})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, ZSeries):
            return self.names == other.names and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    def __sub__(self, other: ZSeries) -> ZSeries:
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, -c)
        return ZSeries(out, self.names, self.space)

    def __add__(self, other: ZSeries) -> ZSeries:
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return ZSeries(out, self.names, self.space)

    def __repr__(self) -> str:
        return f"ZSeries({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in self.exponents:
            mono = "*".join(f"{n}^{x}" for n, x in zip(self.names, e) if x)
            parts.append(f"[{self.coeff(*e)}]{'*' + mono if mono else ''}")
        return " + ".join(parts)


class ConformalStructure:
    """n-th products u₍ₙ₎v on basis keys; ``products(u, v)`` returns DPolys
    indexed by n = 0, 1, ..."""

    def __init__(self, products: Callable[[object, object], Sequence[DPoly]],
                 space=None, keys: Iterable = (), name: str = ""):
        self._products = products
        self.space = space
        self.keys = tuple(keys)
        self.name = name
        self._pcache: dict = {}
        self._acache: dict = {}

    def products(self, u, v) -> tuple:
        hit = self._pcache.get((u, v))
        if hit is None:
            hit = tuple(self._products(u, v))
            while hit and not hit[-1]:
                hit = hit[:-1]
            self._pcache[(u, v)] = hit
        return hit

    def act(self, a: int, u, b: int, v) -> dict:
        """Y⁺(∂^a u, z) ∂^b v as {(z exponent, ∂-power, key): scalar}."""
        ck = (a, u, b, v)
        hit = self._acache.get(ck)
        if hit is not None:
            return hit
        series: dict = {}
        for n, p in enumerate(self.products(u, v)):
            for (d, k), c in p.terms.items():
                _acc(series, (-n - 1, d, k), c)
        for _ in range(a):
            series = _ddz(series)
        if b:
            out: dict = {}
            cur = series
            for j in range(b + 1):
                if j:
                    cur = _ddz(cur)
                f = comb(b, j) * _sign(j)
                for (e, d, k), c in cur.items():
                    _acc(out, (e, d + b - j, k), f * c)
            series = out
        series = {k: _q(c) for k, c in series.items()}
        self._acache[ck] = series
        return series

    def __repr__(self) -> str:
        return f"ConformalStructure({self.name or '?'})"


def _ddz(series: dict) -> dict:
    out: dict = {}
    for (e, d, k), c in series.items():
        if e:
            _acc(out, (e - 1, d, k), e * c)
    return out


def from_gd(gd: GDStructure) -> ConformalStructure:
    """u₍₀₎v = ∂(v∘u) + [v,u] and u₍₁₎v = v∘u + (-1)^{|u||v|} u∘v."""
    br, circ = gd.bracket, gd.circ

    def products(u, v):
        vu = circ.on_keys(v, u)
        p0: dict = {}
        for k, c in vu.items():
            _acc(p0, (1, k), c)
        for k, c in br.on_keys(v, u).items():
            _acc(p0, (0, k), c)
        s = _sign(u.parity * v.parity)
        p1: dict = {}
        for k, c in vu.items():
            _acc(p1, (0, k), c)
        for k, c in circ.on_keys(u, v).items():
            _acc(p1, (0, k), s * c)
        return DPoly(p0, gd.space), DPoly(p1, gd.space)

    return ConformalStructure(products, gd.space, gd.keys, "from-gd")


def to_gd(Y: ConformalStructure) -> GDStructure:
    """Read [v,u] and v∘u off u₍₀₎v = ∂(v∘u) + [v,u]."""

    def p0(u, v) -> DPoly:
        ps = Y.products(u, v)
        if len(ps) > 2 or (ps and ps[0].degree > 1) or (len(ps) > 1 and ps[1].degree > 0):
            raise NotQuadratic(f"Y⁺({u}, z){v} is not of quadratic shape")
        return ps[0] if ps else DPoly({}, Y.space)

    def bracket(p, q):
        return p0(q, p).coeff(0).terms

    def circ(p, q):
        return p0(q, p).coeff(1).terms

    return GDStructure(
        BilinearRule(bracket, Y.space, "read-bracket"),
        BilinearRule(circ, Y.space, "read-circ"),
        Y.space,
        Y.keys,
    )


def _as_dpoly(x, space) -> DPoly:
    if isinstance(x, DPoly):
        return x
    return DPoly.lift(x, 0, space)


def yplus(Y: ConformalStructure, zeta, eta) -> ZSeries:
    """Y⁺(ζ, z)η for ζ, η in C[∂]V (DPoly, Element or basis key)."""
    zeta, eta = _as_dpoly(zeta, Y.space), _as_dpoly(eta, Y.space)
    out: dict = {}
    for (a, u), cu in zeta.terms.items():
        for (b, v), cv in eta.terms.items():
            f = _q(cu * cv)
            for (e, d, k), c in Y.act(a, u, b, v).items():
                _acc(out, ((e,), d, k), f * c)
    return ZSeries(out, ("z",), Y.space)


def _basis_terms(x, space) -> list[tuple]:
    if isinstance(x, Element):
        return list(x.terms.items())
    return [(x, Fraction(1))]


def _skew_keys(Y, u, v) -> dict:
    out: dict = {}
    for (e, d, k), c in Y.act(0, u, 0, v).items():
        _acc(out, ((e,), d, k), c)
    # (-1)^{ij} Res_x e^{x∂} Y⁺(v,-x)u / (z - x), with 1/(z-x) = Σ_t x^t z^{-t-1}
    s = _sign(u.parity * v.parity)
    for (m, d, k), c in Y.act(0, v, 0, u).items():
        base = s * _sign(m) * c
        for r in range(0, -m):  # t = -1 - m - r >= 0
            _acc(out, ((m + r,), d + r, k), -base / _q(factorial(r)))
    return out


def skew_residual(Y: ConformalStructure, u, v) -> ZSeries:
    """LHS minus RHS of the conformal skew-symmetry axiom."""
    out: dict = {}
    for ku, cu in _basis_terms(u, Y.space):
        for kv, cv in _basis_terms(v, Y.space):
            for key, c in _skew_keys(Y, ku, kv).items():
                _acc(out, key, _q(cu * cv) * c)
    return ZSeries(out, ("z",), Y.space)


def _gen_binom(n: int, t: int) -> int:
    num = 1
    for i in range(t):
        num *= n - i
    return num // factorial(t)


def _lhs(out, A, B, u, v, w, f):
    """f·(A(u,z1) B(v,z2) - (-1)^{ij} B(v,z2) A(u,z1)) w."""
    for (n2, d, k), c in B.act(0, v, 0, w).items():
        for (n1, d2, k2), c2 in A.act(0, u, d, k).items():
            _acc(out, ((n1, n2), d2, k2), f * c * c2)
    s = -f * _sign(u.parity * v.parity)
    for (n1, d, k), c in A.act(0, u, 0, w).items():
        for (n2, d2, k2), c2 in B.act(0, v, d, k).items():
            _acc(out, ((n1, n2), d2, k2), s * c * c2)


def _rhs(out, A, B, u, v, w, f):
    """Subtract f·Res_x A(B(u, z1-x)v, x) w / (z2 - x)."""
    for (n, d, k), c in B.act(0, u, 0, v).items():
        inner = A.act(d, k, 0, w)
        for (m, d2, k2), c2 in inner.items():
            for t in range(0, -m):
                coef = _gen_binom(n, t) * _sign(t)
                _acc(out, ((n - t, t + m), d2, k2), -f * c * c2 * coef)


def _triple_series(fn, u, v, w, space) -> ZSeries:
    out: dict = {}
    for ku, cu in _basis_terms(u, space):
        for kv, cv in _basis_terms(v, space):
            for kw, cw in _basis_terms(w, space):
                fn(out, ku, kv, kw, _q(cu * cv * cw))
    return ZSeries(out, ("z1", "z2"), space)


def jacobi_residual(Y: ConformalStructure, u, v, w) -> ZSeries:
    """LHS minus RHS of the conformal Jacobi axiom applied to w."""

    def fn(out, a, b, c, f):
        _lhs(out, Y, Y, a, b, c, f)
        _rhs(out, Y, Y, a, b, c, f)

    return _triple_series(fn, u, v, w, Y.space)


def compat_coefficient(Y: ConformalStructure, u, v, w) -> Element:
    """The GD compatibility residual read off the Jacobi axiom.

    For a structure coming from (bracket, circ) with a Novikov circ, the
    z1^-1 z2^-1 coefficient of the Jacobi residual is
    -(-1)^{|u||v|} ∂ G(u, v, w), G the compatibility residual; this returns
    G. ``u`` and ``v`` must be homogeneous.
    """
    coeff = jacobi_residual(Y, u, v, w).coeff(-1, -1)
    return coeff.coeff(1) * (-_sign(u.parity * v.parity))


def cross_term_residual(Y1: ConformalStructure, Y2: ConformalStructure, u, v, w) -> ZSeries:
    """Mixed-degree part of the Jacobi axiom for Y = Y1 + Y2."""

    def fn(out, a, b, c, f):
        _lhs(out, Y1, Y2, a, b, c, f)
        _lhs(out, Y2, Y1, a, b, c, f)
        _rhs(out, Y1, Y2, a, b, c, f)
        _rhs(out, Y2, Y1, a, b, c, f)

    return _triple_series(fn, u, v, w, Y1.space)


def _report(law, part, samples, residual_fn, limit) -> CheckReport:
    failures, count, n = [], 0, 0
    for inputs in samples:
        n += 1
        res = residual_fn(*inputs)
        if res:
            count += 1
            if limit is None or len(failures) < limit:
                failures.append(Failure(part, tuple(inputs), res))
    return CheckReport(law, n, tuple(failures), count, (part,))


def check_skew(Y: ConformalStructure, pairs, limit: int | None = 100) -> CheckReport:
    return _report("conformal-skew", "skew", pairs,
                   lambda u, v: skew_residual(Y, u, v), limit)


def check_jacobi(Y: ConformalStructure, triples, limit: int | None = 100) -> CheckReport:
    return _report("conformal-jacobi", "jacobi", triples,
                   lambda u, v, w: jacobi_residual(Y, u, v, w), limit)


def check_cross_term(Y1: ConformalStructure, Y2: ConformalStructure, triples,
                     limit: int | None = 100) -> CheckReport:
    return _report("conformal-cross-term", "cross-term", triples,
                   lambda u, v, w: cross_term_residual(Y1, Y2, u, v, w), limit)


def degree_split(Y: ConformalStructure) -> tuple[ConformalStructure, ConformalStructure]:
    """Split into the parts with ∂-power + pole order equal to 1 and to 2."""

    def parts(u, v):
        ps = Y.products(u, v)
        if len(ps) > 2:
            raise NotQuadratic(f"Y⁺({u}, z){v} has a pole of order {len(ps)}")
        y1, y2 = [], []
        for n, p in enumerate(ps):
            a, b = {}, {}
            for (d, k), c in p.terms.items():
                deg = d + n + 1
                if deg == 1:
                    a[(d, k)] = c
                elif deg == 2:
                    b[(d, k)] = c
                else:
                    raise NotQuadratic(f"term ∂^{d}{k} z^{-n - 1} in Y⁺({u}, z){v}")
            y1.append(DPoly(a, Y.space))
            y2.append(DPoly(b, Y.space))
        return y1, y2

    cache: dict = {}

    def get(u, v):
        hit = cache.get((u, v))
        if hit is None:
            hit = cache[(u, v)] = parts(u, v)
        return hit

    return (
        ConformalStructure(lambda u, v: get(u, v)[0], Y.space, Y.keys, "degree-1"),
        ConformalStructure(lambda u, v: get(u, v)[1], Y.space, Y.keys, "degree-2"),
    )
