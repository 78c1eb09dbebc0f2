"""Closed-form products on A_{Δ,Γ}, Δ = (1/m)Z.

The ``*_coeffs`` functions return structure constants as
``{(degree_shift, level_shift): coefficient}`` for the bracket of
x_{α,i} and x_{β,j}; the output index is (α+β+degree_shift, i+j+level_shift).
They only use ring operations on their arguments, so they can be evaluated
over any number type (the rule constructors use Fractions).
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import BasisMismatch, ConstraintViolated, LevelsNotSupported
from .graded import BasisIndex, BasisSpec, BilinearRule, Element
from .linear import as_scalar

__all__ = [
    "CASES",
    "GroupHom",
    "NonlinearityWitness",
    "SkewForm",
    "assoc_A",
    "classified_bracket",
    "diamond_xi",
    "novikov_A",
    "star_product",
    "witt_like_bracket",
    "xi_product",
]


@dataclass(frozen=True)
class GroupHom:
    """Additive map Δ -> Q fixed by its value on the generator 1/m."""

    generator_value: Fraction
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "generator_value", as_scalar(self.generator_value))

    def __call__(self, alpha) -> Fraction:
        return alpha * self.m * self.generator_value


@dataclass(frozen=True)
class SkewForm:
    """Skew-symmetric scalar function on Δ × Δ.

    kinds: ``bilinear`` (value on the generator pair; skewness forces 0 on a
    rank-1 Δ), ``hom-product`` (φ₁(α)φ₂(β) - φ₁(β)φ₂(α)) and ``map``
    (an arbitrary skew function, e.g. a finite table).
    """

    kind: str
    data: Any
    m: int = 1

    def __post_init__(self):
        if self.kind == "bilinear":
            v = as_scalar(self.data)
            if v:
                raise ConstraintViolated(
                    "skew-symmetry", "a skew Z-bilinear form on a rank-1 group is zero"
                )
            object.__setattr__(self, "data", v)
        elif self.kind not in ("hom-product", "map"):
            raise ValueError(f"unknown skew form kind {self.kind!r}")

    @classmethod
    def zero(cls, m: int = 1) -> SkewForm:
        return cls("bilinear", Fraction(0), m)

    @classmethod
    def from_table(cls, table: Mapping, m: int = 1) -> SkewForm:
        """Skew completion of ``{(α, β): value}``; unlisted pairs are 0."""
        full: dict = {}
        for (a, b), v in table.items():
            a, b, v = as_scalar(a), as_scalar(b), as_scalar(v)
            if a == b and v:
                raise ConstraintViolated("skew-symmetry", f"nonzero diagonal value at {a}")
            if (b, a) in full and full[(b, a)] != -v:
                raise ConstraintViolated("skew-symmetry", f"inconsistent values at ({a},{b})")
            full[(a, b)] = v
            full[(b, a)] = -v
        return cls("map", _TableMap(full), m)

    @property
    def is_bilinear(self) -> bool:
        return self.kind in ("bilinear", "hom-product")

    def __call__(self, alpha, beta):
        if self.kind == "bilinear":
            return alpha * beta * self.m * self.m * self.data
        if self.kind == "hom-product":
            f1, f2 = self.data
            return f1(alpha) * f2(beta) - f1(beta) * f2(alpha)
        return self.data(alpha, beta)

    def in_radical(self, b, probe=range(-3, 4)) -> bool:
        """Whether form(b, ·) vanishes (exact for bilinear kinds, sampled for maps)."""
        if self.is_bilinear:
            return self(b, Fraction(1, self.m)) == 0
        return all(self(b, Fraction(k, self.m)) == 0 for k in probe)


@dataclass(frozen=True)
class _TableMap:
    values: dict = field(hash=False)

    def __call__(self, a, b):
        return self.values.get((as_scalar(a), as_scalar(b)), Fraction(0))

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))


@dataclass(frozen=True)
class NonlinearityWitness:
    """Values of S_b(α, β, γ) on a finite set of degree triples."""

    values: dict
    b: Fraction = Fraction(0)

    @classmethod
    def from_form(cls, form: Callable, degrees, b=0) -> NonlinearityWitness:
        """S_b via its defining quotient; 0 on the α = -b slice."""
        b = as_scalar(b)
        vals = {}
        for a in degrees:
            for be in degrees:
                for g in degrees:
                    if a + b == 0:
                        vals[(a, be, g)] = Fraction(0)
                    else:
                        vals[(a, be, g)] = (form(be + g, a) - form(g, a) - form(be, a)) / (a + b)
        return cls(vals, b)

    def asymmetries(self) -> list[tuple]:
        """Triples where some transposition of arguments changes the value.

        Transpositions touching an argument equal to -b are exempt.
        """
        bad = []
        for (a, be, g), v in self.values.items():
            for perm in ((be, a, g), (a, g, be), (g, be, a)):
                w = self.values.get(perm)
                if w is None or w == v:
                    continue
                moved = {x for x, y in zip((a, be, g), perm) if x != y}
                if any(x + self.b == 0 for x in moved):
                    continue
                bad.append((a, be, g))
                break
        return bad


# ---------------------------------------------------------------------------
# structure-constant formulas


def b0_coeffs(alpha, beta, form, a):
    return {(0, 0): form(alpha, beta) + a * (beta - alpha)}


def b_notin_coeffs(alpha, beta, b, phi):
    return {(0, 0): (phi(beta) * alpha - phi(alpha) * beta + b * (phi(beta) - phi(alpha))) / b}


def b_in_coeffs(alpha, beta, b, phi, theta):
    return {
        ("b", 0): theta(alpha, beta),
        (0, 0): ((alpha + b) * phi(beta) - (beta + b) * phi(alpha)) / b,
    }


def block_like_coeffs(alpha, beta, b, phi1, form):
    return {
        ("b", 0): phi1(alpha) * form(b, beta) - phi1(beta) * form(b, alpha),
        (0, 0): form(alpha, beta),
    }


def gammaN_bnotin_coeffs(alpha, i, beta, j, b, phi, lam):
    return {
        (0, 0): ((alpha + b) * phi(beta) - (beta + b) * phi(alpha)) / b,
        (0, -1): (i * (phi(beta) - lam * (beta + b)) + j * (lam * (alpha + b) - phi(alpha))) / b,
    }


def r52_1_coeffs(alpha, i, beta, j, phi, form):
    return {(0, 0): form(alpha, beta), (0, -1): i * phi(beta) - j * phi(alpha)}


def r52_2_coeffs(alpha, i, beta, j, phi, lam):
    return {
        (0, 0): alpha * phi(beta) - beta * phi(alpha),
        (0, -1): i * (phi(beta) - lam * beta) + j * (lam * alpha - phi(alpha)),
    }


def r52_3_coeffs(alpha, i, beta, j, phi):
    return {
        (0, 0): alpha * phi(beta) - beta * phi(alpha) + beta - alpha,
        (0, -1): i * phi(beta) - j * phi(alpha) + j - i,
    }


def r52_c2_coeffs(alpha, i, beta, j, b, phi, phi1, phi2, lam):
    return {
        ("b", 0): phi1(alpha) * phi2(beta) - phi1(beta) * phi2(alpha),
        (0, 0): (alpha + b) * phi(beta) - (beta + b) * phi(alpha),
        (0, -1): i * (phi(beta) - lam * (beta + b)) + j * (lam * (alpha + b) - phi(alpha)),
    }


def r52_d_coeffs(alpha, i, beta, j, b, phi, phi1, form):
    return {
        ("b", 0): phi1(alpha) * form(b, beta) - phi1(beta) * form(b, alpha),
        (0, 0): form(alpha, beta),
        (0, -1): i * phi(beta) - j * phi(alpha),
    }


# ---------------------------------------------------------------------------
# Novikov-side rules


def novikov_A(b, spec: BasisSpec) -> BilinearRule:
    """x_{α,i} ∘ x_{β,j} = (β+b) x_{α+β,i+j} + j x_{α+β,i+j-1}."""
    b = as_scalar(b)
    m = spec.m

    def kernel(p: BasisIndex, q: BasisIndex):
        out = {}
        k, lv = p.k + q.k, p.level + q.level
        c = Fraction(q.k, m) + b
        if c:
            key = spec.index(k, lv)
            if key is not None:
                out[key] = c
        if q.level:
            key = spec.index(k, lv - 1)
            if key is not None:
                out[key] = out.get(key, 0) + q.level
        return out

    return BilinearRule(kernel, spec, "novikov_A", {"b": b})


def assoc_A(spec: BasisSpec) -> BilinearRule:
    """x_{α,i} · x_{β,j} = x_{α+β,i+j}."""

    def kernel(p, q):
        key = spec.index(p.k + q.k, p.level + q.level)
        return {} if key is None else {key: 1}

    return BilinearRule(kernel, spec, "assoc_A")


def _check_space(x: Element, spec: BasisSpec) -> None:
    if x.space is not None and x.space != spec:
        raise BasisMismatch("ξ does not live on the given basis")


def xi_product(xi: Element, spec: BasisSpec) -> BilinearRule:
    """u ∘₀ v = ξ · u · v with the associative product."""
    _check_space(xi, spec)
    terms = sorted(xi.items())

    def kernel(p, q):
        out = {}
        for r, c in terms:
            key = spec.index(p.k + q.k + r.k, p.level + q.level + r.level)
            if key is not None:
                out[key] = out.get(key, 0) + c
        return out

    return BilinearRule(kernel, spec, "xi_product", {"xi": xi})


def diamond_xi(xi: Element, spec: BasisSpec) -> BilinearRule:
    """x_{α,i} ⋄_ξ x_{β,j} = β x_{α+β,i+j} + ξ·x_{α+β,i+j} + j x_{α+β,i+j-1}."""
    _check_space(xi, spec)
    base = novikov_A(0, spec)
    extra = xi_product(xi, spec)

    def kernel(p, q):
        out = dict(base.on_keys(p, q))
        for k, c in extra.on_keys(p, q).items():
            out[k] = out.get(k, 0) + c
        return out

    return BilinearRule(kernel, spec, "diamond_xi", {"xi": xi})


def witt_like_bracket(spec: BasisSpec) -> BilinearRule:
    """[x_{α,i}, x_{β,j}] = (β-α) x_{α+β,i+j} + (j-i) x_{α+β,i+j-1}."""
    m = spec.m

    def kernel(p, q):
        out = {}
        k, lv = p.k + q.k, p.level + q.level
        c = Fraction(q.k - p.k, m)
        if c:
            key = spec.index(k, lv)
            if key is not None:
                out[key] = c
        if q.level != p.level:
            key = spec.index(k, lv - 1)
            if key is not None:
                out[key] = out.get(key, 0) + (q.level - p.level)
        return out

    return BilinearRule(kernel, spec, "witt_like_bracket")


def star_product(spec: BasisSpec) -> BilinearRule:
    """x_α ⋆ x_β = β x_{α+β} on Γ = {0}."""
    if spec.levels:
        raise LevelsNotSupported("the star product is defined for Γ = {0} only")
    m = spec.m

    def kernel(p, q):
        return {spec.index(p.k + q.k): Fraction(q.k, m)} if q.k else {}

    return BilinearRule(kernel, spec, "star_product")


# ---------------------------------------------------------------------------
# classified Lie brackets

CASES = (
    "b0",
    "b-notin",
    "b-in",
    "block-like",
    "gammaN-bnotin",
    "r52-1",
    "r52-2",
    "r52-3",
    "r52-c2",
    "r52-d",
)

_LEVEL_FREE = {"b0", "b-notin", "b-in", "block-like"}


def _hom(x, m) -> GroupHom:
    if x is None:
        return GroupHom(Fraction(0), m)
    if isinstance(x, GroupHom):
        if x.m != m:
            raise BasisMismatch("group homomorphism built for a different Δ")
        return x
    return GroupHom(as_scalar(x), m)


def _form(x, m) -> SkewForm:
    if x is None:
        return SkewForm.zero(m)
    if isinstance(x, SkewForm):
        return x
    if callable(x):
        return SkewForm("map", x, m)
    return SkewForm.from_table(x, m)


def _require(cond: bool, condition: str, detail: str = "") -> None:
    if not cond:
        raise ConstraintViolated(condition, detail)


def classified_bracket(case: str, spec: BasisSpec, *, b=0, phi=None, lam=0, a=0,
                       phi0=None, phi1=None, phi2=None, form=None, theta=None,
                       validate: bool = True) -> BilinearRule:
    """Lie bracket of one of the classified families.

    Parameters follow the case: ``phi``, ``phi0``, ``phi1``, ``phi2`` are group
    homomorphisms (GroupHom or generator values); ``form``/``theta`` are
    SkewForms (or callables / tables); ``b``, ``lam``, ``a`` are scalars.
    ``validate=False`` skips side-condition checks (used to build
    deliberately invalid candidates).
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    m = spec.m
    b = as_scalar(b)
    lam = as_scalar(lam)
    a = as_scalar(a)
    ph, ph1, ph2 = _hom(phi, m), _hom(phi1, m), _hom(phi2, m)
    if case in _LEVEL_FREE and spec.levels:
        raise LevelsNotSupported(f"case {case} is defined on Γ = {{0}}")
    b_in_delta = spec.contains(b)
    params: dict[str, Any] = {"b": b}

    if case == "b0":
        if validate:
            _require(b == 0, "b = 0 for case b0")
        if form is None and phi0 is not None:
            p0 = _hom(phi0, m)
            fm = SkewForm("map", lambda x, y, p0=p0: x * p0(y) - y * p0(x), m)
            params["phi0"] = p0
        else:
            fm = _form(form, m)
            if validate and fm.kind == "map":
                degs = [Fraction(k, m) for k in range(-3, 4)]
                bad = b0_condition_failures(fm, a, degs)
                _require(not bad, "S0 symmetric with (S0 - a)·cyclic(φ) = 0 for case b0",
                         f"fails at {bad[0]}" if bad else "")
        params.update(a=a, form=fm)

        def coeffs(al, i, be, j):
            return b0_coeffs(al, be, fm, a)

    elif case == "b-notin":
        if validate:
            _require(not b_in_delta, "b ∉ Δ for case b-notin")
        params["phi"] = ph

        def coeffs(al, i, be, j):
            return b_notin_coeffs(al, be, b, ph)

    elif case == "b-in":
        th = _form(theta, m)
        if validate:
            _require(b != 0 and b_in_delta, "0 ≠ b ∈ Δ for case b-in")
            if ph(b) != 0:
                zero = all(th(Fraction(x, m), Fraction(y, m)) == 0
                           for x in range(-3, 4) for y in range(-3, 4))
                _require(zero, "θ ≡ 0 when φ(b) ≠ 0 for case b-in")
            if th.kind == "hom-product":
                f1, f2 = th.data
                _require(f1(b) == 0, "φ₁(b) = 0 for a hom-product θ in case b-in")
                _require(f2(b) == -1, "φ₂(b) = -1 for a hom-product θ in case b-in")
            elif th.kind == "bilinear":
                _require(th.in_radical(b), "b ∈ Rad θ for case b-in")
        params.update(phi=ph, theta=th)

        def coeffs(al, i, be, j):
            return b_in_coeffs(al, be, b, ph, th)

    elif case == "block-like":
        fm = _form(form, m)
        if validate:
            _require(b != 0 and b_in_delta, "0 ≠ b ∈ Δ for case block-like")
            _require(fm.is_bilinear, "φ is a skew Z-bilinear form for case block-like")
            _require(not fm.in_radical(b), "b ∉ Rad φ for case block-like",
                     "every skew Z-bilinear form on a rank-1 group vanishes")
        params.update(phi1=ph1, form=fm)

        def coeffs(al, i, be, j):
            return block_like_coeffs(al, be, b, ph1, fm)

    elif case == "gammaN-bnotin":
        if validate:
            _require(not b_in_delta, "b ∉ Δ for case gammaN-bnotin")
        params.update(phi=ph, lam=lam)

        def coeffs(al, i, be, j):
            return gammaN_bnotin_coeffs(al, i, be, j, b, ph, lam)

    elif case == "r52-1":
        fm = _form(form, m)
        if validate:
            _require(b == 0, "b = 0 for case r52-1")
            _require(fm.is_bilinear, "φ is a skew Z-bilinear form for case r52-1")
        params.update(phi=ph, form=fm)

        def coeffs(al, i, be, j):
            return r52_1_coeffs(al, i, be, j, ph, fm)

    elif case == "r52-2":
        if validate:
            _require(b == 0, "b = 0 for case r52-2")
            _require(lam != 0, "λ ≠ 0 for case r52-2")
        params.update(phi=ph, lam=lam)

        def coeffs(al, i, be, j):
            return r52_2_coeffs(al, i, be, j, ph, lam)

    elif case == "r52-3":
        if validate:
            _require(b == 0, "b = 0 for case r52-3")
        params["phi"] = ph

        def coeffs(al, i, be, j):
            return r52_3_coeffs(al, i, be, j, ph)

    elif case == "r52-c2":
        if validate:
            _require(b != 0 and b_in_delta, "0 ≠ b ∈ Δ for case r52-c2")
            _require(ph(b) == 0, "φ(b) = 0 for case r52-c2")
            _require(ph1(b) == 0, "φ₁(b) = 0 for case r52-c2")
        params.update(phi=ph, phi1=ph1, phi2=ph2, lam=lam)

        def coeffs(al, i, be, j):
            return r52_c2_coeffs(al, i, be, j, b, ph, ph1, ph2, lam)

    else:  # r52-d
        fm = _form(form, m)
        if validate:
            _require(b != 0 and b_in_delta, "0 ≠ b ∈ Δ for case r52-d")
            _require(ph(b) == 0, "φ(b) = 0 for case r52-d")
            _require(fm.is_bilinear, "φ is a skew Z-bilinear form for case r52-d")
            _require(not fm.in_radical(b), "b ∉ Rad φ for case r52-d",
                     "every skew Z-bilinear form on a rank-1 group vanishes")
        params.update(phi=ph, phi1=ph1, form=fm)

        def coeffs(al, i, be, j):
            return r52_d_coeffs(al, i, be, j, b, ph, ph1, fm)

    shift_b = b * m
    kb = int(shift_b) if shift_b.denominator == 1 else None

    def kernel(p, q):
        out = {}
        cs = coeffs(Fraction(p.k, m), p.level, Fraction(q.k, m), q.level)
        for (dk, dl), c in cs.items():
            if not c:
                continue
            if dk == "b":
                if kb is None:
                    continue
                dk = kb
            key = spec.index(p.k + q.k + dk, p.level + q.level + dl)
            if key is not None:
                out[key] = out.get(key, 0) + c
        return out

    return BilinearRule(kernel, spec, f"classified[{case}]", params)


def b0_condition_failures(form: Callable, a, degrees) -> list[tuple]:
    """Triples violating the b = 0 conditions (symmetric S0 and the a-product)."""
    a = as_scalar(a)
    wit = NonlinearityWitness.from_form(form, degrees)
    bad = list(wit.asymmetries())
    for (al, be, g), s in wit.values.items():
        cyc = g * form(al, be) + al * form(be, g) + be * form(g, al)
        if cyc * (s - a):
            bad.append((al, be, g))
    return bad


def b0_identity_residual(form: Callable, a, al, be, g) -> Fraction:
    """(γφ(α,β) + αφ(β,γ) + βφ(γ,α)) (S0(α,β,γ) - a)."""
    s = Fraction(0) if al == 0 else (form(be + g, al) - form(g, al) - form(be, al)) / al
    return (g * form(al, be) + al * form(be, g) + be * form(g, al)) * (s - a)
