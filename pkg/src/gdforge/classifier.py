"""Windowed brute-force classification of Lie brackets over A_{Δ,Γ}.

Unknown structure constants are instantiated on a finite window of degrees
(and levels), the linear compatibility constraints are solved exactly, and
the solution space, restricted to an interior sub-window, is compared with a
predicted family. Jacobi is quadratic in the unknowns and is applied
afterwards as a filter on concrete candidates.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import NamedTuple

from .checks import CheckReport, Failure, check_lie_super
from .errors import CaseParameterMismatch, TableDomainError
from .families import (
    GroupHom,
    classified_bracket,
    star_product,
)
from .graded import BasisIndex, BasisSpec, BilinearRule
from .linear import (
    LinearSystem,
    LinearSystemBuilder,
    SolutionSet,
    as_scalar,
    in_span,
    solve_affine,
    span_rank,
)

__all__ = [
    "CLASSIFIER_CASES",
    "EXPLORATORY_CASES",
    "B0Report",
    "ConstraintSystem",
    "Family",
    "FamilyMatch",
    "Lattice",
    "LatticeIndex",
    "ProjectedSolution",
    "Window",
    "b0_filter",
    "b0_parameters",
    "build_system",
    "candidate_rule",
    "combine",
    "jacobi_filter",
    "lattice_b_in_bracket",
    "lattice_novikov",
    "match_family",
    "predicted_family",
    "exploratory_residuals",
    "rule_vector",
    "sample_candidates",
    "safe_triples",
    "solve_and_project",
]

CLASSIFIER_CASES = ("b0", "b-notin", "b-in", "gammaN-bnotin", "novikov-over-lie")
# b ∈ Δ with Γ = N: no family is known, solutions are only probed
EXPLORATORY_CASES = ("gammaN-bin",)


@dataclass(frozen=True)
class Window:
    """Degrees k/m with |k| <= N, levels 0..L; the interior shrinks both by K.

    Output indices live in a wider box: degrees |k| <= M and levels <= S.
    M defaults to max(N, 2(N-K)), so an interior output shifted by an interior
    degree stays in the box; S defaults to 2L, the level range of products of
    two window elements.
    Output-level slots above S are zero (brackets are finite sums); output
    degrees beyond M are simply outside the window. The interior is the same
    box for inputs and outputs.
    """

    N: int
    L: int = 0
    K: int = 1
    M: int | None = None
    S: int | None = None

    def __post_init__(self):
        if not 0 < self.K < self.N:
            raise ValueError("need 0 < K < N")
        if self.L and self.K > self.L:
            raise ValueError("the interior level range would be empty")
        if self.S is not None and self.S < self.L:
            raise ValueError("need S >= L")
        if self.M is not None and self.M < self.N:
            raise ValueError("need M >= N")

    @property
    def support(self) -> int:
        return 2 * self.L if self.S is None else self.S

    @property
    def reach(self) -> int:
        return max(self.N, 2 * (self.N - self.K)) if self.M is None else self.M

    def keys(self, spec: BasisSpec, interior: bool = False,
             output: bool = False) -> list[BasisIndex]:
        n = self._radius(interior, output)
        top = self._top(interior, output) if spec.levels else 0
        return [spec.index(k, l) for k in range(-n, n + 1) for l in range(top + 1)]

    def _radius(self, interior: bool, output: bool) -> int:
        if interior:
            return self.N - self.K
        return self.reach if output else self.N

    def _top(self, interior: bool, output: bool) -> int:
        if interior:
            return max(self.L - self.K, 0)
        return self.support if output else self.L

    def contains(self, key: BasisIndex, interior: bool = False,
                 output: bool = False) -> bool:
        n = self._radius(interior, output)
        return abs(key.k) <= n and 0 <= key.level <= self._top(interior, output)


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class ConstraintSystem:
    """Windowed compatibility constraints on unknown structure constants.

    Variables are ("a", p, q, σ) with p < q for skew brackets (the value for
    q > p is the negative, and 0 for p = q), or ("c", p, q, σ) for
    unconstrained products.
    """

    case: str
    b: Fraction
    spec: BasisSpec
    window: Window
    system: LinearSystem
    instances: int = 0

    @property
    def skew(self) -> bool:
        return self.case != "novikov-over-lie"

    def value(self, assignment: Mapping, p, q, s) -> Fraction:
        """The structure constant of x_s in the product of x_p and x_q."""
        if self.skew:
            if p == q:
                return Fraction(0)
            if p < q:
                return assignment.get(("a", p, q, s), Fraction(0))
            return -assignment.get(("a", q, p, s), Fraction(0))
        return assignment.get(("c", p, q, s), Fraction(0))

    def interior_variables(self) -> list:
        w = self.window
        return [v for v in self.system.variables
                if w.contains(v[1], True) and w.contains(v[2], True)
                and w.contains(v[3], True, output=True)]


def _check_case(case: str, b: Fraction, spec: BasisSpec) -> None:
    if case not in CLASSIFIER_CASES + EXPLORATORY_CASES:
        raise ValueError(f"unknown classifier case {case!r}")
    levels = case.startswith("gammaN")
    if spec.levels != levels:
        raise CaseParameterMismatch(
            f"case {case} needs {'Γ = N' if levels else 'Γ = {0}'}")
    if case == "b0" and b != 0:
        raise CaseParameterMismatch("case b0 needs b = 0")
    if case in ("b-notin", "gammaN-bnotin") and spec.contains(b):
        raise CaseParameterMismatch(f"case {case} needs b ∉ Δ, got b = {b}")
    if case == "b-in" and (b == 0 or not spec.contains(b)):
        raise CaseParameterMismatch(f"case b-in needs 0 ≠ b ∈ Δ, got b = {b}")
    if case == "gammaN-bin" and not spec.contains(b):
        raise CaseParameterMismatch(f"case gammaN-bin needs b ∈ Δ, got b = {b}")


class _Slots:
    """Maps structure-constant slots to signed variables inside the window.

    A slot is given by integer indices (pk, pl, qk, ql, sk, sl). Constants
    that vanish identically (negative levels, a^σ_{α,α} for skew brackets,
    c^σ_{0,0} for the unknown product) are dropped wherever they sit, as are
    output levels above the support bound when both inputs are in the
    window. Any other slot outside the window disqualifies the equation
    instance.
    """

    def __init__(self, spec: BasisSpec, window: Window, skew: bool):
        self.spec, self.window, self.skew = spec, window, skew
        self.N, self.L = window.N, (window.L if spec.levels else 0)
        self.S = window.support if spec.levels else 0
        self.M = window.reach
        self.tag = "a" if skew else "c"
        self._cache: dict = {}

    def key(self, k: int, level: int = 0):
        return self.spec.index(k, level)

    def zero_pair(self, pk, pl, qk, ql) -> bool:
        if pl < 0 or ql < 0:
            return True
        if self.skew:
            return pk == qk and pl == ql
        return pk == 0 and qk == 0 and pl == 0 and ql == 0

    def pair_inside(self, pk, pl, qk, ql) -> bool:
        N, L = self.N, self.L
        return -N <= pk <= N and -N <= qk <= N and pl <= L and ql <= L

    def term(self, slot):
        """[(sign, var)] for one slot, [] if identically zero, None if outside."""
        got = self._cache.get(slot, False)
        if got is not False:
            return got
        pk, pl, qk, ql, sk, sl = slot
        if sl < 0 or self.zero_pair(pk, pl, qk, ql):
            got = []
        elif not self.pair_inside(pk, pl, qk, ql):
            got = None
        elif sl > self.S:
            got = []
        elif not -self.M <= sk <= self.M:
            got = None
        else:
            key = self.spec.index
            p, q, s = key(pk, pl), key(qk, ql), key(sk, sl)
            if self.skew and q < p:
                got = [(-1, (self.tag, q, p, s))]
            else:
                got = [(1, (self.tag, p, q, s))]
        self._cache[slot] = got
        return got

    def dead(self, c, pk, pl, qk, ql) -> bool:
        """True when a term with this input pair rules out the instance for every output."""
        return bool(c) and not self.zero_pair(pk, pl, qk, ql) and not self.pair_inside(pk, pl, qk, ql)


def _add_instance(rows: dict, slots: _Slots, terms, rhs=0) -> bool:
    """terms: iterable of (coefficient, slot); skipped if a live slot leaves the window."""
    acc: dict = {}
    for c, slot in terms:
        if not c:
            continue
        t = slots.term(slot)
        if t is None:
            return False
        for sign, var in t:
            acc[var] = acc.get(var, 0) + sign * c
    acc = {v: c for v, c in acc.items() if c}
    if not acc and not rhs:
        return True
    key = (frozenset(acc.items()), rhs)
    rows.setdefault(key, (acc, rhs))
    return True


def _variables(slots: _Slots, keys, outputs) -> list:
    out = []
    for p in keys:
        for q in keys:
            if slots.skew and not p < q:
                continue
            if slots.zero_pair(p.k, p.level, q.k, q.level):
                continue
            for s in outputs:
                out.append((slots.tag, p, q, s))
    return out


def build_system(case: str, b, window: Window, m: int = 1) -> ConstraintSystem:
    """Instantiate the compatibility constraints of ``case`` on ``window``."""
    b = as_scalar(b)
    spec = BasisSpec(m=m, levels=case.startswith("gammaN"))
    _check_case(case, b, spec)
    skew = case != "novikov-over-lie"
    slots = _Slots(spec, window, skew)
    keys = window.keys(spec)
    outputs = window.keys(spec, output=True)
    rows: dict = {}
    count = 0
    if case.startswith("gammaN"):
        count = _levels_rows(rows, slots, b, m)
    elif case == "novikov-over-lie":
        count = _star_rows(rows, slots, m)
    else:
        count = _flat_rows(rows, slots, b, m)
    builder = LinearSystemBuilder(_variables(slots, keys, outputs))
    for acc, rhs in rows.values():
        builder.add_row(acc, rhs)
    return ConstraintSystem(case, b, spec, window, builder.build(), count)


def _scaled(b: Fraction, m: int):
    """Rows are scaled by D = m·den(b) so coefficients stay integers."""
    D = m * b.denominator
    return D, b.numerator * m  # D·b


def _flat_rows(rows, slots: _Slots, b, m) -> int:
    """(α+b)(a^σ_{α+γ,β} - a^{σ-α}_{γ,β}) + (β+b)(a^σ_{α,β+γ} - a^{σ-β}_{α,γ})
    - (σ+b-γ) a^{σ-γ}_{α,β} = 0, times D."""
    N, M = slots.N, slots.M
    D, Db = _scaled(b, m)
    r = D // m
    count = 0
    rng = range(-N, N + 1)
    for ka, kb, kg in product(rng, repeat=3):
        ca, cb = ka * r + Db, kb * r + Db
        if slots.dead(ca, ka + kg, 0, kb, 0) or slots.dead(cb, ka, 0, kb + kg, 0):
            continue
        for ks in range(-M - N, M + N + 1):
            terms = (
                (ca, (ka + kg, 0, kb, 0, ks, 0)),
                (-ca, (kg, 0, kb, 0, ks - ka, 0)),
                (cb, (ka, 0, kb + kg, 0, ks, 0)),
                (-cb, (ka, 0, kg, 0, ks - kb, 0)),
                (-((ks - kg) * r + Db), (ka, 0, kb, 0, ks - kg, 0)),
            )
            count += _add_instance(rows, slots, terms)
    return count


def _levels_rows(rows, slots: _Slots, b, m) -> int:
    """The level-graded compatibility constraints for Γ = N, times D."""
    N, L, M = slots.N, slots.L, slots.M
    D, Db = _scaled(b, m)
    r = D // m
    count = 0
    rng = range(-N, N + 1)
    lv = range(L + 1)
    # equation outputs reach one window width past the slot box: shifted
    # slots such as a^{σ-α,k-i} can still land inside
    out = list(product(range(-M - N, M + N + 1), range(slots.S + L + 1)))
    dead = slots.dead
    for ka, kb, kg in product(rng, repeat=3):
        ca, cb = ka * r + Db, kb * r + Db
        for i, j, l in product(lv, repeat=3):
            if (dead(ca, ka + kg, i + l, kb, j) or dead(cb, ka, i, kb + kg, j + l)
                    or dead(i, ka + kg, i + l - 1, kb, j)
                    or dead(j, ka, i, kb + kg, j + l - 1)):
                continue
            Di, Dj = D * i, D * j
            for ks, k in out:
                terms = (
                    (ca, (ka + kg, i + l, kb, j, ks, k)),
                    (-ca, (kg, l, kb, j, ks - ka, k - i)),
                    (cb, (ka, i, kb + kg, j + l, ks, k)),
                    (cb, (kg, l, ka, i, ks - kb, k - j)),
                    (Di, (ka + kg, i + l - 1, kb, j, ks, k)),
                    (-Di, (kg, l, kb, j, ks - ka, k + 1 - i)),
                    (Dj, (ka, i, kb + kg, j + l - 1, ks, k)),
                    (Dj, (kg, l, ka, i, ks - kb, k + 1 - j)),
                    (-((ks - kg) * r + Db), (ka, i, kb, j, ks - kg, k - l)),
                    (-D * (k + 1 - l), (ka, i, kb, j, ks - kg, k + 1 - l)),
                )
                count += _add_instance(rows, slots, terms)
    return count


def _star_rows(rows, slots: _Slots, m) -> int:
    """Unknown product ⋆ whose commutator is the Witt bracket, with x_0 ⋆ x_0 = 0
    and compatibility against that bracket."""
    N, M = slots.N, slots.M
    count = 0
    rng = range(-N, N + 1)
    outs = range(-M - N, M + N + 1)
    for ka, kb, ks in product(rng, rng, range(-M, M + 1)):
        if ka >= kb:
            continue
        rhs = Fraction(kb - ka, m) if ks == ka + kb else 0
        terms = ((1, (ka, 0, kb, 0, ks, 0)), (-1, (kb, 0, ka, 0, ks, 0)))
        count += _add_instance(rows, slots, terms, rhs)
    for ka, kb, kg in product(rng, repeat=3):
        al, be, ga = Fraction(ka, m), Fraction(kb, m), Fraction(kg, m)
        if (slots.dead(al - ga, kg + ka, 0, kb, 0) or slots.dead(be - ga, kg + kb, 0, ka, 0)
                or slots.dead(be - al, kg, 0, ka + kb, 0)):
            continue
        for ks in outs:
            si = Fraction(ks, m)
            terms = (
                (2 * be - si, (kg, 0, ka, 0, ks - kb, 0)),
                (-(2 * al - si), (kg, 0, kb, 0, ks - ka, 0)),
                (al - ga, (kg + ka, 0, kb, 0, ks, 0)),
                (-(be - ga), (kg + kb, 0, ka, 0, ks, 0)),
                (-(be - al), (kg, 0, ka + kb, 0, ks, 0)),
            )
            count += _add_instance(rows, slots, terms)
    return count


# ---------------------------------------------------------------------------
# solving and projecting


@dataclass(frozen=True)
class ProjectedSolution:
    """A windowed solution set together with its interior restriction."""

    system: ConstraintSystem
    solution: SolutionSet
    interior: tuple
    particular: dict | None
    basis: tuple  # projected nullspace vectors (may be dependent)
    dimension: int

    @property
    def consistent(self) -> bool:
        return self.solution.consistent


def _project(vec: Mapping, keep: set) -> dict:
    return {v: c for v, c in vec.items() if v in keep and c}


def solve_and_project(cs: ConstraintSystem) -> ProjectedSolution:
    sol = solve_affine(cs.system)
    interior = tuple(cs.interior_variables())
    keep = set(interior)
    part = None if sol.particular is None else _project(sol.particular, keep)
    basis = tuple(p for p in (_project(v, keep) for v in sol.nullspace) if p)
    return ProjectedSolution(cs, sol, interior, part, basis, span_rank(basis))


# ---------------------------------------------------------------------------
# families


def rule_vector(cs: ConstraintSystem, rule: BilinearRule) -> dict:
    """Values of every system variable read off a concrete bracket/product."""
    out = {}
    for var in cs.system.variables:
        _, p, q, s = var
        c = rule.on_keys(p, q).get(s, 0)
        if c:
            out[var] = as_scalar(c)
    return out


@dataclass(frozen=True)
class Family:
    """An affine family base + span(generators), each given by parameters."""

    name: str
    build: Callable[[dict], BilinearRule]
    generators: tuple = ()  # parameter dicts spanning the linear part
    base: dict | None = None  # parameter dict of the affine base point, None = zero

    def vectors(self, cs: ConstraintSystem) -> tuple[dict, list[dict]]:
        base = rule_vector(cs, self.build(self.base)) if self.base is not None else {}
        gens = [rule_vector(cs, self.build(g)) for g in self.generators]
        return base, gens


def predicted_family(case: str, b=0, m: int = 1) -> Family:
    """The family each windowed case is compared against."""
    b = as_scalar(b)
    spec = BasisSpec(m=m, levels=(case == "gammaN-bnotin"))
    if case == "b-notin":
        return Family(
            "b-notin",
            lambda p: classified_bracket("b-notin", spec, b=b, phi=GroupHom(p["phi"], m)),
            ({"phi": 1},),
        )
    if case == "gammaN-bnotin":
        return Family(
            "gammaN-bnotin",
            lambda p: classified_bracket("gammaN-bnotin", spec, b=b,
                                         phi=GroupHom(p["phi"], m), lam=p["lam"]),
            ({"phi": 1, "lam": 0}, {"phi": 0, "lam": 1}),
        )
    if case == "novikov-over-lie":
        return Family("star", lambda p: star_product(spec), (), {})
    if case == "b-in":
        return Family(
            "b-in (θ = 0)",
            lambda p: classified_bracket("b-in", spec, b=b, phi=GroupHom(p["phi"], m)),
            ({"phi": 1},),
        )
    raise ValueError(f"no linear family is predicted for case {case!r}")


@dataclass(frozen=True)
class FamilyMatch:
    family: str
    verdict: str  # "both-containments" or "mismatch"
    family_in_solutions: bool
    solutions_in_family: bool
    interior_dimension: int
    family_dimension: int
    recovered: tuple = ()  # parameter dicts reproducing each projected solution vector
    detail: dict = field(default_factory=dict, compare=False)


def _recover(target: dict, gens: list[dict], names: list[dict]) -> dict | None:
    """Exact coefficients c with Σ c_j gens[j] = target, expressed as parameters."""
    variables = sorted({v for g in gens for v in g} | set(target), key=repr)
    cols = [f"c{j}" for j in range(len(gens))]
    builder = LinearSystemBuilder(cols)
    for v in variables:
        builder.add_row({cols[j]: g.get(v, 0) for j, g in enumerate(gens)}, target.get(v, 0))
    sol = solve_affine(builder.build())
    if sol.particular is None:
        return None
    coeffs = [sol.particular.get(c, Fraction(0)) for c in cols]
    params: dict = {}
    for c, p in zip(coeffs, names):
        for name, val in p.items():
            params[name] = params.get(name, Fraction(0)) + c * as_scalar(val)
    return params


def match_family(ps: ProjectedSolution, family: Family) -> FamilyMatch:
    cs = ps.system
    base, gens = family.vectors(cs)
    zero_base = not base
    # every family member solves the windowed system
    sound = all(r == 0 for r in cs.system.residual(base))
    sound = sound and all(
        all(r == 0 for r in cs.system.residual(g, homogeneous=True)) for g in gens
    )
    keep = set(ps.interior)
    pgens = [_project(g, keep) for g in gens]
    pbase = _project(base, keep)
    complete = ps.consistent
    if complete:
        shift = dict(ps.particular or {})
        for v, c in pbase.items():
            shift[v] = shift.get(v, 0) - c
        shift = {v: c for v, c in shift.items() if c}
        complete = (not shift or in_span(shift, pgens)) and all(
            in_span(v, pgens) for v in ps.basis
        )
    recovered = []
    if complete and pgens:
        for v in ps.basis:
            got = _recover(v, pgens, list(family.generators))
            if got is not None:
                recovered.append(got)
    verdict = "both-containments" if sound and complete else "mismatch"
    return FamilyMatch(
        family.name,
        verdict,
        sound,
        complete,
        ps.dimension,
        span_rank(pgens),
        tuple(recovered),
        {"affine": not zero_base, "variables": len(cs.system.variables),
         "equations": len(cs.system.rows), "rank": ps.solution.rank},
    )


# ---------------------------------------------------------------------------
# concrete candidates and the quadratic filter


def candidate_rule(cs: ConstraintSystem, assignment: Mapping, name: str = "candidate",
                   interior: bool = False) -> BilinearRule:
    """The bracket (or product) with structure constants ``assignment`` on the window
    (or only on the interior, for interior-projected assignments)."""
    keys = cs.window.keys(cs.spec, interior=interior)
    inside = set(keys)
    by_pair: dict = {}
    for var, c in assignment.items():
        if c:
            _, p, q, s = var
            by_pair.setdefault((p, q), {})[s] = as_scalar(c)

    def kernel(p, q):
        if p not in inside or q not in inside:
            raise TableDomainError(f"({p}, {q}) is outside the window")
        if cs.skew and q < p:
            return {s: -c for s, c in by_pair.get((q, p), {}).items()}
        return dict(by_pair.get((p, q), {}))

    return BilinearRule(kernel, cs.spec, name)


def safe_triples(cs: ConstraintSystem, keys=None, interior: bool = False) -> list[tuple]:
    """Triples of interior keys whose nested brackets stay inside the domain.

    Every output of [x_p, x_q] lies at degree α+β or α+β+b, so it suffices
    that both stay within the bound (N, or N-K for an interior-only domain)
    for each pair of the triple.
    """
    keys = cs.window.keys(cs.spec, interior=True) if keys is None else list(keys)
    N = cs.window.N - cs.window.K if interior else cs.window.N
    shifts = {0}
    if cs.case == "b-in":
        shifts.add(int(cs.b * cs.spec.m))

    def ok(p, q):
        return all(abs(p.k + q.k + d) <= N for d in shifts)

    return [(u, v, w) for u, v, w in product(keys, repeat=3)
            if ok(u, v) and ok(v, w) and ok(w, u)]


def combine(*terms: tuple) -> dict:
    """Σ c·v over (c, v) pairs of sparse vectors."""
    out: dict = {}
    for c, vec in terms:
        c = as_scalar(c)
        for v, x in vec.items():
            out[v] = out.get(v, 0) + c * x
    return {v: x for v, x in out.items() if x}


def jacobi_filter(candidates: Sequence[BilinearRule], triples,
                  limit: int | None = 20) -> CheckReport:
    """Lie axioms for each candidate on ``triples``.

    ``meta["passed"]`` lists the per-candidate verdicts in order; failures are
    tagged with the candidate's position.
    """
    triples = list(triples)
    verdicts, failures, count = [], [], 0
    for n, rule in enumerate(candidates):
        rep = check_lie_super(rule, triples, limit)
        verdicts.append(rep.passed)
        count += rep.failure_count
        for f in rep.failures:
            if limit is None or len(failures) < limit:
                failures.append(Failure(f"{f.part}[{n}]", f.inputs, f.residual))
    return CheckReport("jacobi-filter", len(triples) * len(candidates), tuple(failures),
                       count, ("skew", "jacobi"), {"passed": verdicts})


# ---------------------------------------------------------------------------
# free abelian groups of higher rank
#
# On Δ = Z the θ-parts allowed with φ(b) = 0 (a skew bilinear form with b in
# its radical, or φ₁(α)φ₂(β) - φ₁(β)φ₂(α) with φ₁(b) = 0, φ₂(b) = -1) all
# vanish, so the side conditions are exercised on Z^r instead. Degrees enter
# the structure constants through an additive map ι: Z^r -> Q; the Lie and
# compatibility identities only use additivity of ι and of the group law.


class LatticeIndex(NamedTuple):
    """The basis vector x_α for α in Z^r."""

    deg: tuple
    parity: int = 0

    def __str__(self) -> str:
        return f"x[{','.join(map(str, self.deg))}]"


@dataclass(frozen=True)
class Lattice:
    """Z^r with ι(e_i) = weights[i]."""

    weights: tuple

    @property
    def rank(self) -> int:
        return len(self.weights)

    def iota(self, deg) -> Fraction:
        return sum((Fraction(w) * d for w, d in zip(self.weights, deg)), Fraction(0))

    def add(self, *degs) -> tuple:
        return tuple(map(sum, zip(*degs)))

    def x(self, *deg) -> LatticeIndex:
        return LatticeIndex(tuple(deg))

    def box(self, N: int) -> list[LatticeIndex]:
        return [LatticeIndex(d) for d in product(range(-N, N + 1), repeat=self.rank)]

    def hom(self, values) -> Callable[[tuple], Fraction]:
        """The homomorphism Z^r -> Q with e_i -> values[i]."""
        nz = [(i, as_scalar(v)) for i, v in enumerate(values) if v]
        return lambda deg: sum((v * deg[i] for i, v in nz if deg[i]), Fraction(0))

    def form(self, matrix) -> Callable[[tuple, tuple], Fraction]:
        """The bilinear form (α, β) -> αᵀ T β."""
        nz = [(i, j, as_scalar(c)) for i, row in enumerate(matrix)
              for j, c in enumerate(row) if c]
        return lambda a, c: sum((a[i] * t * c[j] for i, j, t in nz if a[i] and c[j]),
                                Fraction(0))


def lattice_b_in_bracket(lat: Lattice, b, phi, theta, name: str = "b-in") -> BilinearRule:
    """[x_α, x_β] = ((α+b)φ(β) - (β+b)φ(α))/b x_{α+β} + θ(α, β) x_{α+β+b},
    with scalars read through ι. ``phi``, ``theta`` are callables on degrees."""
    b = tuple(b)
    ib = lat.iota(b)
    if ib == 0:
        raise ValueError("need ι(b) ≠ 0")

    def kernel(p, q):
        al, be = p.deg, q.deg
        ia, ie = lat.iota(al), lat.iota(be)
        out = {}
        c = ((ia + ib) * phi(be) - (ie + ib) * phi(al)) / ib
        if c:
            out[LatticeIndex(lat.add(al, be))] = c
        t = as_scalar(theta(al, be))
        if t:
            out[LatticeIndex(lat.add(al, be, b))] = t
        return out

    return BilinearRule(kernel, ("lattice", lat.weights), name)


def lattice_novikov(lat: Lattice, b) -> BilinearRule:
    """x_α ∘ x_β = (β + b) x_{α+β}, scalars read through ι."""
    ib = lat.iota(tuple(b))

    def kernel(p, q):
        c = lat.iota(q.deg) + ib
        return {LatticeIndex(lat.add(p.deg, q.deg)): c} if c else {}

    return BilinearRule(kernel, ("lattice", lat.weights), "novikov")


# ---------------------------------------------------------------------------
# sampling the linear solution space


def sample_candidates(ps: ProjectedSolution, count: int, seed: int = 0,
                      spread: int = 3) -> list[dict]:
    """Interior assignments particular + Σ c_k v_k with small random integers c_k."""
    import random

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        terms = [(1, ps.particular or {})]
        terms += [(rng.randint(-spread, spread), v) for v in ps.basis]
        out.append(combine(*terms))
    return out


def b0_parameters(cs: ConstraintSystem, assignment: Mapping):
    """(a, φ, off_support) read off a b = 0 candidate.

    a = a^{α0}_{0,α0}/α0 for the smallest positive interior α0 and
    φ(α, β) = a^{α+β}_{α,β} + a(α - β) on interior degrees; off_support lists
    nonzero constants away from σ = α + β.
    """
    keys = cs.window.keys(cs.spec, interior=True)
    m = cs.spec.m
    by_deg = {k.k: k for k in keys}
    off = [(v, c) for v, c in assignment.items() if c and v[3].k != v[1].k + v[2].k]

    def coef(ka, kb):
        p, q = by_deg[ka], by_deg[kb]
        s = by_deg.get(ka + kb)
        return Fraction(0) if s is None else cs.value(assignment, p, q, s)

    a = coef(0, 1) * m

    def phi(al, be):
        ka, kb = int(al * m), int(be * m)
        return coef(ka, kb) + a * (al - be)

    return a, phi, off


@dataclass(frozen=True)
class B0Report:
    """Jacobi verdicts of sampled b = 0 candidates next to the family conditions."""

    jacobi: tuple
    family: tuple
    parameters: tuple

    @property
    def agree(self) -> bool:
        return self.jacobi == self.family


def b0_filter(ps: ProjectedSolution, count: int = 8, seed: int = 0) -> B0Report:
    """Sample the interior b = 0 solution space; Jacobi-filter each sample and
    compare with membership in the φ0-generated family under its side conditions."""
    from .families import b0_condition_failures

    cs = ps.system
    if cs.case != "b0":
        raise CaseParameterMismatch("b0_filter needs a b0 system")
    n = cs.window.N - cs.window.K
    m = cs.spec.m
    triples = safe_triples(cs, interior=True)
    jac, fam, params = [], [], []
    for assignment in sample_candidates(ps, count, seed):
        rule = candidate_rule(cs, assignment, "b0-sample", interior=True)
        jac.append(jacobi_filter([rule], triples).passed)
        a, phi, off = b0_parameters(cs, assignment)
        # the side conditions need φ on sums of two degrees: keep triples inside the domain
        degs = [Fraction(k, m) for k in range(-(n // 2), n // 2 + 1)]
        ok = not off and not b0_condition_failures(phi, a, degs)
        fam.append(ok)
        params.append(a)
    return B0Report(tuple(jac), tuple(fam), tuple(params))


# ---------------------------------------------------------------------------
# exploratory case: b ∈ Δ with Γ = N


def _binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def exploratory_residuals(ps: ProjectedSolution) -> dict[str, list]:
    """Residuals of the derived relations on every solution generator.

    For b ≠ 0: the level expansion of a^{α+β+b,k} (summing p = 0..k) and the
    ratios of a^{b,0}_{0,i;0,j}. For b = 0: the top-level values, the
    expansion of a^{α+β,k} for k < i + j, and [x_{0,i}, x_{0,j}] read as
    λ(j - i) x_{0,i+j-1}. Only relations whose variables are all interior are
    evaluated; each entry is (relation label, generator index, residual).
    """
    cs = ps.system
    if cs.case != "gammaN-bin":
        raise CaseParameterMismatch("exploratory_residuals needs a gammaN-bin system")
    b, m, spec, w = cs.b, cs.spec.m, cs.spec, cs.window
    kb = int(b * m)
    n, top = w.N - w.K, max(w.L - w.K, 0)
    keep = set(ps.interior)
    gens = [ps.particular or {}] + list(ps.basis)
    out: dict[str, list] = {}

    def x(k, l):
        return spec.index(k, l)

    def var(p, q, s):
        if p is None or q is None or s is None:
            return Fraction(0)
        v = ("a", p, q, s) if p < q else ("a", q, p, s)
        if p == q:
            return Fraction(0)
        if v not in keep:
            raise KeyError(v)
        return None

    def val(g, p, q, s):
        var(p, q, s)
        return cs.value(g, p, q, s)

    def record(label, fn):
        rows = out.setdefault(label, [])
        for idx, g in enumerate(gens):
            try:
                r = fn(g)
            except KeyError:
                return
            rows.append((idx, r))

    degs = range(-n, n + 1)
    lv = range(top + 1)
    if b != 0:
        for ka, kb_, i, j, k in product(degs, degs, lv, lv, lv):
            if abs(ka + kb_ + kb) > n:
                continue

            def rel(g, ka=ka, kb_=kb_, i=i, j=j, k=k):
                s = ka + kb_ + kb
                lhs = val(g, x(ka, i), x(kb_, j), x(s, k))
                rhs = sum((_binom(i, p) * _binom(j, k - p)
                           * val(g, x(ka, i - p), x(kb_, j + p - k), x(s, 0))
                           for p in range(k + 1) if i - p >= 0 and j + p - k >= 0),
                          Fraction(0))
                return lhs - rhs

            record(f"level-expansion({ka},{i};{kb_},{j};{k})", rel)
        if abs(kb) <= n:
            for j in lv:
                if j < 2:
                    continue

                def rel(g, j=j):
                    c = Fraction((-1) ** j * factorial(j + 1), 6) / (2 * b) ** (j - 2)
                    return val(g, x(0, 1), x(0, j), x(kb, 0)) - c * val(g, x(0, 1), x(0, 2), x(kb, 0))

                record(f"ratio(1,{j})", rel)
            for i, j in product(lv, lv):
                if i < 2 or j < 2:
                    continue

                def rel(g, i=i, j=j):
                    c = (Fraction((-1) ** (i + j) * (j - i) * factorial(i + j - 1), 6)
                         / (2 * b) ** (i + j - 2))
                    return val(g, x(0, i), x(0, j), x(kb, 0)) - c * val(g, x(0, 2), x(0, 1), x(kb, 0))

                record(f"ratio({i},{j})", rel)
        return out

    def phi(g, ka):
        return val(g, x(0, 0), x(ka, 0), x(ka, 0)) if ka else Fraction(0)

    def lam(g):
        return val(g, x(0, 0), x(0, 1), x(0, 0))

    for ka, kb_, i, j in product(degs, degs, lv, lv):
        s = ka + kb_
        if abs(s) > n:
            continue
        al, be = Fraction(ka, m), Fraction(kb_, m)
        for k in range(i + j + 2, top + 1):
            record(f"vanishing({ka},{i};{kb_},{j};{k})",
                   lambda g, ka=ka, kb_=kb_, i=i, j=j, k=k, s=s:
                   val(g, x(ka, i), x(kb_, j), x(s, k)))
        if i + j + 1 <= top:
            record(f"top({ka},{i};{kb_},{j})",
                   lambda g, ka=ka, kb_=kb_, i=i, j=j, s=s, al=al, be=be:
                   val(g, x(ka, i), x(kb_, j), x(s, i + j + 1))
                   - (phi(g, ka) * be - phi(g, kb_) * al))
        if i + j <= top:
            record(f"next({ka},{i};{kb_},{j})",
                   lambda g, ka=ka, kb_=kb_, i=i, j=j, s=s, al=al, be=be:
                   val(g, x(ka, i), x(kb_, j), x(s, i + j))
                   - val(g, x(ka, 0), x(kb_, 0), x(s, 0))
                   - i * (lam(g) * be - phi(g, kb_)) - j * (phi(g, ka) - lam(g) * al))
        for k in range(min(i + j, top + 1)):
            def rel(g, ka=ka, kb_=kb_, i=i, j=j, k=k, s=s):
                lhs = val(g, x(ka, i), x(kb_, j), x(s, k))
                rhs = sum((_binom(i, p) * _binom(j, k - p)
                           * val(g, x(ka, i - p), x(kb_, j + p - k), x(s, 0))
                           for p in range(k + 1) if i - p >= 0 and j + p - k >= 0),
                          Fraction(0))
                return lhs - rhs

            record(f"level-expansion({ka},{i};{kb_},{j};{k})", rel)
    for i, j in product(lv, lv):
        if i + j - 1 < 0 or i + j - 1 > top:
            continue
        record(f"zero-degree({i},{j})",
               lambda g, i=i, j=j: val(g, x(0, i), x(0, j), x(0, i + j - 1)) - lam(g) * (j - i))
    return out
