"""Exact linear algebra over the rationals.

Systems are sparse; elimination is fraction-free on integer rows with the
pivot fixed to the lowest variable index, so results are deterministic.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from ._accel import elim
from .errors import NonHomogeneous

Scalar = Fraction
Assignment = dict

__all__ = [
    "LinearSystem",
    "LinearSystemBuilder",
    "SolutionSet",
    "as_scalar",
    "nullspace",
    "rank",
    "solve_affine",
    "span_rank",
    "in_span",
]


def as_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return Fraction(x)


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``sum(c * x_v) = rhs`` over an ordered tuple of variable keys."""

    variables: tuple
    rows: tuple  # tuple of (tuple[(Fraction, var), ...], Fraction)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {v: i for i, v in enumerate(self.variables)}
        if len(index) != len(self.variables):
            raise ValueError("duplicate variable keys")
        for terms, _ in self.rows:
            for _, v in terms:
                if v not in index:
                    raise KeyError(f"row references unknown variable {v!r}")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_rows(
        cls,
        variables: Sequence[Hashable],
        rows: Iterable[tuple[Mapping[Hashable, object], object]],
    ) -> LinearSystem:
        b = LinearSystemBuilder(variables)
        for coeffs, rhs in rows:
            b.add_row(coeffs, rhs)
        return b.build()

    def index(self, var) -> int:
        return self._index[var]

    @property
    def homogeneous(self) -> bool:
        return all(rhs == 0 for _, rhs in self.rows)

    def residual(self, assignment: Mapping, homogeneous: bool = False) -> list[Fraction]:
        """Per-row ``lhs - rhs`` for ``assignment`` (missing variables are 0)."""
        out = []
        for terms, rhs in self.rows:
            s = sum((c * assignment.get(v, 0) for c, v in terms), Fraction(0))
            out.append(s if homogeneous else s - rhs)
        return out

    def integer_rows(self) -> list[dict[int, int]]:
        """Rows scaled to integers; the rhs sits in column ``len(variables)``."""
        n = len(self.variables)
        out = []
        for terms, rhs in self.rows:
            acc: dict[int, Fraction] = {}
            for c, v in terms:
                j = self._index[v]
                acc[j] = acc.get(j, 0) + c
            if rhs:
                acc[n] = rhs
            acc = {k: x for k, x in acc.items() if x}
            if not acc:
                continue
            den = lcm(*(x.denominator for x in acc.values()))
            out.append({k: int(x * den) for k, x in acc.items()})
        return out


class LinearSystemBuilder:
    """Accumulates variables and rows in insertion order."""

    def __init__(self, variables: Iterable[Hashable] = ()):
        self._vars: list = []
        self._index: dict = {}
        self._rows: list = []
        for v in variables:
            self.add_variable(v)

    def add_variable(self, var) -> int:
        i = self._index.get(var)
        if i is None:
            i = self._index[var] = len(self._vars)
            self._vars.append(var)
        return i

    def __contains__(self, var) -> bool:
        return var in self._index

    def add_row(self, coeffs: Mapping[Hashable, object], rhs=0) -> None:
        terms = []
        for v, c in coeffs.items():
            c = as_scalar(c)
            if c:
                self.add_variable(v)
                terms.append((c, v))
        self._rows.append((tuple(terms), as_scalar(rhs)))

    @property
    def row_count(self) -> int:
        return len(self._rows)

    def build(self) -> LinearSystem:
        return LinearSystem(tuple(self._vars), tuple(self._rows))


@dataclass(frozen=True)
class SolutionSet:
    """Solutions of a system: ``particular + span(nullspace)``.

    Assignments are sparse: variables with value 0 are omitted.
    """

    variables: tuple
    particular: dict | None
    nullspace: tuple
    rank: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension(self) -> int:
        return len(self.nullspace)

    def combine(self, coefficients: Sequence) -> dict:
        """``particular + sum(c_k * nullspace[k])``."""
        out = dict(self.particular or {})
        for c, vec in zip(coefficients, self.nullspace, strict=True):
            c = as_scalar(c)
            if not c:
                continue
            for v, x in vec.items():
                y = out.get(v, 0) + c * x
                if y:
                    out[v] = y
                else:
                    out.pop(v, None)
        return out


def _components(rows: list[dict[int, int]], rhs_col: int) -> list[list[dict[int, int]]]:
    """Group rows that share a variable column (union-find over columns)."""
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in rows:
        cols = [c for c in row if c != rhs_col]
        if not cols:
            continue
        r0 = find(cols[0])
        for c in cols[1:]:
            rc = find(c)
            if rc != r0:
                parent[rc] = r0
    groups: dict[int, list] = {}
    for row in rows:
        cols = [c for c in row if c != rhs_col]
        key = find(cols[0]) if cols else -1
        groups.setdefault(key, []).append(row)
    return [groups[k] for k in sorted(groups)]


def _reduce(sys: LinearSystem) -> dict[int, dict[int, int]]:
    """Reduced row echelon form, eliminating independent blocks separately.

    Sparse rows go first: the result does not depend on row order, but
    fill-in does, often by orders of magnitude.
    """
    n = len(sys.variables)
    pivots: dict[int, dict[int, int]] = {}
    for block in _components(sys.integer_rows(), n):
        block.sort(key=len)
        pivots.update(elim.rref(block))
    return pivots


def _normalize(vec: dict, order: dict) -> dict:
    first = min(vec, key=order.__getitem__)
    lead = vec[first]
    return {v: x / lead for v, x in vec.items()}


def _solution_from_pivots(sys: LinearSystem, pivots) -> SolutionSet:
    n = len(sys.variables)
    names = sys.variables
    if n in pivots:
        particular = None
    else:
        particular = {}
        for p, row in pivots.items():
            r = row.get(n)
            if r:
                particular[names[p]] = Fraction(r, row[p])
    free_hits: dict[int, list[int]] = {}
    for p, row in pivots.items():
        for c in row:
            if c != p and c != n:
                free_hits.setdefault(c, []).append(p)
    basis = []
    for f in range(n):
        if f in pivots:
            continue
        vec = {names[f]: Fraction(1)}
        for p in free_hits.get(f, ()):
            row = pivots[p]
            vec[names[p]] = Fraction(-row[f], row[p])
        basis.append(_normalize(vec, sys._index))
    rank = len(pivots) - (1 if n in pivots else 0)
    return SolutionSet(names, particular, tuple(basis), rank)


def solve_affine(sys: LinearSystem) -> SolutionSet:
    """Exact solution set; an inconsistent system has ``particular is None``."""
    return _solution_from_pivots(sys, _reduce(sys))


def nullspace(sys: LinearSystem) -> tuple[dict, ...]:
    """Basis of the homogeneous solution space, each vector led by a 1."""
    if not sys.homogeneous:
        raise NonHomogeneous("nullspace requires every rhs to be zero")
    return solve_affine(sys).nullspace


def rank(sys: LinearSystem) -> int:
    pivots = _reduce(sys)
    n = len(sys.variables)
    return len(pivots) - (1 if n in pivots else 0)


def _vector_rows(vectors: Iterable[Mapping], index: dict) -> list[dict[int, int]]:
    rows = []
    for vec in vectors:
        acc = {}
        for v, x in vec.items():
            x = as_scalar(x)
            if x:
                j = index.setdefault(v, len(index))
                acc[j] = x
        if acc:
            den = lcm(*(x.denominator for x in acc.values()))
            rows.append({k: int(x * den) for k, x in acc.items()})
    return rows


def span_rank(vectors: Iterable[Mapping]) -> int:
    """Rank of a family of sparse vectors keyed by arbitrary hashables."""
    return len(elim.rref(_vector_rows(vectors, {})))


def in_span(vector: Mapping, vectors: Iterable[Mapping]) -> bool:
    index: dict = {}
    base = elim.rref(_vector_rows(vectors, index))
    extra = _vector_rows([vector], index)
    if not extra:
        return True
    return len(elim.rref(list(base.values()) + extra)) == len(base)
