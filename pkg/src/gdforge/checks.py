"""Exact checkers for the axiom systems on sampled basis triples.

Each trilinear identity is evaluated twice by independent routes: a fast
integer-table kernel screens every triple, and failures are recomputed
with plain element arithmetic to produce the reported residual.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Any, NamedTuple

from . import _accel, _triple_py
from .graded import BilinearRule, Element, LinearMap, GDStructure, _as_element

__all__ = [
    "CheckReport",
    "Cube",
    "Failure",
    "check_derivation",
    "check_gd_compat",
    "check_lie_super",
    "check_novikov_super",
    "check_supercomm_assoc",
    "cube",
    "pairs_of",
]

INT64_SAFE = 1 << 62


class Failure(NamedTuple):
    part: str
    inputs: tuple
    residual: Element


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one law on a sample; ``failures`` holds at most ``limit`` entries."""

    law: str
    samples: int
    failures: tuple = ()
    failure_count: int = 0
    parts: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def merged(self, other: CheckReport, law: str | None = None) -> CheckReport:
        return CheckReport(
            law or self.law,
            self.samples + other.samples,
            self.failures + other.failures,
            self.failure_count + other.failure_count,
            self.parts + other.parts,
        )


@dataclass(frozen=True)
class Cube:
    """All ordered triples (or pairs) drawn from ``keys``."""

    keys: tuple

    def __len__(self) -> int:
        return len(self.keys) ** 3

    def __iter__(self):
        return iter(product(self.keys, repeat=3))


def cube(keys: Iterable) -> Cube:
    return Cube(tuple(keys))


def pairs_of(sample) -> list[tuple]:
    """Distinct ordered pairs appearing as the first two slots of a sample."""
    if isinstance(sample, Cube):
        return list(product(sample.keys, repeat=2))
    seen, out = set(), []
    for t in sample:
        p = (t[0], t[1])
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _sign(e: int) -> int:
    return -1 if e & 1 else 1


# ---------------------------------------------------------------------------
# direct residuals on homogeneous elements (parities passed explicitly)


def _novikov_right(ops, u, v, w, i, j, l):
    c = ops["circ"]
    return c(c(u, v), w) - c(c(u, w), v) * _sign(j * l)


def _novikov_assoc(ops, u, v, w, i, j, l):
    c = ops["circ"]
    a_uvw = c(c(u, v), w) - c(u, c(v, w))
    a_vuw = c(c(v, u), w) - c(v, c(u, w))
    return a_uvw - a_vuw * _sign(i * j)


def _jacobi(ops, u, v, w, i, j, l):
    br = ops["bracket"]
    return br(w, br(v, u)) - br(br(w, v), u) + br(br(w, u), v) * _sign(i * j)


def _gd(ops, u, v, w, i, j, l):
    br, c = ops["bracket"], ops["circ"]
    s = _sign(i * j)
    return (
        br(c(w, u), v)
        - br(c(w, v), u) * s
        + c(br(w, u), v)
        - c(br(w, v), u) * s
        - c(w, br(u, v))
    )


def _assoc(ops, u, v, w, i, j, l):
    m = ops["mult"]
    return m(m(u, v), w) - m(u, m(v, w))


def _skew(ops, u, v, i, j):
    br = ops["bracket"]
    return br(u, v) + br(v, u) * _sign(i * j)


def _supercomm(ops, u, v, i, j):
    m = ops["mult"]
    return m(u, v) - m(v, u) * _sign(i * j)


# kernel terms: (coef, mask, op_in, op_out, right_nested, (pa, pb, pc))
# mask bit 1 -> p0*p1, bit 2 -> p0*p2, bit 4 -> p1*p2
TERMS = {
    "right-symmetry": [
        (1, 0, "circ", "circ", 0, (0, 1, 2)),
        (-1, 4, "circ", "circ", 0, (0, 2, 1)),
    ],
    "associator-symmetry": [
        (1, 0, "circ", "circ", 0, (0, 1, 2)),
        (-1, 0, "circ", "circ", 1, (0, 1, 2)),
        (-1, 1, "circ", "circ", 0, (1, 0, 2)),
        (1, 1, "circ", "circ", 1, (1, 0, 2)),
    ],
    "jacobi": [
        (1, 0, "bracket", "bracket", 1, (2, 1, 0)),
        (-1, 0, "bracket", "bracket", 0, (2, 1, 0)),
        (1, 1, "bracket", "bracket", 0, (2, 0, 1)),
    ],
    "gd-compat": [
        (1, 0, "circ", "bracket", 0, (2, 0, 1)),
        (-1, 1, "circ", "bracket", 0, (2, 1, 0)),
        (1, 0, "bracket", "circ", 0, (2, 0, 1)),
        (-1, 1, "bracket", "circ", 0, (2, 1, 0)),
        (-1, 0, "bracket", "circ", 1, (2, 0, 1)),
    ],
    "associativity": [
        (1, 0, "mult", "mult", 0, (0, 1, 2)),
        (-1, 0, "mult", "mult", 1, (0, 1, 2)),
    ],
}

DIRECT3 = {
    "right-symmetry": _novikov_right,
    "associator-symmetry": _novikov_assoc,
    "jacobi": _jacobi,
    "gd-compat": _gd,
    "associativity": _assoc,
}

DIRECT2 = {"skew": _skew, "super-commutativity": _supercomm}


def direct_residual(part: str, ops: dict, inputs: Sequence, space: Any = None) -> Element:
    """Residual of ``part`` on arbitrary elements, split into parity components."""
    els = [_as_element(x, space) for x in inputs]
    fn = DIRECT3.get(part) or DIRECT2[part]
    total = Element({}, space)
    for combo in product(*(e.parity_parts().items() for e in els)):
        pars = [p for p, _ in combo]
        vals = [e for _, e in combo]
        total = total + fn(ops, *vals, *pars)
    return total


# ---------------------------------------------------------------------------
# kernel driver


class _Tables:
    """Stacked CSR product tables with integer entries."""

    def __init__(self):
        self.ptr = [0]
        self.idx: list[int] = []
        self.val: list[int] = []
        self.row_base: list[int] = []
        self.scale: list[int] = []
        self.maxabs: list[int] = []
        self.maxnnz: list[int] = []

    def add(self, rows: list[dict[int, Fraction]]) -> int:
        den = 1
        for row in rows:
            for c in row.values():
                if c.denominator != 1:
                    den = lcm(den, c.denominator)
        t = len(self.row_base)
        self.row_base.append(len(self.ptr) - 1)
        big, nnz = 0, 0
        idx, val, ptr = self.idx, self.val, self.ptr
        for row in rows:
            for o in sorted(row):
                c = row[o]
                v = c.numerator * (den // c.denominator)
                idx.append(o)
                val.append(v)
                if abs(v) > big:
                    big = abs(v)
            if len(row) > nnz:
                nnz = len(row)
            ptr.append(len(idx))
        self.scale.append(den)
        self.maxabs.append(big)
        self.maxnnz.append(nnz)
        return t


class _TripleEngine:
    """Materializes the products needed by a set of term lists over ``keys``."""

    def __init__(self, ops: dict, keys: Sequence, parts: Sequence[str]):
        self.keys = keys
        self.s = len(keys)
        terms = [t for part in parts for t in TERMS[part]]
        tables = self.tables = _Tables()
        first: dict[str, list[dict]] = {}
        seen: dict = {}
        for name in sorted({t[2] for t in terms}):
            rule = ops[name]
            rows = [rule.on_keys(a, b) for a in keys for b in keys]
            first[name] = rows
            for row in rows:
                for k in row:
                    seen[k] = None
        r_keys = sorted(seen)
        r_index = {k: i for i, k in enumerate(r_keys)}
        self.n_r = len(r_keys)
        self.tid_in = {
            name: tables.add([{r_index[k]: c for k, c in row.items()} for row in rows])
            for name, rows in first.items()
        }
        o_index: dict = {}

        def out_rows(pairs, rule):
            rows = []
            for p, q in pairs:
                row = {}
                for k, c in rule.on_keys(p, q).items():
                    o = o_index.get(k)
                    if o is None:
                        o = o_index[k] = len(o_index)
                    row[o] = c
                rows.append(row)
            return rows

        self.tid_left, self.tid_right = {}, {}
        for _, _, _, out, right, _ in terms:
            rule = ops[out]
            if right and out not in self.tid_right:
                self.tid_right[out] = tables.add(
                    out_rows([(a, r) for a in keys for r in r_keys], rule))
            elif not right and out not in self.tid_left:
                self.tid_left[out] = tables.add(
                    out_rows([(r, c) for r in r_keys for c in keys], rule))
        self.n_out = len(o_index)
        self.parity = [k.parity for k in keys]

    def failing(self, part: str, triples: list[int]) -> list[int]:
        tables = self.tables
        specs = []
        for coef, mask, op_in, op_out, right, perm in TERMS[part]:
            t_out = (self.tid_right if right else self.tid_left)[op_out]
            specs.append((coef, mask, self.tid_in[op_in], t_out, right, perm))
        common = 1
        for _, _, t_in, t_out, _, _ in specs:
            common = lcm(common, tables.scale[t_in] * tables.scale[t_out])
        flat = []
        bound = 0
        for coef, mask, t_in, t_out, right, (pa, pb, pc) in specs:
            factor = coef * (common // (tables.scale[t_in] * tables.scale[t_out]))
            flat.append((factor, mask, t_in, t_out, right, pa, pb, pc))
            bound += (
                abs(factor)
                * tables.maxabs[t_in] * tables.maxnnz[t_in]
                * tables.maxabs[t_out] * tables.maxnnz[t_out]
            )
        args = (tables.ptr, tables.idx, tables.val, tables.row_base)
        rest = (triples, self.parity, self.s, self.n_r, self.n_out)
        if bound >= INT64_SAFE or _accel.triple is _triple_py:
            return _triple_py.failing(*args, flat, *rest)
        return _accel.triple.failing(*args, [x for t in flat for x in t], *rest)


def _all_keys(sample) -> bool:
    return not any(isinstance(x, Element) for t in sample for x in t)


def _check_triples(law: str, parts: Sequence[str], ops: dict, sample, space,
                   limit: int | None) -> CheckReport:
    if isinstance(sample, Cube):
        keys = list(sample.keys)
        s = len(keys)
        flat = [i for t in product(range(s), repeat=3) for i in t]
        triples_keys = None
        count = s ** 3
    else:
        triples_keys = [tuple(t) for t in sample]
        count = len(triples_keys)
        if _all_keys(triples_keys):
            keys = sorted({k for t in triples_keys for k in t})
            index = {k: i for i, k in enumerate(keys)}
            flat = [index[k] for t in triples_keys for k in t]
        else:
            keys = None
    failures: list[Failure] = []
    total = 0
    engine = _TripleEngine(ops, keys, parts) if keys else None
    for part in parts:
        if keys is not None:
            bad = engine.failing(part, flat) if keys else []
            total += len(bad)
            for t in bad[:limit] if limit is not None else bad:
                inputs = (keys[flat[3 * t]], keys[flat[3 * t + 1]], keys[flat[3 * t + 2]])
                res = direct_residual(part, ops, inputs, space)
                if not res:
                    raise RuntimeError(
                        f"{law}/{part}: table kernel flagged {inputs} but direct residual is 0"
                    )
                failures.append(Failure(part, inputs, res))
        else:
            for t in triples_keys:
                res = direct_residual(part, ops, t, space)
                if res:
                    total += 1
                    if limit is None or len(failures) < limit:
                        failures.append(Failure(part, t, res))
    return CheckReport(law, count, tuple(failures), total, tuple(parts))


def _check_pairs(law: str, part: str, ops: dict, pairs, space, limit) -> tuple[list, int]:
    failures, total = [], 0
    for p in pairs:
        res = direct_residual(part, ops, p, space)
        if res:
            total += 1
            if limit is None or len(failures) < limit:
                failures.append(Failure(part, tuple(p), res))
    return failures, total


def _space_of(*rules):
    space = None
    for r in rules:
        if r.space is not None:
            space = r.space
    return space


def check_novikov_super(circ: BilinearRule, triples, limit: int | None = 100) -> CheckReport:
    """Right super-symmetry and associator super-symmetry on each triple."""
    ops = {"circ": circ}
    return _check_triples(
        "novikov", ("right-symmetry", "associator-symmetry"), ops, triples,
        _space_of(circ), limit,
    )


def check_lie_super(bracket: BilinearRule, triples, limit: int | None = 100) -> CheckReport:
    """Super skew-symmetry on the leading pairs and the super Jacobi identity."""
    ops = {"bracket": bracket}
    space = _space_of(bracket)
    pairs = pairs_of(triples)
    fails, n = _check_pairs("lie", "skew", ops, pairs, space, limit)
    rep = _check_triples("lie", ("jacobi",), ops, triples, space, limit)
    return CheckReport(
        "lie", rep.samples, tuple(fails) + rep.failures, n + rep.failure_count,
        ("skew", "jacobi"),
    )


def check_gd_compat(gd: GDStructure, triples, limit: int | None = 100) -> CheckReport:
    ops = {"bracket": gd.bracket, "circ": gd.circ}
    return _check_triples(
        "gd-compat", ("gd-compat",), ops, triples, _space_of(gd.bracket, gd.circ), limit
    )


def check_supercomm_assoc(mult: BilinearRule, triples, limit: int | None = 100) -> CheckReport:
    ops = {"mult": mult}
    space = _space_of(mult)
    fails, n = _check_pairs("supercomm-assoc", "super-commutativity", ops,
                            pairs_of(triples), space, limit)
    rep = _check_triples("supercomm-assoc", ("associativity",), ops, triples, space, limit)
    return CheckReport(
        "supercomm-assoc", rep.samples, tuple(fails) + rep.failures,
        n + rep.failure_count, ("super-commutativity", "associativity"),
    )


def check_derivation(d: LinearMap, mult: BilinearRule, pairs, parity: int | None = None,
                     limit: int | None = 100) -> CheckReport:
    """Super-Leibniz rule d(u·v) = d(u)·v + (-1)^{|d||u|} u·d(v)."""
    dp = d.parity if parity is None else parity
    space = _space_of(mult)
    failures, total, count = [], 0, 0
    for u, v in pairs:
        count += 1
        u = _as_element(u, space)
        v = _as_element(v, space)
        res = Element({}, space)
        for i, up in u.parity_parts().items():
            res = res + d(mult(up, v)) - mult(d(up), v) - mult(up, d(v)) * _sign(dp * i)
        if res:
            total += 1
            if limit is None or len(failures) < limit:
                failures.append(Failure("leibniz", (u, v), res))
    return CheckReport("derivation", count, tuple(failures), total, ("leibniz",))
