"""JSON encoding of structures and reports (schema "gdforge-v1").

Scalars are "p/q" strings, basis keys are small JSON values tied to the
basis description, and every list is written in a canonical order so that
identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .checks import CheckReport
from .constructions import NKey, PairKey, PairSpace, SemidirectSpace
from .errors import ParseError, TableDomainError
from .families import (
    GroupHom,
    SkewForm,
    assoc_A,
    classified_bracket,
    diamond_xi,
    novikov_A,
    star_product,
    witt_like_bracket,
    xi_product,
)
from .graded import BasisIndex, BasisSpec, BilinearRule, Element, GDStructure, commutator_rule, zero_rule
from .superalg import Mono, SuperCommAlg, VectorField

__all__ = [
    "SCHEMA",
    "StructureFile",
    "decode_element",
    "decode_key",
    "decode_scalar",
    "decode_space",
    "dumps",
    "encode_element",
    "encode_key",
    "encode_report",
    "encode_scalar",
    "encode_space",
    "read_structure",
    "rule_from_descriptor",
    "snapshot",
    "table_rule",
    "write_structure",
]

SCHEMA = "gdforge-v1"
_SCALAR = re.compile(r"^-?\d+(/\d+)?$")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# scalars, spaces, keys, elements


def encode_scalar(x) -> str:
    return str(Fraction(x))


def decode_scalar(s) -> Fraction:
    if isinstance(s, bool):
        raise ParseError(f"not a scalar: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str) or not _SCALAR.match(s.strip()):
        raise ParseError(f"scalars are written as \"p/q\" strings, got {s!r}")
    try:
        return Fraction(s.strip())
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {s!r}") from None


def encode_space(space) -> dict:
    if isinstance(space, BasisSpec):
        return {"type": "A", "m": space.m, "levels": space.levels, "parity": space.parity}
    if isinstance(space, SuperCommAlg):
        return {"type": "superalg", "p": space.p, "q": space.q}
    if isinstance(space, SemidirectSpace):
        return {"type": "semidirect", "p": space.A.p, "q": space.A.q}
    if isinstance(space, PairSpace):
        return {"type": "pair", "p": space.A.p, "q": space.A.q}
    raise ParseError(f"cannot serialize basis {space!r}")


def decode_space(d: Mapping):
    try:
        kind = d["type"]
        if kind == "A":
            return BasisSpec(int(d.get("m", 1)), bool(d.get("levels", False)),
                             d.get("parity", "even"))
        A = SuperCommAlg(int(d["p"]), int(d.get("q", 0)))
        return {"superalg": A, "semidirect": SemidirectSpace(A), "pair": PairSpace(A)}[kind]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad basis description {dict(d)!r}: {exc}") from None


def _mono(m: Mono) -> dict:
    return {"t": list(m.exps), "θ": list(m.odd)}


def _unmono(d, A: SuperCommAlg) -> Mono:
    exps, odd = tuple(d["t"]), tuple(d.get("θ", ()))
    if len(exps) != A.p or any(not 1 <= j <= A.q for j in odd) or list(odd) != sorted(set(odd)):
        raise ParseError(f"bad monomial {d!r}")
    return Mono(exps, odd)


def encode_key(key) -> Any:
    if isinstance(key, BasisIndex):
        return [key.k, key.level]
    if isinstance(key, Mono):
        return _mono(key)
    if isinstance(key, VectorField):
        return {"coef": _mono(key.coef), "d": list(key.gen)}
    if isinstance(key, NKey):
        return {"slot": key.slot, "key": encode_key(key.key)}
    if isinstance(key, PairKey):
        return {"slot": key.slot, "mono": _mono(key.mono)}
    raise ParseError(f"cannot serialize key {key!r}")


def _unfield(d, A: SuperCommAlg) -> VectorField:
    g = d["d"]
    if g[0] not in ("t", "θ") or not 1 <= int(g[1]) <= (A.p if g[0] == "t" else A.q):
        raise ParseError(f"bad derivative {g!r}")
    return VectorField(_unmono(d["coef"], A), (g[0], int(g[1])))


def decode_key(obj, space):
    try:
        if isinstance(space, BasisSpec):
            k, level = obj
            key = space.index(int(k), int(level))
            if key is None:
                raise ParseError(f"level {level} is not in the basis")
            return key
        if isinstance(space, SuperCommAlg):
            return _unmono(obj, space)
        if isinstance(space, SemidirectSpace):
            slot = obj["slot"]
            if slot == 0:
                return NKey(0, _unfield(obj["key"], space.A))
            if slot == 1:
                return NKey(1, _unmono(obj["key"], space.A))
            raise ParseError(f"bad slot {slot!r}")
        if isinstance(space, PairSpace):
            slot = obj["slot"]
            if slot not in (0, 1):
                raise ParseError(f"bad slot {slot!r}")
            return PairKey(slot, _unmono(obj["mono"], space.A))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"bad basis key {obj!r}: {exc}") from None
    raise ParseError(f"unsupported basis {space!r}")


def encode_element(x: Element) -> list:
    return [[encode_key(k), encode_scalar(c)] for k, c in sorted(x.items())]


def decode_element(obj, space) -> Element:
    if not isinstance(obj, list):
        raise ParseError(f"elements are lists of [key, scalar], got {obj!r}")
    return Element(((decode_key(k, space), decode_scalar(c)) for k, c in obj), space)


# ---------------------------------------------------------------------------
# rules


def table_rule(domain: Iterable, entries: Mapping, space, name: str = "table") -> BilinearRule:
    """Explicit structure constants; pairs in the domain without an entry are 0."""
    dom = frozenset(domain)

    def kernel(p, q):
        if p not in dom or q not in dom:
            raise TableDomainError(f"({p}, {q}) is outside the recorded domain")
        return entries.get((p, q), {})

    return BilinearRule(kernel, space, name, {"domain": dom})


def snapshot(ops: Mapping[str, BilinearRule], sample: Iterable) -> tuple[list, dict]:
    """Domain (sample plus one round of products) and the tables of ``ops`` on it."""
    sample = sorted(set(sample))
    dom = set(sample)
    for rule in ops.values():
        for p in sample:
            for q in sample:
                dom.update(rule.on_keys(p, q))
    domain = sorted(dom)
    tables = {}
    for name, rule in ops.items():
        tables[name] = {(p, q): rule.on_keys(p, q) for p in domain for q in domain
                        if rule.on_keys(p, q)}
    return domain, tables


def _encode_table(domain: list, table: Mapping) -> list:
    pos = {k: i for i, k in enumerate(domain)}
    out = []
    for (p, q), vals in sorted(table.items(), key=lambda t: (pos[t[0][0]], pos[t[0][1]])):
        out.append([pos[p], pos[q], [[encode_key(k), encode_scalar(c)] for k, c in sorted(vals.items())]])
    return out


def _decode_table(obj, domain: list, space) -> dict:
    entries: dict = {}
    for row in obj:
        try:
            i, j, vals = row
            p, q = domain[i], domain[j]
        except (ValueError, TypeError, IndexError):
            raise ParseError(f"bad table row {row!r}") from None
        acc = {}
        for k, c in vals:
            key = decode_key(k, space)
            acc[key] = acc.get(key, 0) + decode_scalar(c)
        entries[(p, q)] = {k: c for k, c in acc.items() if c}
    return entries


def _hom_arg(x, m):
    return None if x is None else GroupHom(decode_scalar(x), m)


def _form_arg(d, m):
    if d is None:
        return None
    kind = d.get("kind")
    if kind == "hom-product":
        return SkewForm("hom-product", (GroupHom(decode_scalar(d["phi1"]), m),
                                        GroupHom(decode_scalar(d["phi2"]), m)), m)
    if kind == "table":
        return SkewForm.from_table({(decode_scalar(a), decode_scalar(b)): decode_scalar(v)
                                    for a, b, v in d["values"]}, m)
    if kind == "bilinear":
        return SkewForm("bilinear", decode_scalar(d.get("value", "0")), m)
    raise ParseError(f"unknown form kind {kind!r}")


def rule_from_descriptor(desc: Mapping, space) -> BilinearRule:
    """Build a rule from its JSON descriptor (families on A_{Δ,Γ}, or tables)."""
    kind = desc.get("rule")
    if kind == "zero":
        return zero_rule(space)
    if kind == "commutator":
        return commutator_rule(rule_from_descriptor(desc["of"], space))
    if kind == "table":
        domain = [decode_key(k, space) for k in desc.get("domain", [])]
        return table_rule(domain, _decode_table(desc.get("entries", []), domain, space), space)
    if not isinstance(space, BasisSpec):
        raise ParseError(f"rule {kind!r} needs an A-type basis")
    m = space.m
    if kind == "novikov_A":
        return novikov_A(decode_scalar(desc.get("b", "0")), space)
    if kind == "assoc_A":
        return assoc_A(space)
    if kind == "diamond_xi":
        return diamond_xi(decode_element(desc.get("xi", []), space), space)
    if kind == "xi_product":
        return xi_product(decode_element(desc.get("xi", []), space), space)
    if kind == "witt_like":
        return witt_like_bracket(space)
    if kind == "star":
        return star_product(space)
    if kind == "classified":
        return classified_bracket(
            desc["case"], space,
            b=decode_scalar(desc.get("b", "0")),
            phi=_hom_arg(desc.get("phi"), m),
            lam=decode_scalar(desc.get("lam", "0")),
            a=decode_scalar(desc.get("a", "0")),
            phi0=_hom_arg(desc.get("phi0"), m),
            phi1=_hom_arg(desc.get("phi1"), m),
            phi2=_hom_arg(desc.get("phi2"), m),
            form=_form_arg(desc.get("form"), m),
            theta=_form_arg(desc.get("theta"), m),
        )
    raise ParseError(f"unknown rule {kind!r}")


# ---------------------------------------------------------------------------
# structure files


@dataclass
class StructureFile:
    """A basis, named operations and the sample the checks run on.

    ``window`` records (N, L) for A-type bases; ``sample`` lists the keys
    explicitly (for tables, the domain is their one-step product closure).
    """

    space: Any
    ops: dict
    sample: list
    window: tuple | None = None
    source: dict = field(default_factory=dict)

    def gd(self) -> GDStructure:
        if "bracket" not in self.ops or "circ" not in self.ops:
            raise ParseError("a GD structure needs both \"bracket\" and \"circ\"")
        return GDStructure(self.ops["bracket"], self.ops["circ"], self.space, tuple(self.sample))


def _sample_from(d: Mapping, space) -> tuple[list, tuple | None]:
    win = d.get("window")
    if "sample" in d:
        sample = [decode_key(k, space) for k in d["sample"]]
    elif win is not None and isinstance(space, BasisSpec):
        from .graded import window as graded_window

        sample = graded_window(space, int(win["N"]), int(win.get("L", 0)))
    else:
        raise ParseError("a structure needs a \"sample\" or an A-type \"window\"")
    wt = None if win is None else (int(win["N"]), int(win.get("L", 0)))
    return sample, wt


def structure_from_json(d: Mapping) -> StructureFile:
    if d.get("schema") != SCHEMA:
        raise ParseError(f"expected schema {SCHEMA!r}, got {d.get('schema')!r}")
    if d.get("kind", "structure") != "structure":
        raise ParseError(f"not a structure file (kind {d.get('kind')!r})")
    space = decode_space(d.get("basis", {}))
    ops_d = d.get("operations")
    if not isinstance(ops_d, Mapping) or not ops_d:
        raise ParseError("a structure needs \"operations\"")
    ops = {name: rule_from_descriptor(desc, space) for name, desc in sorted(ops_d.items())}
    sample, win = _sample_from(d, space)
    return StructureFile(space, ops, sample, win, dict(d.get("source", {})))


def read_structure(path) -> StructureFile:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(d, Mapping):
        raise ParseError(f"{path}: top level must be an object")
    try:
        return structure_from_json(d)
    except KeyError as exc:
        raise ParseError(f"{path}: missing field {exc}") from None


def structure_to_json(sf: StructureFile, tables: bool = True) -> dict:
    """Serialize; with ``tables`` every operation becomes an explicit table."""
    out: dict = {"schema": SCHEMA, "kind": "structure", "basis": encode_space(sf.space),
                 "sample": [encode_key(k) for k in sorted(sf.sample)]}
    if sf.window is not None:
        out["window"] = {"N": sf.window[0], "L": sf.window[1]}
    if sf.source:
        out["source"] = sf.source
    domain, tabs = snapshot(sf.ops, sf.sample)
    enc_domain = [encode_key(k) for k in domain]
    out["operations"] = {
        name: {"rule": "table", "domain": enc_domain, "entries": _encode_table(domain, tabs[name])}
        for name in sorted(sf.ops)
    }
    return out


def write_structure(path, sf: StructureFile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(structure_to_json(sf)))


# ---------------------------------------------------------------------------
# reports


def _encode_residual(r) -> Any:
    from .conformal import DPoly, ZSeries

    if isinstance(r, Element):
        return {"element": encode_element(r)}
    if isinstance(r, ZSeries):
        rows = [[list(e), n, encode_key(k), encode_scalar(c)]
                for (e, n, k), c in sorted(r.terms.items())]
        return {"series": rows, "variables": list(r.names),
                "exponents": [list(e) for e in r.exponents]}
    if isinstance(r, DPoly):
        return {"dpoly": [[n, encode_key(k), encode_scalar(c)] for (n, k), c in sorted(r.terms.items())]}
    return {"value": str(r)}


def _encode_input(x) -> Any:
    if isinstance(x, Element):
        return {"element": encode_element(x)}
    try:
        return encode_key(x)
    except ParseError:
        return str(x)


def encode_report(rep: CheckReport) -> dict:
    return {
        "law": rep.law,
        "parts": list(rep.parts),
        "samples": rep.samples,
        "passed": rep.passed,
        "failure_count": rep.failure_count,
        "failures": [
            {"part": f.part, "inputs": [_encode_input(x) for x in f.inputs],
             "residual": _encode_residual(f.residual)}
            for f in rep.failures
        ],
    }
