"""Command-line front end: ``gdforge check | conformal | classify | construct``.

Exit codes: 0 when every requested check passes (or the classification
matches), 1 on a check failure, 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from fractions import Fraction

from .checks import CheckReport, check_gd_compat, check_lie_super, check_novikov_super, cube
from .errors import (
    CaseParameterMismatch,
    ConditionViolated,
    ConstraintViolated,
    GDForgeError,
    NotQuadratic,
    ParseError,
    TableDomainError,
    UnknownLaw,
)
from .graded import BasisSpec, Element, commutator_rule, window as graded_window
from .serialize import (
    SCHEMA,
    StructureFile,
    _encode_residual,
    decode_scalar,
    dumps,
    encode_element,
    encode_key,
    encode_report,
    encode_scalar,
    read_structure,
    write_structure,
)
from .superalg import SuperCommAlg, VectorField, euler, monomial_window, partial

__all__ = ["LAWS", "CONFORMAL_CHECKS", "CONSTRUCTIONS", "build_parser", "main", "parse_polynomial"]

LAWS = ("novikov", "lie", "gd-compat")
CONFORMAL_CHECKS = ("skew", "jacobi", "cross")
CONSTRUCTIONS = ("novikov", "semidirect", "lie-poisson", "gd-pair", "two-derivation")


class UsageError(GDForgeError):
    pass


# ---------------------------------------------------------------------------
# small parsers

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(theta|t|θ)(\d*)|(\^)|(\*)|([+-])|(\S))")


def parse_polynomial(text: str, A: SuperCommAlg) -> Element:
    """Parse sums of products such as ``t^2 - 3/2*t1^-1*θ1``.

    ``t`` abbreviates ``t1``; odd generators are ``θj`` (or ``thetaj``) and
    multiply in the written order.
    """
    mult = A.mult()
    toks = []
    for m in _TOKEN.finditer(text):
        if m.group(7):
            raise ParseError(f"unexpected {m.group(7)!r} in polynomial {text!r}")
        toks.append(m)
    if not toks:
        raise ParseError("empty polynomial")
    total = Element({}, A)
    i = 0

    def factor(i):
        m = toks[i]
        if m.group(1):
            return A.scalar(Fraction(m.group(1))), i + 1
        if m.group(2):
            idx = int(m.group(3) or 1)
            if m.group(2) == "t":
                if not 1 <= idx <= A.p:
                    raise ParseError(f"t{idx} is not a generator")
                power = 1
                if i + 1 < len(toks) and toks[i + 1].group(4):
                    j = i + 2
                    sign = 1
                    if j < len(toks) and toks[j].group(6):
                        sign = -1 if toks[j].group(6) == "-" else 1
                        j += 1
                    if j >= len(toks) or not toks[j].group(1) or "/" in toks[j].group(1):
                        raise ParseError(f"bad exponent in {text!r}")
                    return A.t(idx, sign * int(toks[j].group(1))), j + 1
                return A.t(idx, power), i + 1
            if not 1 <= idx <= A.q:
                raise ParseError(f"θ{idx} is not a generator")
            return A.theta(idx), i + 1
        raise ParseError(f"expected a factor in {text!r}")

    while i < len(toks):
        sign = 1
        while i < len(toks) and toks[i].group(6):
            sign *= -1 if toks[i].group(6) == "-" else 1
            i += 1
        if i >= len(toks):
            raise ParseError(f"dangling sign in {text!r}")
        term, i = factor(i)
        while i < len(toks) and toks[i].group(5):
            if i + 1 >= len(toks):
                raise ParseError(f"dangling '*' in {text!r}")
            f, i = factor(i + 1)
            term = mult(term, f)
        total = total + term * sign
        if i < len(toks) and not toks[i].group(6):
            raise ParseError(f"expected '+' or '-' in {text!r}")
    return total


def _window(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--window expects N or N,L, got {text!r}") from None
    if len(parts) not in (1, 2) or min(parts) < 0:
        raise UsageError(f"--window expects N or N,L, got {text!r}")
    return parts[0], parts[1] if len(parts) == 2 else 0


def _params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# report assembly


def _status(ok: bool) -> dict:
    return {"status": "pass" if ok else "fail", "exit": 0 if ok else 1}


def _text_report(rep: CheckReport, limit: int = 5) -> list[str]:
    flag = "PASS" if rep.passed else "FAIL"
    lines = [f"[{flag}] {rep.law}: {rep.samples} samples, {rep.failure_count} failures"]
    for f in rep.failures[:limit]:
        args = ", ".join(str(x) for x in f.inputs)
        lines.append(f"  {f.part} ({args}): residual {f.residual}")
    return lines


def _emit(args, report: dict, lines: list[str], elapsed: float) -> int:
    code = report["exit"]
    if args.format == "json":
        text = dumps(report)
    else:
        lines = lines + [f"status: {report['status']} (exit {code}, {elapsed:.2f}s)"]
        text = "\n".join(lines) + "\n"
    if getattr(args, "report", None):
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return code


def _sample(sf: StructureFile, win) -> list:
    if win is None:
        return list(sf.sample)
    if isinstance(sf.space, BasisSpec):
        return graded_window(sf.space, *win)
    if isinstance(sf.space, SuperCommAlg):
        return monomial_window(sf.space, win[0], win[1] if win[1] else None)
    raise UsageError("--window only applies to A-type and superalgebra bases")


# ---------------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    start = time.perf_counter()
    laws = args.law or []
    for law in laws:
        if law not in LAWS:
            raise UnknownLaw(f"unknown law {law!r}; choose from {', '.join(LAWS)}")
    sf = read_structure(args.structure)
    sample = _sample(sf, _window(args.window))
    if not laws:
        laws = [law for law, need in (("novikov", "circ"), ("lie", "bracket")) if need in sf.ops]
        if "bracket" in sf.ops and "circ" in sf.ops:
            laws.append("gd-compat")
    triples = cube(sample)
    reports = []
    for law in sorted(set(laws), key=LAWS.index):
        if law == "novikov":
            reports.append(check_novikov_super(_op(sf, "circ"), triples))
        elif law == "lie":
            reports.append(check_lie_super(_op(sf, "bracket"), triples))
        else:
            reports.append(check_gd_compat(sf.gd(), triples))
    ok = all(r.passed for r in reports)
    report = {"schema": SCHEMA, "kind": "report", "command": _echo(args, "check"),
              "results": [encode_report(r) for r in reports], **_status(ok)}
    lines = [f"gdforge check {args.structure} on {len(sample)} keys"]
    for r in reports:
        lines += _text_report(r)
    return _emit(args, report, lines, time.perf_counter() - start)


def _op(sf: StructureFile, name: str):
    if name not in sf.ops:
        raise ParseError(f"the structure has no {name!r} operation")
    return sf.ops[name]


def _echo(args, command: str) -> dict:
    keep = ("structure", "law", "check", "window", "case", "b", "m", "interior",
            "support", "reach", "descriptor", "param", "out")
    out = {"command": command}
    for k in keep:
        v = getattr(args, k, None)
        if v is not None and v != []:
            out[k] = sorted(v) if isinstance(v, list) else v
    return out


# ---------------------------------------------------------------------------
# conformal


def _pinpoints(Y, failures, limit: int = 5) -> tuple[list, list]:
    """The z1^-1 z2^-1 Jacobi coefficient next to the direct compatibility residual."""
    from .conformal import compat_coefficient, jacobi_residual

    rows, lines = [], []
    for f in failures:
        u, v, w = f.inputs
        coeff = jacobi_residual(Y, u, v, w).coeff(-1, -1)
        if not coeff:
            continue
        g = compat_coefficient(Y, u, v, w)
        rows.append({"inputs": [encode_key(x) for x in f.inputs],
                     "coefficient": _encode_residual(coeff),
                     "gd_compat_residual": encode_element(g)})
        lines.append(f"  z1^-1 z2^-1 coefficient at ({u}, {v}, {w}): {coeff}; "
                     f"gd-compat residual {g}")
        if len(rows) == limit:
            break
    return rows, lines


def cmd_conformal(args) -> int:
    from .conformal import check_cross_term, check_jacobi, check_skew, degree_split, from_gd

    start = time.perf_counter()
    checks = args.check or list(CONFORMAL_CHECKS)
    for c in checks:
        if c not in CONFORMAL_CHECKS:
            raise UnknownLaw(f"unknown conformal check {c!r}; choose from {', '.join(CONFORMAL_CHECKS)}")
    sf = read_structure(args.structure)
    sample = _sample(sf, _window(args.window))
    Y = from_gd(sf.gd())
    triples = cube(sample)
    reports, extra, pin_lines = [], {}, []
    for c in sorted(set(checks), key=CONFORMAL_CHECKS.index):
        if c == "skew":
            reports.append(check_skew(Y, [(u, v) for u in sample for v in sample]))
        elif c == "jacobi":
            rep = check_jacobi(Y, triples)
            reports.append(rep)
            if rep.failures:
                extra["pinpoint"], pin_lines = _pinpoints(Y, rep.failures)
        else:
            try:
                Y1, Y2 = degree_split(Y)
            except NotQuadratic as exc:
                raise ParseError(str(exc)) from None
            reports.append(check_cross_term(Y1, Y2, triples))
    ok = all(r.passed for r in reports)
    report = {"schema": SCHEMA, "kind": "report", "command": _echo(args, "conformal"),
              "results": [encode_report(r) for r in reports], **_status(ok), **extra}
    lines = [f"gdforge conformal {args.structure} on {len(sample)} keys"]
    for r in reports:
        lines += _text_report(r)
    lines += pin_lines
    return _emit(args, report, lines, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# classify


def _vector_json(vec: dict) -> list:
    rows = []
    for (_, p, q, s), c in sorted(vec.items()):
        rows.append([encode_key(p), encode_key(q), encode_key(s), encode_scalar(c)])
    return rows


def cmd_classify(args) -> int:
    from .classifier import (
        CLASSIFIER_CASES,
        EXPLORATORY_CASES,
        Window,
        b0_filter,
        build_system,
        match_family,
        predicted_family,
        exploratory_residuals,
        solve_and_project,
    )

    start = time.perf_counter()
    case = args.case
    if case not in CLASSIFIER_CASES + EXPLORATORY_CASES:
        raise UsageError(f"unknown case {case!r}; choose from "
                         f"{', '.join(CLASSIFIER_CASES + EXPLORATORY_CASES)}")
    b = decode_scalar(args.b)
    win = _window(args.window) or (4, 0)
    w = Window(win[0], win[1], args.interior, args.reach, args.support)
    cs = build_system(case, b, w, args.m)
    ps = solve_and_project(cs)
    body: dict = {
        "case": case, "b": encode_scalar(b), "m": args.m,
        "window": {"N": w.N, "L": w.L, "K": w.K, "reach": w.reach, "support": w.support},
        "variables": len(cs.system.variables), "equations": len(cs.system.rows),
        "rank": ps.solution.rank, "consistent": ps.consistent,
        "interior_dimension": ps.dimension,
    }
    lines = [f"gdforge classify {case} b={b} N={w.N} L={w.L} K={w.K}",
             f"  {len(cs.system.variables)} variables, {len(cs.system.rows)} equations, "
             f"rank {ps.solution.rank}, interior dimension {ps.dimension}"]
    if case == "b0":
        rep = b0_filter(ps)
        ok = rep.agree
        body["b0_filter"] = {"jacobi": list(rep.jacobi), "family": list(rep.family),
                             "agree": rep.agree}
        lines.append(f"  quadratic filter vs family conditions: "
                     f"{'agree' if rep.agree else 'disagree'} on {len(rep.jacobi)} samples")
    elif case == "gammaN-bin":
        res = exploratory_residuals(ps)
        ok = all(r == 0 for v in res.values() for _, r in v)
        body["residuals"] = {k: [[i, encode_scalar(c)] for i, c in v] for k, v in sorted(res.items())}
        kinds: dict = {}
        for k, v in res.items():
            tally = kinds.setdefault(k.split("(")[0], [0, 0, 0])
            tally[0] += 1
            tally[1] += len(v)
            tally[2] += sum(1 for _, r in v if r)
        for kind, (n, checked, bad) in sorted(kinds.items()):
            lines.append(f"  {kind}: {n} relations, {checked} residuals, {bad} nonzero")
    else:
        fm = match_family(ps, predicted_family(case, b, args.m))
        ok = fm.verdict == "both-containments"
        body["match"] = {
            "family": fm.family, "verdict": fm.verdict,
            "family_in_solutions": fm.family_in_solutions,
            "solutions_in_family": fm.solutions_in_family,
            "family_dimension": fm.family_dimension,
            "recovered": [{k: encode_scalar(v) for k, v in sorted(r.items())} for r in fm.recovered],
        }
        if case == "novikov-over-lie" and ps.particular is not None:
            body["interior_solution"] = _vector_json(ps.particular)
        lines.append(f"  {fm.verdict} against {fm.family} "
                     f"(family dimension {fm.family_dimension})")
    report = {"schema": SCHEMA, "kind": "report", "command": _echo(args, "classify"),
              "classification": body, **_status(ok)}
    return _emit(args, report, lines, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# construct


def _hom(params, name, m):
    from .families import GroupHom

    return GroupHom(decode_scalar(params[name]), m) if name in params else None


def _form(params, m):
    from .families import GroupHom, SkewForm

    if "form_phi1" in params or "form_phi2" in params:
        return SkewForm("hom-product", (GroupHom(decode_scalar(params.get("form_phi1", "0")), m),
                                        GroupHom(decode_scalar(params.get("form_phi2", "0")), m)), m)
    return None


def _family_structure(name: str, params: dict, win) -> StructureFile:
    from .families import CASES, classified_bracket, novikov_A

    m = int(params.get("m", 1))
    b = decode_scalar(params.get("b", "0"))
    levels = name.startswith("gammaN") or name.startswith("r52")
    spec = BasisSpec(m=m, levels=levels)
    circ = novikov_A(b, spec)
    if name == "novikov":
        bracket = commutator_rule(circ)
    else:
        form = _form(params, m)
        bracket = classified_bracket(
            name, spec, b=b, phi=_hom(params, "phi", m),
            lam=decode_scalar(params.get("lam", "0")), a=decode_scalar(params.get("a", "0")),
            phi0=_hom(params, "phi0", m), phi1=_hom(params, "phi1", m),
            phi2=_hom(params, "phi2", m), form=form, theta=form if name == "b-in" else None,
        )
        assert name in CASES
    N, L = win
    return StructureFile(spec, {"bracket": bracket, "circ": circ},
                         graded_window(spec, N, L if levels else 0),
                         (N, L if levels else 0), {"descriptor": name, "params": params})


def _construction(name: str, params: dict, win) -> StructureFile:
    from .constructions import (
        NKey,
        gd_lie_poisson,
        gd_pair_construction,
        gd_semidirect_W,
        gd_theorem35,
        standard_poisson,
    )
    from .superalg import derivation

    N = win[0]
    source = {"descriptor": name, "params": params}
    if name == "semidirect":
        A = SuperCommAlg(int(params.get("p", 1)), int(params.get("q", 1)))
        mons = monomial_window(A, N)
        fields = [VectorField(c, g) for c in monomial_window(A, min(N, 1)) for g in A.generators]
        gd = gd_semidirect_W(A, fields, mons)
        sample = [NKey(0, f) for f in fields] + [NKey(1, k) for k in mons]
        return StructureFile(gd.space, {"bracket": gd.bracket, "circ": gd.circ}, sample, None, source)
    if name == "lie-poisson":
        A = SuperCommAlg(2, int(params.get("q", 0)))
        xi = decode_scalar(params.get("xi", "-2"))
        gd = gd_lie_poisson(A, standard_poisson(A), euler(A), xi, monomial_window(A, N))
        return StructureFile(A, {"bracket": gd.bracket, "circ": gd.circ}, list(gd.keys), None, source)
    if name == "gd-pair":
        A = SuperCommAlg(1, 0)
        d = params.get("d", "euler")
        if d not in ("euler", "partial"):
            raise UsageError(f"d must be euler or partial, got {d!r}")
        dm = euler(A) if d == "euler" else partial(A, ("t", 1))
        xi, e0, e1 = (parse_polynomial(params.get(k, "0"), A) for k in ("xi", "eta0", "eta1"))
        gd = gd_pair_construction(A, dm, xi, e0, e1, monomials=monomial_window(A, N))
        return StructureFile(gd.space, {"bracket": gd.bracket, "circ": gd.circ},
                             list(gd.keys), None, source)
    if name == "two-derivation":
        A = SuperCommAlg(2, 0)
        variant = params.get("variant", "a")
        if variant not in ("a", "b"):
            raise UsageError(f"variant must be a or b, got {variant!r}")
        d1 = derivation(A, {("t", 1): A.t(1)}, name="t1 d/dt1")
        d2 = derivation(A, {("t", 2): A.t(2)}, name="t2 d/dt2")
        keys = monomial_window(A, N)
        gd = gd_theorem35(A.mult(), d1, d2, variant, decode_scalar(params.get("b", "0")), keys)
        return StructureFile(A, {"bracket": gd.bracket, "circ": gd.circ}, list(gd.keys), None, source)
    raise UsageError(f"unknown descriptor {name!r}")


def cmd_construct(args) -> int:
    from .families import CASES

    start = time.perf_counter()
    params = _params(args.param)
    win = _window(args.window) or (2, 1)
    name = args.descriptor
    if args.b is not None:
        params.setdefault("b", args.b)
    try:
        if name in CASES or name == "novikov":
            sf = _family_structure(name, params, win)
        elif name in CONSTRUCTIONS:
            sf = _construction(name, params, win)
        else:
            raise UsageError(f"unknown descriptor {name!r}; choose from "
                             f"{', '.join(sorted(set(CASES) | set(CONSTRUCTIONS)))}")
    except ConditionViolated as exc:
        residual = exc.residual
        report = {"schema": SCHEMA, "kind": "report", "command": _echo(args, "construct"),
                  "condition": exc.condition,
                  "residual": encode_element(residual) if isinstance(residual, Element) else str(residual),
                  **_status(False)}
        lines = [f"gdforge construct {name}: condition {exc.condition} fails",
                 f"  residual = {residual}"]
        return _emit(args, report, lines, time.perf_counter() - start)
    if args.out:
        write_structure(args.out, sf)
    report = {"schema": SCHEMA, "kind": "report", "command": _echo(args, "construct"),
              "sample": len(sf.sample), **_status(True)}
    lines = [f"gdforge construct {name}: {len(sf.sample)} sample keys"
             + (f", written to {args.out}" if args.out else "")]
    return _emit(args, report, lines, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gdforge", description="Exact checks, classifications and constructions "
                "for Novikov superalgebras and Gel'fand-Dorfman bialgebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--report", help="also write the report to this path")

    c = sub.add_parser("check", help="run graded-core checkers on a structure file")
    c.add_argument("--structure", required=True)
    c.add_argument("--law", action="append", help=f"one of {', '.join(LAWS)} (repeatable)")
    c.add_argument("--window", help="N or N,L (overrides the file's sample)")
    common(c)

    c = sub.add_parser("conformal", help="check the conformal superalgebra built from a GD structure")
    c.add_argument("--structure", required=True)
    c.add_argument("--check", action="append", help=f"one of {', '.join(CONFORMAL_CHECKS)}")
    c.add_argument("--window", help="N or N,L")
    common(c)

    c = sub.add_parser("classify", help="windowed brute-force classification")
    c.add_argument("--case", required=True)
    c.add_argument("--b", default="0")
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--window", help="N or N,L (default 4)")
    c.add_argument("--interior", type=int, default=2, metavar="K")
    c.add_argument("--reach", type=int, help="output degree bound M")
    c.add_argument("--support", type=int, help="output level bound S")
    c.add_argument("--out", dest="report", help="write the report here")
    c.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("construct", help="build a family or construction and write its tables")
    c.add_argument("descriptor")
    c.add_argument("--param", action="append", metavar="KEY=VALUE")
    c.add_argument("--b")
    c.add_argument("--window", help="N or N,L for the sample (default 2,1)")
    c.add_argument("--out", help="structure file to write")
    common(c)
    return p


COMMANDS = {"check": cmd_check, "conformal": cmd_conformal,
            "classify": cmd_classify, "construct": cmd_construct}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, UnknownLaw, CaseParameterMismatch, ConstraintViolated,
            TableDomainError) as exc:
        sys.stderr.write(f"gdforge: error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"gdforge: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
