"""Independent reference computations used by the test-suite."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from gdforge.graded import BasisSpec


def compat_rows(circ, spec: BasisSpec, N: int, L: int, M: int, S: int,
                skew: bool = True, reach: int = 3):
    """Rows of the compatibility identity with an unknown bracket, by brute force.

    The identity [w∘u,v] - [w∘v,u] + [w,u]∘v - [w,v]∘u - w∘[u,v] is expanded
    symbolically in the unknowns A(p, q; s) (coefficient of x_s in [x_p, x_q])
    for every window triple and output key. Instances touching a nonzero slot
    outside the window are dropped. Inputs range over |k| <= N, levels <= L;
    outputs over |k| <= M, levels <= S, with A = 0 above level S for window
    inputs.
    A(p, p; s) = 0 for skew brackets.
    """
    top = L if spec.levels else 0
    window = [spec.index(k, l) for k in range(-N, N + 1) for l in range(top + 1)]
    inside = set(window)
    wide = [spec.index(k, l) for k in range(-reach * N, reach * N + 1)
            for l in range((reach * top if spec.levels else 0) + 1)]

    def A(p, q, s):
        if skew and p == q:
            return {}
        if p not in inside or q not in inside:
            return None
        if spec.levels and s.level > S:
            return {}
        if abs(s.k) > M:
            return None
        if skew and q < p:
            return {("a", q, p, s): Fraction(-1)}
        return {("a", p, q, s): Fraction(1)}

    rows = []
    for u, v, w in product(window, repeat=3):
        per_out: dict = {}
        bad_out: set = set()

        def add(t, c, slot):
            if t in bad_out or not c:
                return
            got = A(*slot)
            if got is None:
                bad_out.add(t)
                return
            acc = per_out.setdefault(t, {})
            for var, s in got.items():
                acc[var] = acc.get(var, 0) + c * s

        for t in wide:
            for r, c in circ.on_keys(w, u).items():
                add(t, c, (r, v, t))
            for r, c in circ.on_keys(w, v).items():
                add(t, -c, (r, u, t))
            for s in wide:
                c = circ.on_keys(s, v).get(t, 0)
                add(t, c, (w, u, s))
                c = circ.on_keys(s, u).get(t, 0)
                add(t, -c, (w, v, s))
                c = circ.on_keys(w, s).get(t, 0)
                add(t, -c, (u, v, s))
        for t, acc in per_out.items():
            if t in bad_out:
                continue
            acc = {k: c for k, c in acc.items() if c}
            if acc:
                rows.append(acc)
    return rows


def dense_rank(rows: list[dict], variables: list) -> int:
    """Rank by textbook dense Gaussian elimination over Fractions."""
    mat = [[Fraction(r.get(v, 0)) for v in variables] for r in rows]
    rank, col, n = 0, 0, len(variables)
    while rank < len(mat) and col < n:
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            col += 1
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col] / p
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        col += 1
    return rank


def dense_solve(rows: list[tuple[dict, object]], variables: list):
    """Particular solution (free variables 0) or None, by dense elimination."""
    n = len(variables)
    mat = [[Fraction(r.get(v, 0)) for v in variables] + [Fraction(rhs)] for r, rhs in rows]
    pivots, rank = [], 0
    for col in range(n):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        mat[rank] = [a / p for a in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
    if any(row[n] for row in mat[rank:]):
        return None
    sol = {v: Fraction(0) for v in variables}
    for i, col in enumerate(pivots):
        sol[variables[col]] = mat[i][n]
    return sol
