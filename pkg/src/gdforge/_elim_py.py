"""Fraction-free sparse Gauss-Jordan elimination (pure-Python twin of ``_elim_c``).

Rows are ``dict[int, int]`` maps column -> integer coefficient. The caller
appends the right-hand side as the largest column. The pivot of a row is its
lowest column; pivot rows are kept primitive (content 1) with a positive pivot
and fully reduced against each other, so the result is the unique reduced row
echelon form up to scaling of each row.
"""

from math import gcd

__all__ = ["rref"]


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _combine(r, f, p, a):
    # a*r - f*p, dropping zeros
    out = {k: a * v for k, v in r.items()} if a != 1 else dict(r)
    for k, v in p.items():
        nv = out.get(k, 0) - f * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def rref(rows):
    """Reduce ``rows`` and return ``{pivot_column: row}``."""
    pivots = {}
    colrows = {}
    for row in rows:
        r = {k: v for k, v in row.items() if v}
        hits = [c for c in r if c in pivots]
        for c in hits:
            p = pivots[c]
            a = p[c]
            f = r[c]
            g = gcd(a, f)
            r = _combine(r, f // g, p, a // g)
        if not r:
            continue
        r = _primitive(r)
        pc = min(r)
        for q in list(colrows.get(pc, ())):
            old = pivots[q]
            f = old[pc]
            a = r[pc]
            g = gcd(a, f)
            new = _primitive(_combine(old, f // g, r, a // g))
            for k in old:
                if k not in new and k != q:
                    s = colrows.get(k)
                    if s is not None:
                        s.discard(q)
            for k in new:
                if k != q and k not in old:
                    colrows.setdefault(k, set()).add(q)
            pivots[q] = new
        colrows.pop(pc, None)
        pivots[pc] = r
        for k in r:
            if k != pc:
                colrows.setdefault(k, set()).add(pc)
    return pivots
