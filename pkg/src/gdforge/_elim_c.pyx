# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_elim_py``: same algorithm, same results."""

from math import gcd


cdef dict _primitive(dict row):
    cdef object g = 0
    cdef object v
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if row[min(row)] < 0:
        g = -g
    if g != 1:
        return {k: v // g for k, v in row.items()}
    return row


cdef dict _combine(dict r, object f, dict p, object a):
    cdef dict out
    cdef object k, v, nv
    if a != 1:
        out = {k: a * v for k, v in r.items()}
    else:
        out = dict(r)
    for k, v in p.items():
        nv = out.get(k, 0) - f * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def rref(rows):
    cdef dict pivots = {}
    cdef dict colrows = {}
    cdef dict r, p, old, new
    cdef object c, a, f, g, q, k, pc
    cdef list hits
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
