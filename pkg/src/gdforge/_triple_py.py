"""Trilinear identity evaluator over materialized product tables (pure Python).

All product tables are stacked into one CSR structure: table ``t`` starts at
row ``row_base[t]``. A term is ``(factor, mask, t_in, t_out, right, pa, pb, pc)``:
with ``(a, b, c)`` the triple entries at positions ``pa, pb, pc``, it
contributes ``factor * (a op_in b) op_out c`` (``right == 0``) or
``factor * a op_out (b op_in c)`` (``right == 1``). ``mask`` bits 1, 2, 4 select
the Koszul exponents p0*p1, p0*p2, p1*p2 of the triple parities.

Inner tables are indexed by ``a*s + b``; left outer tables by ``r*s + c``;
right outer tables by ``a*n_r + r``.
"""

__all__ = ["failing"]


def failing(ptr, idx, val, row_base, terms, triples, parity, s, n_r, n_out):
    """Indices of triples whose accumulated residual is nonzero."""
    out = []
    n = len(triples) // 3
    for t in range(n):
        tri = (triples[3 * t], triples[3 * t + 1], triples[3 * t + 2])
        p0, p1, p2 = parity[tri[0]], parity[tri[1]], parity[tri[2]]
        acc = {}
        for factor, mask, t_in, t_out, right, pa, pb, pc in terms:
            e = 0
            if mask & 1:
                e ^= p0 & p1
            if mask & 2:
                e ^= p0 & p2
            if mask & 4:
                e ^= p1 & p2
            f = -factor if e else factor
            a, b, c = tri[pa], tri[pb], tri[pc]
            base_out = row_base[t_out]
            if right:
                row = row_base[t_in] + b * s + c
            else:
                row = row_base[t_in] + a * s + b
            for q in range(ptr[row], ptr[row + 1]):
                r = idx[q]
                c1 = f * val[q]
                orow = base_out + (a * n_r + r if right else r * s + c)
                for q2 in range(ptr[orow], ptr[orow + 1]):
                    o = idx[q2]
                    acc[o] = acc.get(o, 0) + c1 * val[q2]
        for v in acc.values():
            if v:
                out.append(t)
                break
    return out
