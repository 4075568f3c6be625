"""Dense and sparse exact elimination on raw field values.

Matrices are lists of row lists.  Pivoting always takes the first nonzero
entry in column order so that transforms are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .field import FieldSpec, Raw


def identity(spec: FieldSpec, n: int) -> list[list[Raw]]:
    return [[spec.one if i == j else spec.zero for j in range(n)] for i in range(n)]


def zeros(spec: FieldSpec, rows: int, cols: int) -> list[list[Raw]]:
    return [[spec.zero] * cols for _ in range(rows)]


def transpose(m: list[list[Raw]]) -> list[list[Raw]]:
    return [list(col) for col in zip(*m)]


def matmul(spec: FieldSpec, a: list[list[Raw]], b: list[list[Raw]]) -> list[list[Raw]]:
    bt = transpose(b)
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out_row = []
        for col in bt:
            s = spec.zero
            for k, x in nz:
                if col[k]:
                    s = s + x * col[k]
            out_row.append(s % spec.p if spec.p else s)
        out.append(out_row)
    return out


def rref(spec: FieldSpec, m: list[list[Raw]]):
    """Gauss-Jordan elimination with the accumulated row transform.

    Returns ``(echelon, transform, pivots)`` with ``transform @ m == echelon``,
    ``echelon`` in reduced row echelon form and ``transform`` invertible.
    """
    n = len(m)
    cols = len(m[0]) if n else 0
    e = [list(row) for row in m]
    t = identity(spec, n)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == n:
            break
        src = next((i for i in range(r, n) if e[i][c]), None)
        if src is None:
            continue
        if src != r:
            e[r], e[src] = e[src], e[r]
            t[r], t[src] = t[src], t[r]
        inv = spec.inv(e[r][c])
        e[r] = [spec.mul(x, inv) for x in e[r]]
        t[r] = [spec.mul(x, inv) for x in t[r]]
        for i in range(n):
            f = e[i][c]
            if i != r and f:
                e[i] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(e[i], e[r])]
                t[i] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
    return e, t, pivots


def inverse(spec: FieldSpec, m: list[list[Raw]]) -> list[list[Raw]] | None:
    """Inverse of a square matrix, or ``None`` when singular."""
    _, t, pivots = rref(spec, m)
    return t if len(pivots) == len(m) else None


def _rank_mod_p(p: int, rows: list[dict[int, int]]) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = pow(row[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in row.items()}
                break
            f = row[c]
            for k, v in piv.items():
                x = (row.get(k, 0) - f * v) % p
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    return len(pivots)


def _rank_bareiss(rows: list[list[int]]) -> int:
    """Fraction-free elimination; every intermediate stays an exact integer."""
    m = [list(r) for r in rows]
    n = len(m)
    cols = len(m[0]) if n else 0
    prev = 1
    r = 0
    for c in range(cols):
        src = next((i for i in range(r, n) if m[i][c]), None)
        if src is None:
            continue
        m[r], m[src] = m[src], m[r]
        piv = m[r][c]
        for i in range(r + 1, n):
            f = m[i][c]
            m[i] = [(piv * x - f * y) // prev for x, y in zip(m[i], m[r])]
        prev = piv
        r += 1
        if r == n:
            break
    return r


def sparse_rank(spec: FieldSpec, rows: list[dict[int, Raw]]) -> int:
    """Rank of a matrix given as sparse rows ``{col: value}``."""
    rows = [r for r in rows if any(r.values())]
    if not rows:
        return 0
    if spec.p:
        return _rank_mod_p(spec.p, rows)
    used = sorted({c for r in rows for c, v in r.items() if v})
    where = {c: k for k, c in enumerate(used)}
    dense = []
    for r in rows:
        den = lcm(*(Fraction(v).denominator for v in r.values()))
        line = [0] * len(used)
        for c, v in r.items():
            if v:
                line[where[c]] = int(v * den)
        dense.append(line)
    if len(dense) > len(used):
        dense = transpose(dense)
    return _rank_bareiss(dense)


def rank(spec: FieldSpec, m: list[list[Raw]]) -> int:
    return sparse_rank(spec, [{c: v for c, v in enumerate(row) if v} for row in m])
