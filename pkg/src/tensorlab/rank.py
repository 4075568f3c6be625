"""Matrix rank, flattening ranks, conciseness and tensor-rank bounds."""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations, product
from math import comb, prod
from typing import Sequence

from . import linalg
from .errors import (
    BadLegSetError,
    BudgetExceededError,
    ShapeMismatchError,
    UnsupportedFieldError,
    ZeroTensorError,
)
from .field import FieldSpec, Raw
from .tensor import LegMap, Restriction, Tensor, apply_restriction, permute_legs

DEFAULT_SEARCH_BUDGET = 2**26


def search_budget() -> int:
    return int(os.environ.get("TENSORLAB_BUDGET_SEARCH", DEFAULT_SEARCH_BUDGET))


# -- matrices ----------------------------------------------------------------


@dataclass(frozen=True)
class EchelonResult:
    rank: int
    echelon: LegMap
    row_transform: LegMap
    pivot_columns: tuple[int, ...]


def matrix_rank(m: LegMap) -> int:
    return linalg.rank(m.spec, m.as_lists())


def echelon(m: LegMap) -> EchelonResult:
    """Reduced row echelon form with ``row_transform @ m == echelon``."""
    e, t, pivots = linalg.rref(m.spec, m.as_lists())
    return EchelonResult(len(pivots), LegMap(m.spec, e), LegMap(m.spec, t), tuple(pivots))


# -- flattenings ---------------------------------------------------------------


def _leg_set(legs, k: int) -> tuple[int, ...]:
    raw = list(legs)
    legs = tuple(sorted(set(raw)))
    if len(legs) != len(raw):
        raise BadLegSetError(f"repeated leg in {raw}")
    if not legs or len(legs) >= k or legs[0] < 1 or legs[-1] > k:
        raise BadLegSetError(f"{list(legs)} is not a nonempty proper subset of 1..{k}")
    return legs


def _strides(dims: Sequence[int]) -> list[int]:
    out, acc = [], 1
    for d in reversed(dims):
        out.append(acc)
        acc *= d
    return out[::-1]


def flattening_rows(t: Tensor, legs: Sequence[int]) -> list[dict[int, Raw]]:
    """Sparse rows of the flattening grouping ``legs`` (rows) against the rest."""
    legs = _leg_set(legs, t.order)
    rows_p = [l - 1 for l in legs]
    cols_p = [p for p in range(t.order) if p + 1 not in legs]
    rs = _strides([t.dims[p] for p in rows_p])
    cs = _strides([t.dims[p] for p in cols_p])
    n_rows = 1
    for p in rows_p:
        n_rows *= t.dims[p]
    rows: list[dict[int, Raw]] = [dict() for _ in range(n_rows)]
    for key, v in t.data.items():
        r = sum(key[p] * s for p, s in zip(rows_p, rs))
        c = sum(key[p] * s for p, s in zip(cols_p, cs))
        rows[r][c] = v
    return rows


def flattening_matrix(t: Tensor, legs: Sequence[int]) -> list[list[Raw]]:
    rows = flattening_rows(t, legs)
    n_cols = 1
    for p in range(t.order):
        if p + 1 not in legs:
            n_cols *= t.dims[p]
    spec = t.spec
    return [[row.get(c, spec.zero) for c in range(n_cols)] for row in rows]


def flattening_rank(t: Tensor, legs: Sequence[int]) -> int:
    """``R_I(T)``: rank of the matrix grouping ``legs`` against the other legs."""
    return linalg.sparse_rank(t.spec, flattening_rows(t, legs))


def proper_leg_subsets(k: int) -> list[tuple[int, ...]]:
    return [s for m in range(1, k) for s in combinations(range(1, k + 1), m)]


def single_leg_ranks(t: Tensor) -> list[int]:
    if t.order == 1:
        return [0 if t.is_zero() else 1]
    return [flattening_rank(t, [i]) for i in range(1, t.order + 1)]


def is_concise(t: Tensor) -> bool:
    return single_leg_ranks(t) == list(t.dims)


# -- conciseness ---------------------------------------------------------------


@dataclass(frozen=True)
class ConciseResult:
    concise: Tensor
    forward: Restriction
    backward: Restriction


def _leg_matrix(t: Tensor, leg: int) -> list[list[Raw]]:
    if t.order == 1:
        return [[t.data.get((a,), t.spec.zero)] for a in range(t.dims[0])]
    return flattening_matrix(t, [leg])


def _leg_basis(t: Tensor, leg: int) -> tuple[LegMap, LegMap]:
    """Selection onto independent rows of the leg flattening, and its lift back."""
    spec = t.spec
    rows = _leg_matrix(t, leg)
    _, _, basis = linalg.rref(spec, linalg.transpose(rows))
    # Row a of the flattening equals (row a at the pivots) @ q @ chosen rows.
    _, q, piv = linalg.rref(spec, [rows[b] for b in basis])
    select = [[spec.one if c == b else spec.zero for c in range(len(rows))] for b in basis]
    lift = linalg.matmul(spec, [[row[c] for c in piv] for row in rows], q)
    return LegMap(spec, select), LegMap(spec, lift)


def make_concise(t: Tensor) -> ConciseResult:
    """Restrict every leg to a basis of the rows of its flattening."""
    if t.is_zero():
        raise ZeroTensorError("the zero tensor has no concise form")
    fwd, bwd = zip(*(_leg_basis(t, leg) for leg in range(1, t.order + 1)))
    forward, backward = Restriction(fwd), Restriction(bwd)
    return ConciseResult(apply_restriction(forward, t), forward, backward)


# -- decompositions --------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """A sum of simple tensors; each term holds one raw vector per leg."""

    spec: FieldSpec
    terms: tuple[tuple[tuple[Raw, ...], ...], ...]

    @classmethod
    def build(cls, spec: FieldSpec, terms) -> Decomposition:
        return cls(spec, tuple(tuple(tuple(spec.coerce(x) for x in v) for v in term) for term in terms))

    def __len__(self):
        return len(self.terms)

    def evaluate(self, dims: Sequence[int]) -> Tensor:
        spec = self.spec
        data: dict = {}
        for term in self.terms:
            if len(term) != len(dims) or any(len(v) != d for v, d in zip(term, dims)):
                raise ShapeMismatchError(f"term shape does not match dims {list(dims)}")
            supports = [[(a, x) for a, x in enumerate(v) if x] for v in term]
            for combo in product(*supports):
                key = tuple(a for a, _ in combo)
                val = spec.one
                for _, x in combo:
                    val = spec.mul(val, x)
                data[key] = spec.add(data.get(key, spec.zero), val)
        return Tensor(spec, dims, data)


def verify_decomposition(t: Tensor, d: Decomposition) -> bool:
    """True iff the terms of ``d`` sum to ``t`` exactly."""
    if d.spec != t.spec:
        raise ShapeMismatchError(f"decomposition over {d.spec}, tensor over {t.spec}")
    return d.evaluate(t.dims) == t


def kron_decomposition(a: Decomposition, b: Decomposition) -> Decomposition:
    spec = a.spec
    terms = []
    for s in a.terms:
        for t in b.terms:
            terms.append(tuple(
                tuple(spec.mul(x, y) for x in u for y in v) for u, v in zip(s, t)
            ))
    return Decomposition(spec, tuple(terms))


def power_decomposition(d: Decomposition, n: int) -> Decomposition:
    out = d
    for _ in range(n - 1):
        out = kron_decomposition(out, d)
    return out


def _vec(n: int, coeffs: dict[int, int]) -> list[int]:
    return [coeffs.get(i, 0) for i in range(n)]


def strassen_catalog(spec: FieldSpec) -> Decomposition:
    """Strassen's seven products for ``matmul(2, 2, 2)``.

    Leg 1 holds ``A_ij`` at ``e_ij``, leg 2 holds ``B_jk`` at ``e_jk`` and leg 3
    holds the coefficient of ``C_ik`` at ``e_ki``.
    """
    def a(i, j):
        return (i - 1) * 2 + (j - 1)

    def c(i, k):
        return (k - 1) * 2 + (i - 1)

    products = [
        ({a(1, 1): 1, a(2, 2): 1}, {a(1, 1): 1, a(2, 2): 1}, {c(1, 1): 1, c(2, 2): 1}),
        ({a(2, 1): 1, a(2, 2): 1}, {a(1, 1): 1}, {c(2, 1): 1, c(2, 2): -1}),
        ({a(1, 1): 1}, {a(1, 2): 1, a(2, 2): -1}, {c(1, 2): 1, c(2, 2): 1}),
        ({a(2, 2): 1}, {a(2, 1): 1, a(1, 1): -1}, {c(1, 1): 1, c(2, 1): 1}),
        ({a(1, 1): 1, a(1, 2): 1}, {a(2, 2): 1}, {c(1, 1): -1, c(1, 2): 1}),
        ({a(2, 1): 1, a(1, 1): -1}, {a(1, 1): 1, a(1, 2): 1}, {c(2, 2): 1}),
        ({a(1, 2): 1, a(2, 2): -1}, {a(2, 1): 1, a(2, 2): 1}, {c(1, 1): 1}),
    ]
    return Decomposition.build(spec, [tuple(_vec(4, v) for v in term) for term in products])


def slice_decomposition(t: Tensor) -> Decomposition:
    """A verified decomposition built from matrix slices on the best leg pair.

    For legs ``i, j`` every slice fixing the other legs is split into
    ``rank`` simple terms; the pair with the fewest terms wins.
    """
    spec = t.spec
    k = t.order
    if t.is_zero():
        return Decomposition(spec, ())
    if k == 1:
        return Decomposition(spec, ((tuple(t[(a + 1,)].value for a in range(t.dims[0])),),))
    best = None
    for i, j in combinations(range(k), 2):
        groups: dict = {}
        for key, v in t.data.items():
            rest = tuple(key[p] for p in range(k) if p not in (i, j))
            groups.setdefault(rest, {})[(key[i], key[j])] = v
        terms = []
        for rest, entries in sorted(groups.items()):
            m = [[entries.get((a, b), spec.zero) for b in range(t.dims[j])] for a in range(t.dims[i])]
            e, _, piv = linalg.rref(spec, m)
            for x, col in enumerate(piv):
                u = tuple(m[a][col] for a in range(t.dims[i]))
                w = tuple(e[x])
                term, pos = [], 0
                for p in range(k):
                    if p == i:
                        term.append(u)
                    elif p == j:
                        term.append(w)
                    else:
                        term.append(tuple(spec.one if a == rest[pos] else spec.zero for a in range(t.dims[p])))
                        pos += 1
                terms.append(tuple(term))
        if best is None or len(terms) < len(best):
            best = terms
    return Decomposition(spec, tuple(best))


# -- brute force -----------------------------------------------------------------


def _projective_vectors(p: int, d: int) -> list[tuple[int, ...]]:
    """Nonzero vectors of F_p^d whose first nonzero coordinate is 1."""
    out = []
    for lead in range(d):
        for tail in product(range(p), repeat=d - lead - 1):
            out.append((0,) * lead + (1,) + tail)
    return out


class _Span:
    """Fully reduced echelon basis over F_p for incremental span tests."""

    def __init__(self, p: int):
        self.p = p
        self.basis: dict[int, list[int]] = {}

    def reduce(self, v: Sequence[int]) -> list[int]:
        p = self.p
        v = list(v)
        for c, b in self.basis.items():
            f = v[c]
            if f:
                v = [(x - f * y) % p for x, y in zip(v, b)]
        return v

    def extended(self, v: Sequence[int]) -> _Span | None:
        """A new span including ``v``, or ``None`` if ``v`` is already inside."""
        v = self.reduce(v)
        c = next((i for i, x in enumerate(v) if x), None)
        if c is None:
            return None
        p = self.p
        inv = pow(v[c], -1, p)
        v = [x * inv % p for x in v]
        out = _Span(p)
        for c2, b in self.basis.items():
            f = b[c]
            out.basis[c2] = [(x - f * y) % p for x, y in zip(b, v)] if f else b
        out.basis[c] = v
        return out


def _residual_rank(p: int, span: _Span, targets: list[list[int]]) -> int:
    return linalg._rank_mod_p(p, [dict(enumerate(span.reduce(t))) for t in targets])


def _search(r: int, atoms, targets, p: int, counter: list[int], budget: int):
    """DFS over increasing atom indices; returns chosen atom indices or None."""
    chosen: list[int] = []

    def dfs(start: int, span: _Span) -> bool:
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceededError(f"brute-force rank search exceeded {budget} evaluations")
        residual = _residual_rank(p, span, targets)
        if residual == 0:
            return True
        left = r - len(chosen)
        if residual > left:
            return False
        for a in range(start, len(atoms) - left + 1):
            nxt = span.extended(atoms[a])
            if nxt is None:
                continue
            chosen.append(a)
            if dfs(a + 1, nxt):
                return True
            chosen.pop()
        return False

    return list(chosen) if dfs(0, _Span(p)) else None


def search_decomposition(t: Tensor, r_max: int, budget: int | None = None) -> Decomposition | None:
    """Exhaustive search for a minimal decomposition with at most ``r_max`` terms.

    Vectors on every leg but the largest one are enumerated projectively; the
    vectors on the remaining leg are then solved for linearly.
    """
    spec = t.spec
    if not spec.p:
        raise UnsupportedFieldError("brute-force rank needs a prime field")
    budget = search_budget() if budget is None else budget
    if t.is_zero():
        return Decomposition(spec, ())
    k = t.order
    if k == 1:
        return slice_decomposition(t) if r_max >= 1 else None
    p = spec.p
    last = max(range(k), key=lambda q: (t.dims[q], q))
    sigma = [q + 1 for q in range(k) if q != last] + [last + 1]
    s = permute_legs(t, sigma)
    head = s.dims[:-1]
    mat = flattening_matrix(s, range(1, k))
    targets = [list(col) for col in linalg.transpose(mat)]
    targets = [c for c in targets if any(c)]
    lower = max(single_leg_ranks(t))
    n_atoms = prod((p**d - 1) // (p - 1) for d in head)
    if lower > r_max:
        return None
    if comb(n_atoms, lower) > budget:
        raise BudgetExceededError(
            f"{comb(n_atoms, lower)} candidate {lower}-term decompositions exceed budget {budget}"
        )
    per_leg = [_projective_vectors(p, d) for d in head]
    atoms, factors = [], []
    for combo in product(*per_leg):
        vec = [1]
        for v in combo:
            vec = [x * y % p for x in vec for y in v]
        atoms.append(vec)
        factors.append(combo)
    counter = [0]
    for r in range(lower, r_max + 1):
        if comb(n_atoms, r) > budget:
            raise BudgetExceededError(
                f"{comb(n_atoms, r)} candidate {r}-term decompositions exceed budget {budget}"
            )
        picked = _search(r, atoms, targets, p, counter, budget)
        if picked is None:
            continue
        # Solve mat = X W^T for the last-leg vectors W.
        x_cols = [atoms[a] for a in picked]
        aug = [[x_cols[c][row] for c in range(r)] + mat[row] for row in range(len(mat))]
        e, _, piv = linalg.rref(spec, aug)
        w = [[0] * s.dims[-1] for _ in range(r)]
        for x, c in enumerate(piv):
            w[c] = [e[x][r + col] for col in range(s.dims[-1])]
        inv = [0] * k
        for pos, q in enumerate(sigma):
            inv[q - 1] = pos
        terms = []
        for n, a in enumerate(picked):
            legs = list(factors[a]) + [tuple(w[n])]
            terms.append(tuple(tuple(legs[inv[q]]) for q in range(k)))
        d = Decomposition(spec, tuple(terms))
        assert verify_decomposition(t, d), "brute-force solve produced a wrong decomposition"
        return d
    return None


def tensor_rank_brute(t: Tensor, r_max: int, budget: int | None = None) -> int | None:
    """Exact tensor rank over F_p when it is at most ``r_max``, else ``None``."""
    d = search_decomposition(t, r_max, budget)
    return None if d is None else len(d)
