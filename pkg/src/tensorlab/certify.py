"""Certified restrictions from tensors onto ``unit_ij`` matrix formats.

The recursion in :func:`subrank_product_certify` follows the induction on the
tensor order: the flattening along ``I`` is cut into blocks indexed by the
middle legs, one branch recurses on the slice of the block with the most new
column rank, the other flushes the last leg and recurses on its first slice.
Every certificate is an explicit :class:`~tensorlab.tensor.Restriction` and is
re-verified before it is returned.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from itertools import product
from math import prod
from typing import Sequence

from . import linalg
from .catalog import unit_ij, unit_ij_format
from .errors import (
    BadLegSetError,
    BudgetExceededError,
    FieldTooSmallError,
    RetriesExhaustedError,
    ShapeMismatchError,
    UnsupportedFieldError,
)
from .field import FieldSpec, Raw, field_cardinality, sample_raw
from .rank import _leg_set, _projective_vectors, flattening_rank
from .tensor import (
    LegMap,
    Restriction,
    Tensor,
    apply_leg,
    apply_restriction,
    permute_legs,
    slice_tensor,
)

FLUSH_RETRIES = 64
DEFAULT_BRUTE_BUDGET = 2**24
_SWEEP_CAP = 1 << 14
_EXHAUSTIVE_CAP = 1 << 16


def child_seed(seed: int, label: str) -> int:
    """Seed of a sub-computation; a fixed function of the parent seed and label."""
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# -- flushing ---------------------------------------------------------------------


@dataclass(frozen=True)
class FlushResult:
    U: LegMap
    block_ranks: tuple[int, ...]
    attempts: int


def _check_blocks(blocks: Sequence[LegMap]) -> FieldSpec:
    if not blocks:
        raise ShapeMismatchError("need at least one block")
    spec = blocks[0].spec
    shape = (blocks[0].rows, blocks[0].cols)
    for m in blocks:
        if (m.rows, m.cols) != shape or m.spec != spec:
            raise ShapeMismatchError("blocks must share shape and field")
    return spec


def _columns(m: list[list[Raw]]) -> list[dict[int, Raw]]:
    return [{r: x for r, x in enumerate(col) if x} for col in zip(*m)]


def block_ranks(blocks: Sequence[LegMap]) -> list[int]:
    """``r_i = rank[M_1..M_i] - rank[M_1..M_{i-1}]`` for horizontally stacked blocks."""
    spec = _check_blocks(blocks)
    cols: list[dict[int, Raw]] = []
    out, prev = [], 0
    for m in blocks:
        cols.extend(_columns(m.as_lists()))
        now = linalg.sparse_rank(spec, cols)
        out.append(now - prev)
        prev = now
    return out


def _is_flushed(spec: FieldSpec, mats, u, ranks, total: int) -> bool:
    selected = []
    for m, r in zip(mats, ranks):
        if r:
            mu = linalg.matmul(spec, m, [row[:r] for row in u])
            selected.extend(_columns(mu))
    return linalg.sparse_rank(spec, selected) == total


def _candidates(spec: FieldSpec, b: int, rng: random.Random, total: int):
    yield linalg.identity(spec, b)
    for _ in range(FLUSH_RETRIES - 1):
        yield [[sample_raw(spec, rng) for _ in range(b)] for _ in range(b)]
    p = spec.p
    if not p or p > 4 * max(total, 1):
        return
    # Vandermonde sweep over ordered node tuples.
    if p >= b:
        count = 0
        for nodes in product(range(p), repeat=b):
            if len(set(nodes)) < b:
                continue
            yield [[pow(t, e, p) for t in nodes] for e in range(b)]
            count += 1
            if count >= _SWEEP_CAP:
                break
    if p ** (b * b) <= _EXHAUSTIVE_CAP:
        for flat in product(range(p), repeat=b * b):
            yield [list(flat[r * b:(r + 1) * b]) for r in range(b)]


def flush(blocks: Sequence[LegMap], rng: random.Random, check_field: bool = True) -> FlushResult:
    """Find an invertible ``U`` moving each block's new columns to its front.

    After the change of basis the first ``r_i`` columns of every ``M_i U``
    together span the column space of the whole concatenation.  Candidates
    are the identity, then random matrices, then for small prime fields a
    Vandermonde sweep and (for tiny ``b``) exhaustive enumeration.
    """
    spec = _check_blocks(blocks)
    ranks = block_ranks(blocks)
    total = sum(ranks)
    if check_field and field_cardinality(spec) <= total:
        raise FieldTooSmallError(
            f"flushing needs |F| > {total}, field {spec} has {field_cardinality(spec)} elements"
        )
    mats = [m.as_lists() for m in blocks]
    b = blocks[0].cols
    attempts = 0
    for u in _candidates(spec, b, rng, total):
        attempts += 1
        if linalg.rank(spec, u) != b:
            continue
        if _is_flushed(spec, mats, u, ranks, total):
            return FlushResult(LegMap(spec, u), tuple(ranks), attempts)
    raise RetriesExhaustedError(f"no flushing matrix found after {attempts} attempts")


def verify_flush(blocks: Sequence[LegMap], result: FlushResult) -> bool:
    spec = _check_blocks(blocks)
    u = result.U.as_lists()
    ranks = block_ranks(blocks)
    if list(result.block_ranks) != ranks or linalg.rank(spec, u) != len(u):
        return False
    return _is_flushed(spec, [m.as_lists() for m in blocks], u, ranks, sum(ranks))


# -- certificates ------------------------------------------------------------------


@dataclass(frozen=True)
class SubrankCertificate:
    """A restriction mapping a tensor onto ``unit_ij(r)`` in concise format."""

    i: int
    j: int
    r: int
    restriction: Restriction


def verify_cert(t: Tensor, cert: SubrankCertificate) -> bool:
    """True iff the restriction maps ``t`` exactly onto ``unit_ij(r, k, i, j)``."""
    legs = cert.restriction.legs
    if len(legs) != t.order or any(m.cols != d for m, d in zip(legs, t.dims)):
        raise ShapeMismatchError("certificate does not fit the tensor")
    if cert.r < 0:
        return False
    k = t.order
    target_dims = unit_ij_format(cert.r, k, cert.i, cert.j)
    if [m.rows for m in legs] != target_dims:
        return False
    return apply_restriction(cert.restriction, t) == unit_ij(
        cert.r, k, cert.i, cert.j, t.spec, dims=target_dims
    )


def matrix_subrank_cert(m: Tensor) -> SubrankCertificate:
    """Row/column transforms taking a matrix to ``I_r`` (pair ``(1, 2)``)."""
    if m.order != 2:
        raise ShapeMismatchError("matrix_subrank_cert needs an order-2 tensor")
    spec = m.spec
    d1, d2 = m.dims
    mat = [[m.data.get((a, b), spec.zero) for b in range(d2)] for a in range(d1)]
    _, transform, pivots = linalg.rref(spec, mat)
    r = len(pivots)
    if r == 0:
        legs = [LegMap(spec, [[0] * d1]), LegMap(spec, [[0] * d2])]
    else:
        cols = [[spec.one if c == p else spec.zero for c in range(d2)] for p in pivots]
        legs = [LegMap(spec, transform[:r]), LegMap(spec, cols)]
    return SubrankCertificate(1, 2, r, Restriction(legs))


def _relabel(cert: SubrankCertificate, i: int, j: int) -> SubrankCertificate:
    return replace(cert, i=i, j=j)


def _lift_slice(cert: SubrankCertificate, t: Tensor, legs: Sequence[int], idx: Sequence[int]):
    """Lift a certificate of ``slice_tensor(t, legs, idx)`` to ``t``."""
    fixed = dict(zip(legs, idx))
    kept = [q for q in range(1, t.order + 1) if q not in fixed]
    out, pos = [], 0
    for q in range(1, t.order + 1):
        if q in fixed:
            out.append(LegMap.unit_row(t.spec, t.dims[q - 1], fixed[q]))
        else:
            out.append(cert.restriction.legs[pos])
            pos += 1
    return SubrankCertificate(kept[cert.i - 1], kept[cert.j - 1], cert.r, Restriction(out))


def _unpermute(cert: SubrankCertificate, sigma: Sequence[int]) -> SubrankCertificate:
    """Map a certificate of ``permute_legs(t, sigma)`` back to ``t``."""
    legs = [None] * len(sigma)
    for pos, q in enumerate(sigma):
        legs[q - 1] = cert.restriction.legs[pos]
    return SubrankCertificate(sigma[cert.i - 1], sigma[cert.j - 1], cert.r, Restriction(legs))


def _middle_blocks(s: Tensor, m: int):
    """Blocks ``M_i`` of the ``{1..m}``-flattening, indexed by legs ``m+1..k-1``."""
    k = s.order
    spec = s.spec
    head = s.dims[:m]
    rows = prod(head)
    mids = list(product(*(range(d) for d in s.dims[m:k - 1])))
    where = {mid: n for n, mid in enumerate(mids)}
    mats = [[[spec.zero] * s.dims[-1] for _ in range(rows)] for _ in mids]
    for key, v in s.data.items():
        row = 0
        for a, d in zip(key[:m], head):
            row = row * d + a
        mats[where[key[m:k - 1]]][row][key[-1]] = v
    return mids, [LegMap(spec, mt) for mt in mats]


def _certify(t: Tensor, legs: tuple[int, ...], seed: int, strict: bool) -> dict:
    """Certificates keyed ``(i, j)`` for ``i in legs``, ``j`` outside ``legs``."""
    k = t.order
    others = tuple(q for q in range(1, k + 1) if q not in legs)
    if k == 2:
        cert = matrix_subrank_cert(t)
        return {(legs[0], others[0]): _relabel(cert, legs[0], others[0])}
    if len(legs) > k // 2:
        flipped = _certify(t, others, seed, strict)
        return {(i, j): _relabel(c, i, j) for (j, i), c in flipped.items()}
    sigma = list(legs) + list(others)
    if sigma != list(range(1, k + 1)):
        s = permute_legs(t, sigma)
        inner = _certify(s, tuple(range(1, len(legs) + 1)), seed, strict)
        return {(sigma[i - 1], sigma[j - 1]): _unpermute(c, sigma) for (i, j), c in inner.items()}

    m = len(legs)
    spec = t.spec
    mids, blocks = _middle_blocks(t, m)
    ranks = block_ranks(blocks)
    middle = list(range(m + 1, k))
    certs = {}

    # Branch 1: slice on the middle legs at the block with the largest r_i.
    best = max(range(len(mids)), key=lambda n: (ranks[n], -n))
    idx = [a + 1 for a in mids[best]]
    sub = slice_tensor(t, middle, idx)
    for (i, j), c in _certify(sub, legs, child_seed(seed, "1"), strict).items():
        lifted = _lift_slice(c, t, middle, idx)
        certs[(lifted.i, lifted.j)] = lifted

    # Branch 2: flush the last leg, then take its first slice.
    rng = random.Random(child_seed(seed, "flush"))
    try:
        u = flush(blocks, rng, check_field=strict).U
        first = [row[0] for row in u.data]
    except (FieldTooSmallError, RetriesExhaustedError):
        if strict:
            raise
        first = [spec.one] + [spec.zero] * (t.dims[-1] - 1)
    functional = LegMap(spec, [first])
    contracted = apply_leg(t, k, functional)
    sub = slice_tensor(contracted, [k], [1])
    for (i, j), c in _certify(sub, legs, child_seed(seed, "2"), strict).items():
        lifted = _lift_slice(c, contracted, [k], [1])
        legs_out = list(lifted.restriction.legs)
        legs_out[k - 1] = legs_out[k - 1] @ functional
        certs[(i, j)] = replace(lifted, restriction=Restriction(legs_out))
    return certs


@dataclass(frozen=True)
class CertBundle:
    I: tuple[int, ...]
    certs: dict = field(hash=False)
    certified_product: int
    flattening: int
    guaranteed: bool
    seed: int


def subrank_product_certify(t: Tensor, legs: Sequence[int], seed: int = 0, strict: bool = False) -> CertBundle:
    """Certificates whose ranks multiply to at least ``R_I(t)``.

    The product bound is only guaranteed when the field has more than
    ``R_I(t)`` elements.  Smaller fields raise :class:`FieldTooSmallError`
    under ``strict``; otherwise the bundle is computed best effort and
    marked ``guaranteed=False``.
    """
    legs = _leg_set(legs, t.order) if t.order > 1 else None
    if legs is None:
        raise BadLegSetError("certification needs order at least 2")
    r_i = flattening_rank(t, legs)
    guaranteed = field_cardinality(t.spec) > r_i
    if strict and not guaranteed:
        raise FieldTooSmallError(f"need |F| > R_I = {r_i}, field is {t.spec}")
    certs = _certify(t, legs, seed, guaranteed)
    for c in certs.values():
        if not verify_cert(t, c):
            raise AssertionError(f"emitted certificate for {(c.i, c.j)} does not verify")
    total = prod(c.r for c in certs.values())
    if guaranteed and total < r_i:
        raise AssertionError(f"certified product {total} below R_I = {r_i}")
    return CertBundle(tuple(legs), dict(sorted(certs.items())), total, r_i, guaranteed, seed)


# -- single pairs --------------------------------------------------------------------


def contract_to_pair(t: Tensor, i: int, j: int, functionals: dict[int, Sequence[Raw]]):
    """Contract every leg but ``i, j`` with a functional; return matrix and restriction."""
    spec = t.spec
    legs = []
    for q in range(1, t.order + 1):
        if q in (i, j):
            legs.append(LegMap.identity(spec, t.dims[q - 1]))
        else:
            legs.append(LegMap(spec, [list(functionals[q])]))
    r = Restriction(legs)
    out = apply_restriction(r, t)
    pi, pj = i - 1, j - 1
    mat = [[spec.zero] * t.dims[pj] for _ in range(t.dims[pi])]
    for key, v in out.data.items():
        mat[key[pi]][key[pj]] = v
    return mat, r


def _pair_cert(t: Tensor, i: int, j: int, functionals) -> SubrankCertificate:
    mat, contraction = contract_to_pair(t, i, j, functionals)
    spec = t.spec
    dims = (len(mat), len(mat[0]))
    m2 = Tensor(spec, dims, {(a, b): v for a, row in enumerate(mat) for b, v in enumerate(row) if v})
    base = matrix_subrank_cert(m2)
    legs = list(contraction.legs)
    legs[i - 1] = base.restriction.legs[0] @ legs[i - 1]
    legs[j - 1] = base.restriction.legs[1] @ legs[j - 1]
    return SubrankCertificate(i, j, base.r, Restriction(legs))


def subrank_ij_lower(
    t: Tensor, i: int, j: int, seed: int = 0, strict: bool = True, random_slices: int = 8
) -> SubrankCertificate:
    """Best verified certificate for the pair ``(i, j)``.

    Candidates come from the product certificates for ``{i}`` and ``{j}`` and
    from contracting the other legs with basis vectors and random functionals.
    """
    k = t.order
    if i == j or not (1 <= i <= k and 1 <= j <= k):
        raise BadLegSetError(f"need distinct legs in 1..{k}, got {i}, {j}")
    spec = t.spec
    candidates = []
    for n, leg in enumerate((i, j)):
        bundle = subrank_product_certify(t, [leg], child_seed(seed, f"pair{n}"), strict=strict and n == 0)
        c = bundle.certs[(leg, j if leg == i else i)]
        candidates.append(_relabel(c, i, j))
    rest = [q for q in range(1, k + 1) if q not in (i, j)]
    basis = product(*(range(t.dims[q - 1]) for q in rest))
    for n, idx in enumerate(basis):
        if n >= 4096:
            break
        fn = {q: [spec.one if a == x else spec.zero for a in range(t.dims[q - 1])] for q, x in zip(rest, idx)}
        candidates.append(_pair_cert(t, i, j, fn))
    rng = random.Random(child_seed(seed, "slices"))
    for _ in range(random_slices if rest else 0):
        fn = {q: [sample_raw(spec, rng) for _ in range(t.dims[q - 1])] for q in rest}
        candidates.append(_pair_cert(t, i, j, fn))
    best = None
    for c in candidates:
        if verify_cert(t, c) and (best is None or c.r > best.r):
            best = c
    return best


def subrank_ij_brute(t: Tensor, i: int, j: int, budget: int = DEFAULT_BRUTE_BUDGET) -> int:
    """Exact ``Q_{i,j}`` over a prime field.

    A restriction onto ``unit_ij(r)`` sends every leg other than ``i, j`` to a
    line, so it factors through a contraction with functionals followed by a
    matrix restriction; ``Q_{i,j}`` is therefore the largest matrix rank over
    all (projectively distinct) choices of those functionals.
    """
    spec = t.spec
    if not spec.p:
        raise UnsupportedFieldError("brute-force subrank needs a prime field")
    k = t.order
    if i == j or not (1 <= i <= k and 1 <= j <= k):
        raise BadLegSetError(f"need distinct legs in 1..{k}, got {i}, {j}")
    if t.is_zero():
        return 0
    rest = [q for q in range(1, k + 1) if q not in (i, j)]
    p = spec.p
    space = prod((p ** t.dims[q - 1] - 1) // (p - 1) for q in rest)
    if space > budget:
        raise BudgetExceededError(f"{space} functional choices exceed budget {budget}")
    cap = min(t.dims[i - 1], t.dims[j - 1])
    best = 0
    for combo in product(*(_projective_vectors(p, t.dims[q - 1]) for q in rest)):
        mat, _ = contract_to_pair(t, i, j, dict(zip(rest, combo)))
        best = max(best, linalg.rank(spec, mat))
        if best == cap:
            break
    return best
