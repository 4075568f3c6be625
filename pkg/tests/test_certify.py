import random
from dataclasses import replace
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from tensorlab import (
    FieldSpec,
    LegMap,
    block_ranks,
    flush,
    make_tensor,
    matmul,
    matrix_subrank_cert,
    subrank_ij_brute,
    subrank_ij_lower,
    subrank_product_certify,
    unit,
    unit_ij,
    verify_cert,
    w_tensor,
)
from tensorlab import serialize as ser
from tensorlab.asymptotic import random_tensor
from tensorlab.certify import SubrankCertificate, child_seed, verify_flush
from tensorlab.errors import (
    BadLegSetError,
    BudgetExceededError,
    FieldTooSmallError,
    ShapeMismatchError,
    UnsupportedFieldError,
)
from tensorlab.rank import flattening_matrix, flattening_rank, proper_leg_subsets
from tensorlab.tensor import Restriction, Tensor

from oracles import rank_gf, rank_rational

Q = FieldSpec.rational()
F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F101 = FieldSpec.prime(101)


# -- flushing ----------------------------------------------------------------------


def test_flush_identity_first():
    blocks = [LegMap(F101, [[1, 2], [3, 4], [5, 7]])]
    res = flush(blocks, random.Random(0))
    assert res.attempts == 1 and res.U == LegMap.identity(F101, 2)
    assert res.block_ranks == (2,)


def test_flush_two_by_two_example():
    blocks = [LegMap(F101, [[0, 1], [0, 0]]), LegMap(F101, [[0, 0], [1, 0]])]
    for seed in range(20):
        res = flush(blocks, random.Random(seed))
        u = res.U.as_lists()
        assert u[0][0] != 0 and u[1][0] != 0
        assert res.block_ranks == (1, 1) and res.attempts > 1
        assert verify_flush(blocks, res)
    good = replace(res, U=LegMap(F101, [[1, 0], [1, 1]]))
    assert verify_flush(blocks, good)
    assert not verify_flush(blocks, replace(res, U=LegMap.identity(F101, 2)))


def test_flush_small_field():
    blocks = [LegMap(F2, [[1, 0], [0, 0]]), LegMap(F2, [[0, 0], [0, 1]])]
    with pytest.raises(FieldTooSmallError):
        flush(blocks, random.Random(0))
    # without the guard a flushing matrix may still exist for this instance
    res = flush(blocks, random.Random(0), check_field=False)
    assert verify_flush(blocks, res)


def test_block_ranks_examples():
    eye = LegMap.identity(Q, 2)
    assert block_ranks([eye, eye]) == [2, 0]
    assert block_ranks([LegMap(Q, [[1], [0]]), LegMap(Q, [[0], [1]])]) == [1, 1]
    flat = flattening_matrix(matmul(2, 2, 2, Q), [1])
    # columns are ordered (leg 2, leg 3) row-major, so each leg-2 index owns 4 consecutive columns
    blocks = [LegMap(Q, [row[4 * b:4 * b + 4] for row in flat]) for b in range(4)]
    ranks = block_ranks(blocks)
    assert sum(ranks) == 4 == flattening_rank(matmul(2, 2, 2, Q), [1])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_flush_random_rational(seed):
    rng = random.Random(seed)
    a, b, c = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 4)
    blocks = [LegMap(Q, [[rng.randint(-2, 2) for _ in range(b)] for _ in range(a)]) for _ in range(c)]
    res = flush(blocks, random.Random(seed))
    assert verify_flush(blocks, res)
    cat = [sum((m.as_lists()[r] for m in blocks), []) for r in range(a)]
    assert sum(res.block_ranks) == rank_rational(cat)


def test_flush_near_threshold_uses_fallback():
    # p = rank + 1: random U rarely works, the structured sweep still finds one
    f5 = FieldSpec.prime(5)
    rng = random.Random(3)
    found = 0
    for _ in range(30):
        blocks = [LegMap(f5, [[rng.randrange(5) for _ in range(4)] for _ in range(2)]) for _ in range(2)]
        res = flush(blocks, random.Random(1))
        assert verify_flush(blocks, res)
        found += 1
    assert found == 30


# -- certificates ------------------------------------------------------------------


def test_matrix_cert_examples():
    eye = make_tensor(Q, [3, 3], [((a, a), 1) for a in (1, 2, 3)])
    c = matrix_subrank_cert(eye)
    assert c.r == 3 and verify_cert(eye, c)
    assert all(m == LegMap.identity(Q, 3) for m in c.restriction.legs)
    zero = Tensor(Q, [2, 3])
    c = matrix_subrank_cert(zero)
    assert c.r == 0 and verify_cert(zero, c)
    m = make_tensor(Q, [2, 2], [((1, 1), 1), ((1, 2), 2), ((2, 1), 2), ((2, 2), 4)])
    c = matrix_subrank_cert(m)
    assert c.r == 1 and verify_cert(m, c)
    with pytest.raises(ShapeMismatchError):
        matrix_subrank_cert(w_tensor(Q))


def test_tampered_certificates_fail():
    eye = make_tensor(Q, [3, 3], [((a, a), 1) for a in (1, 2, 3)])
    c = matrix_subrank_cert(eye)
    assert not verify_cert(eye, replace(c, r=c.r + 1))
    bundle = subrank_product_certify(matmul(2, 2, 2, F101), [1], seed=2)
    for cert in bundle.certs.values():
        legs = list(cert.restriction.legs)
        rows = legs[0].as_lists()
        rows[0][0] = (rows[0][0] + 1) % 101
        bad = replace(cert, restriction=Restriction([LegMap(F101, rows)] + legs[1:]))
        assert verify_cert(matmul(2, 2, 2, F101), cert)
        assert not verify_cert(matmul(2, 2, 2, F101), bad)
    with pytest.raises(ShapeMismatchError):
        verify_cert(w_tensor(F101), cert)


def test_product_certify_examples():
    b = subrank_product_certify(w_tensor(F101), [1])
    assert set(b.certs) == {(1, 2), (1, 3)} and b.certified_product >= 2 and b.guaranteed
    assert all(verify_cert(w_tensor(F101), c) for c in b.certs.values())
    for r in (2, 3, 4):
        t = unit(r, 3, F101)
        b = subrank_product_certify(t, [1], seed=r)
        assert b.certified_product >= r and b.certs[(1, 2)].r == r
    z = Tensor(F101, [2, 2, 2])
    b = subrank_product_certify(z, [1])
    assert b.certified_product == 0 and b.flattening == 0
    assert all(c.r == 0 and verify_cert(z, c) for c in b.certs.values())


def test_product_certify_complement_and_errors():
    t = matmul(2, 2, 2, F101)
    b = subrank_product_certify(t, [2, 3])
    assert b.flattening == 4 and b.certified_product >= 4
    assert all(verify_cert(t, c) for c in b.certs.values())
    for bad in ([], [1, 2, 3], [4], [1, 1]):
        with pytest.raises(BadLegSetError):
            subrank_product_certify(t, bad)


def test_small_field_strict_and_best_effort():
    t = unit(2, 3, F2)
    with pytest.raises(FieldTooSmallError):
        subrank_product_certify(t, [1], strict=True)
    b = subrank_product_certify(t, [1])
    assert not b.guaranteed
    assert all(verify_cert(t, c) for c in b.certs.values())


def test_child_seeds_are_stable_and_distinct():
    assert child_seed(0, "1") == child_seed(0, "1")
    assert len({child_seed(s, lab) for s in range(5) for lab in ("1", "2", "flush")}) == 15


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_certificates_over_rationals(seed):
    rng = random.Random(seed)
    dims = [rng.randint(1, 3) for _ in range(rng.choice([2, 3, 4]))]
    t = random_tensor(Q, dims, rng, 5)
    for legs in proper_leg_subsets(len(dims)):
        b = subrank_product_certify(t, legs, seed=seed)
        assert b.guaranteed and b.certified_product >= flattening_rank(t, legs)
        assert all(verify_cert(t, c) for c in b.certs.values())


def test_bundle_json_round_trip_reverifies():
    t = random_tensor(F101, [3, 2, 2, 2], random.Random(4), 101)
    b = subrank_product_certify(t, [1, 2], seed=9)
    text = ser.dumps(ser.bundle_to_json(b))
    again = ser.bundle_from_json(ser.loads(text), F101)
    assert again.certified_product == b.certified_product
    assert all(verify_cert(t, c) for c in again.certs.values())
    assert ser.dumps(ser.bundle_to_json(again)) == text


def test_product_certify_deterministic():
    t = random_tensor(F101, [3, 3, 3], random.Random(1), 101)
    a = ser.dumps(ser.bundle_to_json(subrank_product_certify(t, [1], seed=5)))
    b = ser.dumps(ser.bundle_to_json(subrank_product_certify(t, [1], seed=5)))
    assert a == b


# -- single pairs --------------------------------------------------------------------


def test_subrank_ij_lower_examples():
    mm = matmul(2, 2, 2, F101)
    best = max(subrank_ij_lower(mm, 1, j).r for j in (2, 3))
    assert best >= 2
    for r in (1, 2, 3):
        t = unit_ij(r, 3, 1, 2, F101)
        c = subrank_ij_lower(t, 1, 2)
        assert c.r == r and verify_cert(t, c)
        c = subrank_ij_lower(t, 1, 3)
        assert c.r == 1 and verify_cert(t, c)
    with pytest.raises(BadLegSetError):
        subrank_ij_lower(mm, 2, 2)


def test_subrank_ij_brute_examples():
    rng = random.Random(0)
    for _ in range(30):
        rows = [[rng.randrange(3) for _ in range(3)] for _ in range(3)]
        m = make_tensor(F3, [3, 3], [((a + 1, b + 1), rows[a][b]) for a in range(3) for b in range(3)])
        assert subrank_ij_brute(m, 1, 2) == rank_gf(rows, 3)
    assert subrank_ij_brute(w_tensor(F2), 1, 2) == 2
    assert subrank_ij_brute(Tensor(F2, [2, 2, 2]), 1, 3) == 0
    with pytest.raises(UnsupportedFieldError):
        subrank_ij_brute(w_tensor(Q), 1, 2)
    with pytest.raises(BudgetExceededError):
        subrank_ij_brute(unit(3, 4, F101), 1, 2, budget=100)


def test_brute_subrank_by_explicit_restrictions():
    # independent check on w over F_2: enumerate every restriction whose
    # legs 1,2 map F^2 -> F^r and leg 3 maps F^2 -> F^1
    t = w_tensor(F2)
    mats = {r: [LegMap(F2, [list(row) for row in rows])
                for rows in product(product(range(2), repeat=2), repeat=r)] for r in (1, 2)}
    fns = [LegMap(F2, [list(v)]) for v in product(range(2), repeat=2)]
    best = 0
    for r in (1, 2):
        for a in mats[r]:
            for b in mats[r]:
                for c in fns:
                    if verify_cert(t, SubrankCertificate(1, 2, r, Restriction([a, b, c]))):
                        best = max(best, r)
    assert best == subrank_ij_brute(t, 1, 2) == 2
