import random

import pytest
from hypothesis import given, settings, strategies as st

from tensorlab import (
    FieldSpec,
    LegMap,
    Restriction,
    apply_restriction,
    catalog,
    cw,
    group_legs,
    kron,
    kron_power,
    make_tensor,
    matmul,
    pad_leg,
    permute_legs,
    slice_tensor,
    unit,
    unit_ij,
    w_tensor,
)
from tensorlab.asymptotic import random_tensor
from tensorlab.errors import (
    BadLegSetError,
    BadParameterError,
    BadPermutationError,
    IndexOutOfRangeError,
    MixedFieldsError,
    OrderMismatchError,
    ShapeMismatchError,
    ValidationError,
)
from tensorlab.rank import flattening_rank
from tensorlab.tensor import direct_sum

from oracles import kron_dense, matmul_entries

Q = FieldSpec.rational()
F101 = FieldSpec.prime(101)


def raw_items(t):
    return {idx: v.value for idx, v in t.items()}


def test_make_tensor():
    eye = make_tensor(Q, [2, 2], [((1, 1), 1), ((2, 2), 1), ((1, 2), 0)])
    assert eye.nnz == 2 and eye[(1, 2)] == 0
    with pytest.raises(IndexOutOfRangeError):
        make_tensor(Q, [2, 2], [((3, 1), 1)])
    with pytest.raises(ValidationError):
        make_tensor(Q, [2, 0], [])


def test_kron_examples():
    s = kron(unit(2, 3, Q), unit(3, 3, Q))
    assert s.dims == (6, 6, 6) and s.nnz == 6
    assert all(len(set(idx)) == 1 for idx, _ in s.items())
    t = w_tensor(Q)
    assert kron(unit(1, 3, Q), t) == t
    mm = matmul(2, 2, 2, Q)
    big = kron(mm, mm)
    assert big.dims == (16, 16, 16) and big.nnz == 64
    assert raw_items(big) == kron_dense(mm, mm)


def test_kron_errors():
    with pytest.raises(OrderMismatchError):
        kron(unit(2, 3, Q), unit(2, 2, Q))
    with pytest.raises(MixedFieldsError):
        kron(unit(2, 3, Q), unit(2, 3, F101))
    with pytest.raises(BadParameterError):
        kron_power(unit(2, 3, Q), 0)


def test_kron_power_matches_repeated_kron():
    t = w_tensor(F101)
    assert kron_power(t, 3) == kron(kron(t, t), t)
    assert kron_power(t, 1) == t


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_kron_associative_and_nnz_multiplicative(seed):
    rng = random.Random(seed)
    a, b, c = (random_tensor(F101, [rng.randint(1, 3) for _ in range(3)], rng, 101) for _ in range(3))
    assert kron(kron(a, b), c) == kron(a, kron(b, c))
    assert kron(a, b).nnz == a.nnz * b.nnz
    assert raw_items(kron(a, b)) == kron_dense(a, b)


def test_slice_examples():
    w = w_tensor(Q)
    assert raw_items(slice_tensor(w, [3], [1])) == {(1, 2): 1, (2, 1): 1}
    for j in (1, 2, 3):
        assert raw_items(slice_tensor(unit(3, 3, Q), [3], [j])) == {(j, j): 1}
    v = slice_tensor(matmul(2, 2, 2, Q), [2, 3], [1, 1])
    expected = {(a,) for a, b, c in matmul_entries(2, 2, 2) if (b, c) == (1, 1)}
    assert v.dims == (4,) and set(raw_items(v)) == expected and v.nnz == 1
    with pytest.raises(BadLegSetError):
        slice_tensor(w, [4], [1])
    with pytest.raises(IndexOutOfRangeError):
        slice_tensor(w, [1], [3])


def test_permute_examples():
    t = make_tensor(Q, [2, 2, 2], [((1, 2, 1), 1)])
    assert permute_legs(t, [1, 2, 3]) == t
    assert raw_items(permute_legs(t, [2, 1, 3])) == {(2, 1, 1): 1}
    with pytest.raises(BadPermutationError):
        permute_legs(t, [1, 1, 3])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.permutations([1, 2, 3, 4]))
def test_permute_round_trip(seed, sigma):
    rng = random.Random(seed)
    t = random_tensor(F101, [rng.randint(1, 3) for _ in range(4)], rng, 101)
    inverse = [sigma.index(m) + 1 for m in range(1, 5)]
    assert permute_legs(permute_legs(t, sigma), inverse) == t
    assert permute_legs(t, sigma).dims == tuple(t.dims[s - 1] for s in sigma)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_group_legs_examples(r):
    g = group_legs(unit_ij(r, 3, 1, 2, Q), 1, 2)
    # catalog dims are [r]*3, so the grouped leg has r^2 rows and the last leg r columns
    assert g.order == 2 and g.dims == (r * r, r) and g.nnz == r
    assert flattening_rank(g, [1]) == 1
    g = group_legs(unit(r, 3, Q), 1, 2)
    assert g.dims == (r * r, r) and flattening_rank(g, [1]) == r
    concise = unit_ij(r, 3, 1, 2, Q, dims=[r, r, 1])
    assert group_legs(concise, 1, 2).dims == (r * r, 1)


def test_group_legs_shape_and_errors():
    t = random_tensor(Q, [2, 3, 4, 1], random.Random(0))
    assert group_legs(t, 1, 2).dims == (6, 4, 1)
    with pytest.raises(ValidationError):
        group_legs(unit(2, 2, Q), 1, 2)
    with pytest.raises(BadLegSetError):
        group_legs(t, 2, 2)


def test_pad_leg():
    eye = make_tensor(Q, [2, 2], [((1, 1), 1), ((2, 2), 1)])
    padded = pad_leg(eye, 3)
    assert padded.dims == (2, 2, 1) and raw_items(padded) == {(1, 1, 1): 1, (2, 2, 1): 1}
    for ell in (1, 2, 3):
        assert slice_tensor(pad_leg(eye, ell), [ell], [1]) == eye
    with pytest.raises(BadLegSetError):
        pad_leg(eye, 4)


def test_apply_restriction_examples():
    t = unit(2, 3, Q)
    assert apply_restriction(Restriction.identity(Q, t.dims), t) == t
    maps = Restriction([LegMap.identity(Q, 2), LegMap.identity(Q, 2), LegMap(Q, [[1, 1]])])
    out = apply_restriction(maps, t)
    assert out.dims == (2, 2, 1) and raw_items(out) == {(1, 1, 1): 1, (2, 2, 1): 1}
    zero = Restriction([LegMap(Q, [[0, 0]]), LegMap.identity(Q, 2), LegMap.identity(Q, 2)])
    assert apply_restriction(zero, t).is_zero()
    with pytest.raises(ShapeMismatchError):
        apply_restriction(Restriction([LegMap.identity(Q, 3)] * 3), t)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_restriction_composition(seed):
    rng = random.Random(seed)
    dims = [rng.randint(1, 3) for _ in range(3)]
    mid = [rng.randint(1, 3) for _ in range(3)]
    out = [rng.randint(1, 3) for _ in range(3)]
    t = random_tensor(F101, dims, rng, 101)

    def rand_map(rows, cols):
        return LegMap(F101, [[rng.randrange(101) for _ in range(cols)] for _ in range(rows)])

    a = Restriction([rand_map(m, d) for m, d in zip(mid, dims)])
    b = Restriction([rand_map(o, m) for o, m in zip(out, mid)])
    assert apply_restriction(a.then(b), t) == apply_restriction(b, apply_restriction(a, t))


def test_direct_sum_of_units():
    assert direct_sum(unit(2, 3, Q), unit(3, 3, Q)) == unit(5, 3, Q)


def test_catalog_examples():
    mm = catalog("matmul", Q, a=2, b=2, c=2)
    assert mm.dims == (4, 4, 4) and mm.nnz == 8 and all(v == 1 for _, v in mm.items())
    u = catalog("unit_ij", Q, r=3, k=4, i=2, j=3)
    assert u.dims == (3, 3, 3, 3)
    assert raw_items(u) == {(1, a, a, 1): 1 for a in (1, 2, 3)}
    assert catalog("w", Q) == w_tensor(Q)
    assert raw_items(w_tensor(Q)) == {(1, 1, 2): 1, (1, 2, 1): 1, (2, 1, 1): 1}
    assert catalog("unit", Q, r=3, k=2).nnz == 3
    with pytest.raises(ValidationError):
        catalog("unit", Q, r=0, k=3)
    with pytest.raises(ValidationError):
        catalog("nope", Q)


def test_cw2_expansion():
    t = cw(2, Q)
    # e_0 e_a e_a + e_a e_0 e_a + e_a e_a e_0 for a in {1, 2}, shifted to 1-based
    expected = set()
    for a in (2, 3):
        expected |= {(1, a, a), (a, 1, a), (a, a, 1)}
    assert t.dims == (3, 3, 3) and set(raw_items(t)) == expected and t.nnz == 6
