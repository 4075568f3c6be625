"""Sparse k-tensors, leg maps and restrictions.

Legs are numbered from 1 and index tuples are 1-based at the public surface
(``make_tensor``, ``Tensor.__getitem__``, ``Tensor.items``, JSON).  Internally
``Tensor.data`` maps 0-based index tuples to nonzero raw field values.

Kronecker products and leg grouping pair indices row-major: an index ``a`` on
the first factor and ``b`` on a factor of dimension ``e`` become
``(a - 1) * e + b``.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .errors import (
    BadLegSetError,
    BadParameterError,
    BadPermutationError,
    DuplicateIndexError,
    IndexOutOfRangeError,
    MixedFieldsError,
    OrderMismatchError,
    ShapeMismatchError,
)
from .field import FieldSpec, Raw, Scalar


class Tensor:
    __slots__ = ("spec", "dims", "data")

    def __init__(self, spec: FieldSpec, dims: Sequence[int], data: dict | None = None):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise BadParameterError(f"dims must be a nonempty list of positive ints, got {dims}")
        self.spec = spec
        self.dims = dims
        self.data = {idx: v for idx, v in (data or {}).items() if v}

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def nnz(self) -> int:
        return len(self.data)

    def is_zero(self) -> bool:
        return not self.data

    def __getitem__(self, idx: Sequence[int]) -> Scalar:
        key = _check_index(idx, self.dims)
        return Scalar(self.spec, self.data.get(key, self.spec.zero))

    def items(self) -> list[tuple[tuple[int, ...], Scalar]]:
        """Nonzero entries as ``(1-based index, Scalar)`` in lexicographic order."""
        return [
            (tuple(i + 1 for i in idx), Scalar(self.spec, v))
            for idx, v in sorted(self.data.items())
        ]

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.spec == other.spec and self.dims == other.dims and self.data == other.data

    __hash__ = None

    def __repr__(self):
        return f"Tensor({self.spec}, dims={list(self.dims)}, nnz={self.nnz})"

    def scale(self, alpha: Raw) -> Tensor:
        spec = self.spec
        return Tensor(spec, self.dims, {i: spec.mul(v, alpha) for i, v in self.data.items()})

    def __add__(self, other: Tensor) -> Tensor:
        _same_field(self, other)
        if self.dims != other.dims:
            raise ShapeMismatchError(f"cannot add {self.dims} and {other.dims}")
        data = dict(self.data)
        for i, v in other.data.items():
            data[i] = self.spec.add(data.get(i, self.spec.zero), v)
        return Tensor(self.spec, self.dims, data)


def _same_field(*tensors) -> None:
    spec = tensors[0].spec
    for t in tensors[1:]:
        if t.spec != spec:
            raise MixedFieldsError(f"{spec} vs {t.spec}")


def _check_index(idx: Sequence[int], dims: Sequence[int]) -> tuple[int, ...]:
    if len(idx) != len(dims):
        raise IndexOutOfRangeError(f"index {tuple(idx)} has wrong length for dims {list(dims)}")
    for i, d in zip(idx, dims):
        if not 1 <= i <= d:
            raise IndexOutOfRangeError(f"index {tuple(idx)} outside dims {list(dims)}")
    return tuple(i - 1 for i in idx)


def _check_leg(leg: int, k: int) -> int:
    if not isinstance(leg, int) or not 1 <= leg <= k:
        raise BadLegSetError(f"leg {leg!r} not in 1..{k}")
    return leg


def make_tensor(spec: FieldSpec, dims: Sequence[int], entries: Iterable) -> Tensor:
    """Build a tensor from ``(1-based index, value)`` pairs; zeros are dropped."""
    dims = tuple(dims)
    data: dict = {}
    seen = set()
    for idx, val in entries:
        key = _check_index(idx, dims)
        if key in seen:
            raise DuplicateIndexError(f"index {tuple(idx)} given twice")
        seen.add(key)
        data[key] = spec.coerce(val)
    return Tensor(spec, dims, data)


def kron(s: Tensor, t: Tensor) -> Tensor:
    if s.order != t.order:
        raise OrderMismatchError(f"orders {s.order} and {t.order} differ")
    _same_field(s, t)
    spec = s.spec
    e = t.dims
    data = {}
    for a, x in s.data.items():
        for b, y in t.data.items():
            data[tuple(ai * ei + bi for ai, ei, bi in zip(a, e, b))] = spec.mul(x, y)
    return Tensor(spec, tuple(d * f for d, f in zip(s.dims, e)), data)


def kron_power(t: Tensor, n: int) -> Tensor:
    if n < 1:
        raise BadParameterError("power must be at least 1")
    out = t
    for _ in range(n - 1):
        out = kron(out, t)
    return out


def slice_tensor(t: Tensor, legs: Sequence[int], idx: Sequence[int]) -> Tensor:
    """Fix the coordinates on ``legs`` (1-based) to ``idx`` (1-based)."""
    k = t.order
    legs = list(legs)
    if not legs or len(set(legs)) != len(legs) or len(legs) >= k:
        raise BadLegSetError(f"slice legs {legs} must be a nonempty proper subset of 1..{k}")
    for leg in legs:
        _check_leg(leg, k)
    if len(idx) != len(legs):
        raise IndexOutOfRangeError("slice index length differs from leg count")
    fixed = {}
    for leg, i in zip(legs, idx):
        if not 1 <= i <= t.dims[leg - 1]:
            raise IndexOutOfRangeError(f"slice index {i} outside leg {leg}")
        fixed[leg - 1] = i - 1
    keep = [p for p in range(k) if p not in fixed]
    data = {}
    for key, v in t.data.items():
        if all(key[p] == i for p, i in fixed.items()):
            data[tuple(key[p] for p in keep)] = v
    return Tensor(t.spec, [t.dims[p] for p in keep], data)


def permute_legs(t: Tensor, sigma: Sequence[int]) -> Tensor:
    """Reorder legs so that new leg ``m`` is old leg ``sigma[m - 1]``."""
    k = t.order
    if sorted(sigma) != list(range(1, k + 1)):
        raise BadPermutationError(f"{list(sigma)} is not a permutation of 1..{k}")
    src = [s - 1 for s in sigma]
    data = {tuple(key[p] for p in src): v for key, v in t.data.items()}
    return Tensor(t.spec, [t.dims[p] for p in src], data)


def group_legs(t: Tensor, i: int, j: int) -> Tensor:
    """Merge leg ``j`` into leg ``i`` (index ``(a - 1) * d_j + b``), dropping leg ``j``."""
    k = t.order
    if k < 3:
        raise BadLegSetError("grouping needs order at least 3")
    _check_leg(i, k)
    _check_leg(j, k)
    if i == j:
        raise BadLegSetError("cannot group a leg with itself")
    p, q = i - 1, j - 1
    dq = t.dims[q]
    dims = [d * dq if m == p else d for m, d in enumerate(t.dims) if m != q]
    data = {}
    for key, v in t.data.items():
        new = [key[p] * dq + key[q] if m == p else key[m] for m in range(k) if m != q]
        data[tuple(new)] = v
    return Tensor(t.spec, dims, data)


def pad_leg(t: Tensor, ell: int) -> Tensor:
    """Insert a new dimension-1 leg at position ``ell`` carrying ``e_1``."""
    k = t.order
    if not 1 <= ell <= k + 1:
        raise BadLegSetError(f"pad position {ell} not in 1..{k + 1}")
    p = ell - 1
    data = {key[:p] + (0,) + key[p:]: v for key, v in t.data.items()}
    return Tensor(t.spec, t.dims[:p] + (1,) + t.dims[p:], data)


def direct_sum(s: Tensor, t: Tensor) -> Tensor:
    """Block-diagonal sum: ``t`` is shifted past ``s`` on every leg."""
    if s.order != t.order:
        raise OrderMismatchError(f"orders {s.order} and {t.order} differ")
    _same_field(s, t)
    data = dict(s.data)
    for key, v in t.data.items():
        data[tuple(a + d for a, d in zip(key, s.dims))] = v
    return Tensor(s.spec, [d + e for d, e in zip(s.dims, t.dims)], data)


class LegMap:
    """A dense ``rows x cols`` matrix acting on one tensor leg."""

    __slots__ = ("spec", "rows", "cols", "data")

    def __init__(self, spec: FieldSpec, data: Sequence[Sequence[Raw]]):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        if rows < 1 or cols < 1:
            raise BadParameterError("leg maps need at least one row and one column")
        if any(len(r) != cols for r in data):
            raise ShapeMismatchError("ragged leg map")
        self.spec = spec
        self.rows = rows
        self.cols = cols
        self.data = tuple(tuple(spec.coerce(x) for x in r) for r in data)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> LegMap:
        return cls(spec, [[1 if a == b else 0 for b in range(n)] for a in range(n)])

    @classmethod
    def unit_row(cls, spec: FieldSpec, n: int, i: int) -> LegMap:
        """The ``1 x n`` functional picking coordinate ``i`` (1-based)."""
        return cls(spec, [[1 if c == i - 1 else 0 for c in range(n)]])

    def as_lists(self) -> list[list[Raw]]:
        return [list(r) for r in self.data]

    def __matmul__(self, other: LegMap) -> LegMap:
        from .linalg import matmul

        if self.spec != other.spec:
            raise MixedFieldsError(f"{self.spec} vs {other.spec}")
        if self.cols != other.rows:
            raise ShapeMismatchError(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return LegMap(self.spec, matmul(self.spec, self.as_lists(), other.as_lists()))

    def __eq__(self, other):
        if not isinstance(other, LegMap):
            return NotImplemented
        return self.spec == other.spec and self.data == other.data

    __hash__ = None

    def __repr__(self):
        return f"LegMap({self.spec}, {self.rows}x{self.cols})"


class Restriction:
    """A tuple of leg maps ``(A_1, ..., A_k)`` acting as ``A_1 (x) ... (x) A_k``."""

    __slots__ = ("legs",)

    def __init__(self, legs: Sequence[LegMap]):
        legs = tuple(legs)
        if not legs:
            raise BadParameterError("a restriction needs at least one leg")
        spec = legs[0].spec
        if any(m.spec != spec for m in legs):
            raise MixedFieldsError("restriction legs over different fields")
        self.legs = legs

    @property
    def spec(self) -> FieldSpec:
        return self.legs[0].spec

    @classmethod
    def identity(cls, spec: FieldSpec, dims: Sequence[int]) -> Restriction:
        return cls([LegMap.identity(spec, d) for d in dims])

    def then(self, outer: Restriction) -> Restriction:
        """The restriction applying ``self`` first and ``outer`` second."""
        if len(outer.legs) != len(self.legs):
            raise OrderMismatchError("restrictions of different order")
        return Restriction([b @ a for a, b in zip(self.legs, outer.legs)])

    def __eq__(self, other):
        if not isinstance(other, Restriction):
            return NotImplemented
        return self.legs == other.legs

    __hash__ = None

    def __repr__(self):
        shapes = ", ".join(f"{m.rows}x{m.cols}" for m in self.legs)
        return f"Restriction({shapes})"


def apply_leg(t: Tensor, leg: int, m: LegMap) -> Tensor:
    """Apply one leg map to leg ``leg`` (1-based)."""
    p = leg - 1
    if m.cols != t.dims[p]:
        raise ShapeMismatchError(f"leg {leg} has dim {t.dims[p]}, map expects {m.cols}")
    spec = t.spec
    cols = [[(r, row[c]) for r, row in enumerate(m.data) if row[c]] for c in range(m.cols)]
    data: dict = {}
    for key, v in t.data.items():
        for r, a in cols[key[p]]:
            new = key[:p] + (r,) + key[p + 1:]
            data[new] = spec.add(data.get(new, spec.zero), spec.mul(a, v))
    return Tensor(spec, t.dims[:p] + (m.rows,) + t.dims[p + 1:], data)


def apply_restriction(r: Restriction, t: Tensor) -> Tensor:
    if len(r.legs) != t.order:
        raise ShapeMismatchError(f"restriction of order {len(r.legs)} on tensor of order {t.order}")
    if r.spec != t.spec:
        raise MixedFieldsError(f"{r.spec} vs {t.spec}")
    for leg, m in enumerate(r.legs, start=1):
        if m.cols != t.dims[leg - 1]:
            raise ShapeMismatchError(f"leg {leg} has dim {t.dims[leg - 1]}, map expects {m.cols}")
    # Smallest-output legs first keeps intermediates small.
    order = sorted(range(len(r.legs)), key=lambda p: r.legs[p].rows - r.legs[p].cols)
    out = t
    for p in order:
        out = apply_leg(out, p + 1, r.legs[p])
    return out


def all_indices(dims: Sequence[int]) -> Iterable[tuple[int, ...]]:
    """Every 1-based index vector over ``dims`` in lexicographic order."""
    return product(*(range(1, d + 1) for d in dims))
