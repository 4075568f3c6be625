"""Named tensors: unit tensors, matrix multiplication, W and small CW."""

from __future__ import annotations

from .errors import BadParameterError
from .field import FieldSpec
from .tensor import Tensor


def _positive(**params):
    for name, v in params.items():
        if not isinstance(v, int) or v < 1:
            raise BadParameterError(f"{name} must be a positive integer, got {v!r}")


def unit(r: int, k: int, spec: FieldSpec) -> Tensor:
    """``sum_l e_l (x) ... (x) e_l`` of order ``k``."""
    _positive(r=r, k=k)
    return Tensor(spec, [r] * k, {(l,) * k: spec.one for l in range(r)})


def unit_ij(r: int, k: int, i: int, j: int, spec: FieldSpec, dims=None) -> Tensor:
    """Rank-``r`` identity matrix on legs ``i, j`` with ``e_1`` on every other leg.

    ``dims`` defaults to ``[r] * k``; certificates use the concise format with
    ``r`` on legs ``i, j`` and 1 elsewhere.  ``r = 0`` gives the zero tensor.
    """
    _positive(k=k)
    if k < 2 or not (1 <= i <= k and 1 <= j <= k) or i == j:
        raise BadParameterError(f"need distinct legs in 1..{k}, got {i}, {j}")
    if not isinstance(r, int) or r < 0:
        raise BadParameterError(f"r must be a nonnegative integer, got {r!r}")
    if dims is None:
        dims = [max(r, 1)] * k
    data = {}
    for l in range(r):
        key = [0] * k
        key[i - 1] = key[j - 1] = l
        data[tuple(key)] = spec.one
    return Tensor(spec, dims, data)


def unit_ij_format(r: int, k: int, i: int, j: int) -> list[int]:
    """Concise dims of ``unit_ij``: ``max(r, 1)`` on legs ``i, j``, 1 elsewhere."""
    return [max(r, 1) if leg in (i, j) else 1 for leg in range(1, k + 1)]


def matmul(a: int, b: int, c: int, spec: FieldSpec) -> Tensor:
    """``sum e_{ij} (x) e_{jk} (x) e_{ki}`` over ``i<=a, j<=b, k<=c``, dims ``[ab, bc, ca]``."""
    _positive(a=a, b=b, c=c)
    data = {}
    for i in range(a):
        for j in range(b):
            for k in range(c):
                data[(i * b + j, j * c + k, k * a + i)] = spec.one
    return Tensor(spec, [a * b, b * c, c * a], data)


def w_tensor(spec: FieldSpec) -> Tensor:
    """``e_1 e_1 e_2 + e_1 e_2 e_1 + e_2 e_1 e_1``."""
    return Tensor(spec, [2, 2, 2], {(0, 0, 1): spec.one, (0, 1, 0): spec.one, (1, 0, 0): spec.one})


def cw(q: int, spec: FieldSpec) -> Tensor:
    """Small Coppersmith-Winograd tensor on ``(q+1)^3``.

    ``sum_{i=1..q} e_0 e_i e_i + e_i e_0 e_i + e_i e_i e_0`` with ``e_0`` stored
    at index 1.  This is the usual literature definition.
    """
    _positive(q=q)
    data = {}
    for i in range(1, q + 1):
        for key in ((0, i, i), (i, 0, i), (i, i, 0)):
            data[key] = spec.one
    return Tensor(spec, [q + 1] * 3, data)


def catalog(name: str, spec: FieldSpec, **params) -> Tensor:
    """Dispatch by name: ``unit``, ``unit_ij``, ``matmul``, ``w``, ``cw``."""
    try:
        if name == "unit":
            return unit(params["r"], params["k"], spec)
        if name == "unit_ij":
            _positive(r=params["r"])
            return unit_ij(params["r"], params["k"], params["i"], params["j"], spec)
        if name == "matmul":
            return matmul(params["a"], params["b"], params["c"], spec)
        if name == "w":
            return w_tensor(spec)
        if name == "cw":
            return cw(params["q"], spec)
    except KeyError as exc:
        raise BadParameterError(f"catalog {name!r} needs parameter {exc.args[0]!r}") from exc
    raise BadParameterError(f"unknown catalog tensor {name!r}")
