"""Exact scalar arithmetic over the rationals and prime fields.

A :class:`FieldSpec` doubles as the field object: it knows how to add,
multiply and invert *raw* values (``Fraction`` for the rationals, ``int``
residues for F_p).  The rest of the package works on raw values for speed;
:class:`Scalar` is the checked, spec-carrying value type exposed to users.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import BadParameterError, DivisionByZeroError, MixedFieldsError, ParseError

Raw = Union[int, Fraction]

INFINITE = math.inf
DEFAULT_SAMPLE_BOUND = 2**16

_MR_BASES = (2, 3, 5, 7)  # deterministic for n < 3_215_031_751


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n below 2^31."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The base field: ``FieldSpec.rational()`` or ``FieldSpec.prime(p)``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.p is not None:
                raise BadParameterError("rational field carries no modulus")
        elif self.kind == "prime":
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise BadParameterError("prime field needs an integer modulus")
            if self.p >= 2**31:
                raise BadParameterError(f"modulus {self.p} does not fit in 31 bits")
            if not is_prime(self.p):
                raise BadParameterError(f"modulus {self.p} is not prime")
        else:
            raise BadParameterError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> FieldSpec:
        return cls("rational")

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls("prime", p)

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    def __str__(self):
        return "QQ" if self.p is None else f"F_{self.p}"

    # -- raw arithmetic -------------------------------------------------

    @property
    def zero(self) -> Raw:
        return 0 if self.p else Fraction(0)

    @property
    def one(self) -> Raw:
        return 1 if self.p else Fraction(1)

    def coerce(self, x) -> Raw:
        """Map an int, Fraction or Scalar into a raw value of this field."""
        if isinstance(x, Scalar):
            if x.spec != self:
                raise MixedFieldsError(f"scalar over {x.spec} used in {self}")
            return x.value
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZeroError(f"{x} has no image in {self}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a: Raw, b: Raw) -> Raw:
        return (a + b) % self.p if self.p else a + b

    def sub(self, a: Raw, b: Raw) -> Raw:
        return (a - b) % self.p if self.p else a - b

    def mul(self, a: Raw, b: Raw) -> Raw:
        return a * b % self.p if self.p else a * b

    def neg(self, a: Raw) -> Raw:
        return -a % self.p if self.p else -a

    def inv(self, a: Raw) -> Raw:
        if a == 0:
            raise DivisionByZeroError("zero has no inverse")
        return pow(a, -1, self.p) if self.p else 1 / a

    def div(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    # -- text form ------------------------------------------------------

    def to_text(self, a: Raw) -> str:
        return str(a)

    def parse(self, text) -> Raw:
        """Parse ``"n"`` or ``"n/d"`` (ints are accepted as well)."""
        if isinstance(text, int) and not isinstance(text, bool):
            return self.coerce(text)
        if not isinstance(text, str):
            raise ParseError(f"scalar must be a string, got {text!r}")
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad scalar text {text!r}") from exc
        if "." in text or "e" in text.lower():
            raise ParseError(f"scalar text must be n or n/d, got {text!r}")
        return self.coerce(value)

    def to_json(self) -> dict:
        if self.p is None:
            return {"kind": "rational"}
        return {"kind": "prime", "p": self.p}

    @classmethod
    def from_json(cls, obj) -> FieldSpec:
        try:
            if obj["kind"] == "rational":
                return cls.rational()
            return cls.prime(obj["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad field spec {obj!r}: {exc}") from exc


@dataclass(frozen=True)
class Scalar:
    """An element of a field, normalized on construction."""

    spec: FieldSpec
    value: Raw

    def __post_init__(self):
        object.__setattr__(self, "value", self.spec.coerce(self.value))

    @classmethod
    def parse(cls, spec: FieldSpec, text) -> Scalar:
        return cls(spec, spec.parse(text))

    def _other(self, other) -> Raw:
        if isinstance(other, Scalar):
            if other.spec != self.spec:
                raise MixedFieldsError(f"{self.spec} vs {other.spec}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.spec.coerce(other)
        return NotImplemented

    def _wrap(self, raw: Raw) -> Scalar:
        return Scalar(self.spec, raw)

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.div(self.value, b))

    def __rtruediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.div(b, self.value))

    def __neg__(self):
        return self._wrap(self.spec.neg(self.value))

    def inverse(self) -> Scalar:
        return self._wrap(self.spec.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.spec != self.spec:
                raise MixedFieldsError(f"{self.spec} vs {other.spec}")
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.spec.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.spec.to_text(self.value)


_BINARY = {"add", "sub", "mul", "div", "eq"}


def field_ops(a: Scalar, b: Scalar | None = None, op: str = "add"):
    """Dispatch a named field operation; ``neg`` and ``inv`` ignore ``b``."""
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op not in _BINARY:
        raise ValueError(f"unknown field op {op!r}")
    if not isinstance(b, Scalar) or b.spec != a.spec:
        raise MixedFieldsError(f"{op} needs two scalars over {a.spec}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    return a == b


def field_cardinality(spec: FieldSpec) -> int | float:
    """``p`` for F_p and :data:`INFINITE` (``math.inf``) for the rationals."""
    return spec.p if spec.p else INFINITE


def sample_raw(spec: FieldSpec, rng: random.Random, bound: int = DEFAULT_SAMPLE_BOUND) -> Raw:
    if spec.p:
        return rng.randrange(spec.p)
    return Fraction(rng.randint(0, bound))


def sample_scalar(spec: FieldSpec, rng: random.Random, bound: int = DEFAULT_SAMPLE_BOUND) -> Scalar:
    """Uniform residue for F_p, uniform integer in ``[0, bound]`` for QQ."""
    if bound < 1:
        raise ValueError("sampling bound must be at least 1")
    return Scalar(spec, sample_raw(spec, rng, bound))
