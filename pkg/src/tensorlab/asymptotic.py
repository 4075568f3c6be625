"""Fekete regularization, asymptotic rank intervals and subrank floors.

Roots are kept exact as :class:`Radical` values ``base ** exponent`` and
compared by raising both sides to a common integer power.  Decimal strings
are for display only.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import total_ordering
from itertools import product
from typing import Callable, Sequence

from .catalog import matmul, unit
from .errors import AxiomNotDeclaredError, BudgetExceededError, ZeroTensorError
from .field import FieldSpec, sample_raw
from .rank import (
    Decomposition,
    flattening_rank,
    power_decomposition,
    proper_leg_subsets,
    search_decomposition,
    slice_decomposition,
    strassen_catalog,
    verify_decomposition,
)
from .tensor import LegMap, Restriction, Tensor, apply_restriction, direct_sum, kron

DEFAULT_ENTRY_BUDGET = 10**7

AXIOMS = ("subadditive", "submultiplicative", "permutation-invariant", "scale-invariant", "bounded")
SPECTRAL = ("additive", "multiplicative", "normalized", "monotone")


def entry_budget() -> int:
    return int(os.environ.get("TENSORLAB_BUDGET_ENTRIES", DEFAULT_ENTRY_BUDGET))


@total_ordering
@dataclass(frozen=True, eq=False)
class Radical:
    """The nonnegative real ``base ** exponent`` with rational base and exponent."""

    base: Fraction
    exponent: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.base < 0:
            raise ValueError("radical base must be nonnegative")

    @classmethod
    def coerce(cls, x) -> Radical:
        return x if isinstance(x, Radical) else cls(Fraction(x), 1)

    def _powers(self, other: Radical) -> tuple[Fraction, Fraction]:
        a, b = self.exponent, other.exponent
        n = a.denominator * b.denominator
        return _fpow(self.base, a * n), _fpow(other.base, b * n)

    def __eq__(self, other):
        try:
            other = Radical.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        x, y = self._powers(other)
        return x == y

    def __lt__(self, other):
        other = Radical.coerce(other)
        x, y = self._powers(other)
        return x < y

    def __hash__(self):
        return hash(self.decimal(30))

    def decimal(self, places: int = 10) -> str:
        """Round-half-even rendering with ``places`` digits after the point."""
        with localcontext() as ctx:
            ctx.prec = places + 40
            if self.base == 0:
                value = Decimal(0)
            else:
                b = Decimal(self.base.numerator) / Decimal(self.base.denominator)
                e = Decimal(self.exponent.numerator) / Decimal(self.exponent.denominator)
                value = b ** e
            return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))

    def __float__(self):
        return float(self.base) ** float(self.exponent)

    def __repr__(self):
        return f"Radical({self.base}^({self.exponent}) ~ {self.decimal()})"

    def __str__(self):
        return str(self.base) if self.exponent == 1 else f"{self.base}^({self.exponent})"


def _fpow(x: Fraction, e: Fraction) -> Fraction:
    assert e.denominator == 1
    if x == 0:
        return Fraction(0) if e > 0 else Fraction(1)
    return x ** int(e)


# -- functionals -------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalDescriptor:
    name: str
    evaluate: Callable[[Tensor], object]
    declared_axioms: frozenset = field(default_factory=frozenset)
    bound_constant: Fraction | None = None


def flattening_functional(legs: Sequence[int], dims: Sequence[int] | None = None) -> FunctionalDescriptor:
    """``R_I`` as a functional; ``dims`` fixes the bound ``min(prod_I, prod_rest)``."""
    legs = tuple(sorted(legs))
    bound = None
    if dims is not None:
        inside = outside = 1
        for q, d in enumerate(dims, start=1):
            if q in legs:
                inside *= d
            else:
                outside *= d
        bound = Fraction(min(inside, outside))
    name = "flattening:" + ",".join(map(str, legs))
    return FunctionalDescriptor(
        name, lambda t: flattening_rank(t, legs), frozenset(AXIOMS + SPECTRAL), bound
    )


def constant_functional(c) -> FunctionalDescriptor:
    c = Fraction(c)
    return FunctionalDescriptor(f"constant:{c}", lambda t: c, frozenset(AXIOMS), c)


def brute_rank_functional(budget: int | None = None, r_max: int = 16) -> FunctionalDescriptor:
    """Exact tensor rank by exhaustive search (prime fields, tiny formats)."""
    def evaluate(t: Tensor) -> int:
        d = search_decomposition(t, r_max, budget)
        if d is None:
            raise BudgetExceededError(f"rank above r_max = {r_max}")
        return len(d)

    return FunctionalDescriptor(
        "brute-rank",
        evaluate,
        frozenset({"subadditive", "submultiplicative", "permutation-invariant", "scale-invariant"}),
    )


class DecompositionBound:
    """Smallest verified decomposition among the available constructions.

    Tried in order of tightness: exhaustive search (prime fields, within
    budget), Kronecker powers of seed decompositions, matrix-slice splitting.
    """

    def __init__(self, seeds=(), search_budget: int | None = None, r_max: int = 12):
        self.seeds = list(seeds)
        self.search_budget = search_budget
        self.r_max = r_max

    def best(self, t: Tensor) -> tuple[Decomposition, str]:
        found: list[tuple[Decomposition, str]] = []
        if t.spec.p:
            try:
                d = search_decomposition(t, self.r_max, self.search_budget)
                if d is not None:
                    return d, "exhaustive"
            except BudgetExceededError:
                pass
        for label, base, dec in self.seeds:
            n = _power_level(base, t)
            if n:
                cand = power_decomposition(dec, n)
                if verify_decomposition(t, cand):
                    found.append((cand, label if n == 1 else f"{label}^{n}"))
        found.append((slice_decomposition(t), "slices"))
        return min(found, key=lambda item: len(item[0]))

    def evaluate(self, t: Tensor) -> int:
        return len(self.best(t)[0])

    def descriptor(self) -> FunctionalDescriptor:
        return FunctionalDescriptor("decomposition-rank", self.evaluate, frozenset({"submultiplicative"}))


def _power_level(base: Tensor, t: Tensor) -> int:
    """``n`` with ``t.dims == base.dims ** n`` (checked leg-wise), else 0."""
    if base.order != t.order or base.spec != t.spec:
        return 0
    n, dims = 1, list(base.dims)
    while all(d <= e for d, e in zip(dims, t.dims)):
        if tuple(dims) == t.dims:
            return n
        if all(d == 1 for d in base.dims):
            return 0
        dims = [d * b for d, b in zip(dims, base.dims)]
        n += 1
    return 0


def default_seeds(t: Tensor) -> list:
    """Strassen for ``matmul(2,2,2)``; otherwise the best level-1 decomposition."""
    seeds = []
    if t == matmul(2, 2, 2, t.spec):
        seeds.append(("strassen", t, strassen_catalog(t.spec)))
    d, label = DecompositionBound(seeds).best(t)
    if not seeds or len(d) < len(seeds[0][2]):
        seeds.append((label, t, d))
    return seeds


# -- Fekete reports ----------------------------------------------------------------


@dataclass(frozen=True)
class Level:
    n: int
    value: Fraction
    root: Radical
    provenance: str | None = None


@dataclass(frozen=True)
class FeketeReport:
    tensor_id: str
    functional: str
    levels: tuple[Level, ...]
    running_bound: Radical


def _check_entries(t: Tensor, n: int) -> None:
    cap = entry_budget()
    if t.nnz ** n > cap:
        raise BudgetExceededError(f"level {n} would hold {t.nnz ** n} entries, cap is {cap}")


def regularize_upper(
    t: Tensor,
    functional: FunctionalDescriptor,
    levels: int,
    tensor_id: str = "T",
    provenance: Callable[[Tensor], str] | None = None,
) -> FeketeReport:
    """Evaluate the functional on ``t``, ``t^2``, ... and keep the smallest root."""
    if "submultiplicative" not in functional.declared_axioms:
        raise AxiomNotDeclaredError(f"{functional.name} is not declared submultiplicative")
    if levels < 1:
        raise ValueError("need at least one level")
    out = []
    power = None
    bound = None
    for n in range(1, levels + 1):
        _check_entries(t, n)
        power = t if power is None else kron(power, t)
        value = Fraction(functional.evaluate(power))
        root = Radical(value, Fraction(1, n))
        out.append(Level(n, value, root, provenance(power) if provenance else None))
        bound = root if bound is None or root < bound else bound
    return FeketeReport(tensor_id, functional.name, tuple(out), bound)


@dataclass(frozen=True)
class IntervalEstimate:
    lower: Radical
    upper: Radical
    lower_witness: tuple[int, ...]
    upper_witness: tuple[str, ...]
    report: FeketeReport


def max_flattening(t: Tensor) -> tuple[int, tuple[int, ...]]:
    best = (-1, ())
    for legs in proper_leg_subsets(t.order):
        r = flattening_rank(t, legs)
        if r > best[0]:
            best = (r, legs)
    return best


def decomposition_report(
    t: Tensor, levels: int, tensor_id: str = "T", search_budget: int | None = None
) -> FeketeReport:
    """Fekete report for the verified-decomposition bound, with provenance per level."""
    bound = DecompositionBound(default_seeds(t), search_budget)
    labels = {}

    def evaluate(x: Tensor) -> int:
        d, label = bound.best(x)
        labels[id(x)] = label
        return len(d)

    fd = FunctionalDescriptor("decomposition-rank", evaluate, frozenset({"submultiplicative"}))
    return regularize_upper(t, fd, levels, tensor_id, provenance=lambda x: labels[id(x)])


def asymp_rank_interval(t: Tensor, levels: int, search_budget: int | None = None) -> IntervalEstimate:
    """``[max_I R_I(T), min_n R_upper(T^n)^(1/n)]`` with verified upper witnesses."""
    lower, witness = max_flattening(t)
    report = decomposition_report(t, levels, search_budget=search_budget)
    return IntervalEstimate(
        Radical(lower, 1),
        report.running_bound,
        witness,
        tuple(lv.provenance for lv in report.levels),
        report,
    )


def asymp_subrank_floor(t: Tensor) -> Radical:
    """``min_I R_I(T) ** (2 / (k (k - 1)))``, a lower bound on asymptotic subrank."""
    k = t.order
    if k < 2:
        raise ValueError("subrank floor needs order at least 2")
    if t.is_zero():
        raise ZeroTensorError("the zero tensor has no subrank floor")
    low = min(flattening_rank(t, legs) for legs in proper_leg_subsets(k))
    return Radical(low, Fraction(2, k * (k - 1)))


# -- axiom checking ------------------------------------------------------------------


def random_tensor(spec: FieldSpec, dims: Sequence[int], rng: random.Random, bound: int = 4) -> Tensor:
    """Dense random entries, or (half the time) a sum of one or two simple tensors."""
    if rng.random() < 0.5:
        data = {idx: sample_raw(spec, rng, bound) for idx in product(*(range(d) for d in dims))}
        return Tensor(spec, dims, data)
    out = Tensor(spec, dims)
    for _ in range(rng.randint(1, 2)):
        vecs = [[sample_raw(spec, rng, bound) for _ in range(d)] for d in dims]
        data = {}
        for idx in product(*(range(d) for d in dims)):
            v = spec.one
            for vec, a in zip(vecs, idx):
                v = spec.mul(v, vec[a])
            data[idx] = v
        out = out + Tensor(spec, dims, data)
    return out


def _nonzero(spec: FieldSpec, rng: random.Random):
    while True:
        x = sample_raw(spec, rng, 16)
        if x:
            return x


@dataclass
class AxiomResult:
    checked: int = 0
    inconclusive: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def axiom_check(
    functional: FunctionalDescriptor,
    spec: FieldSpec,
    dims: Sequence[int],
    trials: int,
    rng: random.Random,
    spectral: bool = True,
    max_unit: int = 4,
) -> dict[str, AxiomResult]:
    """Test the admissibility axioms (and optionally spectral ones) on random pairs.

    Failures are collected as report entries holding the offending tensors;
    evaluations that exceed a budget count as inconclusive.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    names = list(AXIOMS) + (list(SPECTRAL) if spectral else [])
    report = {name: AxiomResult() for name in names}
    f = functional.evaluate
    k = len(dims)

    def check(name, ok_fn, *witness):
        res = report[name]
        try:
            ok = ok_fn()
        except BudgetExceededError:
            res.inconclusive += 1
            return
        res.checked += 1
        if not ok:
            res.violations.append(witness)

    for _ in range(trials):
        t = random_tensor(spec, dims, rng)
        s = random_tensor(spec, dims, rng)
        alpha = _nonzero(spec, rng)
        check("subadditive", lambda: f(t + s) <= f(t) + f(s), t, s)
        check("submultiplicative", lambda: f(kron(t, s)) <= f(t) * f(s), t, s)
        check("permutation-invariant", lambda: f(kron(t, s)) == f(kron(s, t)), t, s)
        check("scale-invariant", lambda: f(t.scale(alpha)) == f(t), t, t.scale(alpha))
        if functional.bound_constant is None:
            report["bounded"].inconclusive += 1
        else:
            check("bounded", lambda: f(t) <= functional.bound_constant, t)
        if spectral:
            check("additive", lambda: f(direct_sum(t, s)) == f(t) + f(s), t, s)
            check("multiplicative", lambda: f(kron(t, s)) == f(t) * f(s), t, s)
            maps = Restriction([
                LegMap(spec, [[sample_raw(spec, rng, 4) for _ in range(d)] for _ in range(d)])
                for d in dims
            ])
            check("monotone", lambda: f(apply_restriction(maps, t)) <= f(t), t, maps)
    if spectral:
        for r in range(1, max_unit + 1):
            u = unit(r, k, spec)
            check("normalized", lambda: f(u) == r, u)
    return report
