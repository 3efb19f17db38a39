"""
Exact scalars and tensor index bookkeeping.

Conventions used everywhere in the engine:

* metric signature (+, -, -, -), so that M^2 = P_0^2 - |P|^2 on timelike momenta;
* Levi-Civita orientation eps_{0123} = +1, hence eps^{0123} = -1;
* hbar = 1, coefficients are Gaussian rationals.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .exceptions import IndexPairingError


logger = logging.getLogger(__name__)


SIGNATURE = (1, -1, -1, -1)
SPACETIME = (0, 1, 2, 3)
CONVENTIONS = {
    "signature": "(+,-,-,-)",
    "epsilon_orientation": "eps_{0123} = +1",
    "hbar": 1,
}


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    # sympy / gmpy rationals expose numerator and denominator
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True, slots=True)
class Scalar:
    """A Gaussian rational re + i*im with arbitrary-precision parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _fraction(self.re))
        object.__setattr__(self, "im", _fraction(self.im))

    @classmethod
    def of(cls, value: "ScalarLike") -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls(_fraction(value))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __add__(self, other: "ScalarLike") -> "Scalar":
        other = Scalar.of(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: "ScalarLike") -> "Scalar":
        other = Scalar.of(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: "ScalarLike") -> "Scalar":
        return Scalar.of(other) - self

    def __mul__(self, other: "ScalarLike") -> "Scalar":
        other = Scalar.of(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "ScalarLike") -> "Scalar":
        other = Scalar.of(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by the zero scalar")
        return self * Scalar(other.re / norm, -other.im / norm)

    def __rtruediv__(self, other: "ScalarLike") -> "Scalar":
        return Scalar.of(other) / self

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def is_real(self) -> bool:
        return not self.im

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        imag = "i" if abs(self.im) == 1 else f"{abs(self.im)}i"
        if not self.re:
            return imag if self.im > 0 else f"-{imag}"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{imag})"


ScalarLike = Union[Scalar, Fraction, int]

ZERO = Scalar()
ONE = Scalar(1)
I = Scalar(0, 1)


def metric_component(mu: int, nu: int) -> Scalar:
    """eta_{mu nu} (equal to eta^{mu nu}) for concrete indices."""
    _check_concrete(mu)
    _check_concrete(nu)
    return Scalar(SIGNATURE[mu]) if mu == nu else ZERO


def epsilon_component(indices: Sequence[int]) -> Scalar:
    """eps_{abcd} with all indices lower; eps_{0123} = +1."""
    if len(indices) != 4:
        raise ValueError(f"epsilon takes four indices, got {len(indices)}")
    for value in indices:
        _check_concrete(value)
    if len(set(indices)) != 4:
        return ZERO
    return Scalar(_permutation_sign(indices))


def _permutation_sign(values: Sequence) -> int:
    sign = 1
    values = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] > values[j]:
                sign = -sign
    return sign


def _check_concrete(value: int) -> None:
    if value not in SPACETIME:
        raise ValueError(f"concrete index out of range 0..3: {value}")


@dataclass(frozen=True, slots=True)
class IndexLabel:
    """A symbolic or concrete index slot with its variance."""

    name: Optional[str] = None
    value: Optional[int] = None
    upper: bool = False

    def __post_init__(self) -> None:
        if (self.name is None) == (self.value is None):
            raise ValueError("an index is either symbolic (name) or concrete (value)")
        if self.value is not None:
            _check_concrete(self.value)

    @property
    def concrete(self) -> bool:
        return self.value is not None

    def sort_key(self, mask_bound: frozenset = frozenset()) -> tuple:
        if self.value is not None:
            return (0, self.value, "", self.upper)
        name = "" if self.name in mask_bound else self.name
        return (1, 0, name, self.upper)

    def with_variance(self, upper: bool) -> "IndexLabel":
        return IndexLabel(self.name, self.value, upper)

    def renamed(self, name: str) -> "IndexLabel":
        return IndexLabel(name, None, self.upper)

    def __str__(self) -> str:
        mark = "^" if self.upper else "_"
        return f"{mark}{self.name if self.value is None else self.value}"


def up(label: Union[str, int]) -> IndexLabel:
    if isinstance(label, int):
        return IndexLabel(value=label, upper=True)
    return IndexLabel(name=label, upper=True)


def lo(label: Union[str, int]) -> IndexLabel:
    if isinstance(label, int):
        return IndexLabel(value=label, upper=False)
    return IndexLabel(name=label, upper=False)


ETA = "eta"
DELTA = "delta"
EPSILON = "eps"
ACCEL = "a"

_KIND_RANK = {EPSILON: 0, ETA: 1, DELTA: 2, ACCEL: 3}
_ARITY = {EPSILON: 4, ETA: 2, DELTA: 2, ACCEL: 1}


@dataclass(frozen=True, slots=True)
class TensorFactor:
    kind: str
    slots: Tuple[IndexLabel, ...]

    def __post_init__(self) -> None:
        if self.kind not in _ARITY:
            raise ValueError(f"unknown tensor kind {self.kind!r}")
        if len(self.slots) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} slots")
        if self.kind in (ETA, DELTA):
            # eta and delta are one metric seen with different variances
            kind = DELTA if self.slots[0].upper != self.slots[1].upper else ETA
            object.__setattr__(self, "kind", kind)

    @property
    def is_metric(self) -> bool:
        return self.kind in (ETA, DELTA)

    @property
    def concrete(self) -> bool:
        return all(slot.value is not None for slot in self.slots)

    def sort_key(self, mask_bound: frozenset = frozenset()) -> tuple:
        return (_KIND_RANK[self.kind], tuple(s.sort_key(mask_bound) for s in self.slots))

    def replace_slot(self, position: int, label: IndexLabel) -> "TensorFactor":
        slots = list(self.slots)
        slots[position] = label
        return TensorFactor(self.kind, tuple(slots))

    def __str__(self) -> str:
        return f"{self.kind}({','.join(str(s) for s in self.slots)})"


def eta(first: IndexLabel, second: IndexLabel) -> TensorFactor:
    return TensorFactor(ETA, (first, second))


def delta(first: IndexLabel, second: IndexLabel) -> TensorFactor:
    return TensorFactor(DELTA, (first, second))


def epsilon(*slots: IndexLabel) -> TensorFactor:
    return TensorFactor(EPSILON, tuple(slots))


def accel(slot: Union[IndexLabel, int]) -> TensorFactor:
    if isinstance(slot, int):
        slot = lo(slot)
    return TensorFactor(ACCEL, (slot,))


Monomial = Tuple[TensorFactor, ...]


def _factor_key(factor: TensorFactor) -> tuple:
    return factor.sort_key()


def _has_symbolic(factors: Iterable[TensorFactor]) -> bool:
    return any(slot.value is None for f in factors for slot in f.slots)


def _occurrences(factors: Sequence[TensorFactor]) -> dict:
    seen: dict = {}
    for i, factor in enumerate(factors):
        for j, slot in enumerate(factor.slots):
            if slot.name is not None:
                seen.setdefault(slot.name, []).append((i, j, slot.upper))
    return seen


def _check_pairing(factors: Sequence[TensorFactor]) -> None:
    for name, places in _occurrences(factors).items():
        if len(places) > 2:
            raise IndexPairingError(
                f"index {name!r} occurs {len(places)} times", _render_monomial(ONE, factors)
            )
        if len(places) == 2 and places[0][2] == places[1][2]:
            raise IndexPairingError(
                f"bound index {name!r} must be once upper and once lower",
                _render_monomial(ONE, factors),
            )


def _component(factor: TensorFactor) -> Scalar:
    slots = factor.slots
    if factor.is_metric:
        first, second = slots
        if first.value != second.value:
            return ZERO
        if first.upper != second.upper:
            return ONE
        return Scalar(SIGNATURE[first.value])
    if factor.kind == EPSILON:
        value = epsilon_component([s.value for s in slots])
        for slot in slots:
            if slot.upper:
                value = value * SIGNATURE[slot.value]
        return value
    raise ValueError(f"{factor.kind} has no numeric component")


def _step(scalar: Scalar, factors: list, fresh: Iterator[int]) -> Optional[list]:
    """Apply one reduction rule; None when the monomial is reduced."""
    for i, factor in enumerate(factors):
        rest = factors[:i] + factors[i + 1:]
        if factor.kind == ACCEL:
            slot = factor.slots[0]
            if slot.value is not None and slot.upper:
                return [(scalar * SIGNATURE[slot.value], rest + [accel(lo(slot.value))])]
            continue
        if factor.concrete:
            value = _component(factor)
            return [(scalar * value, rest)] if value else []
        if factor.kind == EPSILON:
            names = [s.name for s in factor.slots if s.name is not None]
            values = [s.value for s in factor.slots if s.value is not None]
            if len(set(names)) != len(names) or len(set(values)) != len(values):
                return []

    places = _occurrences(factors)
    for i, factor in enumerate(factors):
        if not factor.is_metric:
            continue
        for s, slot in enumerate(factor.slots):
            if slot.name is None:
                continue
            other = factor.slots[1 - s]
            if other.name == slot.name:
                return [(scalar * 4, factors[:i] + factors[i + 1:])]
            partner = [p for p in places[slot.name] if p[0] != i]
            if not partner:
                continue
            j, t, _ = partner[0]
            updated = list(factors)
            updated[j] = factors[j].replace_slot(t, other)
            del updated[i]
            return [(scalar, updated)]

    for i, j in itertools.combinations(range(len(factors)), 2):
        first, second = factors[i], factors[j]
        if first.kind != EPSILON or second.kind != EPSILON:
            continue
        shared = {s.name for s in first.slots} & {s.name for s in second.slots} - {None}
        if not shared:
            continue
        rest = [f for k, f in enumerate(factors) if k not in (i, j)]
        extra: list = []
        lowered = []
        for eps_factor in (first, second):
            slots = []
            for slot in eps_factor.slots:
                if slot.upper:
                    dummy = f"_z{next(fresh)}"
                    extra.append(eta(slot, up(dummy)))
                    slots.append(lo(dummy))
                else:
                    slots.append(slot)
            lowered.append(slots)
        # eps_{x1..x4} eps_{y1..y4} = -det[eta_{x_i y_j}] in Lorentzian signature
        expanded = []
        for perm in itertools.permutations(range(4)):
            sign = -_permutation_sign(perm)
            metrics = [eta(lowered[0][k], lowered[1][perm[k]]) for k in range(4)]
            expanded.append((scalar * sign, rest + extra + metrics))
        return expanded
    return None


def _orient(factor: TensorFactor) -> Tuple[int, TensorFactor]:
    if factor.kind == EPSILON:
        order = sorted(range(4), key=lambda k: factor.slots[k].sort_key())
        sign = _permutation_sign(order)
        return sign, TensorFactor(EPSILON, tuple(factor.slots[k] for k in order))
    if factor.is_metric:
        slots = tuple(sorted(factor.slots, key=lambda s: s.sort_key()))
        return 1, TensorFactor(factor.kind, slots)
    return 1, factor


def _finish(scalar: Scalar, factors: list) -> Tuple[Scalar, Monomial]:
    current = list(factors)
    for _ in range(4):
        places = _occurrences(current)
        bound = frozenset(name for name, p in places.items() if len(p) == 2)
        ordered = sorted(current, key=lambda f: f.sort_key(bound))
        mapping: dict = {}
        for factor in ordered:
            for slot in factor.slots:
                if slot.name in bound and slot.name not in mapping:
                    mapping[slot.name] = f"i{len(mapping)}"
        renamed = []
        for factor in ordered:
            slots = tuple(
                s.renamed(mapping[s.name]) if s.name in mapping else s for s in factor.slots
            )
            sign, oriented = _orient(TensorFactor(factor.kind, slots))
            scalar = scalar * sign
            renamed.append(oriented)
        renamed.sort(key=_factor_key)
        if renamed == current:
            break
        current = renamed
    return scalar, tuple(current)


def _canonical_terms(items: Iterable[Tuple[Monomial, Scalar]]) -> dict:
    out: dict = {}
    fresh = itertools.count()
    work = []
    for factors, scalar in items:
        factors = list(factors)
        _check_pairing(factors)
        work.append((Scalar.of(scalar), factors))
    while work:
        scalar, factors = work.pop()
        if not scalar:
            continue
        replaced = _step(scalar, factors, fresh)
        if replaced is not None:
            work.extend(replaced)
            continue
        scalar, key = _finish(scalar, factors)
        total = out.get(key, ZERO) + scalar
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


def _render_monomial(scalar: Scalar, factors: Sequence[TensorFactor]) -> str:
    if not factors:
        return str(scalar)
    body = "*".join(str(f) for f in factors)
    if scalar == ONE:
        return body
    if scalar == -ONE:
        return f"-{body}"
    return f"{scalar}*{body}"


class CoefficientExpr:
    """
    Formal sum of Gaussian-rational scalars times products of tensor factors,
    always held in canonical form.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, ScalarLike]] = None) -> None:
        items = terms.items() if terms else ()
        self._terms = _canonical_terms(items)

    @classmethod
    def _from_canonical(cls, terms: dict) -> "CoefficientExpr":
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def scalar(cls, value: ScalarLike) -> "CoefficientExpr":
        value = Scalar.of(value)
        return cls._from_canonical({(): value} if value else {})

    @classmethod
    def zero(cls) -> "CoefficientExpr":
        return cls._from_canonical({})

    @classmethod
    def one(cls) -> "CoefficientExpr":
        return cls.scalar(1)

    @classmethod
    def factor(cls, *factors: TensorFactor, coefficient: ScalarLike = 1) -> "CoefficientExpr":
        return cls({tuple(factors): Scalar.of(coefficient)})

    @classmethod
    def accel(cls, mu: int) -> "CoefficientExpr":
        """The lower component a_mu of the acceleration parameter."""
        _check_concrete(mu)
        return cls._from_canonical({(accel(lo(mu)),): ONE})

    def terms(self) -> Iterator[Tuple[Monomial, Scalar]]:
        return iter(sorted(self._terms.items(), key=lambda kv: [_factor_key(f) for f in kv[0]]))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_scalar(self) -> bool:
        return all(not key for key in self._terms)

    def as_scalar(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError(f"coefficient is not a pure scalar: {self}")
        return self._terms.get((), ZERO)

    def _coerce(self, other) -> "CoefficientExpr":
        if isinstance(other, CoefficientExpr):
            return other
        return CoefficientExpr.scalar(other)

    def __add__(self, other) -> "CoefficientExpr":
        other = self._coerce(other)
        out = dict(self._terms)
        for key, value in other._terms.items():
            total = out.get(key, ZERO) + value
            if total:
                out[key] = total
            else:
                out.pop(key, None)
        return CoefficientExpr._from_canonical(out)

    __radd__ = __add__

    def __neg__(self) -> "CoefficientExpr":
        return CoefficientExpr._from_canonical({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "CoefficientExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "CoefficientExpr":
        return self._coerce(other) - self

    def __mul__(self, other) -> "CoefficientExpr":
        if isinstance(other, (Scalar, Fraction, int)):
            value = Scalar.of(other)
            if not value:
                return CoefficientExpr.zero()
            return CoefficientExpr._from_canonical({k: v * value for k, v in self._terms.items()})
        other = self._coerce(other)
        raw: dict = {}
        symbolic = False
        for f1, s1 in self._terms.items():
            for f2, s2 in other._terms.items():
                if not f1:
                    key = f2
                elif not f2:
                    key = f1
                else:
                    key = tuple(sorted(f1 + f2, key=_factor_key))
                    symbolic = symbolic or _has_symbolic(key)
                raw[key] = raw.get(key, ZERO) + s1 * s2
        if symbolic:
            return CoefficientExpr(raw)
        return CoefficientExpr._from_canonical({k: v for k, v in raw.items() if v})

    __rmul__ = __mul__

    def canonical(self) -> "CoefficientExpr":
        return CoefficientExpr(self._terms)

    def substitute_accel(self, values: Mapping[int, ScalarLike]) -> "CoefficientExpr":
        """Replace concrete lower components a_mu by numbers."""
        out: dict = {}
        for factors, scalar in self._terms.items():
            kept = []
            for factor in factors:
                slot = factor.slots[0] if factor.kind == ACCEL else None
                if slot is not None and slot.value is not None and slot.value in values:
                    scalar = scalar * Scalar.of(values[slot.value])
                else:
                    kept.append(factor)
            out[tuple(kept)] = out.get(tuple(kept), ZERO) + scalar
        return CoefficientExpr(out)

    def evaluate(
        self,
        assignment: Optional[Mapping[str, int]] = None,
        accel_values: Optional[Mapping[int, ScalarLike]] = None,
    ) -> Scalar:
        """Brute-force value: bound indices summed over 0..3, free ones assigned."""
        assignment = dict(assignment or {})
        total = ZERO
        for factors, scalar in self._terms.items():
            total = total + scalar * _brute_force(factors, assignment, accel_values)
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, (Scalar, Fraction, int)):
            other = CoefficientExpr.scalar(other)
        if not isinstance(other, CoefficientExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        text = " + ".join(_render_monomial(s, f) for f, s in self.terms())
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"CoefficientExpr({self})"


def _brute_force(
    factors: Sequence[TensorFactor],
    assignment: Mapping[str, int],
    accel_values: Optional[Mapping[int, ScalarLike]],
) -> Scalar:
    places = _occurrences(factors)
    bound = sorted(name for name, p in places.items() if len(p) == 2)
    for name, p in places.items():
        if len(p) == 1 and name not in assignment:
            raise ValueError(f"free index {name!r} has no assigned value")
    total = ZERO
    for values in itertools.product(SPACETIME, repeat=len(bound)):
        local = dict(assignment)
        local.update(zip(bound, values))
        product = ONE
        for factor in factors:
            slots = tuple(
                IndexLabel(value=local[s.name], upper=s.upper) if s.name is not None else s
                for s in factor.slots
            )
            if factor.kind == ACCEL:
                if accel_values is None:
                    raise ValueError("acceleration components are required for evaluation")
                slot = slots[0]
                value = Scalar.of(accel_values.get(slot.value, 0))
                product = product * (value * SIGNATURE[slot.value] if slot.upper else value)
            else:
                product = product * _component(TensorFactor(factor.kind, slots))
            if not product:
                break
        total = total + product
    return total


def canonicalize(expr: CoefficientExpr) -> CoefficientExpr:
    return expr.canonical()
