"""
The fifteen-generator conformal Lie algebra: basis, structure table, bracket
evaluation and exhaustive Jacobi enumeration.
"""

from __future__ import annotations

import functools
import itertools
import logging
import re
import time
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .tensors import SIGNATURE, CoefficientExpr, Scalar, ScalarLike, eta, lo


logger = logging.getLogger(__name__)


# Normal-ordering rank of each generator family; MPower letters sit at rank 5.
TAG_RANK = {"D": 0, "J": 1, "P": 2, "C": 4}
TAG_ARITY = {"D": 0, "J": 2, "P": 1, "C": 1}
CONFORMAL_WEIGHT = {"D": 0, "J": 0, "P": 1, "C": -1}

_NAME_RE = re.compile(r"^\s*([PJDC])\s*_?\s*\(?\s*([0-3]?)\s*,?\s*([0-3]?)\s*\)?\s*$")


@dataclass(frozen=True, slots=True)
class Generator:
    tag: str
    indices: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.tag not in TAG_ARITY:
            raise ValueError(f"unknown generator tag {self.tag!r}")
        object.__setattr__(self, "indices", tuple(self.indices))
        if len(self.indices) != TAG_ARITY[self.tag]:
            raise ValueError(f"{self.tag} takes {TAG_ARITY[self.tag]} indices")
        if any(i not in (0, 1, 2, 3) for i in self.indices):
            raise ValueError(f"generator index out of range 0..3: {self.indices}")
        if self.tag == "J" and not self.indices[0] < self.indices[1]:
            raise ValueError("J is stored with mu < nu; use signed_lorentz() for other orders")

    @property
    def name(self) -> str:
        return self.tag + "".join(str(i) for i in self.indices)

    @property
    def rank(self) -> int:
        return TAG_RANK[self.tag]

    @property
    def weight(self) -> int:
        return CONFORMAL_WEIGHT[self.tag]

    def sort_key(self) -> tuple:
        return (TAG_RANK[self.tag], self.indices)

    @classmethod
    def parse(cls, text: str) -> "Generator":
        """Parse names such as ``P0``, ``J01``, ``J_(0,1)``, ``D`` or ``C3``."""
        match = _NAME_RE.match(text)
        if not match:
            raise ValueError(f"cannot parse generator {text!r}")
        tag = match.group(1)
        indices = tuple(int(g) for g in match.groups()[1:] if g)
        return cls(tag, indices)

    def __lt__(self, other: "Generator") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.name


def P(mu: int) -> Generator:
    return Generator("P", (mu,))


def C(mu: int) -> Generator:
    return Generator("C", (mu,))


def J(mu: int, nu: int) -> Generator:
    return Generator("J", (mu, nu))


D = Generator("D")

BASIS: Tuple[Generator, ...] = (
    *(P(mu) for mu in range(4)),
    *(J(mu, nu) for mu, nu in itertools.combinations(range(4), 2)),
    D,
    *(C(mu) for mu in range(4)),
)


class AlgebraElement:
    """A formal linear combination of basis generators with tensor coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Generator, CoefficientExpr]] = None) -> None:
        self._terms: Dict[Generator, CoefficientExpr] = {}
        for generator, coefficient in (terms or {}).items():
            self._accumulate(generator, _coefficient(coefficient))

    def _accumulate(self, generator: Generator, coefficient: CoefficientExpr) -> None:
        total = self._terms.get(generator, CoefficientExpr.zero()) + coefficient
        if total.is_zero():
            self._terms.pop(generator, None)
        else:
            self._terms[generator] = total

    @classmethod
    def of(cls, generator: Generator, coefficient: ScalarLike = 1) -> "AlgebraElement":
        return cls({generator: _coefficient(coefficient)})

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    def terms(self) -> List[Tuple[Generator, CoefficientExpr]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, generator: Generator) -> CoefficientExpr:
        return self._terms.get(generator, CoefficientExpr.zero())

    def generators(self) -> Iterator[Generator]:
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = AlgebraElement(self._terms)
        for generator, coefficient in other._terms.items():
            out._accumulate(generator, coefficient)
        return out

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, factor) -> "AlgebraElement":
        factor = _coefficient(factor)
        out = AlgebraElement()
        for generator, coefficient in self._terms.items():
            out._accumulate(generator, coefficient * factor)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for generator, coefficient in self.terms():
            if coefficient == 1:
                parts.append(generator.name)
            elif coefficient == -1:
                parts.append(f"-{generator.name}")
            elif len(coefficient) > 1:
                parts.append(f"({coefficient})*{generator.name}")
            else:
                parts.append(f"{coefficient}*{generator.name}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"


def _coefficient(value) -> CoefficientExpr:
    if isinstance(value, CoefficientExpr):
        return value
    return CoefficientExpr.scalar(value)


def signed_lorentz(mu: int, nu: int) -> AlgebraElement:
    """J(mu, nu) for any index order: J(nu, mu) = -J(mu, nu), J(mu, mu) = 0."""
    if mu == nu:
        return AlgebraElement.zero()
    if mu < nu:
        return AlgebraElement.of(J(mu, nu))
    return AlgebraElement.of(J(nu, mu), -1)


# Commutation rules (left generator slots "a", "b"; right generator slots "c", "d").
# Each term is (coefficient, metric slot pair or None, result tag, result slots).
BRACKET_RULES: Mapping[Tuple[str, str], Tuple[tuple, ...]] = MappingProxyType({
    ("J", "P"): (
        (1, ("b", "c"), "P", ("a",)),
        (-1, ("a", "c"), "P", ("b",)),
    ),
    ("J", "J"): (
        (1, ("b", "c"), "J", ("a", "d")),
        (1, ("a", "d"), "J", ("b", "c")),
        (-1, ("a", "c"), "J", ("b", "d")),
        (-1, ("b", "d"), "J", ("a", "c")),
    ),
    ("D", "P"): ((1, None, "P", ("c",)),),
    ("P", "C"): (
        (-2, ("a", "c"), "D", ()),
        (-2, None, "J", ("a", "c")),
    ),
    ("J", "C"): (
        (1, ("b", "c"), "C", ("a",)),
        (-1, ("a", "c"), "C", ("b",)),
    ),
    ("D", "C"): ((-1, None, "C", ("c",)),),
    ("P", "P"): (),
    ("D", "J"): (),
    ("C", "C"): (),
    ("D", "D"): (),
    ("P", "J"): None,
    ("J", "D"): None,
})


def _apply_rule(rule: Tuple[tuple, ...], left: Generator, right: Generator) -> AlgebraElement:
    slots = dict(zip("ab", left.indices))
    slots.update(zip("cd", right.indices))
    out = AlgebraElement.zero()
    for coefficient, metric, tag, result_slots in rule:
        factor = CoefficientExpr.scalar(coefficient)
        if metric is not None:
            # concrete eta factors collapse to +1, -1 or 0 on canonicalization
            first, second = metric
            factor = factor * CoefficientExpr.factor(eta(lo(slots[first]), lo(slots[second])))
        if factor.is_zero():
            continue
        indices = tuple(slots[s] for s in result_slots)
        if tag == "J":
            term = signed_lorentz(*indices)
        else:
            term = AlgebraElement.of(Generator(tag, indices))
        out = out + term.scale(factor)
    return out


def _rule_bracket(left: Generator, right: Generator) -> AlgebraElement:
    rule = BRACKET_RULES.get((left.tag, right.tag))
    if rule is not None:
        return _apply_rule(rule, left, right)
    reverse = BRACKET_RULES.get((right.tag, left.tag))
    if reverse is None:
        raise KeyError(f"no commutation rule for ({left.tag}, {right.tag})")
    return -_apply_rule(reverse, right, left)


class StructureTable:
    """Immutable map from ordered basis pairs to their normalized bracket."""

    def __init__(self, entries: Mapping[Tuple[Generator, Generator], AlgebraElement], label: str = "conformal") -> None:
        self._entries = MappingProxyType(dict(entries))
        self.label = label

    @classmethod
    def conformal(cls) -> "StructureTable":
        entries = {}
        for left, right in itertools.product(BASIS, repeat=2):
            entries[(left, right)] = _rule_bracket(left, right)
        logger.debug("Built conformal structure table with %d entries", len(entries))
        return cls(entries)

    def __reduce__(self):
        return StructureTable, (dict(self._entries), self.label)

    def __call__(self, left: Generator, right: Generator) -> AlgebraElement:
        return self._entries[(left, right)]

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def with_override(self, left: Generator, right: Generator, value: AlgebraElement) -> "StructureTable":
        """A copy with one pair replaced; the reversed pair is kept antisymmetric."""
        entries = dict(self._entries)
        entries[(left, right)] = value
        entries[(right, left)] = -value
        logger.warning("Structure table entry (%s, %s) overridden with %s", left, right, value)
        return StructureTable(entries, label=f"{self.label}+override({left},{right})")

    def antisymmetry_defects(self) -> List[Tuple[Generator, Generator]]:
        return [
            (left, right)
            for left, right in itertools.combinations(BASIS, 2)
            if not (self(left, right) + self(right, left)).is_zero()
        ]


@functools.lru_cache(maxsize=1)
def default_table() -> StructureTable:
    return StructureTable.conformal()


def bracket_basis(g1: Generator, g2: Generator, table: Optional[StructureTable] = None) -> AlgebraElement:
    return (table or default_table())(g1, g2)


def bracket(a: AlgebraElement, b: AlgebraElement, table: Optional[StructureTable] = None) -> AlgebraElement:
    table = table or default_table()
    out = AlgebraElement.zero()
    for left, left_coefficient in a.terms():
        for right, right_coefficient in b.terms():
            value = table(left, right)
            if not value.is_zero():
                out = out + value.scale(left_coefficient * right_coefficient)
    return out


def jacobi_residual(
    g1: Generator, g2: Generator, g3: Generator, table: Optional[StructureTable] = None
) -> AlgebraElement:
    """((g1,g2),g3) - (g1,(g2,g3)) + (g2,(g1,g3))."""
    table = table or default_table()
    x, y, z = (AlgebraElement.of(g) for g in (g1, g2, g3))
    return (
        bracket(bracket(x, y, table), z, table)
        - bracket(x, bracket(y, z, table), table)
        + bracket(y, bracket(x, z, table), table)
    )


@dataclass(frozen=True)
class JacobiOutcome:
    triple: Tuple[Generator, Generator, Generator]
    residual: AlgebraElement
    duration_ms: float
    degenerate: bool = False

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


def enumerate_jacobi(
    table: Optional[StructureTable] = None, include_degenerate: bool = True
) -> List[JacobiOutcome]:
    """Jacobi residuals for all 455 distinct triples, then all (g, g, h) triples."""
    table = table or default_table()
    triples: List[Tuple[Tuple[Generator, ...], bool]] = [
        (triple, False) for triple in itertools.combinations(BASIS, 3)
    ]
    if include_degenerate:
        triples.extend(((g, g, h), True) for g in BASIS for h in BASIS)
    outcomes = []
    for triple, degenerate in triples:
        started = time.perf_counter()
        residual = jacobi_residual(*triple, table=table)
        elapsed = (time.perf_counter() - started) * 1000.0
        outcomes.append(JacobiOutcome(triple, residual, elapsed, degenerate))
    failures = sum(1 for outcome in outcomes if not outcome.ok)
    logger.info("Enumerated %d Jacobi triples, %d nonzero residuals", len(outcomes), failures)
    return outcomes


def lorentz_action(mu: int, nu: int, generator: Generator) -> AlgebraElement:
    """
    (J_{mu nu}, T) derived from the index structure of T alone: every lower index
    rho of T contributes eta_{nu rho} T[rho -> mu] - eta_{mu rho} T[rho -> nu].
    """
    out = AlgebraElement.zero()
    for position, rho in enumerate(generator.indices):
        for target, other, sign in ((mu, nu, 1), (nu, mu, -1)):
            metric = CoefficientExpr.factor(eta(lo(other), lo(rho))) * sign
            if metric.is_zero():
                continue
            indices = list(generator.indices)
            indices[position] = target
            if generator.tag == "J":
                term = signed_lorentz(*indices)
            else:
                term = AlgebraElement.of(Generator(generator.tag, tuple(indices)))
            out = out + term.scale(metric)
    return out


def weight_defects(table: Optional[StructureTable] = None) -> List[Tuple[Generator, AlgebraElement]]:
    """Generators g with (D, g) != weight(g) * g."""
    table = table or default_table()
    return [
        (g, table(D, g))
        for g in BASIS
        if table(D, g) != AlgebraElement.of(g, g.weight)
    ]


def lorentz_defects(table: Optional[StructureTable] = None) -> List[Tuple[Generator, Generator]]:
    table = table or default_table()
    defects = []
    for j in (g for g in BASIS if g.tag == "J"):
        for g in BASIS:
            if table(j, g) != lorentz_action(j.indices[0], j.indices[1], g):
                defects.append((j, g))
    return defects


def span_defects(table: Optional[StructureTable] = None) -> List[Tuple[Generator, Generator]]:
    """J brackets that leave the P-span or the C-span."""
    table = table or default_table()
    defects = []
    for j in (g for g in BASIS if g.tag == "J"):
        for g in (g for g in BASIS if g.tag in ("P", "C")):
            if any(h.tag != g.tag for h in table(j, g).generators()):
                defects.append((j, g))
    return defects


def parse_element(text: str) -> AlgebraElement:
    """Sum of generator names with optional integer coefficients, e.g. ``P0 + 2*C1 - D``."""
    out = AlgebraElement.zero()
    for sign, coefficient, name in re.findall(r"([+-]?)\s*(?:(\d+)\s*\*)?\s*([PJDC][0-3]*)", text):
        value = int(coefficient or 1) * (-1 if sign == "-" else 1)
        out = out + AlgebraElement.of(Generator.parse(name), value)
    return out


def as_scalar_map(element: AlgebraElement) -> Dict[str, Scalar]:
    return {g.name: c.as_scalar() for g, c in element.terms()}


def iter_pairs() -> Iterable[Tuple[Generator, Generator]]:
    return itertools.combinations(BASIS, 2)


# Reference brackets, written out per family with plain integer metric
# components. Kept apart from BRACKET_RULES so the table can be audited
# against a second transcription of the commutation relations.

def _metric(mu: int, nu: int) -> int:
    return SIGNATURE[mu] if mu == nu else 0


def _vector_rotation(tag: str, mu: int, nu: int, rho: int) -> AlgebraElement:
    """(J_{mu nu}, T_rho) = eta_{nu rho} T_mu - eta_{mu rho} T_nu."""
    out = AlgebraElement.zero()
    if _metric(nu, rho):
        out = out + AlgebraElement.of(Generator(tag, (mu,)), _metric(nu, rho))
    if _metric(mu, rho):
        out = out - AlgebraElement.of(Generator(tag, (nu,)), _metric(mu, rho))
    return out


def _lorentz_lorentz(left: Tuple[int, ...], right: Tuple[int, ...]) -> AlgebraElement:
    (mu, nu), (rho, sigma) = left, right
    terms = (
        (_metric(nu, rho), (mu, sigma)),
        (_metric(mu, sigma), (nu, rho)),
        (-_metric(mu, rho), (nu, sigma)),
        (-_metric(nu, sigma), (mu, rho)),
    )
    out = AlgebraElement.zero()
    for factor, indices in terms:
        if factor:
            out = out + signed_lorentz(*indices).scale(factor)
    return out


def _translation_special(left: Tuple[int, ...], right: Tuple[int, ...]) -> AlgebraElement:
    (mu,), (nu,) = left, right
    out = signed_lorentz(mu, nu).scale(-2)
    if _metric(mu, nu):
        out = out + AlgebraElement.of(D, -2 * _metric(mu, nu))
    return out


REFERENCE_BRACKETS = MappingProxyType({
    ("J", "P"): lambda l, r: _vector_rotation("P", l[0], l[1], r[0]),
    ("J", "C"): lambda l, r: _vector_rotation("C", l[0], l[1], r[0]),
    ("J", "J"): _lorentz_lorentz,
    ("D", "P"): lambda l, r: AlgebraElement.of(P(r[0])),
    ("D", "C"): lambda l, r: AlgebraElement.of(C(r[0]), -1),
    ("P", "C"): _translation_special,
})


def reference_bracket(left: Generator, right: Generator) -> AlgebraElement:
    """(left, right) from REFERENCE_BRACKETS; families not listed commute."""
    build = REFERENCE_BRACKETS.get((left.tag, right.tag))
    if build is not None:
        return build(left.indices, right.indices)
    build = REFERENCE_BRACKETS.get((right.tag, left.tag))
    if build is not None:
        return -build(right.indices, left.indices)
    return AlgebraElement.zero()
