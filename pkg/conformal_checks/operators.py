"""
Differential operators with coefficients in an AlgebraicRing.

An operator is a finite sum of ring coefficients times mixed partial
derivatives in the momentum components, always written with the coefficient on
the left of the derivative.
"""

from __future__ import annotations

import logging
from math import comb
from typing import Dict, Iterator, Optional, Tuple

from .ring import AlgebraicRing, RingElement
from .tensors import Scalar, ScalarLike


logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def _sub_indices(alpha: MultiIndex) -> Iterator[MultiIndex]:
    """All gamma <= alpha componentwise."""
    if not alpha:
        yield ()
        return
    for head in range(alpha[0] + 1):
        for tail in _sub_indices(alpha[1:]):
            yield (head,) + tail


def _binomial(alpha: MultiIndex, gamma: MultiIndex) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= comb(a, g)
    return out


class DiffOperator:
    __slots__ = ("ring", "_terms")

    def __init__(self, ring: AlgebraicRing, terms: Optional[Dict[MultiIndex, RingElement]] = None) -> None:
        self.ring = ring
        self._terms: Dict[MultiIndex, RingElement] = {}
        for alpha, coefficient in (terms or {}).items():
            self._accumulate(tuple(alpha), coefficient)

    @property
    def width(self) -> int:
        return 3 * self.ring.particles

    def _accumulate(self, alpha: MultiIndex, coefficient: RingElement) -> None:
        if coefficient.is_zero():
            return
        current = self._terms.get(alpha)
        total = coefficient if current is None else current + coefficient
        if total.is_zero():
            self._terms.pop(alpha, None)
        else:
            self._terms[alpha] = total

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring: AlgebraicRing) -> "DiffOperator":
        return cls(ring)

    @classmethod
    def multiplication(cls, element: RingElement) -> "DiffOperator":
        ring = element.ring
        return cls(ring, {(0,) * (3 * ring.particles): element})

    @classmethod
    def constant(cls, ring: AlgebraicRing, value: ScalarLike) -> "DiffOperator":
        return cls.multiplication(ring.scalar(value))

    @classmethod
    def derivative(cls, ring: AlgebraicRing, a: int, j: int, order: int = 1) -> "DiffOperator":
        """(d / dk{a}_{j})^order."""
        alpha = [0] * (3 * ring.particles)
        alpha[3 * (a - 1) + (j - 1)] = order
        return cls(ring, {tuple(alpha): ring.one})

    # -- algebra ----------------------------------------------------------

    def terms(self):
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def order(self) -> int:
        return max((sum(alpha) for alpha in self._terms), default=0)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        out = DiffOperator(self.ring, self._terms)
        for alpha, coefficient in other._terms.items():
            out._accumulate(alpha, coefficient)
        return out

    def __neg__(self) -> "DiffOperator":
        return self.scale(-1)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scale(self, factor) -> "DiffOperator":
        """Left multiplication by a scalar or a ring element."""
        if not isinstance(factor, RingElement):
            factor = self.ring.scalar(factor)
        return DiffOperator(self.ring, {alpha: factor * c for alpha, c in self._terms.items()})

    def _leibniz(self, other: "DiffOperator", out: "DiffOperator", sign: int, with_plain: bool) -> None:
        """Accumulate sign * (self o other) into ``out``; ``with_plain`` keeps the gamma = 0 terms."""
        for alpha, a_coeff in self._terms.items():
            for beta, b_coeff in other._terms.items():
                for gamma in _sub_indices(alpha):
                    if not with_plain and not any(gamma):
                        continue
                    derived = _differentiate(b_coeff, gamma)
                    if derived.is_zero():
                        continue
                    weight = sign * _binomial(alpha, gamma)
                    target = tuple(a - g + b for a, g, b in zip(alpha, gamma, beta))
                    out._accumulate(target, a_coeff * derived * weight)

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """(self o other), by the Leibniz rule on every coefficient of ``other``."""
        out = DiffOperator(self.ring)
        self._leibniz(other, out, 1, with_plain=True)
        return out

    __matmul__ = compose

    def commutator(self, other: "DiffOperator") -> "DiffOperator":
        """[self, other] from the derivative terms only; the plain products cancel."""
        out = DiffOperator(self.ring)
        self._leibniz(other, out, 1, with_plain=False)
        other._leibniz(self, out, -1, with_plain=False)
        return out

    def normalized_bracket(self, other: "DiffOperator") -> "DiffOperator":
        """-i [self, other]."""
        return self.commutator(other).scale(Scalar(0, -1))

    def apply(self, f: RingElement) -> RingElement:
        out = self.ring.zero
        for alpha, coefficient in self._terms.items():
            out = out + coefficient * _differentiate(f, alpha)
        return out

    def substitute(self, values) -> "DiffOperator":
        return DiffOperator(self.ring, {alpha: c.substitute(values) for alpha, c in self._terms.items()})

    def cancel(self) -> "DiffOperator":
        return DiffOperator(self.ring, {alpha: c.cancel() for alpha, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for alpha, coefficient in self.terms():
            derivative = "*".join(
                f"d({self.ring.k_names[i]})" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(alpha)
                if e
            )
            parts.append(f"[{coefficient}]" + (f"*{derivative}" if derivative else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"DiffOperator({self})"


def _differentiate(element: RingElement, alpha: MultiIndex) -> RingElement:
    if not any(alpha):
        return element
    return element.ring.derivative(element, alpha)
