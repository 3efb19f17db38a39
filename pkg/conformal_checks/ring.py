"""
Exact algebraic function ring over N-particle massless momenta.

Numerators live in a sympy polynomial ring over QQ in the momentum components
k{a}_{j}, the energies w{a}, sigma and the imaginary unit I, reduced by

    w{a}^2 = q_a = k{a}_1^2 + k{a}_2^2 + k{a}_3^2,
    sigma^2 = s = (sum_a p_a)^2,
    I^2 = -1,

so that every variable among w, sigma and I appears with degree at most one.
Denominators are monomials in q_1..q_n and s, which keeps zero testing a plain
check of the reduced numerator.
"""

from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from .exceptions import PointRejected
from .tensors import Scalar, ScalarLike, _fraction


logger = logging.getLogger(__name__)

DEFAULT_DERIVATIVE_LIMIT = 200_000


class AlgebraicRing:
    def __init__(self, particles: int, parameters: Sequence[str] = ()) -> None:
        if particles < 1:
            raise ValueError("at least one particle is required")
        self.particles = particles
        self.parameters = tuple(parameters)
        self.k_names = [f"k{a}_{j}" for a in range(1, particles + 1) for j in (1, 2, 3)]
        self.w_names = [f"w{a}" for a in range(1, particles + 1)]
        names = self.k_names + self.w_names + ["sigma", "I"] + list(self.parameters)
        self.poly_ring = PolyRing(names, QQ, lex)
        gens = self.poly_ring.gens
        self.k_gens = gens[: 3 * particles]
        self.w_gens = gens[3 * particles: 4 * particles]
        self.sigma_gen = gens[4 * particles]
        self.i_gen = gens[4 * particles + 1]
        self.param_gens = dict(zip(self.parameters, gens[4 * particles + 2:]))
        self.index = {name: position for position, name in enumerate(names)}

        self.q_polys = [
            sum((self.k_gens[3 * a + j] ** 2 for j in range(3)), self.poly_ring.zero)
            for a in range(particles)
        ]
        energy = sum(self.w_gens, self.poly_ring.zero)
        momentum = [sum((self.k_gens[3 * a + j] for a in range(particles)), self.poly_ring.zero) for j in range(3)]
        # relations: (variable position, polynomial that replaces its square)
        self._relations: List[Tuple[int, object]] = [
            (4 * particles + 1, -self.poly_ring.one),
        ]
        self._relations.extend((3 * particles + a, self.q_polys[a]) for a in range(particles))
        self.s_poly = self.reduce(energy ** 2 - sum((c ** 2 for c in momentum), self.poly_ring.zero))
        self._relations.insert(1, (4 * particles, self.s_poly))
        self._ds_cache: Dict[int, RingElement] = {}
        self._den_cache: Dict[Tuple[int, ...], object] = {}
        self._derivatives: Dict[tuple, RingElement] = {}
        self.derivative_limit = DEFAULT_DERIVATIVE_LIMIT
        logger.debug("Built algebraic ring for %d particle(s) with %d variables", particles, len(names))

    # -- reduction ------------------------------------------------------

    def reduce(self, p):
        """Apply the square relations until no w, sigma or I has degree >= 2."""
        while True:
            plain: Dict[tuple, object] = {}
            rewritten = []
            for monom, coeff in p.items():
                exponents = list(monom)
                factor = None
                for position, square in self._relations:
                    e = exponents[position]
                    if e >= 2:
                        exponents[position] = e % 2
                        power = square ** (e // 2)
                        factor = power if factor is None else factor * power
                if factor is None:
                    plain[monom] = coeff
                else:
                    rewritten.append(self.poly_ring.from_dict({tuple(exponents): coeff}) * factor)
            p = self.poly_ring.from_dict(plain) if plain else self.poly_ring.zero
            for part in rewritten:
                p = p + part
            if not rewritten:
                return p

    # -- constructors -----------------------------------------------------

    def element(self, num, den: Optional[Tuple[int, ...]] = None) -> "RingElement":
        den = den or (0,) * (self.particles + 1)
        return RingElement(self, self.reduce(num), tuple(den))

    @property
    def zero(self) -> "RingElement":
        return RingElement(self, self.poly_ring.zero, (0,) * (self.particles + 1))

    @property
    def one(self) -> "RingElement":
        return self.scalar(1)

    def scalar(self, value: ScalarLike) -> "RingElement":
        value = Scalar.of(value)
        num = self.poly_ring(QQ(value.re.numerator, value.re.denominator))
        if value.im:
            num = num + self.i_gen * QQ(value.im.numerator, value.im.denominator)
        return RingElement(self, num, (0,) * (self.particles + 1))

    def k(self, a: int, j: int) -> "RingElement":
        """Momentum component j (1..3) of particle a (1..n)."""
        return self.element(self.k_gens[3 * (a - 1) + (j - 1)])

    def omega(self, a: int) -> "RingElement":
        return self.element(self.w_gens[a - 1])

    def parameter(self, name: str) -> "RingElement":
        return self.element(self.param_gens[name])

    def q(self, a: int) -> "RingElement":
        return self.element(self.q_polys[a - 1])

    def s(self) -> "RingElement":
        return self.element(self.s_poly)

    def _den(self, position: int, exponent: int = 1) -> Tuple[int, ...]:
        den = [0] * (self.particles + 1)
        den[position] = exponent
        return tuple(den)

    def omega_power(self, a: int, k: int) -> "RingElement":
        """w_a^k, with w^-1 = w / q."""
        if k >= 0:
            return self.element(self.w_gens[a - 1] ** k)
        n = -k
        return self.element(self.w_gens[a - 1] ** n, self._den(a - 1, n))

    def sigma_power(self, k: int) -> "RingElement":
        """sigma^k, with sigma^-1 = sigma / s."""
        if k >= 0:
            return self.element(self.sigma_gen ** k)
        n = -k
        return self.element(self.sigma_gen ** n, self._den(self.particles, n))

    def denominator_poly(self, den: Tuple[int, ...]):
        cached = self._den_cache.get(den)
        if cached is None:
            cached = self._den_cache[den] = self._denominator_poly(den)
        return cached

    def _denominator_poly(self, den: Tuple[int, ...]):
        out = self.poly_ring.one
        for a, e in enumerate(den[:-1]):
            if e:
                out = out * self.q_polys[a] ** e
        if den[-1]:
            out = self.reduce(out * self.s_poly ** den[-1])
        return out

    # -- differentiation ----------------------------------------------------

    def total_diff(self, p, slot: int) -> "RingElement":
        """d p / d k_slot for a numerator polynomial, through w(k) and sigma(k)."""
        a = slot // 3
        kvar = self.k_gens[slot]
        w = self.w_gens[a]
        out = self.element(p.diff(kvar))
        dw = p.diff(w)
        if dw:
            # dw/dk = k / w = k w / q
            out = out + self.element(dw * kvar * w, self._den(a))
        dsigma = p.diff(self.sigma_gen)
        if dsigma:
            # dsigma/dk = (ds/dk) / (2 sigma) = (ds/dk) sigma / (2 s)
            out = out + self.element(dsigma * self.sigma_gen * QQ(1, 2), self._den(self.particles)) * self.ds(slot)
        return out

    def derivative(self, element: "RingElement", alpha: Tuple[int, ...]) -> "RingElement":
        """Mixed partial derivative, memoized per (numerator, denominator, multi-index)."""
        if not element.num or not any(alpha):
            return element
        key = (element.num, element.den, alpha)
        cached = self._derivatives.get(key)
        if cached is not None:
            return cached
        slot = next(i for i, times in enumerate(alpha) if times)
        rest = alpha[:slot] + (alpha[slot] - 1,) + alpha[slot + 1:]
        cached = self.derivative(element.diff(slot), rest)
        if len(self._derivatives) >= self.derivative_limit:
            logger.debug("Clearing %d cached derivatives", len(self._derivatives))
            self._derivatives.clear()
        self._derivatives[key] = cached
        return cached

    def ds(self, slot: int) -> "RingElement":
        cached = self._ds_cache.get(slot)
        if cached is None:
            cached = self.total_diff(self.s_poly, slot)
            self._ds_cache[slot] = cached
        return cached

    # -- evaluation --------------------------------------------------------

    def point(self, momenta: Sequence[Sequence[ScalarLike]], energies: Optional[Sequence[ScalarLike]] = None) -> Dict[str, Fraction]:
        """A valuation from integer or rational momenta whose norms are rational."""
        if len(momenta) != self.particles:
            raise ValueError(f"expected {self.particles} momenta, got {len(momenta)}")
        values: Dict[str, Fraction] = {}
        for a, vector in enumerate(momenta, start=1):
            for j, component in enumerate(vector, start=1):
                values[f"k{a}_{j}"] = _fraction(component)
            norm = sum(_fraction(c) ** 2 for c in vector)
            energy = _fraction(energies[a - 1]) if energies else _rational_sqrt(norm)
            if energy is None or energy * energy != norm:
                raise PointRejected(f"particle {a} momentum has no rational energy")
            values[f"w{a}"] = energy
        return values


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num = _isqrt_exact(value.numerator)
    den = _isqrt_exact(value.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _isqrt_exact(n: int) -> Optional[int]:
    root = math.isqrt(n)
    return root if root * root == n else None


class RingElement:
    """num / (prod q_a^e_a * s^e_s) with a reduced numerator."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: AlgebraicRing, num, den: Tuple[int, ...]) -> None:
        self.ring = ring
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def _aligned(self, other: "RingElement"):
        den = tuple(max(x, y) for x, y in zip(self.den, other.den))
        ring = self.ring
        left = self.num
        right = other.num
        if den != self.den:
            left = ring.reduce(left * ring.denominator_poly(tuple(d - e for d, e in zip(den, self.den))))
        if den != other.den:
            right = ring.reduce(right * ring.denominator_poly(tuple(d - e for d, e in zip(den, other.den))))
        return left, right, den

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            return other
        return self.ring.scalar(other)

    def __add__(self, other) -> "RingElement":
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        left, right, den = self._aligned(other)
        return RingElement(self.ring, left + right, den)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, -self.num, self.den)

    def __sub__(self, other) -> "RingElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RingElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RingElement":
        other = self._coerce(other)
        if not self.num or not other.num:
            return self.ring.zero
        den = tuple(x + y for x, y in zip(self.den, other.den))
        return RingElement(self.ring, self.ring.reduce(self.num * other.num), den)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RingElement":
        out = self.ring.one
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Scalar)):
            other = self.ring.scalar(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def cancel(self) -> "RingElement":
        """Divide common q_a or s factors out of the numerator where exact."""
        ring = self.ring
        num = self.num
        den = list(self.den)
        divisors = list(ring.q_polys) + [ring.s_poly]
        for position, divisor in enumerate(divisors):
            while den[position] and num:
                quotient, remainder = divmod(num, divisor)
                if remainder:
                    break
                num = ring.reduce(quotient)
                den[position] -= 1
        if not num:
            den = [0] * len(den)
        return RingElement(ring, num, tuple(den))

    def diff(self, slot: int) -> "RingElement":
        """Total derivative by the momentum component with flat index ``slot``."""
        ring = self.ring
        if not self.num:
            return ring.zero
        numerator = ring.element(self.num)
        result = ring.total_diff(self.num, slot)
        a = slot // 3
        if self.den[a]:
            # d log q_a = 2 k / q_a
            log_q = ring.element(2 * ring.k_gens[slot] * self.den[a], ring._den(a))
            result = result - numerator * log_q
        if self.den[-1]:
            log_s = ring.ds(slot) * ring.element(ring.poly_ring(self.den[-1]), ring._den(ring.particles))
            result = result - numerator * log_s
        return (result * RingElement(ring, ring.poly_ring.one, self.den)).cancel()

    def substitute(self, values: Mapping[str, ScalarLike]) -> "RingElement":
        """Replace parameter variables by exact numbers."""
        ring = self.ring
        positions = {ring.index[name]: Scalar.of(value) for name, value in values.items()}
        out = ring.poly_ring.zero
        for monom, coeff in self.num.items():
            exponents = list(monom)
            factor = Scalar(_fraction(coeff))
            for position, value in positions.items():
                e = exponents[position]
                if e:
                    for _ in range(e):
                        factor = factor * value
                    exponents[position] = 0
            if not factor:
                continue
            term = ring.poly_ring.from_dict({tuple(exponents): QQ(factor.re.numerator, factor.re.denominator)})
            out = out + term
            if factor.im:
                out = out + ring.poly_ring.from_dict({tuple(exponents): QQ(factor.im.numerator, factor.im.denominator)}) * ring.i_gen
        return RingElement(ring, ring.reduce(out), self.den)

    def parameter_coefficients(self) -> Dict[tuple, Dict[tuple, Fraction]]:
        """Numerator grouped by monomials in the non-parameter variables."""
        ring = self.ring
        split = 4 * ring.particles + 2
        groups: Dict[tuple, Dict[tuple, Fraction]] = {}
        for monom, coeff in self.num.items():
            groups.setdefault(monom[:split], {})[monom[split:]] = _fraction(coeff)
        return groups

    def evaluate(self, point: Mapping[str, Fraction], sigma: Optional[Fraction] = None) -> Scalar:
        """Exact value at a valuation of the k and w variables."""
        ring = self.ring
        if sigma is None:
            sigma = _rational_sqrt(_evaluate_poly(ring, ring.s_poly, point, None).re)
        den = _evaluate_poly(ring, ring.denominator_poly(self.den), point, sigma)
        if not den:
            raise PointRejected("denominator vanishes at the evaluation point")
        return _evaluate_poly(ring, self.num, point, sigma) / den

    def __str__(self) -> str:
        text = str(self.num.as_expr())
        if not any(self.den):
            return text
        parts = [f"q{a + 1}^{e}" for a, e in enumerate(self.den[:-1]) if e]
        if self.den[-1]:
            parts.append(f"s^{self.den[-1]}")
        return f"({text})/({'*'.join(parts)})"

    def __repr__(self) -> str:
        return f"RingElement({self})"


def _evaluate_poly(ring: AlgebraicRing, p, point: Mapping[str, Fraction], sigma: Optional[Fraction]) -> Scalar:
    names = ring.poly_ring.symbols
    total = Scalar()
    for monom, coeff in p.items():
        value = Scalar(_fraction(coeff))
        for position, e in enumerate(monom):
            if not e:
                continue
            name = str(names[position])
            if name == "I":
                base = Scalar(0, 1)
            elif name == "sigma":
                if sigma is None:
                    raise PointRejected("mass is irrational at the evaluation point")
                base = Scalar(sigma)
            elif name in point:
                base = Scalar(point[name])
            else:
                raise PointRejected(f"no value for {name}")
            for _ in range(e):
                value = value * base
        total = total + value
    return total


PYTHAGOREAN_QUADRUPLES = (
    (0, 0, 1, 1),
    (0, 3, 4, 5),
    (1, 2, 2, 3),
    (2, 3, 6, 7),
    (1, 4, 8, 9),
    (4, 4, 7, 9),
    (2, 6, 9, 11),
    (6, 6, 7, 11),
    (3, 4, 12, 13),
    (2, 5, 14, 15),
    (2, 10, 11, 15),
)


def random_null_momentum(rng) -> Tuple[Fraction, Fraction, Fraction]:
    """A rational 3-momentum with rational norm, random orientation and scale."""
    x, y, z, _ = rng.choice(PYTHAGOREAN_QUADRUPLES)
    components = [x, y, z]
    rng.shuffle(components)
    scale = Fraction(rng.randint(1, 4), rng.randint(1, 3))
    return tuple(scale * c * rng.choice((-1, 1)) for c in components)


def random_point(ring: AlgebraicRing, rng, attempts: int = 50) -> Dict[str, Fraction]:
    """Random on-shell point with nonvanishing energies and, for n >= 2, s != 0."""
    for _ in range(attempts):
        momenta = [random_null_momentum(rng) for _ in range(ring.particles)]
        point = ring.point(momenta)
        if ring.particles >= 2 and not _evaluate_poly(ring, ring.s_poly, point, None):
            continue
        return point
    raise PointRejected("no admissible random point found")


def random_test_function(ring: AlgebraicRing, rng, terms: int = 3, degree: int = 3) -> RingElement:
    """Random polynomial in the momentum components with small integer coefficients."""
    out = ring.zero
    for _ in range(terms):
        monomial = ring.scalar(rng.choice((-3, -2, -1, 1, 2, 3)))
        for _ in range(rng.randint(0, degree)):
            a = rng.randint(1, ring.particles)
            monomial = monomial * ring.k(a, rng.randint(1, 3))
        out = out + monomial
    return out


def momentum_slots(particles: int) -> List[Tuple[int, int]]:
    return list(itertools.product(range(1, particles + 1), (1, 2, 3)))
