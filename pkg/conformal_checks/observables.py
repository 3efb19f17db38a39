"""
Derived observables (mass, position, spin, Pauli-Lubanski vector, accelerated
frame generator) built against any backend that can multiply and bracket.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Dict, Tuple

from .algebra import D as DILATATION
from .algebra import AlgebraElement, Generator, signed_lorentz
from .tensors import SIGNATURE, CoefficientExpr, Scalar, epsilon, up
from .wordalgebra import NCPolynomial, WordAlgebra, default_algebra


logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# lower components a_mu of the acceleration parameter
Acceleration = Callable[[int], object]


class ObservableAlgebra(ABC):
    """Operations the observable catalog needs from a concrete algebra."""

    name = "abstract"

    @abstractmethod
    def generator(self, g: Generator):
        ...

    @abstractmethod
    def mpower(self, k: int):
        ...

    @abstractmethod
    def constant(self, value):
        ...

    @abstractmethod
    def scale(self, value, coefficient):
        ...

    @abstractmethod
    def add(self, x, y):
        ...

    @abstractmethod
    def mul(self, x, y):
        ...

    @abstractmethod
    def is_zero(self, x) -> bool:
        ...

    @abstractmethod
    def render(self, x) -> str:
        ...

    def zero(self):
        return self.constant(0)

    def sub(self, x, y):
        return self.add(x, self.scale(y, -1))

    def sym(self, x, y):
        return self.scale(self.add(self.mul(x, y), self.mul(y, x)), HALF)

    def bracket(self, x, y):
        return self.scale(self.sub(self.mul(x, y), self.mul(y, x)), Scalar(0, -1))

    def element(self, element: AlgebraElement):
        total = self.zero()
        for g, coefficient in element.terms():
            total = self.add(total, self.scale(self.generator(g), coefficient))
        return total

    def total(self, values):
        out = self.zero()
        for value in values:
            out = self.add(out, value)
        return out


class NCBackend(ObservableAlgebra):
    """The word algebra with normal ordering."""

    name = "nc"

    def __init__(self, algebra: WordAlgebra | None = None) -> None:
        self.algebra = algebra or default_algebra()

    def generator(self, g: Generator) -> NCPolynomial:
        return self.algebra.generator(g)

    def mpower(self, k: int) -> NCPolynomial:
        return self.algebra.mpower(k)

    def constant(self, value) -> NCPolynomial:
        return self.algebra.scalar(value)

    def scale(self, value: NCPolynomial, coefficient) -> NCPolynomial:
        return value.scale(coefficient)

    def add(self, x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
        return x + y

    def mul(self, x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
        return self.algebra.multiply(x, y)

    def sym(self, x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
        return self.algebra.sym_product(x, y)

    def bracket(self, x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
        return self.algebra.nc_bracket(x, y)

    def is_zero(self, x: NCPolynomial) -> bool:
        return x.is_zero()

    def render(self, x: NCPolynomial) -> str:
        return str(x)


def symbolic_acceleration(mu: int) -> CoefficientExpr:
    return CoefficientExpr.accel(mu)


def direction(nu: int) -> Acceleration:
    """Acceleration with a single nonzero lower component a_nu = 1."""
    return lambda mu: 1 if mu == nu else 0


def upper_epsilon(*indices: int) -> Scalar:
    return CoefficientExpr.factor(epsilon(*(up(i) for i in indices))).as_scalar()


class ObservableCatalog:
    """Named builders for the derived observables of one backend."""

    def __init__(self, backend: ObservableAlgebra) -> None:
        self.backend = backend
        self._cache: Dict[Tuple, object] = {}

    def _memo(self, key: Tuple, build: Callable[[], object]):
        value = self._cache.get(key)
        if value is None:
            value = build()
            self._cache[key] = value
        return value

    # -- generators ---------------------------------------------------

    def P(self, mu: int):
        return self.backend.generator(Generator("P", (mu,)))

    def P_up(self, mu: int):
        return self.backend.scale(self.P(mu), SIGNATURE[mu])

    def C(self, mu: int):
        return self.backend.generator(Generator("C", (mu,)))

    def D(self):
        return self.backend.generator(DILATATION)

    def J(self, mu: int, nu: int):
        return self.backend.element(signed_lorentz(mu, nu))

    def M(self, k: int = 1):
        return self.backend.mpower(k)

    # -- derived observables -------------------------------------------

    def mass_squared(self):
        return self.M(2)

    def momentum_square(self):
        """P_rho P^rho written out as a product of momenta."""
        b = self.backend
        return b.total(b.mul(self.P(rho), self.P_up(rho)) for rho in range(4))

    def frame_factor(self, mu: int, rho: int):
        """eta_{mu rho} D - J_{mu rho}."""
        b = self.backend
        value = b.scale(self.J(mu, rho), -1)
        if mu == rho:
            value = b.add(value, b.scale(self.D(), SIGNATURE[mu]))
        return value

    def conformal_mass_shift(self, mu: int):
        """2 (eta_{mu rho} D - J_{mu rho}) . P^rho M^-1."""
        def build():
            b = self.backend
            return b.total(
                b.scale(b.sym(self.frame_factor(mu, rho), b.mul(self.P_up(rho), self.M(-1))), 2)
                for rho in range(4)
            )
        return self._memo(("conformal_mass_shift", mu), build)

    def position(self, mu: int):
        """X_mu = (eta_{mu rho} D - J_{mu rho}) . (P^rho M^-2)."""
        def build():
            b = self.backend
            return b.total(
                b.sym(self.frame_factor(mu, rho), b.mul(self.P_up(rho), self.M(-2)))
                for rho in range(4)
            )
        return self._memo(("position", mu), build)

    def position_up(self, mu: int):
        return self.backend.scale(self.position(mu), SIGNATURE[mu])

    def spin_tensor(self, mu: int, nu: int):
        """S_{mu nu} = J_{mu nu} - (P_mu . X_nu - P_nu . X_mu)."""
        def build():
            b = self.backend
            orbital = b.sub(b.sym(self.P(mu), self.position(nu)), b.sym(self.P(nu), self.position(mu)))
            return b.sub(self.J(mu, nu), orbital)
        return self._memo(("spin_tensor", mu, nu), build)

    def pauli_lubanski(self, mu: int):
        """S^mu = -1/2 eps^{mu kappa lambda tau} J_{kappa lambda} . (P_tau M^-1)."""
        def build():
            b = self.backend
            terms = []
            for kappa in range(4):
                for lam in range(4):
                    for tau in range(4):
                        sign = upper_epsilon(mu, kappa, lam, tau)
                        if not sign:
                            continue
                        product = b.sym(self.J(kappa, lam), b.mul(self.P(tau), self.M(-1)))
                        terms.append(b.scale(product, sign * Fraction(-1, 2)))
            return b.total(terms)
        return self._memo(("pauli_lubanski", mu), build)

    def dilatation_from_position(self):
        """P_rho . X^rho."""
        b = self.backend
        return b.total(b.sym(self.P(rho), self.position_up(rho)) for rho in range(4))

    def accel_generator(self, a: Acceleration):
        """Delta = 1/2 a^mu C_mu for lower components a(mu)."""
        b = self.backend
        return b.total(
            b.scale(self.C(mu), _times(a(mu), SIGNATURE[mu] * HALF)) for mu in range(4)
        )

    def contract_upper(self, a: Acceleration, vector: Callable[[int], object]):
        """a^rho V_rho."""
        b = self.backend
        return b.total(b.scale(vector(rho), _times(a(rho), SIGNATURE[rho])) for rho in range(4))


def _times(coefficient, factor):
    if isinstance(coefficient, CoefficientExpr):
        return coefficient * Scalar.of(factor)
    return Scalar.of(coefficient) * factor
