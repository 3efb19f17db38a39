"""
Massless scalar realization of the conformal algebra by differential operators
on momentum-space wavefunctions, its N-particle coproduct, and the bridge from
word-algebra polynomials to operators.
"""

from __future__ import annotations

import functools
import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

import sympy

from .algebra import BASIS, AlgebraElement, Generator, StructureTable, default_table, iter_pairs
from .exceptions import ParticleCountError, PointRejected, RepresentationUnsolvable
from .identities import REGISTRY, Residual
from .observables import ObservableAlgebra, ObservableCatalog, direction
from .operators import DiffOperator
from .ring import AlgebraicRing, RingElement, random_point, random_test_function
from .tensors import SIGNATURE, CoefficientExpr, Scalar, _fraction
from .wordalgebra import MPower, NCPolynomial


logger = logging.getLogger(__name__)

# Free constants of the scalar ansatz:
#   J_0j = -i w d_j + b k_j / w
#   C_0  = -w Lap + x1 E / w + alpha / w
#   C_n  = -k_n Lap + 2 E d_n + gamma d_n + beta k_n / w^2
ANSATZ_CONSTANTS = ("b", "x1", "alpha", "beta", "gamma")

Constant = Union[RingElement, Fraction, int]


def _const(ring: AlgebraicRing, value: Constant) -> RingElement:
    return value if isinstance(value, RingElement) else ring.scalar(value)


def one_particle_images(ring: AlgebraicRing, a: int, constants: Mapping[str, Constant]) -> Dict[Generator, DiffOperator]:
    """Generators acting on the variables of particle ``a``; P_j is the covariant k{a}_j."""
    mult = DiffOperator.multiplication
    c = {name: _const(ring, value) for name, value in constants.items()}
    w = ring.omega(a)
    w_inv = ring.omega_power(a, -1)
    w_inv2 = ring.omega_power(a, -2)
    k = {j: ring.k(a, j) for j in (1, 2, 3)}
    d = {j: DiffOperator.derivative(ring, a, j) for j in (1, 2, 3)}
    euler = DiffOperator.zero(ring)
    laplace = DiffOperator.zero(ring)
    for j in (1, 2, 3):
        euler = euler + mult(k[j]) @ d[j]
        laplace = laplace + DiffOperator.derivative(ring, a, j, order=2)

    images: Dict[Generator, DiffOperator] = {
        Generator("P", (0,)): mult(w),
        Generator("D"): (euler + DiffOperator.constant(ring, 1)).scale(Scalar(0, 1)),
        Generator("C", (0,)): (mult(w) @ laplace).scale(-1) + mult(c["x1"] * w_inv) @ euler + mult(c["alpha"] * w_inv),
    }
    for j in (1, 2, 3):
        images[Generator("P", (j,))] = mult(k[j])
        images[Generator("J", (0, j))] = (mult(w) @ d[j]).scale(Scalar(0, -1)) + mult(c["b"] * k[j] * w_inv)
        images[Generator("C", (j,))] = (
            (mult(k[j]) @ laplace).scale(-1)
            + (euler @ d[j]).scale(2)
            + d[j].scale(c["gamma"])
            + mult(c["beta"] * k[j] * w_inv2)
        )
    for j, l in itertools.combinations((1, 2, 3), 2):
        images[Generator("J", (j, l))] = (mult(k[l]) @ d[j] - mult(k[j]) @ d[l]).scale(Scalar(0, 1))
    return images


def realize_element(images: Mapping[Generator, DiffOperator], ring: AlgebraicRing, element: AlgebraElement) -> DiffOperator:
    out = DiffOperator.zero(ring)
    for g, coefficient in element.terms():
        out = out + images[g].scale(coefficient.as_scalar())
    return out


def closure_residuals(
    images: Mapping[Generator, DiffOperator], ring: AlgebraicRing, table: StructureTable
) -> Dict[Tuple[Generator, Generator], DiffOperator]:
    return {
        (left, right): images[left].normalized_bracket(images[right]) - realize_element(images, ring, table(left, right))
        for left, right in iter_pairs()
    }


def build_one_particle_realization(table: Optional[StructureTable] = None) -> Dict[str, Fraction]:
    """Solve the ansatz constants from closure of every bracket at one particle."""
    table = table or default_table()
    ring = AlgebraicRing(1, ANSATZ_CONSTANTS)
    images = one_particle_images(ring, 1, {name: ring.parameter(name) for name in ANSATZ_CONSTANTS})
    symbols = [sympy.Symbol(name) for name in ANSATZ_CONSTANTS]
    equations = set()
    for residual in closure_residuals(images, ring, table).values():
        for _, coefficient in residual.terms():
            for group in coefficient.parameter_coefficients().values():
                expr = sum(
                    sympy.Rational(value.numerator, value.denominator)
                    * sympy.Mul(*(s ** e for s, e in zip(symbols, exponents)))
                    for exponents, value in group.items()
                )
                expr = sympy.expand(expr)
                if expr != 0:
                    equations.add(expr)
    if any(eq.is_number for eq in equations):
        raise RepresentationUnsolvable("closure requires a nonzero constant to vanish")
    solutions = sympy.solve(list(equations), symbols, dict=True) if equations else [{}]
    for solution in solutions:
        free = {s: 0 for s in symbols}
        values = {str(s): sympy.sympify(solution.get(s, 0)).subs(free) for s in symbols}
        if all(v.is_rational for v in values.values()):
            constants = {name: Fraction(int(v.p), int(v.q)) for name, v in values.items()}
            logger.info("Solved one-particle ansatz constants: %s", constants)
            return constants
    raise RepresentationUnsolvable("closure constraints of the scalar ansatz have no rational solution")


def one_particle_closure(
    constants: Optional[Mapping[str, Constant]] = None, table: Optional[StructureTable] = None
) -> Dict[Tuple[Generator, Generator], DiffOperator]:
    ring = AlgebraicRing(1)
    images = one_particle_images(ring, 1, constants if constants is not None else default_constants())
    return closure_residuals(images, ring, table or default_table())


@functools.lru_cache(maxsize=1)
def default_constants() -> Dict[str, Fraction]:
    return build_one_particle_realization()


def coproduct(
    n: int,
    constants: Optional[Mapping[str, Constant]] = None,
    ring: Optional[AlgebraicRing] = None,
) -> Dict[Generator, DiffOperator]:
    """Each generator as the sum of its one-particle images over n particles."""
    if n < 1:
        raise ParticleCountError("the coproduct needs at least one particle")
    ring = ring or AlgebraicRing(n)
    constants = constants if constants is not None else default_constants()
    images = {g: DiffOperator.zero(ring) for g in BASIS}
    for a in range(1, n + 1):
        for g, op in one_particle_images(ring, a, constants).items():
            images[g] = images[g] + op
    return images


class Realization:
    """The N-particle realization; MPower(k) acts as multiplication by sigma^k."""

    def __init__(self, particles: int, constants: Optional[Mapping[str, Constant]] = None) -> None:
        self.particles = particles
        self.ring = AlgebraicRing(particles)
        self.images = coproduct(particles, constants, self.ring)

    def generator(self, g: Generator) -> DiffOperator:
        return self.images[g]

    def mpower(self, k: int) -> DiffOperator:
        # one particle: s reduces to 0, so sigma is nilpotent and M^k has no meaning
        if k and self.particles < 2:
            raise ParticleCountError("mass powers need at least two particles")
        return DiffOperator.multiplication(self.ring.sigma_power(k))

    def letter(self, letter) -> DiffOperator:
        if isinstance(letter, MPower):
            return self.mpower(letter.exponent)
        return self.generator(letter)

    def realize(self, p: NCPolynomial) -> DiffOperator:
        out = DiffOperator.zero(self.ring)
        for word, coefficient in p.terms():
            op = DiffOperator.constant(self.ring, coefficient.as_scalar())
            for letter in word:
                op = op @ self.letter(letter)
            out = out + op
        return out

    def realize_element(self, element: AlgebraElement) -> DiffOperator:
        return realize_element(self.images, self.ring, element)

    def pair_residual(self, left: Generator, right: Generator, table: Optional[StructureTable] = None) -> DiffOperator:
        table = table or default_table()
        return self.images[left].normalized_bracket(self.images[right]) - self.realize_element(table(left, right))


@functools.lru_cache(maxsize=4)
def realization(particles: int) -> Realization:
    return Realization(particles)


def realize(p: NCPolynomial, n: int) -> DiffOperator:
    return realization(n).realize(p)


class OperatorBackend(ObservableAlgebra):
    name = "operator"

    def __init__(self, realization: Realization) -> None:
        self.realization = realization
        self.ring = realization.ring

    def generator(self, g: Generator) -> DiffOperator:
        return self.realization.generator(g)

    def mpower(self, k: int) -> DiffOperator:
        return self.realization.mpower(k)

    def constant(self, value) -> DiffOperator:
        return DiffOperator.constant(self.ring, _scalar(value))

    def scale(self, value: DiffOperator, coefficient) -> DiffOperator:
        return value.scale(_scalar(coefficient))

    def add(self, x: DiffOperator, y: DiffOperator) -> DiffOperator:
        return x + y

    def mul(self, x: DiffOperator, y: DiffOperator) -> DiffOperator:
        return x @ y

    def sym(self, x: DiffOperator, y: DiffOperator) -> DiffOperator:
        # xy - [x, y] / 2, one composition instead of two
        return x @ y - x.commutator(y).scale(Fraction(1, 2))

    def bracket(self, x: DiffOperator, y: DiffOperator) -> DiffOperator:
        return x.normalized_bracket(y)

    def is_zero(self, x: DiffOperator) -> bool:
        return x.is_zero()

    def render(self, x: DiffOperator) -> str:
        return str(x)


def _scalar(value) -> Scalar:
    if isinstance(value, CoefficientExpr):
        return value.as_scalar()
    return Scalar.of(value if isinstance(value, (Scalar, int, Fraction)) else _fraction(value))


_CATALOGS: Dict[int, ObservableCatalog] = {}


def operator_catalog(n: int) -> ObservableCatalog:
    catalog = _CATALOGS.get(n)
    if catalog is None:
        catalog = _CATALOGS.setdefault(n, ObservableCatalog(OperatorBackend(realization(n))))
    return catalog


def check_identity_in_realization(check_id: str, n: int, catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    """Run a registered identity on the n-particle operators; formal a runs per direction."""
    if n < 2:
        raise ParticleCountError("identities with mass inverses need at least two particles")
    check = REGISTRY[check_id]
    if "operator" not in check.backends:
        raise ValueError(f"{check_id} has no operator form")
    catalog = catalog or operator_catalog(n)
    if not check.uses_acceleration:
        return check.run(catalog, direction(0))
    out: List[Residual] = []
    for nu in range(4):
        for r in check.run(catalog, direction(nu)):
            out.append(Residual(f"{r.label} [a=e{nu}]", r.rendered, r.zero))
    return out


def evaluate_at_point(op: DiffOperator, testfn: RingElement, point: Mapping[str, Fraction]) -> Scalar:
    return op.apply(testfn).evaluate(point)


@dataclass(frozen=True)
class PointSample:
    mu: int
    nu: int
    point: Dict[str, Fraction]
    value: Scalar
    expected: Scalar

    @property
    def ok(self) -> bool:
        return self.value == self.expected


def canonical_point_samples(
    n: int, samples: int, seed: int, catalog: Optional[ObservableCatalog] = None
) -> List[PointSample]:
    """(P_mu, X_nu) f at random on-shell points, expected -eta_{mu nu} f."""
    rng = random.Random(seed)
    catalog = catalog or operator_catalog(n)
    backend = catalog.backend
    brackets = {
        (mu, nu): backend.bracket(catalog.P(mu), catalog.position(nu))
        for mu, nu in itertools.product(range(4), repeat=2)
    }
    ring = catalog.backend.ring
    out = []
    rejected = 0
    while len(out) < samples:
        mu, nu = rng.randrange(4), rng.randrange(4)
        try:
            point = random_point(ring, rng)
            f = random_test_function(ring, rng)
            value = evaluate_at_point(brackets[(mu, nu)], f, point)
            expected = f.evaluate(point) * (-SIGNATURE[mu] if mu == nu else 0)
        except PointRejected as exc:
            logger.debug("Rejected sample point: %s", exc)
            rejected += 1
            if rejected > 10 * samples:
                raise
            continue
        out.append(PointSample(mu, nu, point, value, expected))
    return out


TWO_PHOTON_MOMENTA = ((0, 0, 1), (0, 0, -1))


def two_photon_observables() -> Dict[str, Scalar]:
    """Mass, energy and total momentum of two counterpropagating unit-energy photons."""
    real = realization(2)
    ring = real.ring
    point = ring.point(TWO_PHOTON_MOMENTA)
    one = ring.one
    values = {
        "mass_squared": evaluate_at_point(real.mpower(2), one, point),
        "mass": evaluate_at_point(real.mpower(1), one, point),
        "energy": evaluate_at_point(real.generator(Generator("P", (0,))), one, point),
    }
    for j in (1, 2, 3):
        values[f"momentum_{j}"] = evaluate_at_point(real.generator(Generator("P", (j,))), one, point)
    return values
