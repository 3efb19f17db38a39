"""
Six-dimensional matrix representation of the conformal algebra.

The Lie bracket is realized as a plain commutator of real rational matrices,
[rho(A), rho(B)] = rho((A, B)); the operator-level bracket (A, B) = -i[A, B]
is recovered by the complex rescaling A -> i rho(A).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import sympy

from .algebra import BASIS, AlgebraElement, Generator, StructureTable, default_table, iter_pairs
from .exceptions import RepresentationUnsolvable


logger = logging.getLogger(__name__)

AMBIENT_METRIC = sympy.diag(1, -1, -1, -1, -1, 1)
COEFFICIENT_NAMES = ("alpha", "beta", "gamma", "delta", "zeta")


def lorentz_matrix(a: int, b: int, metric: sympy.Matrix = AMBIENT_METRIC) -> sympy.Matrix:
    """(L_ab)^c_d = delta^c_a G_bd - delta^c_b G_ad."""
    size = metric.shape[0]
    return sympy.Matrix(
        size,
        size,
        lambda c, d: (metric[b, d] if c == a else 0) - (metric[a, d] if c == b else 0),
    )


def _ansatz(symbols: Dict[str, sympy.Symbol]) -> Dict[Generator, sympy.Matrix]:
    alpha, beta, gamma, delta, zeta = (symbols[name] for name in COEFFICIENT_NAMES)
    images = {}
    for g in BASIS:
        if g.tag == "J":
            images[g] = lorentz_matrix(*g.indices)
        elif g.tag == "D":
            images[g] = zeta * lorentz_matrix(4, 5)
        elif g.tag == "P":
            images[g] = alpha * lorentz_matrix(g.indices[0], 4) + beta * lorentz_matrix(g.indices[0], 5)
        else:
            images[g] = gamma * lorentz_matrix(g.indices[0], 4) + delta * lorentz_matrix(g.indices[0], 5)
    return images


def _image(images: Dict[Generator, sympy.Matrix], element: AlgebraElement) -> sympy.Matrix:
    out = sympy.zeros(6, 6)
    for g, coefficient in element.terms():
        scalar = coefficient.as_scalar()
        if scalar.im:
            raise RepresentationUnsolvable(f"complex structure constant in {element}")
        out += sympy.Rational(scalar.re.numerator, scalar.re.denominator) * images[g]
    return out


def commutator(x: sympy.Matrix, y: sympy.Matrix) -> sympy.Matrix:
    return x * y - y * x


@dataclass
class MatrixRep:
    images: Dict[Generator, sympy.Matrix]
    coefficients: Dict[str, sympy.Rational]
    metric: sympy.Matrix = AMBIENT_METRIC

    def __getitem__(self, g: Generator) -> sympy.Matrix:
        return self.images[g]

    def of(self, element: AlgebraElement) -> sympy.Matrix:
        return _image(self.images, element)


def build_matrix_rep(table: Optional[StructureTable] = None) -> MatrixRep:
    """Solve the embedding coefficients from closure, normalized by alpha = beta = 1."""
    table = table or default_table()
    symbols = {name: sympy.Symbol(name) for name in COEFFICIENT_NAMES}
    images = _ansatz(symbols)
    equations = {symbols["alpha"] - 1, symbols["beta"] - 1}
    for left, right in iter_pairs():
        residual = commutator(images[left], images[right]) - _image(images, table(left, right))
        equations.update(sympy.expand(entry) for entry in residual if entry != 0)
    equations.discard(0)
    solutions = sympy.solve(list(equations), list(symbols.values()), dict=True)
    solutions = [s for s in solutions if len(s) == len(symbols) and all(v.is_rational for v in s.values())]
    if not solutions:
        raise RepresentationUnsolvable("closure constraints of the matrix ansatz have no rational solution")
    solution = solutions[0]
    coefficients = {name: sympy.Rational(solution[symbols[name]]) for name in COEFFICIENT_NAMES}
    logger.info("Solved matrix embedding coefficients: %s", coefficients)
    concrete = {g: m.subs(solution) for g, m in images.items()}
    return MatrixRep(concrete, coefficients)


@functools.lru_cache(maxsize=1)
def default_matrix_rep() -> MatrixRep:
    return build_matrix_rep()


@dataclass(frozen=True)
class MatrixResidual:
    pair: Tuple[Generator, Generator]
    residual: sympy.ImmutableMatrix

    @property
    def zero(self) -> bool:
        return self.residual.is_zero_matrix

    @property
    def nonzero_entries(self) -> int:
        return sum(1 for entry in self.residual if entry != 0)

    def render(self) -> str:
        return "0" if self.zero else str(self.residual.tolist())


def pair_residual(rep: MatrixRep, left: Generator, right: Generator, table: Optional[StructureTable] = None) -> MatrixResidual:
    table = table or default_table()
    value = commutator(rep[left], rep[right]) - rep.of(table(left, right))
    return MatrixResidual((left, right), sympy.ImmutableMatrix(value))


def verify_matrix_rep(rep: MatrixRep, table: Optional[StructureTable] = None) -> List[MatrixResidual]:
    return [pair_residual(rep, left, right, table) for left, right in iter_pairs()]


def g_antisymmetry_defects(rep: MatrixRep) -> List[Generator]:
    """Generators whose image fails rho^T G + G rho = 0."""
    return [
        g for g in BASIS
        if not (rep[g].T * rep.metric + rep.metric * rep[g]).is_zero_matrix
    ]
