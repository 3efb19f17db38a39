"""
Identities between derived observables, written once against the
ObservableCatalog interface so that the word algebra and the differential
operator realization run the same code.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import BASIS, Generator
from .observables import (
    Acceleration,
    NCBackend,
    ObservableCatalog,
    direction,
    symbolic_acceleration,
    upper_epsilon,
)
from .tensors import SIGNATURE, CoefficientExpr, Scalar, epsilon, lo
from .wordalgebra import MPower, NCPolynomial, generator_degree


logger = logging.getLogger(__name__)

PAIRS = tuple(itertools.combinations(range(4), 2))
INDICES = tuple(itertools.product(range(4), repeat=2))


@dataclass(frozen=True)
class Residual:
    label: str
    rendered: str
    zero: bool


def residual(catalog: ObservableCatalog, label: str, value) -> Residual:
    backend = catalog.backend
    zero = backend.is_zero(value)
    return Residual(label, "0" if zero else backend.render(value), zero)


IdentityFn = Callable[[ObservableCatalog, Acceleration], List[Residual]]


@dataclass(frozen=True)
class IdentityCheck:
    id: str
    paper_ref: str
    quote: str
    description: str
    run: IdentityFn
    uses_acceleration: bool = False
    backends: Tuple[str, ...] = ("nc", "operator")
    cost: int = 1


REGISTRY: Dict[str, IdentityCheck] = {}


def identity(
    id: str,
    paper_ref: str,
    quote: str,
    description: str,
    uses_acceleration: bool = False,
    backends: Tuple[str, ...] = ("nc", "operator"),
    cost: int = 1,
):
    def register(fn: IdentityFn) -> IdentityFn:
        REGISTRY[id] = IdentityCheck(id, paper_ref, quote, description, fn, uses_acceleration, backends, cost)
        return fn
    return register


# -- mass ---------------------------------------------------------------


@identity("eq1.mass-definition", "Eq. (1)", "M = √(η^{μν}P_μP_ν)", "M^2 - P_rho P^rho")
def mass_definition(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [residual(cat, "M^2 - P_rho P^rho", b.sub(cat.mass_squared(), cat.momentum_square()))]


@identity("eq5.poincare-mass", "Eq. (5)", "(P_μ,M)=(J_{μν},M)=0", "(P, M^k) and (J, M^k) vanish for k = 1, 2")
def poincare_mass(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for k in (2, 1):
        power = cat.M(k)
        for mu in range(4):
            out.append(residual(cat, f"(P{mu}, M^{k})", b.bracket(cat.P(mu), power)))
        for mu, nu in PAIRS:
            out.append(residual(cat, f"(J{mu}{nu}, M^{k})", b.bracket(cat.J(mu, nu), power)))
    return out


@identity("eq5.dilatation-mass", "Eq. (5)", "(D,M)=M", "(D, M) - M and (D, M^2) - 2 M^2")
def dilatation_mass(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [
        residual(cat, "(D, M) - M", b.sub(b.bracket(cat.D(), cat.M(1)), cat.M(1))),
        residual(cat, "(D, M^2) - 2 M^2", b.sub(b.bracket(cat.D(), cat.M(2)), b.scale(cat.M(2), 2))),
        residual(cat, "(D, M^-2) + 2 M^-2", b.add(b.bracket(cat.D(), cat.M(-2)), b.scale(cat.M(-2), 2))),
    ]


def _frame_dot_momentum(cat: ObservableCatalog, mu: int):
    b = cat.backend
    return b.total(b.sym(cat.frame_factor(mu, rho), cat.P_up(rho)) for rho in range(4))


@identity(
    "eq5.conformal-mass-squared",
    "Eq. (5)",
    "(C_μ,M²)=4(η_{μρ}D−J_{μρ})·P^ρ",
    "(C_mu, M^2) - 4 (eta_{mu rho} D - J_{mu rho}) . P^rho",
)
def conformal_mass_squared(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [
        residual(
            cat,
            f"(C{mu}, M^2) - 4 F{mu}.P",
            b.sub(b.bracket(cat.C(mu), cat.M(2)), b.scale(_frame_dot_momentum(cat, mu), 4)),
        )
        for mu in range(4)
    ]


@identity(
    "eq5.conformal-mass-odd",
    "Eq. (5)",
    "(C_μ,M)=2(η_{μρ}D−J_{μρ})·P^ρ/M",
    "(C_mu, M) - 2 (eta_{mu rho} D - J_{mu rho}) . P^rho M^-1",
)
def conformal_mass_odd(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [
        residual(cat, f"(C{mu}, M) - Z{mu}", b.sub(b.bracket(cat.C(mu), cat.M(1)), cat.conformal_mass_shift(mu)))
        for mu in range(4)
    ]


@identity(
    "eq5.odd-even-consistency",
    "Eq. (5)",
    "(C_μ,M)=2(η_{μρ}D−J_{μρ})·P^ρ/M",
    "(C_mu, M) M + M (C_mu, M) - (C_mu, M^2), plain products",
)
def odd_even_consistency(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu in range(4):
        odd = b.bracket(cat.C(mu), cat.M(1))
        lhs = b.add(b.mul(odd, cat.M(1)), b.mul(cat.M(1), odd))
        out.append(residual(cat, f"(C{mu}, M) M + M (C{mu}, M) - (C{mu}, M^2)", b.sub(lhs, b.bracket(cat.C(mu), cat.M(2)))))
    return out


@identity(
    "eq6.accelerated-mass-shift",
    "Eq. (6)",
    "(Δ,M)=a^μ M·X_μ",
    "(Delta, M) - a^mu M . X_mu",
    uses_acceleration=True,
)
def accelerated_mass_shift(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    delta = cat.accel_generator(a)
    expected = cat.contract_upper(a, lambda mu: b.sym(cat.M(1), cat.position(mu)))
    return [residual(cat, "(Delta, M) - a^mu M.X_mu", b.sub(b.bracket(delta, cat.M(1)), expected))]


# -- position -------------------------------------------------------------


@identity("eq7.canonical-commutator", "Eq. (7)", "(P_μ,X_ν)=−η_{μν}", "(P_mu, X_nu) + eta_{mu nu}", cost=2)
def canonical_commutator(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu, nu in INDICES:
        metric = SIGNATURE[mu] if mu == nu else 0
        value = b.add(b.bracket(cat.P(mu), cat.position(nu)), b.constant(metric))
        out.append(residual(cat, f"(P{mu}, X{nu}) + eta{mu}{nu}", value))
    return out


@identity("eq7.dilatation", "Eq. (7)", "(D,X_μ)=−X_μ", "(D, X_mu) + X_mu")
def dilatation_position(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [
        residual(cat, f"(D, X{mu}) + X{mu}", b.add(b.bracket(cat.D(), cat.position(mu)), cat.position(mu)))
        for mu in range(4)
    ]


@identity(
    "eq7.lorentz",
    "Eq. (7)",
    "(J_{μν},X_ρ)=η_{νρ}X_μ−η_{μρ}X_ν",
    "(J_{mu nu}, X_rho) - eta_{nu rho} X_mu + eta_{mu rho} X_nu",
    cost=3,
)
def lorentz_position(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for (mu, nu), rho in itertools.product(PAIRS, range(4)):
        expected = b.zero()
        if nu == rho:
            expected = b.add(expected, b.scale(cat.position(mu), SIGNATURE[nu]))
        if mu == rho:
            expected = b.sub(expected, b.scale(cat.position(nu), SIGNATURE[mu]))
        value = b.sub(b.bracket(cat.J(mu, nu), cat.position(rho)), expected)
        out.append(residual(cat, f"(J{mu}{nu}, X{rho}) - rhs", value))
    return out


@identity("eq9.position-commutator", "Eq. (9)", "(M·X_μ, M·X_ν)=…=J_{μν}", "(M.X_mu, M.X_nu) - J_{mu nu}", cost=4)
def position_commutator(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    scaled = {mu: b.sym(cat.M(1), cat.position(mu)) for mu in range(4)}
    out = [residual(cat, "(M.X0, M.X0)", b.bracket(scaled[0], scaled[0]))]
    for mu, nu in PAIRS:
        value = b.sub(b.bracket(scaled[mu], scaled[nu]), cat.J(mu, nu))
        out.append(residual(cat, f"(M.X{mu}, M.X{nu}) - J{mu}{nu}", value))
    return out


@identity(
    "eq9.conformal-mass-bracket",
    "Eq. (9)",
    "(M·X_μ, M·X_ν)=¼((C_μ,M),(C_ν,M))=J_{μν}",
    "1/4 ((C_mu, M), (C_nu, M)) - J_{mu nu}",
    cost=4,
)
def conformal_mass_bracket(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    shifts = {mu: b.bracket(cat.C(mu), cat.M(1)) for mu in range(4)}
    return [
        residual(
            cat,
            f"((C{mu}, M), (C{nu}, M))/4 - J{mu}{nu}",
            b.sub(b.scale(b.bracket(shifts[mu], shifts[nu]), Fraction(1, 4)), cat.J(mu, nu)),
        )
        for mu, nu in PAIRS
    ]


@identity(
    "eq9.spin-tensor",
    "Eq. (9)",
    "M²·(X_μ,X_ν)=J_{μν}−(P_μ·X_ν−P_ν·X_μ)≡S_{μν}",
    "M^2 . (X_mu, X_nu) - S_{mu nu}",
    cost=4,
)
def spin_tensor(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu, nu in PAIRS:
        lhs = b.sym(cat.mass_squared(), b.bracket(cat.position(mu), cat.position(nu)))
        out.append(residual(cat, f"M^2.(X{mu}, X{nu}) - S{mu}{nu}", b.sub(lhs, cat.spin_tensor(mu, nu))))
    return out


# -- spin -------------------------------------------------------------------


@identity("eq10.spin-orthogonality", "Eq. (10)", "S^μP_μ=0", "S^mu . P_mu", cost=2)
def spin_orthogonality(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    value = b.total(b.sym(cat.pauli_lubanski(mu), cat.P(mu)) for mu in range(4))
    return [residual(cat, "S^mu . P_mu", value)]


@identity(
    "eq10.spin-reconstruction",
    "Eq. (10)",
    "S_{μν}=ε_{μνρσ}S^ρP^σ/M",
    "S_{mu nu} - eps_{mu nu rho sigma} S^rho . (P^sigma M^-1), symmetrized",
    cost=4,
)
def spin_reconstruction(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu, nu in PAIRS:
        terms = []
        for rho, sigma in INDICES:
            sign = CoefficientExpr.factor(epsilon(lo(mu), lo(nu), lo(rho), lo(sigma))).as_scalar()
            if not sign:
                continue
            terms.append(b.scale(b.sym(cat.pauli_lubanski(rho), b.mul(cat.P_up(sigma), cat.M(-1))), sign))
        out.append(residual(cat, f"S{mu}{nu} - eps.S.P/M", b.sub(cat.spin_tensor(mu, nu), b.total(terms))))
    return out


CLASSICAL_VALUES: Dict[Generator, Fraction] = {
    Generator("P", (0,)): Fraction(5),
    Generator("P", (1,)): Fraction(3),
    Generator("P", (2,)): Fraction(0),
    Generator("P", (3,)): Fraction(0),
    Generator("J", (0, 1)): Fraction(1),
    Generator("J", (0, 2)): Fraction(2),
    Generator("J", (0, 3)): Fraction(-1),
    Generator("J", (1, 2)): Fraction(3),
    Generator("J", (1, 3)): Fraction(1),
    Generator("J", (2, 3)): Fraction(-2),
    Generator("D", ()): Fraction(7),
    **{Generator("C", (mu,)): Fraction(mu + 1) for mu in range(4)},
}
CLASSICAL_MASS = Fraction(4)


def classical_value(poly: NCPolynomial, values: Dict[Generator, Fraction], mass: Fraction) -> Scalar:
    """Evaluate the highest generator-degree part with all letters commuting."""
    top = poly.max_degree()
    total = Scalar()
    for word, coefficient in poly.terms():
        if generator_degree(word) != top:
            continue
        value = Fraction(1)
        for letter in word:
            value *= mass ** letter.exponent if isinstance(letter, MPower) else values[letter]
        total = total + coefficient.as_scalar() * value
    return total


def classical_pauli_lubanski(mu: int, values: Dict[Generator, Fraction], mass: Fraction) -> Scalar:
    """-1/2 eps^{mu kappa lambda tau} J_{kappa lambda} P_tau / M by explicit index sums."""
    total = Scalar()
    for kappa, lam, tau in itertools.product(range(4), repeat=3):
        sign = upper_epsilon(mu, kappa, lam, tau)
        if not sign or kappa == lam:
            continue
        j = values[Generator("J", (min(kappa, lam), max(kappa, lam)))] * (1 if kappa < lam else -1)
        total = total + sign * (Fraction(-1, 2) * j * values[Generator("P", (tau,))] / mass)
    return total


@identity(
    "eq10.commutative-limit",
    "Eq. (10)",
    "S^ρ=−½ε^{ρκλτ}J_{κλ}P_τ/M",
    "S^mu at commuting classical values against a brute-force epsilon sum",
    backends=("nc",),
)
def commutative_limit(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu in range(4):
        engine = classical_value(cat.pauli_lubanski(mu), CLASSICAL_VALUES, CLASSICAL_MASS)
        brute = classical_pauli_lubanski(mu, CLASSICAL_VALUES, CLASSICAL_MASS)
        out.append(residual(cat, f"S^{mu} classical - brute force", b.constant(engine - brute)))
    return out


# -- frame transformations -------------------------------------------------


@identity("eq11.dilatation-as-position", "Eq. (11)", "D=P_ρ·X^ρ", "D - P_rho . X^rho", cost=2)
def dilatation_as_position(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    return [residual(cat, "D - P_rho.X^rho", b.sub(cat.D(), cat.dilatation_from_position()))]


def _redshift(cat: ObservableCatalog, a: Acceleration, tag: str) -> List[Residual]:
    b = cat.backend
    delta = cat.accel_generator(a)
    out = []
    for nu in range(4):
        def inner(mu: int, nu: int = nu):
            value = b.sub(b.sym(cat.P(nu), cat.position(mu)), b.sym(cat.P(mu), cat.position(nu)))
            value = b.sub(value, cat.spin_tensor(mu, nu))
            if mu == nu:
                value = b.add(value, b.scale(cat.D(), SIGNATURE[mu]))
            return value
        expected = cat.contract_upper(a, inner)
        out.append(residual(cat, f"(Delta, P{nu}) - rhs{tag}", b.sub(b.bracket(delta, cat.P(nu)), expected)))
    return out


@identity(
    "eq11.redshift",
    "Eq. (11)",
    "(Δ,P_ν)=a^μ(η_{μν}D−P_μ·X_ν+P_ν·X_μ−S_{μν})",
    "(Delta, P_nu) against the quantum redshift law, formal a",
    uses_acceleration=True,
    cost=3,
)
def redshift(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    return _redshift(cat, a, "")


@identity(
    "eq11.redshift-e3",
    "Eq. (11)",
    "(Δ,P_ν)=a^μ(η_{μν}D−P_μ·X_ν+P_ν·X_μ−S_{μν})",
    "the redshift law specialized to a = e_3",
    cost=3,
)
def redshift_e3(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    return _redshift(cat, direction(3), " [a=e3]")


def _double_commutator(cat: ObservableCatalog, a: Acceleration, mu: int, nu: int):
    b = cat.backend
    return b.bracket(b.bracket(cat.accel_generator(a), cat.P(mu)), cat.position(nu))


@identity(
    "eq12.invariance",
    "Eq. (12)",
    "((Δ,X_ν),P_μ)=((Δ,P_μ),X_ν)",
    "((Delta, X_nu), P_mu) via Jacobi against ((Delta, P_mu), X_nu)",
    uses_acceleration=True,
    cost=5,
)
def invariance(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    delta = cat.accel_generator(a)
    out = []
    for mu, nu in INDICES:
        direct = _double_commutator(cat, a, mu, nu)
        # ((Delta, X), P) = (Delta, (X, P)) - (X, (Delta, P))
        canonical = b.bracket(cat.position(nu), cat.P(mu))
        via_jacobi = b.sub(
            b.bracket(delta, canonical),
            b.bracket(cat.position(nu), b.bracket(delta, cat.P(mu))),
        )
        out.append(residual(cat, f"((Delta, X{nu}), P{mu}) - ((Delta, P{mu}), X{nu})", b.sub(via_jacobi, direct)))
    return out


@identity(
    "eq13.covariance",
    "Eq. (13)",
    "((Δ,P_μ),X_ν)=−η_{μν}a^ρX_ρ−a_μX_ν+a_νX_μ",
    "((Delta, P_mu), X_nu) against its classical form",
    uses_acceleration=True,
    cost=5,
)
def covariance(cat: ObservableCatalog, a: Acceleration) -> List[Residual]:
    b = cat.backend
    out = []
    for mu, nu in INDICES:
        expected = b.sub(b.scale(cat.position(mu), a(nu)), b.scale(cat.position(nu), a(mu)))
        if mu == nu:
            trace = cat.contract_upper(a, cat.position)
            expected = b.sub(expected, b.scale(trace, SIGNATURE[mu]))
        value = b.sub(_double_commutator(cat, a, mu, nu), expected)
        out.append(residual(cat, f"((Delta, P{mu}), X{nu}) - rhs", value))
    return out


# -- grouped residual sets ---------------------------------------------------


def run_identity(
    check_id: str,
    catalog: Optional[ObservableCatalog] = None,
    a: Optional[Acceleration] = None,
) -> List[Residual]:
    catalog = catalog or default_catalog()
    return REGISTRY[check_id].run(catalog, a or symbolic_acceleration)


_DEFAULT: Dict[str, ObservableCatalog] = {}


def default_catalog() -> ObservableCatalog:
    catalog = _DEFAULT.get("nc")
    if catalog is None:
        catalog = _DEFAULT.setdefault("nc", ObservableCatalog(NCBackend()))
    return catalog


def _collect(ids: Sequence[str], catalog: Optional[ObservableCatalog]) -> List[Residual]:
    out: List[Residual] = []
    for check_id in ids:
        out.extend(run_identity(check_id, catalog))
    return out


def check_mass_shifts(catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    return _collect(
        (
            "eq5.poincare-mass",
            "eq5.dilatation-mass",
            "eq5.conformal-mass-squared",
            "eq5.conformal-mass-odd",
            "eq5.odd-even-consistency",
        ),
        catalog,
    )


def check_position_commutators(catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    return _collect(("eq9.position-commutator", "eq9.spin-tensor"), catalog)


def check_pauli_lubanski(catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    return _collect(
        ("eq10.spin-orthogonality", "eq10.spin-reconstruction", "eq10.commutative-limit"),
        catalog,
    )


def check_redshift_law(catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    return _collect(("eq11.dilatation-as-position", "eq11.redshift", "eq11.redshift-e3"), catalog)


def check_double_commutators(catalog: Optional[ObservableCatalog] = None) -> List[Residual]:
    return _collect(("eq12.invariance", "eq13.covariance"), catalog)


def all_zero(residuals: Sequence[Residual]) -> bool:
    return all(r.zero for r in residuals)


def generators_in(poly: NCPolynomial) -> List[Generator]:
    seen = {letter for word in poly.words() for letter in word if isinstance(letter, Generator)}
    return [g for g in BASIS if g in seen]
