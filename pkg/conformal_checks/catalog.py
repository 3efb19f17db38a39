"""
Check suites: every verifiable statement of the engine, addressable by a
stable identifier and tagged with the equation it traces to.
"""

from __future__ import annotations

import itertools
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .algebra import (
    BASIS,
    J,
    StructureTable,
    default_table,
    jacobi_residual,
    lorentz_defects,
    reference_bracket,
    span_defects,
    weight_defects,
)
from .identities import REGISTRY, Residual, run_identity
from .matrix_rep import MatrixRep, build_matrix_rep, g_antisymmetry_defects, lorentz_matrix, pair_residual
from .observables import NCBackend, ObservableCatalog
from .realizations import (
    OperatorBackend,
    Realization,
    build_one_particle_realization,
    canonical_point_samples,
    check_identity_in_realization,
    one_particle_closure,
    two_photon_observables,
)
from .tensors import Scalar
from .wordalgebra import DEFAULT_STEP_BUDGET, WordAlgebra


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunOptions:
    particles: int = 2
    seed: int = 0
    point_samples: int = 100
    step_budget: int = DEFAULT_STEP_BUDGET
    table: Optional[StructureTable] = None


@dataclass(frozen=True)
class CheckDescriptor:
    id: str
    paper_ref: str
    module: str
    suite: str
    quote: str = ""
    params: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "paper_ref": self.paper_ref,
            "module": self.module,
            "quote": self.quote,
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class Verdict:
    passed: bool
    residual_terms: int = 0
    residual_text: str = ""

    @classmethod
    def from_residuals(cls, residuals: List[Residual]) -> "Verdict":
        failing = [r for r in residuals if not r.zero]
        if not failing:
            return cls(True)
        text = "\n".join(f"{r.label}: {r.rendered}" for r in failing)
        return cls(False, len(failing), text)

    @classmethod
    def from_defects(cls, defects: List[Any], describe: Callable[[Any], str] = str) -> "Verdict":
        if not defects:
            return cls(True)
        return cls(False, len(defects), "\n".join(describe(d) for d in defects))


class CheckSuite:
    """Base class for check suites"""

    def __init__(self, name: str, description: str, options: RunOptions):
        self.name = name
        self.description = description
        self.options = options
        self._lock = threading.Lock()
        self._checks: Optional[Dict[str, Tuple[CheckDescriptor, Callable[[], Verdict]]]] = None

    @property
    def table(self) -> StructureTable:
        return self.options.table or default_table()

    def build_checks(self) -> List[Tuple[CheckDescriptor, Callable[[], Verdict]]]:
        raise NotImplementedError

    def _descriptor(self, id: str, paper_ref: str, module: str, quote: str = "", **params) -> CheckDescriptor:
        return CheckDescriptor(id, paper_ref, module, self.name, quote, params)

    def _index(self) -> Dict[str, Tuple[CheckDescriptor, Callable[[], Verdict]]]:
        if self._checks is None:
            self._checks = {d.id: (d, fn) for d, fn in self.build_checks()}
        return self._checks

    def get_checks(self) -> List[CheckDescriptor]:
        return [descriptor for descriptor, _ in self._index().values()]

    def run_check(self, check_id: str) -> Verdict:
        _, fn = self._index()[check_id]
        return fn()

    def _once(self, attribute: str, build: Callable[[], Any]) -> Any:
        """Lazily build shared state, once, under the suite lock."""
        value = getattr(self, attribute, None)
        if value is None:
            with self._lock:
                value = getattr(self, attribute, None)
                if value is None:
                    value = build()
                    setattr(self, attribute, value)
        return value


def _pair_name(left, right) -> str:
    return f"{left.name}.{right.name}"


class AlgebraSuite(CheckSuite):
    """Structure table, Jacobi identity and covariance of the bracket."""

    def __init__(self, options: RunOptions):
        super().__init__("algebra", "Conformal structure constants and Jacobi identity", options)

    def build_checks(self):
        checks = []
        for left, right in itertools.combinations(BASIS, 2):
            checks.append((
                self._descriptor(
                    f"eq4.pair.{_pair_name(left, right)}", "Eq. (4)", "conformal-algebra",
                    "obey the following commutation relations",
                ),
                lambda l=left, r=right: self._pair(l, r),
            ))
        for triple in itertools.combinations(BASIS, 3):
            name = ".".join(g.name for g in triple)
            checks.append((
                self._descriptor(f"eq3.jacobi.{name}", "Eq. (3)", "conformal-algebra", "often use the Jacobi identity"),
                lambda t=triple: self._jacobi(t),
            ))
        checks.append((
            self._descriptor(
                "eq3.jacobi.degenerate", "Eq. (3)", "conformal-algebra", "often use the Jacobi identity",
                triples=len(BASIS) ** 2,
            ),
            self._jacobi_degenerate,
        ))
        checks.append((
            self._descriptor(
                "eq4.conformal-weights", "Eq. (4)", "conformal-algebra",
                "conformal weights, determined by commutation relations with D, are opposite for C_μ's and P_μ's",
            ),
            lambda: Verdict.from_defects(weight_defects(self.table), lambda d: f"(D, {d[0]}) = {d[1]}"),
        ))
        checks.append((
            self._descriptor("eq4.lorentz-covariance", "Eq. (4)", "conformal-algebra", "(J_{μν},P_ρ)=η_{νρ}P_μ−η_{μρ}P_ν"),
            self._lorentz,
        ))
        return checks

    def _pair(self, left, right) -> Verdict:
        table = self.table
        value = table(left, right)
        defects = []
        expected = reference_bracket(left, right)
        if value != expected:
            defects.append(f"({left}, {right}) = {value}, expected {expected}")
        if not (value + table(right, left)).is_zero():
            defects.append(f"({left}, {right}) + ({right}, {left}) = {value + table(right, left)}")
        return Verdict.from_defects(defects)

    def _jacobi(self, triple) -> Verdict:
        residual = jacobi_residual(*triple, table=self.table)
        if residual.is_zero():
            return Verdict(True)
        return Verdict(False, len(residual.terms()), str(residual))

    def _jacobi_degenerate(self) -> Verdict:
        defects = []
        for g in BASIS:
            for h in BASIS:
                residual = jacobi_residual(g, g, h, table=self.table)
                if not residual.is_zero():
                    defects.append(f"({g}, {g}, {h}): {residual}")
        return Verdict.from_defects(defects)

    def _lorentz(self) -> Verdict:
        defects = [f"({j}, {g}) deviates from the index action" for j, g in lorentz_defects(self.table)]
        defects.extend(f"({j}, {g}) leaves its span" for j, g in span_defects(self.table))
        return Verdict.from_defects(defects)


class IdentitySuite(CheckSuite):
    """Derived-observable identities in the normal-ordered word algebra."""

    def __init__(self, options: RunOptions):
        super().__init__("identities", "Mass, position and spin identities", options)
        self._catalog: Optional[ObservableCatalog] = None

    @property
    def catalog(self) -> ObservableCatalog:
        return self._once(
            "_catalog",
            lambda: ObservableCatalog(NCBackend(WordAlgebra(self.table, self.options.step_budget))),
        )

    def build_checks(self):
        return [
            (
                self._descriptor(check.id, check.paper_ref, "nc-calculus", check.quote, description=check.description),
                lambda check_id=check.id: Verdict.from_residuals(run_identity(check_id, self.catalog)),
            )
            for check in REGISTRY.values()
            if "nc" in check.backends
        ]


class MatrixSuite(CheckSuite):
    """The 6x6 matrix oracle."""

    def __init__(self, options: RunOptions):
        super().__init__("matrix", "Six-dimensional matrix representation", options)
        self._rep: Optional[MatrixRep] = None

    @property
    def rep(self) -> MatrixRep:
        return self._once("_rep", lambda: build_matrix_rep(self.table))

    def build_checks(self):
        checks = [(
            self._descriptor("matrix.solve", "Eq. (4)", "realizations", "obey the following commutation relations"),
            self._solve,
        )]
        for left, right in itertools.combinations(BASIS, 2):
            checks.append((
                self._descriptor(f"matrix.pair.{_pair_name(left, right)}", "Eq. (4)", "realizations",
                                 "obey the following commutation relations"),
                lambda l=left, r=right: self._pair(l, r),
            ))
        checks.append((
            self._descriptor("matrix.g-antisymmetry", "Eq. (4)", "realizations", "the set of commutators of its generators"),
            lambda: Verdict.from_defects(g_antisymmetry_defects(self.rep), lambda g: f"{g} is not G-antisymmetric"),
        ))
        return checks

    def _solve(self) -> Verdict:
        rep = self.rep
        defects = []
        if rep[J(0, 1)] != lorentz_matrix(0, 1):
            defects.append("J01 is not mapped to L01")
        return Verdict.from_defects(defects)

    def _pair(self, left, right) -> Verdict:
        residual = pair_residual(self.rep, left, right, self.table)
        if residual.zero:
            return Verdict(True)
        return Verdict(False, residual.nonzero_entries, residual.render())


REALIZATION_IDENTITIES = (
    "eq1.mass-definition",
    "eq5.poincare-mass",
    "eq5.dilatation-mass",
    "eq5.conformal-mass-squared",
    "eq5.conformal-mass-odd",
    "eq5.odd-even-consistency",
    "eq6.accelerated-mass-shift",
    "eq7.canonical-commutator",
    "eq7.dilatation",
    "eq7.lorentz",
    "eq9.position-commutator",
    "eq9.conformal-mass-bracket",
    "eq9.spin-tensor",
    "eq10.spin-orthogonality",
    "eq11.dilatation-as-position",
    "eq11.redshift",
    "eq13.covariance",
)


class RealizationSuite(CheckSuite):
    """Differential-operator oracle at one and N particles."""

    def __init__(self, options: RunOptions):
        super().__init__("realization", "Massless scalar differential-operator realization", options)
        self._constants = None
        self._realizations: Dict[int, Realization] = {}
        self._catalogs: Dict[int, ObservableCatalog] = {}

    @property
    def constants(self):
        return self._once("_constants", lambda: build_one_particle_realization(self.table))

    def realization(self, n: int) -> Realization:
        with self._lock:
            real = self._realizations.get(n)
        if real is None:
            real = Realization(n, self.constants)
            with self._lock:
                real = self._realizations.setdefault(n, real)
        return real

    def operator_catalog(self, n: int) -> ObservableCatalog:
        with self._lock:
            catalog = self._catalogs.get(n)
        if catalog is None:
            catalog = ObservableCatalog(OperatorBackend(self.realization(n)))
            with self._lock:
                catalog = self._catalogs.setdefault(n, catalog)
        return catalog

    def build_checks(self):
        n = max(self.options.particles, 2)
        checks = [(
            self._descriptor("realization.one-particle.closure", "Eq. (4)", "realizations",
                             "obey the following commutation relations", particles=1),
            self._one_particle_closure,
        )]
        for particles in sorted({1, n}):
            for left, right in itertools.combinations(BASIS, 2):
                checks.append((
                    self._descriptor(f"realization.pair.n{particles}.{_pair_name(left, right)}", "Eq. (4)",
                                     "realizations", "obey the following commutation relations", particles=particles),
                    lambda l=left, r=right, p=particles: self._pair(p, l, r),
                ))
        for check_id in REALIZATION_IDENTITIES:
            check = REGISTRY[check_id]
            checks.append((
                self._descriptor(f"realization.{check_id}", check.paper_ref, "realizations", check.quote, particles=n),
                lambda c=check_id: Verdict.from_residuals(check_identity_in_realization(c, n, self.operator_catalog(n))),
            ))
        checks.append((
            self._descriptor("realization.spin-nontrivial", "Eq. (9)", "realizations",
                             "M²·(X_μ,X_ν)=J_{μν}−(P_μ·X_ν−P_ν·X_μ)≡S_{μν}", particles=n),
            lambda: self._spin_nontrivial(n),
        ))
        checks.append((
            self._descriptor("realization.eq7.point-evaluations", "Eq. (7)", "realizations", "(P_μ,X_ν)=−η_{μν}",
                             particles=n, samples=self.options.point_samples, seed=self.options.seed),
            lambda: self._point_evaluations(n),
        ))
        checks.append((
            self._descriptor("realization.two-photon-mass", "two-photon example", "realizations",
                             "vanishing momentum and therefore has a non vanishing mass equal to its energy", particles=2),
            self._two_photon,
        ))
        return checks

    def _one_particle_closure(self) -> Verdict:
        residuals = one_particle_closure(self.constants, self.table)
        defects = [f"({l}, {r}): {op}" for (l, r), op in residuals.items() if not op.is_zero()]
        return Verdict.from_defects(defects)

    def _pair(self, particles: int, left, right) -> Verdict:
        residual = self.realization(particles).pair_residual(left, right, self.table)
        if residual.is_zero():
            return Verdict(True)
        return Verdict(False, len(residual), str(residual))

    def _spin_nontrivial(self, n: int) -> Verdict:
        spin = self.operator_catalog(n).spin_tensor(1, 2)
        if spin.is_zero():
            return Verdict(False, 1, "S12 realizes as the zero operator")
        return Verdict(True)

    def _point_evaluations(self, n: int) -> Verdict:
        samples = canonical_point_samples(n, self.options.point_samples, self.options.seed, self.operator_catalog(n))
        defects = [
            f"(P{s.mu}, X{s.nu}) at {dict(sorted(s.point.items()))}: {s.value} != {s.expected}"
            for s in samples
            if not s.ok
        ]
        return Verdict.from_defects(defects)

    def _two_photon(self) -> Verdict:
        values = two_photon_observables()
        expected = {
            "mass_squared": Scalar(4),
            "mass": Scalar(2),
            "energy": Scalar(2),
            "momentum_1": Scalar(),
            "momentum_2": Scalar(),
            "momentum_3": Scalar(),
        }
        defects = [f"{name} = {values[name]}, expected {value}" for name, value in expected.items() if values[name] != value]
        return Verdict.from_defects(defects)


GROUPS = ("algebra", "identities", "matrix", "realization")
