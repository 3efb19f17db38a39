"""
Associative word algebra over the conformal generators and formal mass powers.

Words are reduced to the normal shape ``D* J* P* C* [M^k]``: generators are
sorted by family and index, mass powers move to the right end and merge, powers
k >= 2 are expanded through M^2 = P_rho P^rho, and when a negative power is
present at most one P0 survives (P0 P0 = M^2 + P1 P1 + P2 P2 + P3 P3).
"""

from __future__ import annotations

import functools
import logging
import random
import sys
import threading
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .algebra import BASIS, AlgebraElement, Generator, StructureTable, default_table, signed_lorentz
from .exceptions import RewriteBudgetExceeded, RewriteDepthExceeded
from .tensors import I, ONE, SIGNATURE, ZERO, CoefficientExpr, Scalar


logger = logging.getLogger(__name__)

DEFAULT_STEP_BUDGET = 200_000
DEFAULT_MEMO_LIMIT = 250_000
MASS_RANK = 5


@dataclass(frozen=True, slots=True)
class MPower:
    """The formal letter M^k, k a nonzero integer."""

    exponent: int

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or self.exponent == 0:
            raise ValueError("MPower exponent must be a nonzero integer")

    @property
    def name(self) -> str:
        return "M" if self.exponent == 1 else f"M^{self.exponent}"

    @property
    def rank(self) -> int:
        return MASS_RANK

    @property
    def weight(self) -> int:
        return self.exponent

    def sort_key(self) -> tuple:
        return (MASS_RANK, ())

    def __str__(self) -> str:
        return self.name


Letter = Union[Generator, MPower]
Word = Tuple[Letter, ...]


def render_word(word: Word) -> str:
    return "*".join(letter.name for letter in word) if word else "1"


def _word_key(word: Word) -> tuple:
    return (
        len(word),
        tuple(
            (letter.rank, letter.indices if isinstance(letter, Generator) else (letter.exponent,))
            for letter in word
        ),
    )


def word_weight(word: Word) -> int:
    return sum(letter.weight for letter in word)


def generator_degree(word: Word) -> int:
    return sum(1 for letter in word if isinstance(letter, Generator))


def _as_coefficient(value) -> CoefficientExpr:
    if isinstance(value, CoefficientExpr):
        return value
    return CoefficientExpr.scalar(value)


class NCPolynomial:
    """A formal sum of coefficient-weighted words."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Word, object]] = None) -> None:
        self._terms: Dict[Word, CoefficientExpr] = {}
        for word, coefficient in (terms or {}).items():
            self._accumulate(tuple(word), _as_coefficient(coefficient))

    def _accumulate(self, word: Word, coefficient: CoefficientExpr) -> None:
        if coefficient.is_zero():
            return
        total = self._terms.get(word)
        total = coefficient if total is None else total + coefficient
        if total.is_zero():
            self._terms.pop(word, None)
        else:
            self._terms[word] = total

    @classmethod
    def constant(cls, value) -> "NCPolynomial":
        return cls({(): value})

    @classmethod
    def zero(cls) -> "NCPolynomial":
        return cls()

    def terms(self) -> List[Tuple[Word, CoefficientExpr]]:
        return sorted(self._terms.items(), key=lambda kv: _word_key(kv[0]))

    def words(self) -> List[Word]:
        return [word for word, _ in self.terms()]

    def coefficient(self, word: Word) -> CoefficientExpr:
        return self._terms.get(tuple(word), CoefficientExpr.zero())

    def constant_term(self) -> CoefficientExpr:
        return self.coefficient(())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def max_degree(self) -> int:
        return max((generator_degree(w) for w in self._terms), default=0)

    def __add__(self, other: "NCPolynomial") -> "NCPolynomial":
        out = NCPolynomial(self._terms)
        for word, coefficient in other._terms.items():
            out._accumulate(word, coefficient)
        return out

    def __neg__(self) -> "NCPolynomial":
        return self.scale(-1)

    def __sub__(self, other: "NCPolynomial") -> "NCPolynomial":
        return self + (-other)

    def scale(self, factor) -> "NCPolynomial":
        factor = _as_coefficient(factor)
        out = NCPolynomial()
        for word, coefficient in self._terms.items():
            out._accumulate(word, coefficient * factor)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for word, coefficient in self.terms():
            body = render_word(word)
            if not word:
                parts.append(str(coefficient) if len(coefficient) == 1 else f"({coefficient})")
            elif coefficient == 1:
                parts.append(body)
            elif coefficient == -1:
                parts.append(f"-{body}")
            elif len(coefficient) > 1:
                parts.append(f"({coefficient})*{body}")
            else:
                parts.append(f"{coefficient}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"NCPolynomial({self})"


def _out_of_order(x: Letter, y: Letter) -> bool:
    if isinstance(x, MPower) and isinstance(y, MPower):
        return False
    return x.sort_key() > y.sort_key()


def _redexes(word: Word) -> List[Tuple[str, int]]:
    """Applicable rewrites, tiered: ordering first, then M^k expansion, then the P0 ideal.

    Expansion and the ideal only see words that are already sorted with a single
    trailing mass letter, so the M^2 an ideal step introduces is carried to the
    right end and merged before it could be expanded again.
    """
    ordering = []
    last = len(word) - 1
    for i, letter in enumerate(word):
        if i < last and isinstance(letter, MPower) and isinstance(word[i + 1], MPower):
            ordering.append(("merge", i))
        elif i < last and _out_of_order(letter, word[i + 1]):
            ordering.append(("swap", i))
    if ordering:
        return ordering
    if not word or not isinstance(word[-1], MPower):
        return []
    k = word[-1].exponent
    if k >= 2:
        return [("expand", last)]
    if k < 0 and word.count(_P0) >= 2:
        return [("ideal", word.index(_P0))]
    return []


_P0 = Generator("P", (0,))


def is_normal(word: Word) -> bool:
    return not _redexes(word)


class WordAlgebra:
    """Normal ordering and products of NCPolynomials for one structure table."""

    def __init__(
        self,
        table: Optional[StructureTable] = None,
        step_budget: int = DEFAULT_STEP_BUDGET,
        memo_limit: int = DEFAULT_MEMO_LIMIT,
    ) -> None:
        self.table = table or default_table()
        self.step_budget = step_budget
        self.memo_limit = memo_limit
        self._memo: Dict[Word, Dict[Word, Scalar]] = {}
        self._mass_shifts: Dict[Tuple[int, int], Dict[Word, Scalar]] = {}
        self._local = threading.local()

    # -- construction -------------------------------------------------

    def generator(self, g: Generator) -> NCPolynomial:
        return NCPolynomial({(g,): 1})

    def mpower(self, k: int) -> NCPolynomial:
        if k == 0:
            return self.scalar(1)
        return self.normal_form(NCPolynomial({(MPower(k),): 1}))

    def scalar(self, value) -> NCPolynomial:
        return NCPolynomial.constant(value)

    def element(self, element: AlgebraElement) -> NCPolynomial:
        return NCPolynomial({(g,): c for g, c in element.terms()})

    # -- rewriting ----------------------------------------------------

    def _enter(self) -> bool:
        depth = getattr(self._local, "depth", 0)
        if depth == 0:
            self._local.steps = 0
        self._local.depth = depth + 1
        return depth == 0

    def _leave(self) -> None:
        self._local.depth -= 1

    def _tick(self, word: Word) -> None:
        self._local.steps += 1
        if self._local.steps > self.step_budget:
            raise RewriteBudgetExceeded(render_word(word), self.step_budget)

    def _apply(self, word: Word, kind: str, i: int) -> List[Tuple[Word, Scalar]]:
        head = word[:i]
        if kind == "merge":
            total = word[i].exponent + word[i + 1].exponent
            middle = (MPower(total),) if total else ()
            return [(head + middle + word[i + 2:], ONE)]
        if kind == "expand":
            k = word[i].exponent
            rest = (MPower(k - 2),) if k != 2 else ()
            return [
                (head + (Generator("P", (r,)), Generator("P", (r,))) + rest + word[i + 1:], Scalar(SIGNATURE[r]))
                for r in range(4)
            ]
        if kind == "swap":
            x, y = word[i], word[i + 1]
            tail = word[i + 2:]
            out = [(head + (y, x) + tail, ONE)]
            # x y = y x + i (x, y)
            if isinstance(x, Generator):
                for g, c in self.table(x, y).terms():
                    out.append((head + (g,) + tail, I * c.as_scalar()))
            elif y.tag == "D":
                # (M^k, D) = -k M^k
                out.append((head + (x,) + tail, Scalar(0, -x.exponent)))
            elif y.tag == "C":
                # (M^k, C) = -(C, M^k)
                for w, c in self._mass_shift(y.indices[0], x.exponent).items():
                    out.append((head + w + tail, -I * c))
            return out
        if kind == "ideal":
            out = [(head + (MPower(2),) + word[i + 2:], ONE)]
            for j in (1, 2, 3):
                pj = Generator("P", (j,))
                out.append((head + (pj, pj) + word[i + 2:], ONE))
            return out
        raise ValueError(f"unknown rewrite {kind!r}")

    def _nf_word(self, word: Word) -> Dict[Word, Scalar]:
        cached = self._memo.get(word)
        if cached is not None:
            return cached
        redexes = _redexes(word)
        if not redexes:
            result = {word: ONE}
        else:
            self._tick(word)
            result: Dict[Word, Scalar] = {}
            kind, i = redexes[0]
            for rewritten, coefficient in self._apply(word, kind, i):
                for normal, value in self._nf_word(rewritten).items():
                    total = result.get(normal, ZERO) + coefficient * value
                    if total:
                        result[normal] = total
                    else:
                        result.pop(normal, None)
        self._memo[word] = result
        return result

    def _nf_word_randomized(self, word: Word, rng: random.Random) -> Dict[Word, Scalar]:
        pending: Dict[Word, Scalar] = {word: ONE}
        result: Dict[Word, Scalar] = {}
        while pending:
            current, coefficient = pending.popitem()
            if not coefficient:
                continue
            redexes = _redexes(current)
            if not redexes:
                result[current] = result.get(current, ZERO) + coefficient
                continue
            self._tick(current)
            kind, i = rng.choice(redexes)
            for rewritten, value in self._apply(current, kind, i):
                pending[rewritten] = pending.get(rewritten, ZERO) + coefficient * value
        return {w: c for w, c in result.items() if c}

    def normal_form(self, p: NCPolynomial, rng: Optional[random.Random] = None) -> NCPolynomial:
        """Unique canonical representative; with ``rng`` redexes are picked at random."""
        outermost = self._enter()
        if outermost and len(self._memo) > self.memo_limit:
            logger.debug("Word memo reached %d entries, clearing", len(self._memo))
            self._memo.clear()
        try:
            out = NCPolynomial()
            for word, coefficient in p._terms.items():
                if rng is None:
                    reduced = self._nf_word(word)
                else:
                    reduced = self._nf_word_randomized(word, rng)
                for normal, value in reduced.items():
                    out._accumulate(normal, coefficient * value)
            return out
        except RecursionError:
            if not outermost:
                raise
            raise RewriteDepthExceeded(str(p), sys.getrecursionlimit()) from None
        finally:
            self._leave()

    # -- mass shifts --------------------------------------------------

    def conformal_mass_shift(self, mu: int) -> NCPolynomial:
        """(C_mu, M) = 2 (eta_{mu rho} D - J_{mu rho}) . P^rho M^-1, summed over rho."""
        total = NCPolynomial()
        inverse = self.mpower(-1)
        for rho in range(4):
            frame = self.element(signed_lorentz(mu, rho)).scale(-1)
            if rho == mu:
                frame = frame + self.generator(Generator("D")).scale(SIGNATURE[mu])
            momentum = self.multiply(self.generator(Generator("P", (rho,))), inverse)
            total = total + self.sym_product(frame, momentum).scale(2 * SIGNATURE[rho])
        return total

    def _mass_shift(self, mu: int, k: int) -> Dict[Word, Scalar]:
        cached = self._mass_shifts.get((mu, k))
        if cached is not None:
            return cached
        shift = self.conformal_mass_shift(mu)
        if k < 0:
            inverse = self.mpower(-1)
            # (C, M^-1) = -M^-1 (C, M) M^-1
            shift = self.multiply(self.multiply(inverse, shift), inverse).scale(-1)
        n = abs(k)
        step = 1 if k > 0 else -1
        total = NCPolynomial()
        for j in range(n):
            left = self.mpower(step * j)
            right = self.mpower(step * (n - 1 - j))
            total = total + self.multiply(self.multiply(left, shift), right)
        result = {word: c.as_scalar() for word, c in total.terms()}
        self._mass_shifts[(mu, k)] = result
        logger.debug("Cached (C%d, M^%d) with %d terms", mu, k, len(result))
        return result

    # -- products -----------------------------------------------------

    def concatenate(self, p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
        out = NCPolynomial()
        for w1, c1 in p._terms.items():
            for w2, c2 in q._terms.items():
                out._accumulate(w1 + w2, c1 * c2)
        return out

    def multiply(self, p: NCPolynomial, q: NCPolynomial, rng: Optional[random.Random] = None) -> NCPolynomial:
        return self.normal_form(self.concatenate(p, q), rng)

    def product(self, *factors: NCPolynomial) -> NCPolynomial:
        return functools.reduce(self.multiply, factors, self.scalar(1))

    def sym_product(self, p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
        """The symmetrized product (pq + qp) / 2."""
        return (self.multiply(p, q) + self.multiply(q, p)).scale(Scalar(1) / 2)

    def nc_bracket(self, p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
        """The normalized bracket -i (pq - qp)."""
        return (self.multiply(p, q) - self.multiply(q, p)).scale(-I)

    def power(self, p: NCPolynomial, n: int) -> NCPolynomial:
        out = self.scalar(1)
        for _ in range(n):
            out = self.multiply(out, p)
        return out

    def basis_polynomials(self) -> List[NCPolynomial]:
        return [self.generator(g) for g in BASIS]

    def random_polynomial(self, rng: random.Random, terms: int = 3, length: int = 3, mass: bool = True) -> NCPolynomial:
        """Random low-degree polynomial with small integer coefficients."""
        letters: List[Letter] = list(BASIS)
        if mass:
            letters.extend(MPower(k) for k in (-2, -1, 1, 2))
        raw = {}
        for _ in range(terms):
            word = tuple(rng.choice(letters) for _ in range(rng.randint(0, length)))
            raw[word] = rng.choice((-2, -1, 1, 2, 3))
        return NCPolynomial(raw)

    def clear_cache(self) -> None:
        self._memo.clear()
        self._mass_shifts.clear()


@functools.lru_cache(maxsize=1)
def default_algebra() -> WordAlgebra:
    return WordAlgebra()


def multiply(p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
    return default_algebra().multiply(p, q)


def sym_product(p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
    return default_algebra().sym_product(p, q)


def nc_bracket(p: NCPolynomial, q: NCPolynomial) -> NCPolynomial:
    return default_algebra().nc_bracket(p, q)


def normal_form(p: NCPolynomial, rng: Optional[random.Random] = None) -> NCPolynomial:
    return default_algebra().normal_form(p, rng)


def letters(*names: str) -> NCPolynomial:
    """A single word from letter names, e.g. ``letters("C0", "P0")`` or ``letters("M^-2")``."""
    word: List[Letter] = []
    for name in names:
        if name.startswith("M"):
            word.append(MPower(int(name[2:]) if name.startswith("M^") else 1))
        else:
            word.append(Generator.parse(name))
    return NCPolynomial({tuple(word): 1})


def weights(words: Iterable[Word]) -> Dict[Word, int]:
    return {word: word_weight(word) for word in words}
