"""
Errors raised by the verification engine.
"""


class ConformalCheckError(Exception):
    """Base class for every engine error."""


class IndexPairingError(ConformalCheckError):
    """A monomial whose bound indices are not paired once upper, once lower."""

    def __init__(self, message: str, monomial) -> None:
        super().__init__(f"{message}: {monomial}")
        self.monomial = monomial


class RewriteBudgetExceeded(ConformalCheckError):
    """Normal ordering did not terminate within the configured step budget."""

    def __init__(self, word, budget: int) -> None:
        super().__init__(f"rewrite budget of {budget} steps exceeded while reducing {word}")
        self.word = word
        self.budget = budget


class RewriteDepthExceeded(RewriteBudgetExceeded):
    """A rewrite chain nested deeper than the interpreter recursion limit."""

    def __init__(self, word, depth: int) -> None:
        ConformalCheckError.__init__(self, f"rewrite chain deeper than {depth} frames while reducing {word}")
        self.word = word
        self.budget = None
        self.depth = depth


class RepresentationUnsolvable(ConformalCheckError):
    """The closure constraints of a realization ansatz have no rational solution."""


class ParticleCountError(ConformalCheckError):
    """The realization has too few particles for the requested operation."""


class PointRejected(ConformalCheckError):
    """A momentum point where an exact evaluation is impossible."""


class UnknownCheckError(ConformalCheckError):
    """A selection named identifiers that are not in the catalog."""

    def __init__(self, unknown) -> None:
        self.unknown = tuple(unknown)
        super().__init__(f"Unknown check identifiers: {', '.join(self.unknown)}")
