"""Exception hierarchy shared by all modules."""


class PrimeregError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PrimeregError, ValueError):
    """An argument lies outside the domain of the operation."""


class EmptyTableError(DomainError):
    pass


class InconsistentCongruences(PrimeregError, ValueError):
    pass


class NoUnitRoot(PrimeregError, ArithmeticError):
    """No p-adic unit root exists (or none was certified) for some prime."""

    def __init__(self, p: int, message: str | None = None):
        self.p = p
        super().__init__(message or f"no p-adic unit root for p={p}")


class IntegrityError(PrimeregError, ArithmeticError):
    """An identity that must hold exactly failed; indicates a bug or bad input data."""


class ConstructionError(PrimeregError, ValueError):
    pass


class SpecError(PrimeregError, ValueError):
    pass


class GuardError(PrimeregError, RuntimeError):
    """A configured size or memory guard refused the computation."""
