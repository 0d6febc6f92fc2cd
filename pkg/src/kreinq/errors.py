"""Exception hierarchy shared by all modules."""


class KreinError(Exception):
    """Base class for every error raised by kreinq."""


class DimensionMismatch(KreinError, ValueError):
    pass


class NonFiniteEntry(KreinError, ValueError):
    pass


class HermitianViolation(KreinError, ValueError):
    pass


class SpectrumHit(KreinError, ArithmeticError):
    """z lies in (or numerically next to) the spectrum of A0."""


class EigensolverFailure(KreinError, ArithmeticError):
    pass


class FamilyInvariantViolation(KreinError, ValueError):
    pass


class QSingular(KreinError, ArithmeticError):
    """Q_z or Q_zbar failed the bounded-inverse test."""


class EmptyGrid(KreinError, ValueError):
    pass


class ResolventSingular(KreinError, ArithmeticError):
    """The assembled Krein resolvent is not invertible, so no A_Q can be read off."""


class NotInRhoAQ(KreinError, ArithmeticError):
    pass


class InsufficientSamples(KreinError, ValueError):
    pass


class EmptyZQ(KreinError, ArithmeticError):
    """No sampled point passed the Z_Q test; the main theorem has no hypothesis to work with."""


class IntervalInSpectrumA0(KreinError, ValueError):
    pass


class InvalidRecipe(KreinError, ValueError):
    pass


class ConfigParse(KreinError, ValueError):
    pass
