"""Exception hierarchy shared by all modules."""


class QSTError(Exception):
    """Base class for every error raised by xxqst."""


class InvalidLength(QSTError, ValueError):
    pass


class NonPositivePerturbation(QSTError, ValueError):
    pass


class NonHalfIntegerFilling(QSTError, ValueError):
    pass


class ConvergenceFailure(QSTError, ArithmeticError):
    pass


class IndexOutOfRange(QSTError, IndexError):
    pass


class LocalizationNotFound(QSTError):
    pass


class SextetMismatch(QSTError):
    pass


class UnorderedPair(QSTError, ValueError):
    pass


class SetupArityMismatch(QSTError, ValueError):
    pass


class SizeCapExceeded(QSTError, ValueError):
    pass


class DegenerateSamples(QSTError, ValueError):
    pass
