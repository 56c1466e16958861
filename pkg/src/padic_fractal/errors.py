"""Exception hierarchy.

The CLI maps these onto its exit codes: ``InputError`` and ``ModelError``
exit with 3, ``UnsupportedError`` with 4.
"""


class PAdicFractalError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PAdicFractalError, ValueError):
    """An argument is outside the operation's domain."""


class PrimeMismatchError(InputError):
    pass


class DomainError(InputError):
    pass


class JumpPointError(InputError):
    """A Fourier series was evaluated at one of its jump points."""


class ModelError(PAdicFractalError):
    """The request is well formed but describes no valid object."""


class DivergenceError(ModelError):
    pass


class EvaluationAtPoleError(ModelError):
    pass


class DegenerateFitError(ModelError):
    pass


class FormulaSingularityError(ModelError):
    pass


class NumericError(PAdicFractalError):
    pass


class UnsupportedError(PAdicFractalError):
    """The operation is defined mathematically but not implemented here."""


class UnsupportedMultiplicityError(UnsupportedError):
    pass


class NotApplicableError(UnsupportedError):
    pass
