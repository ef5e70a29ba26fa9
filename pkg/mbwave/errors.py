"""
Exceptions raised by mbwave.

Each family carries the process exit status the command line reports
for it.

>>> OutOfDomain('x beyond the boundary').exit_code
2
>>> isinstance(RecursionBound('deep'), ArithmeticError)
True
"""


class MbwaveError(Exception):
    exit_code = 1


class ValidationError(MbwaveError, ValueError):
    "A parameter, schema or domain rule was violated."

    exit_code = 2


class OutOfDomain(ValidationError):
    "A query fell outside the cone on which the solution is determined."


class DegenerateFeedback(ValidationError):
    pass


class CompatibilityError(ValidationError):
    pass


class ScenarioError(ValidationError):
    """
    A scenario or settings file could not be used.

    >>> str(ScenarioError('not a number', path='s.json', field='k', line=3))
    's.json:3: k: not a number'
    """

    def __init__(self, message, path=None, field=None, line=None):
        super().__init__(message)
        self.path = path
        self.field = field
        self.line = line

    def __str__(self):
        location = ':'.join(
            str(part) for part in (self.path, self.line) if part is not None
        )
        prefix = ''.join(
            f'{part}: ' for part in (location, self.field) if part
        )
        return prefix + super().__str__()


class NumericalError(MbwaveError, ArithmeticError):
    exit_code = 3


class QuadratureError(NumericalError):
    pass


class RecursionBound(NumericalError):
    pass


class Divergence(NumericalError):
    pass


class VerificationFailure(MbwaveError):
    exit_code = 4
