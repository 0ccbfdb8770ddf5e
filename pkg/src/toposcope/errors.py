"""Exception hierarchy.

Validation failures (malformed sites, presheaves, natural transformations)
derive from :class:`ValidationError`; the CLI maps those to exit code 3.
"""


class ToposError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(ToposError):
    pass


class MissingIdentity(ValidationError):
    pass


class NonAssociative(ValidationError):
    pass


class IllTypedComposite(ValidationError):
    pass


class NonFunctorial(ValidationError):
    pass


class ActionTypeError(ValidationError):
    pass


class NonNatural(ValidationError):
    pass


class NotRestrictionClosed(ValidationError):
    pass


class FormatError(ValidationError):
    """A JSON document does not follow the documented schema."""


class UnknownObject(ToposError):
    pass


class TargetMismatch(ToposError):
    pass


class SiteMismatch(ToposError):
    pass


class TypeMismatch(ToposError):
    pass


class AmbientMismatch(ToposError):
    pass


class UnknownBuiltin(ToposError):
    pass


class MissingInterpretation(ToposError):
    pass


class BudgetExceeded(ToposError):
    def __init__(self, message, partial_count=0):
        super().__init__(message)
        self.partial_count = partial_count
