"""Exception hierarchy shared by every module."""


class NormalFormError(Exception):
    """Base class for all library errors."""


class ConfigurationError(NormalFormError):
    """Inconsistent inputs: ring mismatch, frame/tag mismatch, bad job data."""


class RingMismatch(ConfigurationError):
    pass


class NonInvertible(NormalFormError):
    def __init__(self, value, message=None):
        self.value = value
        super().__init__(message or f"value is not a unit: {value!r}")


class NotCoprime(NormalFormError):
    pass


class NotIrrational(NormalFormError):
    pass


class DomainError(NormalFormError):
    pass


class PreconditionError(NormalFormError):
    pass


class SmallDivisorError(NormalFormError):
    def __init__(self, component, exponent, divisor, message=None):
        self.component = component
        self.exponent = tuple(exponent)
        self.divisor = divisor
        super().__init__(
            message
            or f"small divisor in component {component} at exponent {self.exponent}: {divisor!r}"
        )


class StructureError(NormalFormError):
    """A map does not have the required monomial shape.

    ``witnesses`` is a list of ``(component, exponent, detail)`` triples naming
    every offending term.
    """

    def __init__(self, message, witnesses=()):
        self.witnesses = list(witnesses)
        super().__init__(message)
