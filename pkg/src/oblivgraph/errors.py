"""Exception types shared across the package."""


class RangeError(ValueError):
    """A clear value does not fit the ring or fixed-point range."""


class KindError(TypeError):
    """Operands of the wrong secret kind were combined."""


class HandleError(RuntimeError):
    """A handle is stale or belongs to another black box."""


class ArithmeticFault(ArithmeticError):
    """Raised by the diagnostic black box, e.g. on a zero divisor."""


class IndexFault(IndexError):
    """Secret index out of range (diagnostic mode only)."""


class SizeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ProtocolError(RuntimeError):
    pass


class ValidationError(ValueError):
    """Graph input failed validation; ``errors`` lists every offender."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class PartitionError(ValidationError):
    pass


class ParseError(ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
