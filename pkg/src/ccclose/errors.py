"""Exception hierarchy shared across the package."""


class CCCloseError(Exception):
    """Base class for all errors raised by ccclose."""


class ParseError(CCCloseError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownVariableError(ParseError):
    pass


class VariableMismatchError(CCCloseError):
    pass


class PoleError(CCCloseError, ZeroDivisionError):
    """Evaluation hit a negative exponent at a zero coordinate."""


class ZeroIdealError(CCCloseError):
    pass


class DimensionCapError(CCCloseError):
    pass


class PreconditionError(CCCloseError):
    """An operation was called outside its documented domain."""


class ScionError(CCCloseError):
    """A scion operation was asked to do something its checks reject."""
