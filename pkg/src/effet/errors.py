"""Exception hierarchy shared by every effet module."""


class EffetError(Exception):
    """Base class for all errors raised by the workbench."""


class ParseError(EffetError, SyntaxError):
    def __init__(self, msg, line, col, text=None):
        SyntaxError.__init__(self, f"{msg} (line {line}, column {col})")
        self.msg = msg
        self.lineno = line
        self.offset = col
        self.text = text

    def __str__(self):
        return f"{self.msg} (line {self.lineno}, column {self.offset})"


class UnknownName(EffetError):
    pass


class TypeMismatch(EffetError):
    pass


class UnboundVariable(EffetError):
    pass


class UnknownOperation(EffetError):
    pass


class EffectExceeded(EffetError):
    def __init__(self, actual, allowed):
        self.actual = frozenset(actual)
        self.allowed = frozenset(allowed)
        super().__init__(
            f"effect {{{','.join(sorted(self.actual))}}} exceeds "
            f"{{{','.join(sorted(self.allowed))}}}"
        )


class SizeLimitExceeded(EffetError):
    pass


class SaturationLimitExceeded(SizeLimitExceeded):
    pass


class SquareDoesNotCommute(EffetError):
    pass


class MonoidLawViolation(EffetError):
    pass


class IncompatibleConstant(EffetError):
    pass


class ConfigError(EffetError):
    pass
