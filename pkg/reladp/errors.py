"""Exceptions raised by reladp."""


class ReladpError(Exception):
    pass


class TrsParseError(ReladpError, ValueError):
    """Syntax or well-formedness error in a .trs file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class RuleError(ReladpError, ValueError):
    pass


class AdpError(ReladpError, ValueError):
    pass


class RewriteError(ReladpError):
    pass


class InterpretationError(ReladpError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(ReladpError):
    pass


class ProverTimeout(ReladpError):
    pass
