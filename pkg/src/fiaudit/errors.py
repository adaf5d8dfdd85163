"""Exception hierarchy. The CLI maps each class to an exit code."""


class FiauditError(Exception):
    exit_code = 1


class ConfigError(FiauditError, ValueError):
    """Invalid configuration or argument values (exit code 1)."""

    exit_code = 1


class DataError(FiauditError, ValueError):
    """Input data cannot support the requested operation (exit code 2)."""

    exit_code = 2


class NumericError(FiauditError, ArithmeticError):
    """Training or estimation produced non-finite values (exit code 3)."""

    exit_code = 3
