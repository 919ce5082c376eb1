"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the CLI can map failures to distinct
process exit statuses.
"""


class SSMError(Exception):
    exit_code = 1


class ConfigError(SSMError, ValueError):
    exit_code = 2


class FormatError(SSMError, ValueError):
    exit_code = 3


class DomainError(SSMError, ValueError):
    exit_code = 4


class ShapeError(SSMError, ValueError):
    exit_code = 5


class CapacityError(SSMError, MemoryError):
    exit_code = 6


class SingularityError(SSMError, ArithmeticError):
    exit_code = 7
