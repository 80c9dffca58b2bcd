"""Exceptions raised by the hadamard package."""

from dataclasses import dataclass


class HadamardError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HadamardError, ValueError):
    """Malformed input or a violated precondition."""


class FieldMismatchError(InputError):
    """Operands come from different fields."""


class ResourceCapError(HadamardError):
    """A configured resource cap would be exceeded."""


class ConfigError(HadamardError, RuntimeError):
    """A HADAMARD_* environment setting is invalid."""


@dataclass(frozen=True)
class Violation:
    """First structural problem found by a ``validate`` function."""

    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


def check_cap(count, cap, what):
    if count > cap:
        raise ResourceCapError(f"{what} would need {count} entries, cap is {cap}")
