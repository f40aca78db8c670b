"""Exception hierarchy shared by every module."""


class LoewnerLabError(Exception):
    """Base class for all errors raised by loewner_lab."""


class InputError(LoewnerLabError, ValueError):
    """Malformed or out-of-contract input (shape, symmetry, parameter range)."""


class PowerDomainError(InputError):
    """A power map was applied outside its domain, e.g. the plain power on x < 0."""


class PowerRangeError(LoewnerLabError, ArithmeticError):
    """A computed value overflowed the finite range we accept."""


class UnsupportedQueryError(LoewnerLabError, ValueError):
    """The request is well formed but not covered by the implemented theory."""


class SearchFailure(LoewnerLabError, RuntimeError):
    """A deterministic search (node selection, epsilon halving) came up empty."""


class InconclusiveError(SearchFailure):
    """A numerical experiment did not produce enough evidence to answer."""
