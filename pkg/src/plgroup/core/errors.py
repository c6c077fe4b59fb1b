"""
Exception hierarchy for plgroup.

Malformed input and mathematical refusals are kept apart so the CLI can
map them to different exit codes.
"""
from typing import Any, Optional


class PLGroupError(Exception):
    """Base class for all plgroup errors."""


class MalformedInputError(PLGroupError, ValueError):
    """Input text or data that cannot be interpreted."""


class ParseError(MalformedInputError):
    """Text that does not follow the Dyadic, plmap1p or manifest syntax."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class InvariantError(MalformedInputError):
    """Node data that does not describe a 1-periodic PL homeomorphism."""

    def __init__(self, message: str, position: Optional[int] = None) -> None:
        self.position = position
        prefix = f"node {position}: " if position is not None else ""
        super().__init__(f"{prefix}{message}")


class RefusalError(PLGroupError, ValueError):
    """A well-formed request that has no mathematical answer."""


class MembershipError(RefusalError):
    """The element does not satisfy the congruence condition."""

    def __init__(self, message: str, certificate: Any = None) -> None:
        self.certificate = certificate
        super().__init__(message)


class ThetaMismatchError(RefusalError):
    """No Thompson element maps the given points, residues differ."""

    def __init__(self, index: int, source: Any, target: Any) -> None:
        self.index = index
        self.source = source
        self.target = target
        super().__init__(
            f"point {index}: theta {source} does not match theta {target}"
        )


class GridError(RefusalError):
    """Bump data not aligned on a common 2^n-adic grid."""


class DegreeError(RefusalError):
    """The degree of the pair is undefined."""


class PreconditionError(RefusalError):
    """A documented precondition does not hold."""


class ConstructionError(PLGroupError, RuntimeError):
    """A construction exceeded its budget or failed its own postcondition."""
