"""
Exact dyadic rationals and residues modulo 2^n - 1.

Every coordinate in plgroup is a :class:`Dyadic`, a value ``m / 2^e`` kept
in canonical form (``e == 0`` or ``m`` odd). No floating point is used.
"""
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Any, Optional, Union

from src.plgroup.core.errors import ParseError

_DYADIC_RE = re.compile(r"^([+-]?\d+)(?:/(?:2\^(\d+)|(\d+)))?$")


def _trailing_zeros(value: int) -> int:
    return (value & -value).bit_length() - 1


def _power_of_two_exponent(value: int) -> Optional[int]:
    """Return e with value == 2^e, or None."""
    if value <= 0 or value & (value - 1):
        return None
    return value.bit_length() - 1


@total_ordering
@dataclass(frozen=True, eq=False)
class Dyadic:
    """
    Exact dyadic rational ``mantissa / 2^exponent``.

    Construction always canonicalizes, so two equal values have equal
    fields. Division is only defined by powers of 2.
    """

    mantissa: int
    exponent: int = 0

    def __post_init__(self) -> None:
        mantissa, exponent = self.mantissa, self.exponent
        if exponent < 0:
            mantissa, exponent = mantissa << -exponent, 0
        if mantissa == 0:
            exponent = 0
        else:
            shift = min(_trailing_zeros(mantissa), exponent)
            mantissa, exponent = mantissa >> shift, exponent - shift
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    @classmethod
    def from_fraction(cls, value: Union[Fraction, int]) -> "Dyadic":
        """
        Convert a fraction whose denominator is a power of 2.

        Raises:
            ValueError: If the denominator has an odd factor
        """
        value = Fraction(value)
        exponent = _power_of_two_exponent(value.denominator)
        if exponent is None:
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(value.numerator, exponent)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.exponent)

    # Arithmetic

    def __add__(self, other: Any) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        exponent = max(self.exponent, other.exponent)
        return Dyadic(
            (self.mantissa << (exponent - self.exponent))
            + (other.mantissa << (exponent - other.exponent)),
            exponent,
        )

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else -self

    def __sub__(self, other: Any) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.exponent != 0 and abs(other.mantissa) == 1:
            return self.shift(other.exponent) * (1 if other.mantissa > 0 else -1)
        power = _power_of_two_exponent(abs(other.mantissa))
        if power is None or other.exponent != 0:
            raise ValueError(f"division by {other} is not a division by a power of 2")
        return self.shift(-power) * (1 if other.mantissa > 0 else -1)

    def shift(self, bits: int) -> "Dyadic":
        """Multiply by ``2**bits`` (``bits`` may be negative)."""
        if bits >= 0:
            return Dyadic(self.mantissa << bits, self.exponent)
        return Dyadic(self.mantissa, self.exponent - bits)

    # Order

    def __eq__(self, other: Any) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.mantissa == other.mantissa and self.exponent == other.exponent

    def __lt__(self, other: Any) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).mantissa < 0

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    # Rounding

    def floor(self) -> int:
        return self.mantissa >> self.exponent

    def ceil(self) -> int:
        return -((-self.mantissa) >> self.exponent)

    def __floor__(self) -> int:
        return self.floor()

    def __ceil__(self) -> int:
        return self.ceil()

    def frac(self) -> "Dyadic":
        """Fractional part in [0, 1)."""
        return self - self.floor()

    def is_integer(self) -> bool:
        return self.exponent == 0

    def __bool__(self) -> bool:
        return self.mantissa != 0

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}/2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"


DyadicLike = Union[Dyadic, int]

ZERO = Dyadic(0)
ONE = Dyadic(1)


def _coerce(value: Any) -> Any:
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, int):
        return Dyadic(value)
    if isinstance(value, Fraction):
        exponent = _power_of_two_exponent(value.denominator)
        if exponent is None:
            return NotImplemented
        return Dyadic(value.numerator, exponent)
    return NotImplemented


def as_dyadic(value: Any) -> Dyadic:
    """
    Coerce an int, dyadic Fraction or text to a Dyadic.

    Raises:
        ParseError: If the value is not a dyadic rational
    """
    if isinstance(value, str):
        return parse_dyadic(value)
    result = _coerce(value)
    if result is NotImplemented:
        raise ParseError(f"not a dyadic rational: {value!r}")
    return result


def normalize(mantissa: int, exponent: int) -> Dyadic:
    """Return the canonical Dyadic equal to ``mantissa / 2^exponent``."""
    return Dyadic(mantissa, exponent)


def parse_dyadic(text: str) -> Dyadic:
    """
    Parse ``m``, ``m/2^e`` or ``m/d`` with ``d`` a power of 2.

    Raises:
        ParseError: If the text is not a dyadic literal
    """
    match = _DYADIC_RE.match(text.strip())
    if not match:
        raise ParseError(f"malformed dyadic literal {text!r}")
    mantissa = int(match.group(1))
    if match.group(2) is not None:
        return Dyadic(mantissa, int(match.group(2)))
    if match.group(3) is not None:
        exponent = _power_of_two_exponent(int(match.group(3)))
        if exponent is None:
            raise ParseError(f"denominator of {text!r} is not a power of 2")
        return Dyadic(mantissa, exponent)
    return Dyadic(mantissa)


def log2_ratio(numerator: Dyadic, denominator: Dyadic) -> Optional[int]:
    """Return k with numerator / denominator == 2^k, or None."""
    ratio = numerator.to_fraction() / denominator.to_fraction()
    if ratio <= 0:
        return None
    up = _power_of_two_exponent(ratio.numerator)
    down = _power_of_two_exponent(ratio.denominator)
    if up is None or down is None:
        return None
    return up - down


def power_of_base(n: int, k: int) -> Dyadic:
    """``(2^n)^k`` for any integer k."""
    return ONE.shift(n * k)


@dataclass(frozen=True)
class Residue:
    """
    Residue modulo ``2^n - 1``.

    ``value`` is always reduced; the orbit index shows 0 as the modulus.
    """

    value: int
    modulus: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.modulus)

    @property
    def orbit_index(self) -> int:
        return self.value or self.modulus

    def __add__(self, other: Any) -> "Residue":
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ValueError("residues with different moduli")
            other = other.value
        if not isinstance(other, int):
            return NotImplemented
        return Residue(self.value + other, self.modulus)

    __radd__ = __add__

    def __mul__(self, other: Any) -> "Residue":
        if not isinstance(other, int):
            return NotImplemented
        return Residue(self.value * other, self.modulus)

    __rmul__ = __mul__

    def describe(self) -> str:
        """Text form used by the CLI, e.g. ``0 (orbit O_3)``."""
        return f"{self.value} (orbit O_{self.orbit_index})"

    def __str__(self) -> str:
        return str(self.value)


def theta(x: DyadicLike, n: int) -> Residue:
    """
    The residue map ``k / (2^n)^m -> k mod (2^n - 1)``.

    Args:
        x: Dyadic point
        n: Level, at least 2

    Returns:
        Residue of x modulo 2^n - 1
    """
    if n < 2:
        raise ValueError(f"level must be at least 2, got {n}")
    x = as_dyadic(x)
    blocks = -(-x.exponent // n)
    k = x.mantissa << (n * blocks - x.exponent)
    return Residue(k, (1 << n) - 1)


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Dyadic):
        return value.to_fraction()
    return Fraction(value)


def int_count(x: Any, y: Any) -> int:
    """
    Signed number of integers strictly between x and y.

    Positive when ``x < y``, negative when ``y < x``. Accepts Dyadics, ints
    and Fractions.
    """
    x, y = _as_fraction(x), _as_fraction(y)
    if x == y:
        return 0
    if x < y:
        return math.ceil(y) - math.floor(x) - 1
    return -int_count(y, x)
