"""
Membership in Omega_n, the named elements tau and zeta_k, and Gamma_n.

An element f of Omega_n satisfies, on every open segment where it is
linear, ``log2(slope) == count (mod n)`` where ``count`` is the signed number
of integers strictly between x and x·f. After cutting one period at the
breakpoints, at the integers and at the preimages of the integers, the count
is constant on each open piece: x and x·f both stay inside a fixed pair of
open unit intervals. Checking the congruence at the midpoint of every piece
therefore decides membership exactly.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from src.plgroup.core.dyadic import ONE, ZERO, Dyadic, DyadicLike, as_dyadic, int_count
from src.plgroup.core.errors import DegreeError, MembershipError, PreconditionError
from src.plgroup.core.plmap import (
    PLMap1P,
    compose,
    conjugate,
    evaluate,
    invert,
    slopes_at,
    translation,
)
from src.plgroup.core.thompson import theta_matched_points, transporter
from src.plgroup.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SegmentCheck:
    """Congruence evidence on one open segment ``[lo, hi)`` of the period."""

    lo: Dyadic
    hi: Dyadic
    count: int
    slope_log2: int
    ok: bool

    def render(self) -> str:
        verdict = "ok" if self.ok else "FAIL"
        return (
            f"seg [{self.lo},{self.hi}): count={self.count} "
            f"slope_log2={self.slope_log2} verdict={verdict}"
        )


@dataclass(frozen=True)
class OmegaCertificate:
    """
    Per-segment congruence evidence for one element.

    Attributes:
        level: The level n
        segments: Checks covering one period ``[0, 1)`` in order
    """

    level: int
    segments: Tuple[SegmentCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(segment.ok for segment in self.segments)

    @property
    def first_violation(self) -> Optional[SegmentCheck]:
        return next((segment for segment in self.segments if not segment.ok), None)

    def render(self) -> str:
        lines = [segment.render() for segment in self.segments]
        if self.passed:
            lines.append(f"omega n={self.level}: pass")
        else:
            bad = self.first_violation
            lines.append(f"omega n={self.level}: FAIL at [{bad.lo},{bad.hi})")
        return "\n".join(lines) + "\n"


def check_omega(f: PLMap1P, n: int) -> OmegaCertificate:
    """
    Certify the congruence condition for f at level n.

    Args:
        f: Element to check
        n: Level, at least 2

    Returns:
        Certificate whose ``passed`` flag is the verdict
    """
    if n < 2:
        raise PreconditionError(f"level must be at least 2, got {n}")
    preimage = evaluate(invert(f), ZERO).frac()
    cuts = sorted({ZERO, preimage, *(x.frac() for x in f.xs)})
    segments = []
    for i, lo in enumerate(cuts):
        hi = cuts[i + 1] if i + 1 < len(cuts) else ONE
        mid = (lo + hi).shift(-1)
        count = int_count(mid, evaluate(f, mid))
        slope = slopes_at(f, mid)[1]
        segments.append(SegmentCheck(lo, hi, count, slope, (slope - count) % n == 0))
    return OmegaCertificate(n, tuple(segments))


def require_omega(f: PLMap1P, n: int) -> OmegaCertificate:
    """
    Return the certificate, raising when f is not in Omega_n.

    Raises:
        MembershipError: Carrying the failing certificate
    """
    certificate = check_omega(f, n)
    if not certificate.passed:
        bad = certificate.first_violation
        logger.info("Element refused at level %d on [%s,%s)", n, bad.lo, bad.hi)
        raise MembershipError(
            f"not in Omega_{n}: count {bad.count} and slope log {bad.slope_log2} "
            f"differ mod {n} on [{bad.lo},{bad.hi})",
            certificate,
        )
    return certificate


def _base(n: int) -> int:
    if n < 2:
        raise PreconditionError(f"level must be at least 2, got {n}")
    return 1 << n


def make_tau(n: int) -> PLMap1P:
    """
    The special element tau of level n.

    Supported on ``(-1/N, 2/N) + Z`` with ``N = 2^n``; slopes N, 2 and 1/N on
    its three pieces.
    """
    base = _base(n)
    square = 2 * n
    return PLMap1P.from_nodes(
        [
            (Dyadic(-1, n), Dyadic(-1, n)),
            (Dyadic(1 - base, square), ZERO),
            (ZERO, Dyadic(2 * (base - 1), square)),
            (Dyadic(2, n), Dyadic(2, n)),
        ]
    )


def make_zeta(n: int, k: int) -> PLMap1P:
    """
    The element zeta_k of level n, for ``1 <= k <= 2^n - 2``.

    Raises:
        PreconditionError: If k is out of range
    """
    base = _base(n)
    if not 1 <= k <= base - 2:
        raise PreconditionError(f"zeta index must be in 1..{base - 2}, got {k}")
    e = 4 * n
    return PLMap1P.from_nodes(
        [
            (Dyadic(2, e), Dyadic(2, e)),
            (Dyadic(2 + k, e), Dyadic(2 + base * k, e)),
            (Dyadic(2 + base * k, e), Dyadic(2 + (2 * base - 1) * k, e)),
            (Dyadic(2 + 2 * base * k, e), Dyadic(2 + 2 * base * k, e)),
        ]
    )


def make_translation(c: DyadicLike) -> PLMap1P:
    return translation(c)


def zeta_window(n: int) -> Tuple[Dyadic, Dyadic]:
    """The interval ``[2/N^4, (2 + 2N^2)/N^4]`` holding every zeta_k support."""
    base = _base(n)
    return Dyadic(2, 4 * n), Dyadic(2 + 2 * base * base, 4 * n)


@dataclass(frozen=True)
class GammaElement:
    """
    Element of Gamma_n, stored by its canonical lift.

    The canonical lift maps 0 into ``[0, n)``.
    """

    rep: PLMap1P
    level: int

    def __str__(self) -> str:
        return str(self.rep)


def gamma_canonical(f: PLMap1P, n: int) -> GammaElement:
    """
    Canonical lift of the class of f modulo translations by nZ.

    Raises:
        MembershipError: If f is not in Omega_n
    """
    require_omega(f, n)
    image = evaluate(f, ZERO)
    power = image.floor() // n
    rep = compose(f, translation(-n * power)) if power else f
    return GammaElement(rep, n)


def _lift(f: Union[GammaElement, PLMap1P]) -> PLMap1P:
    return f.rep if isinstance(f, GammaElement) else f


def degree(
    f: Union[GammaElement, PLMap1P],
    interval: Tuple[DyadicLike, DyadicLike],
    n: int,
) -> int:
    """
    Degree of the pair (f, I): integer crossings of I under a lift, mod n.

    I may be a single point. It must not contain an integer, and its image
    must lie inside one open unit interval.

    Args:
        f: Element or lift
        interval: Closed interval ``(a, b)`` with ``a <= b``
        n: Level

    Returns:
        Value in ``0..n-1``

    Raises:
        DegreeError: If the pair has no degree
    """
    lift = _lift(f)
    a, b = as_dyadic(interval[0]), as_dyadic(interval[1])
    if b < a:
        raise DegreeError(f"interval [{a},{b}] is empty")
    if a.floor() != b.floor() or a.is_integer() or b.is_integer():
        raise DegreeError(f"interval [{a},{b}] contains an integer")
    fa, fb = evaluate(lift, a), evaluate(lift, b)
    if fa.floor() != fb.floor() or fa.is_integer() or fb.is_integer():
        raise DegreeError(f"image [{fa},{fb}] contains an integer")
    return (fa.floor() - a.floor()) % n


def is_special(f: PLMap1P, n: int) -> bool:
    """
    True iff ``0·f`` lies in ``(0, 1)``.

    Raises:
        MembershipError: If f is not in Omega_n
    """
    require_omega(f, n)
    image = evaluate(f, ZERO)
    return ZERO < image < ONE


def contracted_special(n: int, lo: DyadicLike, hi: DyadicLike) -> PLMap1P:
    """
    A conjugate of tau supported in ``(lo, hi) + Z``.

    The conjugator is a Thompson element squeezing the fixed arc
    ``[2/N, 1 - 1/N]`` of tau onto an arc reaching from just below ``hi``
    to just above ``1 + lo``.

    Args:
        n: Level
        lo: Negative left end, above -1/2
        hi: Positive right end, below 1/2
    """
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    if not (Dyadic(-1, 1) < lo < ZERO < hi < Dyadic(1, 1)):
        raise PreconditionError(
            f"window ({lo},{hi}) must satisfy -1/2 < lo < 0 < hi < 1/2"
        )
    start, end = Dyadic(2, n), ONE - Dyadic(1, n)
    tau = make_tau(n)
    if lo <= end - 1 and start <= hi:
        return tau
    (right,) = theta_matched_points(n, [start], ZERO, hi)
    (left,) = theta_matched_points(n, [end], ONE + lo, ONE)
    squeeze = transporter(n, [start, end], [right, left])
    return conjugate(tau, squeeze)
