"""
Higman-Thompson machinery inside Omega_n.

Elements here fix the integers and have slopes that are powers of
``N = 2^n``. Points of ``(0, 1)`` are moved around with transporters built
from standard N-adic intervals ``[k/N^j, (k+1)/N^j]``.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from src.plgroup.core.dyadic import (
    ONE,
    ZERO,
    Dyadic,
    DyadicLike,
    as_dyadic,
    log2_ratio,
    theta,
)
from src.plgroup.core.errors import (
    ConstructionError,
    GridError,
    PreconditionError,
    ThetaMismatchError,
)
from src.plgroup.core.plmap import PLMap1P, evaluate, slopes_at
from src.plgroup.utils.config import config_manager
from src.plgroup.utils.logging import get_logger

logger = get_logger(__name__)

# (left end, level j) describes the standard interval [left, left + N^-j]
StandardInterval = Tuple[Dyadic, int]


def placement_attempts() -> int:
    """Number of grid refinements tried by the grid searches."""
    return int(config_manager.section("construction").get("placement_attempts", 64))


@dataclass(frozen=True)
class ThompsonClass:
    """Membership flags for F, its compactly supported part F^c and F'."""

    in_F: bool
    in_Fc: bool
    in_Fprime: bool

    def render(self) -> str:
        flags = (("F", self.in_F), ("Fc", self.in_Fc), ("Fprime", self.in_Fprime))
        return " ".join(f"in_{name}={str(value).lower()}" for name, value in flags)


def classify_thompson(f: PLMap1P, n: int) -> ThompsonClass:
    """
    Classify f against F_{2^n} and its subgroups F^c and F'.

    Args:
        f: Element to classify
        n: Level

    Returns:
        The three nested flags
    """
    from src.plgroup.core.cocycle import xi

    in_f = evaluate(f, ZERO) == ZERO and all(log % n == 0 for log in f.log_slopes)
    in_fc = in_f and slopes_at(f, ZERO) == (0, 0)
    in_fprime = in_fc and xi(f, n).is_zero()
    return ThompsonClass(in_f, in_fc, in_fprime)


def standard_intervals(a: DyadicLike, b: DyadicLike, n: int) -> List[StandardInterval]:
    """
    Greedy decomposition of ``[a, b]`` into standard N-adic intervals.

    At each step the largest standard interval starting at the current point
    and ending no later than b is taken.
    """
    a, b = as_dyadic(a), as_dyadic(b)
    pieces: List[StandardInterval] = []
    point = a
    while point < b:
        level = max(0, -(-point.exponent // n))
        while ONE.shift(-n * level) > b - point:
            level += 1
        pieces.append((point, level))
        point = point + ONE.shift(-n * level)
    return pieces


def _subdivide(pieces: List[StandardInterval], n: int) -> None:
    # largest interval first, ties to the left
    index = min(range(len(pieces)), key=lambda i: (pieces[i][1], i))
    start, level = pieces[index]
    child = ONE.shift(-n * (level + 1))
    pieces[index : index + 1] = [
        (start + child * i, level + 1) for i in range(1 << n)
    ]


def _equalize(
    source: List[StandardInterval], target: List[StandardInterval], n: int
) -> None:
    step = (1 << n) - 1
    if (len(source) - len(target)) % step:
        raise ConstructionError(
            f"interval counts {len(source)} and {len(target)} differ mod {step}"
        )
    while len(source) != len(target):
        _subdivide(source if len(source) < len(target) else target, n)


def transporter(
    n: int,
    xs: Sequence[DyadicLike],
    ys: Sequence[DyadicLike],
    lo: DyadicLike = ZERO,
    hi: DyadicLike = ONE,
) -> PLMap1P:
    """
    Thompson element supported in ``[lo, hi] + Z`` mapping each x_i to y_i.

    Every gap between consecutive points (including the end gaps to lo and
    hi) is cut into standard intervals on both sides; the counts are made
    equal by subdividing, then the intervals are matched in order.

    Args:
        n: Level
        xs: Strictly increasing points inside ``(lo, hi)``
        ys: Strictly increasing points inside ``(lo, hi)``, same length
        lo: Left end of the support window
        hi: Right end, at most ``lo + 1``

    Returns:
        Element fixing ``lo + Z`` and ``hi + Z`` with ``x_i·f == y_i``

    Raises:
        PreconditionError: If the tuples are not sorted or lengths differ
        ThetaMismatchError: If some pair has different residues
    """
    xs, ys = [as_dyadic(x) for x in xs], [as_dyadic(y) for y in ys]
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    if len(xs) != len(ys):
        raise PreconditionError(f"{len(xs)} source points but {len(ys)} targets")
    if not lo < hi or hi - lo > 1:
        raise PreconditionError(f"window [{lo},{hi}] must be nonempty and at most 1 long")
    source, target = [lo, *xs, hi], [lo, *ys, hi]
    for label, chain in (("source", source), ("target", target)):
        for i in range(len(chain) - 1):
            if not chain[i] < chain[i + 1]:
                raise PreconditionError(
                    f"{label} points must increase strictly inside ({lo},{hi})"
                )
    for i, (x, y) in enumerate(zip(xs, ys)):
        residue_x, residue_y = theta(x, n), theta(y, n)
        if residue_x != residue_y:
            logger.info("Transporter refused at point %d: %s -> %s", i, x, y)
            raise ThetaMismatchError(i, residue_x, residue_y)

    nodes = [(lo, lo), (hi, hi)]
    for i in range(len(source) - 1):
        left = standard_intervals(source[i], source[i + 1], n)
        right = standard_intervals(target[i], target[i + 1], n)
        _equalize(left, right, n)
        nodes.extend((p, q) for (p, _), (q, _) in zip(left, right))
    return PLMap1P.from_nodes(nodes)


def theta_matched_points(
    n: int, xs: Sequence[DyadicLike], lo: DyadicLike, hi: DyadicLike
) -> List[Dyadic]:
    """
    Leftmost increasing grid points in ``(lo, hi)`` with the residues of xs.

    The grid ``N^-M Z`` is refined until all points fit.

    Raises:
        ConstructionError: If no grid within the placement budget fits
    """
    modulus = (1 << n) - 1
    residues = [theta(x, n).value for x in xs]
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    for level in range(1, placement_attempts() + 1):
        bits = n * level
        j = lo.shift(bits).floor() + 1
        points = []
        for residue in residues:
            j += (residue - j) % modulus
            points.append(Dyadic(j, bits))
            j += 1
        if not points or points[-1] < hi:
            return points
    raise ConstructionError(f"cannot place {len(residues)} points in ({lo},{hi})")


def bump(
    n: int, a: DyadicLike, c: DyadicLike, b: DyadicLike, alpha: int
) -> PLMap1P:
    """
    Two-piece element of F^c supported in ``[a, b]``.

    Slope ``N^alpha`` on ``[a, c]`` and ``N^beta`` on the rest, where
    ``c' = a + N^alpha (c - a)`` and ``N^beta = (b - c') / (b - c)``.

    Raises:
        GridError: If the points do not admit such an element
    """
    a, c, b = as_dyadic(a), as_dyadic(c), as_dyadic(b)
    if not ZERO < a < c < b < ONE:
        raise GridError(f"need 0 < a < c < b < 1, got {a}, {c}, {b}")
    moved = a + (c - a).shift(n * alpha)
    if not a < moved < b:
        raise GridError(f"image {moved} of {c} leaves ({a},{b})")
    log = log2_ratio(b - moved, b - c)
    if log is None or log % n:
        raise GridError(f"slope ({b - moved})/({b - c}) is not a power of 2^{n}")
    return PLMap1P.from_nodes([(a, a), (c, moved), (b, b)])


def balanced_bump(n: int, start: DyadicLike, unit: DyadicLike, alpha: int) -> PLMap1P:
    """
    Bump on ``[start, start + unit + N^alpha unit]`` with slopes N^alpha, N^-alpha.

    Its jumps are alpha, -2 alpha and alpha at the three nodes.
    """
    start, unit = as_dyadic(start), as_dyadic(unit)
    c = start + unit
    return bump(n, start, c, c + unit.shift(n * alpha), alpha)


def balanced_bump_ending(n: int, end: DyadicLike, unit: DyadicLike, alpha: int) -> PLMap1P:
    """Mirror of :func:`balanced_bump` whose support ends at ``end``."""
    end, unit = as_dyadic(end), as_dyadic(unit)
    c = end - unit.shift(n * alpha)
    return bump(n, c - unit, c, end, alpha)


def grid_bump(n: int, lo: DyadicLike, hi: DyadicLike, alpha: int = 1) -> PLMap1P:
    """
    Balanced bump at the leftmost grid point of ``(lo, hi)``.

    Raises:
        ConstructionError: If the window is too small for the placement budget
    """
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    for level in range(1, placement_attempts() + 1):
        bits = n * level
        unit = ONE.shift(-bits)
        start = Dyadic(lo.shift(bits).floor() + 1, bits)
        if start + unit + unit.shift(n * alpha) < hi:
            return balanced_bump(n, start, unit, alpha)
    raise ConstructionError(f"no room for a bump in ({lo},{hi})")
