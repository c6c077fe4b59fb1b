"""
1-periodic piecewise-linear homeomorphisms of the real line.

A :class:`PLMap1P` stores one period of nodes ``(x_i, y_i)`` with
``x_0`` in ``[0, 1)``; the map extends by ``f(x + m) = f(x) + m``. Slopes
are powers of 2 and are kept as integer base-2 logarithms. Composition
uses the right action: ``compose(f, g)`` applies ``f`` first.

Nodes are canonical: every stored node is a genuine breakpoint, except a
single anchor at ``x = 0`` for affine maps (identity and translations).
"""
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, List, Sequence, Tuple

from src.plgroup.core.dyadic import ZERO, Dyadic, DyadicLike, as_dyadic, log2_ratio
from src.plgroup.core.errors import InvariantError, ParseError

Node = Tuple[Dyadic, Dyadic]

HEADER = "plmap1p v1"


@dataclass(frozen=True)
class PLMap1P:
    """
    One period of a 1-periodic PL homeomorphism.

    Build instances with :meth:`from_nodes`, which canonicalizes and
    validates; equality is equality of canonical node tuples.
    """

    nodes: Tuple[Node, ...]

    @classmethod
    def from_nodes(cls, pairs: Iterable[Tuple[DyadicLike, DyadicLike]]) -> "PLMap1P":
        """
        Canonicalize node data describing a lift.

        Nodes may come from any period and in any order; each is moved into
        the window ``[0, 1)`` by an integer shift.

        Args:
            pairs: Points ``(x, x·f)`` on the graph of the lift

        Returns:
            The canonical map

        Raises:
            InvariantError: If the nodes do not describe an orientation
                preserving 1-periodic homeomorphism with power-of-2 slopes
        """
        windowed = {}
        for position, (x, y) in enumerate(pairs):
            x, y = as_dyadic(x), as_dyadic(y)
            shift = x.floor()
            x, y = x - shift, y - shift
            if x in windowed and windowed[x] != y:
                raise InvariantError(
                    f"conflicting images {windowed[x]} and {y} for x = {x}", position
                )
            windowed[x] = y
        if not windowed:
            raise InvariantError("at least one node is required")

        nodes = sorted(windowed.items())
        count = len(nodes)
        for i in range(count):
            y_next = nodes[i + 1][1] if i + 1 < count else nodes[0][1] + 1
            if not nodes[i][1] < y_next:
                raise InvariantError(
                    f"images must increase, {nodes[i][1]} is followed by {y_next}", i
                )

        logs = _segment_logs(nodes)
        kept = [
            (node, logs[i]) for i, node in enumerate(nodes) if logs[i - 1] != logs[i]
        ]
        if not kept:
            # all segments share a slope, which must then be 1
            x0, y0 = nodes[0]
            return cls(((ZERO, y0 - x0),))
        return cls(tuple(node for node, _ in kept))

    @cached_property
    def xs(self) -> List[Dyadic]:
        """Node abscissas in the stored period."""
        return [x for x, _ in self.nodes]

    @cached_property
    def log_slopes(self) -> Tuple[int, ...]:
        """Base-2 logarithm of the slope of the segment starting at each node."""
        return tuple(_segment_logs(self.nodes))

    @cached_property
    def inverse(self) -> "PLMap1P":
        """The inverse map, obtained by swapping every node."""
        return PLMap1P.from_nodes((y, x) for x, y in self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return serialize(self)


def _segment_logs(nodes: Sequence[Node]) -> List[int]:
    logs = []
    count = len(nodes)
    for i in range(count):
        x, y = nodes[i]
        if i + 1 < count:
            x_next, y_next = nodes[i + 1]
        else:
            x_next, y_next = nodes[0][0] + 1, nodes[0][1] + 1
        log = log2_ratio(y_next - y, x_next - x)
        if log is None:
            raise InvariantError(
                f"slope ({y_next - y})/({x_next - x}) is not a power of 2", i
            )
        logs.append(log)
    return logs


def identity() -> PLMap1P:
    """The identity map, stored as the single node ``(0, 0)``."""
    return PLMap1P(((ZERO, ZERO),))


def translation(c: DyadicLike) -> PLMap1P:
    """The map ``x -> x + c``."""
    return PLMap1P(((ZERO, as_dyadic(c)),))


def evaluate(f: PLMap1P, x: DyadicLike) -> Dyadic:
    """Exact image ``x·f`` using the periodic extension."""
    x = as_dyadic(x)
    x0 = f.nodes[0][0]
    shift = (x - x0).floor()
    local = x - shift
    i = bisect_right(f.xs, local) - 1
    node_x, node_y = f.nodes[i]
    return node_y + (local - node_x).shift(f.log_slopes[i]) + shift


def invert(f: PLMap1P) -> PLMap1P:
    return f.inverse


def _compose_pair(f: PLMap1P, g: PLMap1P) -> PLMap1P:
    f_inverse = f.inverse
    points = list(f.xs)
    points.extend(evaluate(f_inverse, x) for x in g.xs)
    return PLMap1P.from_nodes((p, evaluate(g, evaluate(f, p))) for p in points)


def compose(*maps: PLMap1P) -> PLMap1P:
    """
    Compose maps left to right: ``compose(f, g)`` is ``x -> (x·f)·g``.

    Returns:
        The canonical product, the identity for an empty argument list
    """
    if not maps:
        return identity()
    return reduce(_compose_pair, maps)


def conjugate(g: PLMap1P, w: PLMap1P) -> PLMap1P:
    """``w⁻¹ g w`` in right-action order."""
    return compose(invert(w), g, w)


def commutator(a: PLMap1P, b: PLMap1P) -> PLMap1P:
    """``[a, b] = a⁻¹ b⁻¹ a b``."""
    return compose(invert(a), invert(b), a, b)


def power(f: PLMap1P, k: int) -> PLMap1P:
    base = f if k >= 0 else invert(f)
    result = identity()
    for _ in range(abs(k)):
        result = compose(result, base)
    return result


def is_identity(f: PLMap1P) -> bool:
    return f.nodes == ((ZERO, ZERO),)


def slopes_at(f: PLMap1P, x: DyadicLike) -> Tuple[int, int]:
    """
    Base-2 logarithms of the left and right slopes at x.

    The two values differ exactly when x is a breakpoint.
    """
    x = as_dyadic(x)
    x0 = f.nodes[0][0]
    local = x - (x - x0).floor()
    i = bisect_right(f.xs, local) - 1
    if f.xs[i] == local:
        return f.log_slopes[i - 1], f.log_slopes[i]
    return f.log_slopes[i], f.log_slopes[i]


def displacements(f: PLMap1P) -> List[Dyadic]:
    """``x·f - x`` at every node."""
    return [y - x for x, y in f.nodes]


def max_displacement(f: PLMap1P) -> Dyadic:
    """Maximum of ``|x·f - x|``; attained at a node."""
    return max(abs(d) for d in displacements(f))


def has_fixed_point(f: PLMap1P) -> bool:
    values = displacements(f)
    return min(values) <= 0 <= max(values)


def support(f: PLMap1P) -> List[Tuple[Dyadic, Dyadic]]:
    """
    Closed support of f within one period, as merged intervals.

    Intervals start in ``[x_0, x_0 + 1)`` and may end past ``x_0 + 1``
    only by wrapping to the first node.
    """
    count = len(f.nodes)
    values = displacements(f)
    pieces: List[Tuple[Dyadic, Dyadic]] = []
    for i in range(count):
        nxt = (i + 1) % count
        if values[i] == 0 and values[nxt] == 0:
            continue
        start = f.nodes[i][0]
        end = f.nodes[i + 1][0] if i + 1 < count else f.nodes[0][0] + 1
        if pieces and pieces[-1][1] == start:
            pieces[-1] = (pieces[-1][0], end)
        else:
            pieces.append((start, end))
    if len(pieces) > 1 and pieces[-1][1] == pieces[0][0] + 1:
        first = pieces.pop(0)
        pieces[-1] = (pieces[-1][0], first[1] + 1)
    return pieces


def is_supported_in(f: PLMap1P, lo: DyadicLike, hi: DyadicLike) -> bool:
    """True iff the closed support of f lies in ``[lo, hi] + Z``."""
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    for start, end in support(f):
        if end - start >= 1:
            return False
        shift = (hi - end).floor()
        if start + shift < lo:
            return False
    return True


def serialize(f: PLMap1P) -> str:
    """Text form: header ``plmap1p v1 k=<count>`` then one ``x y`` line per node."""
    lines = [f"{HEADER} k={len(f.nodes)}"]
    lines.extend(f"{x} {y}" for x, y in f.nodes)
    return "\n".join(lines) + "\n"


def parse_plmap(text: str) -> PLMap1P:
    """
    Parse the serialized form, re-canonicalizing the nodes.

    Raises:
        ParseError: If the text does not follow the format
        InvariantError: If the nodes do not describe a valid map
    """
    lines = [line.strip() for line in text.replace(";", "\n").splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise ParseError("empty input")
    header = lines[0].split()
    if len(header) != 3 or " ".join(header[:2]) != HEADER or not header[2].startswith("k="):
        raise ParseError(f"expected '{HEADER} k=<count>', got {lines[0]!r}", 1)
    try:
        count = int(header[2][2:])
    except ValueError as e:
        raise ParseError(f"bad node count {header[2]!r}", 1) from e
    body = lines[1:]
    if count < 1 or len(body) != count:
        raise ParseError(f"header announces {count} nodes, found {len(body)}", 1)
    pairs = []
    for offset, line in enumerate(body, start=2):
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected '<x> <y>', got {line!r}", offset)
        try:
            pairs.append((as_dyadic(fields[0]), as_dyadic(fields[1])))
        except ParseError as e:
            raise ParseError(str(e), offset) from e
    return PLMap1P.from_nodes(pairs)
