"""
Derivative cocycles and the integer lattice layer.

The jump ``D_f(x)`` of the base-2^n logarithm of the slope at a breakpoint,
summed over residue orbits, gives the homomorphism Xi on F^c (vectors
indexed by ``1, 3, 4, ..., 2^n - 1``) and gimel on Gamma_n (rational vectors
indexed by the doubling-map classes). Lattice questions are answered with
sympy's Hermite and Smith normal forms over ZZ.
"""
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import GF, ZZ, Matrix
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp
from sympy.polys.matrices import DomainMatrix

from src.plgroup.core.dyadic import ONE, ZERO, Dyadic, DyadicLike, as_dyadic, theta
from src.plgroup.core.errors import ConstructionError, PreconditionError
from src.plgroup.core.omega import GammaElement, gamma_canonical, make_zeta
from src.plgroup.core.plmap import PLMap1P, compose, evaluate, identity, slopes_at
from src.plgroup.core.thompson import balanced_bump, placement_attempts
from src.plgroup.utils.logging import get_logger

logger = get_logger(__name__)


def _modulus(n: int) -> int:
    if n < 2:
        raise PreconditionError(f"level must be at least 2, got {n}")
    return (1 << n) - 1


def xi_indices(n: int) -> List[int]:
    """Coordinates of Xi vectors: every orbit index except 2."""
    return [1, *range(3, _modulus(n) + 1)]


def orbit_index(residue: int, n: int) -> int:
    """Orbit index in ``1..2^n - 1`` of a residue, with 0 shown as ``2^n - 1``."""
    modulus = _modulus(n)
    return residue % modulus or modulus


def _signed(value: Union[int, Fraction]) -> str:
    value = Fraction(value)
    sign = "+" if value > 0 else "-"
    magnitude = abs(value)
    if magnitude.denominator == 1:
        return f"{sign}{magnitude.numerator}"
    return f"{sign}{magnitude.numerator}/{magnitude.denominator}"


@dataclass(frozen=True)
class XiVector:
    """Integer vector indexed by orbit indices other than 2."""

    level: int
    entries: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[int, int]) -> "XiVector":
        allowed = set(xi_indices(n))
        for index in mapping:
            if index not in allowed:
                raise PreconditionError(f"index {index} is not a Xi coordinate for n={n}")
        return cls(n, tuple(sorted((i, v) for i, v in mapping.items() if v)))

    @classmethod
    def from_list(cls, n: int, values: Sequence[int]) -> "XiVector":
        return cls.from_mapping(n, dict(zip(xi_indices(n), (int(v) for v in values))))

    @classmethod
    def zero(cls, n: int) -> "XiVector":
        return cls(n)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def to_list(self) -> List[int]:
        values = self.as_dict()
        return [values.get(i, 0) for i in xi_indices(self.level)]

    def is_zero(self) -> bool:
        return not self.entries

    def _combine(self, other: "XiVector", sign: int) -> "XiVector":
        if other.level != self.level:
            raise ValueError("Xi vectors of different levels")
        values = self.as_dict()
        for index, value in other.entries:
            values[index] = values.get(index, 0) + sign * value
        return XiVector.from_mapping(self.level, values)

    def __add__(self, other: "XiVector") -> "XiVector":
        return self._combine(other, 1)

    def __sub__(self, other: "XiVector") -> "XiVector":
        return self._combine(other, -1)

    def __neg__(self) -> "XiVector":
        return XiVector(self.level, tuple((i, -v) for i, v in self.entries))

    def __mul__(self, k: int) -> "XiVector":
        return XiVector.from_mapping(self.level, {i: k * v for i, v in self.entries})

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " ".join(f"{i}:{_signed(v)}" for i, v in self.entries)


def nu(n: int, k: int) -> XiVector:
    """Unit vector for index k reduced mod ``2^n - 1``; the index-2 vector is 0."""
    index = orbit_index(k, n)
    if index == 2:
        return XiVector.zero(n)
    return XiVector.from_mapping(n, {index: 1})


@dataclass(frozen=True)
class GimelVector:
    """Rational vector indexed by the doubling-map classes ``1..eta``."""

    level: int
    entries: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[int, Fraction]) -> "GimelVector":
        return cls(n, tuple(sorted((j, Fraction(v)) for j, v in mapping.items() if v)))

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    @property
    def integral(self) -> bool:
        return all(v.denominator == 1 for _, v in self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " ".join(f"{j}:{_signed(v)}" for j, v in self.entries)


@dataclass(frozen=True)
class OrbitPartition:
    """
    Cycles of ``i -> 2(i - 1) mod (2^n - 1)`` on ``1..2^n - 1``.

    ``classes[0]`` is always ``(2,)``, the unique fixed point.
    """

    level: int
    classes: Tuple[Tuple[int, ...], ...]

    @property
    def eta(self) -> int:
        return len(self.classes) - 1

    @cached_property
    def class_of(self) -> Dict[int, int]:
        return {i: j for j, members in enumerate(self.classes) for i in members}

    def render(self) -> str:
        lines = [
            f"chi_{j} = {{{', '.join(str(i) for i in members)}}}"
            for j, members in enumerate(self.classes)
        ]
        lines.append(f"eta = {self.eta}")
        return "\n".join(lines) + "\n"


def doubling(i: int, n: int) -> int:
    """The map ``i -> 2(i - 1)`` on orbit indices."""
    return orbit_index(2 * (i - 1), n)


@lru_cache(maxsize=None)
def orbit_partition(n: int) -> OrbitPartition:
    modulus = _modulus(n)
    classes: List[Tuple[int, ...]] = [(2,)]
    seen = {2}
    for start in range(1, modulus + 1):
        if start in seen:
            continue
        cycle = []
        i = start
        while i not in seen:
            seen.add(i)
            cycle.append(i)
            i = doubling(i, n)
        classes.append(tuple(cycle))
    return OrbitPartition(n, tuple(classes))


def d_values(f: PLMap1P, n: int) -> Dict[Dyadic, Fraction]:
    """Jump of the base-2^n log-slope at every node of one period."""
    logs = f.log_slopes
    return {x: Fraction(logs[i] - logs[i - 1], n) for i, x in enumerate(f.xs)}


def _require_fc(f: PLMap1P, n: int) -> None:
    if evaluate(f, ZERO) != ZERO or slopes_at(f, ZERO) != (0, 0):
        raise PreconditionError("element must fix a neighbourhood of the integers")
    if any(log % n for log in f.log_slopes):
        raise PreconditionError(f"slopes must be powers of 2^{n}")


def xi(f: PLMap1P, n: int) -> XiVector:
    """
    The homomorphism Xi on F^c.

    Raises:
        PreconditionError: If f is not in F^c
    """
    _require_fc(f, n)
    totals: Dict[int, int] = {}
    for x, jump in d_values(f, n).items():
        index = theta(x, n).orbit_index
        if index != 2:
            totals[index] = totals.get(index, 0) + int(jump)
    return XiVector.from_mapping(n, totals)


def full_xi_sum_check(f: PLMap1P, n: int) -> bool:
    """True iff the jumps over all breakpoints, orbit 2 included, sum to 0."""
    return sum(d_values(f, n).values(), Fraction(0)) == 0


def gimel(f: Union[GammaElement, PLMap1P], n: int) -> GimelVector:
    """
    The homomorphism gimel on Gamma_n.

    Jumps are summed per doubling-map class of the residue of each node of
    the canonical lift; the point 0 sits in orbit ``2^n - 1``. Entries are
    exact rationals; :attr:`GimelVector.integral` flags the others.

    Raises:
        MembershipError: If f is not in Omega_n
    """
    if not isinstance(f, GammaElement):
        f = gamma_canonical(f, n)
    partition = orbit_partition(n)
    totals: Dict[int, Fraction] = {}
    for x, jump in d_values(f.rep, n).items():
        j = partition.class_of[theta(x, n).orbit_index]
        if j:
            totals[j] = totals.get(j, Fraction(0)) + jump
    result = GimelVector.from_mapping(n, totals)
    if not result.integral:
        logger.info("gimel at level %d has non-integral entries: %s", n, result)
    return result


def varsigma(v: XiVector, n: int) -> GimelVector:
    """Sum a Xi vector over each doubling-map class."""
    partition = orbit_partition(n)
    totals: Dict[int, Fraction] = {}
    for index, value in v.entries:
        j = partition.class_of[index]
        totals[j] = totals.get(j, Fraction(0)) + value
    return GimelVector.from_mapping(n, totals)


class LatticeBasis:
    """
    Generators of a sublattice of ``Z^(2^n - 2)`` in Xi coordinates.

    The generator matrix has one column per vector. Normal forms are
    computed on first use and cached.
    """

    def __init__(
        self, n: int, vectors: Iterable[XiVector], labels: Optional[Sequence[str]] = None
    ) -> None:
        self.level = n
        self.vectors: Tuple[XiVector, ...] = tuple(vectors)
        self.labels = tuple(labels) if labels else tuple(
            f"v{i + 1}" for i in range(len(self.vectors))
        )

    @property
    def dimension(self) -> int:
        return len(xi_indices(self.level))

    @cached_property
    def matrix(self) -> Matrix:
        if not self.vectors:
            return Matrix.zeros(self.dimension, 0)
        return Matrix.hstack(*(Matrix(v.to_list()) for v in self.vectors))

    @cached_property
    def smith(self) -> Tuple[Matrix, Matrix, Matrix]:
        """``(a, s, t)`` with ``a == s * matrix * t`` diagonal."""
        return smith_normal_decomp(self.matrix, domain=ZZ)

    @cached_property
    def rank(self) -> int:
        if not self.vectors:
            return 0
        diagonal, _, _ = self.smith
        return sum(1 for i in range(min(diagonal.shape)) if diagonal[i, i] != 0)

    @cached_property
    def hermite(self) -> Matrix:
        if self.rank == 0:
            return Matrix.zeros(self.dimension, 0)
        return hermite_normal_form(self.matrix)

    def render(self) -> str:
        rows = [
            " ".join(str(int(value)) for value in self.hermite.row(i))
            for i in range(self.hermite.rows)
        ]
        return "\n".join(f"hnf {row}" for row in rows) + "\n"


def lattice_solve(v: XiVector, basis: LatticeBasis) -> Optional[Tuple[int, ...]]:
    """
    Integer coefficients c with ``sum c_i basis_i == v``, or None.

    Uses the Smith decomposition ``a = s M t``: the system ``M c = v`` is
    ``a z = s v`` with ``c = t z``. Since s and t are unimodular, v is in the
    lattice exactly when each diagonal entry divides its row of ``s v`` and
    the rows past the rank vanish, which is the same answer Hermite
    back-substitution gives. The coefficients are checked against M before
    they are returned.
    """
    target = v.to_list()
    if not basis.vectors:
        return () if v.is_zero() else None
    diagonal, s, t = basis.smith
    rotated = s * Matrix(target)
    z = [0] * len(basis.vectors)
    for i in range(basis.dimension):
        value = int(rotated[i])
        if i < basis.rank:
            d = int(diagonal[i, i])
            if value % d:
                return None
            z[i] = value // d
        elif value:
            return None
    coefficients = tuple(int(c) for c in t * Matrix(z))
    if list(basis.matrix * Matrix(coefficients)) != target:
        raise ConstructionError("Smith back-substitution does not reproduce the target")
    return coefficients


def lattice_index(basis: LatticeBasis, ambient: Optional[int] = None) -> Optional[int]:
    """
    Index of the lattice in ``Z^ambient``, None when infinite.

    Computed as the product of the Smith diagonal. The transforms s and t
    have determinant ±1, so for a full-rank square basis this is
    ``|det M|``, the same value as the product of the Hermite pivots.
    """
    ambient = basis.dimension if ambient is None else ambient
    if basis.rank < ambient:
        return None
    diagonal, _, _ = basis.smith
    index = 1
    for i in range(basis.rank):
        index *= abs(int(diagonal[i, i]))
    return index


def lattice_contains(outer: LatticeBasis, inner: LatticeBasis) -> bool:
    """True iff every generator of inner lies in outer."""
    return all(lattice_solve(v, outer) is not None for v in inner.vectors)


def mod2_rank(basis: LatticeBasis) -> int:
    """Rank of the generator matrix reduced modulo 2."""
    if not basis.vectors:
        return 0
    return DomainMatrix.from_Matrix(basis.matrix).convert_to(GF(2)).rank()


@lru_cache(maxsize=None)
def zeta_basis(n: int) -> LatticeBasis:
    """Xi images of zeta_1 .. zeta_{2^n - 2}."""
    count = _modulus(n) - 1
    return LatticeBasis(
        n,
        [xi(make_zeta(n, k), n) for k in range(1, count + 1)],
        [f"zeta_{k}" for k in range(1, count + 1)],
    )


def zeta_image(n: int, k: int) -> XiVector:
    """Xi of zeta_k for any k not divisible by ``2^n - 1``, index reduced."""
    basis = zeta_basis(n)
    return basis.vectors[orbit_index(k, n) - 1]


@lru_cache(maxsize=None)
def psi_basis(n: int) -> LatticeBasis:
    """Differences ``Xi(zeta_i) - Xi(zeta_2i)`` for every i."""
    count = _modulus(n) - 1
    return LatticeBasis(
        n,
        [zeta_image(n, i) - zeta_image(n, 2 * i) for i in range(1, count + 1)],
        [f"psi_{i}" for i in range(1, count + 1)],
    )


@lru_cache(maxsize=None)
def sigma_kernel_generators(n: int) -> LatticeBasis:
    """
    Generators of the varsigma kernel inside the zeta lattice.

    ``varsigma(Xi(zeta_k))`` is minus the unit vector of the class of
    ``2 + k``, so differences within a class span the kernel.
    """
    partition = orbit_partition(n)
    by_class: Dict[int, List[int]] = {}
    for k in range(1, _modulus(n)):
        by_class.setdefault(partition.class_of[orbit_index(2 + k, n)], []).append(k)
    vectors, labels = [], []
    for members in by_class.values():
        for first, second in zip(members, members[1:]):
            vectors.append(zeta_image(n, first) - zeta_image(n, second))
            labels.append(f"zeta_{first}-zeta_{second}")
    return LatticeBasis(n, vectors, labels)


@dataclass(frozen=True)
class SubgroupClass:
    in_Theta: bool
    in_Delta: bool

    def render(self) -> str:
        return f"in_Theta={str(self.in_Theta).lower()} in_Delta={str(self.in_Delta).lower()}"


def classify_subgroup(f: PLMap1P, n: int) -> SubgroupClass:
    """
    Membership in Theta_n (Xi lands in the zeta lattice) and Delta_n.

    Raises:
        PreconditionError: If f is not in F^c
    """
    in_theta = lattice_solve(xi(f, n), zeta_basis(n)) is not None
    in_delta = in_theta and gimel(f, n).is_zero()
    return SubgroupClass(in_theta, in_delta)


# Bump family used to realize Xi vectors


def _family_vector(n: int, residue: int) -> XiVector:
    totals: Dict[int, int] = {}
    for offset, weight in ((0, 1), (1, -2), (2, 1)):
        index = orbit_index(residue + offset, n)
        if index != 2:
            totals[index] = totals.get(index, 0) + weight
    return XiVector.from_mapping(n, totals)


@dataclass(frozen=True)
class BumpFamily:
    """
    Balanced bumps of exponent 1 at grid points of each residue.

    The member for residue r has jumps ``1, -2, 1`` at residues
    ``r, r + 1, r + 2``.
    """

    level: int
    window: Tuple[Dyadic, Dyadic]
    basis: LatticeBasis = field(compare=False)


_family_cache: Dict[Tuple[int, Dyadic, Dyadic], BumpFamily] = {}
_family_lock = threading.Lock()


@lru_cache(maxsize=None)
def _family_basis(n: int) -> LatticeBasis:
    residues = range(_modulus(n))
    return LatticeBasis(
        n, [_family_vector(n, r) for r in residues], [f"bump_{r}" for r in residues]
    )


def bump_family(n: int, window: Tuple[DyadicLike, DyadicLike]) -> BumpFamily:
    lo, hi = as_dyadic(window[0]), as_dyadic(window[1])
    key = (n, lo, hi)
    family = _family_cache.get(key)
    if family is None:
        with _family_lock:
            family = _family_cache.get(key)
            if family is None:
                family = BumpFamily(n, (lo, hi), _family_basis(n))
                _family_cache[key] = family
    return family


@dataclass(frozen=True)
class Realization:
    """
    Outcome of :func:`realize_xi`.

    ``element`` is None when the vector is outside the bump-family lattice;
    ``hermite`` is the family's Hermite form either way.
    """

    element: Optional[PLMap1P]
    coefficients: Optional[Tuple[int, ...]]
    hermite: Matrix = field(compare=False)

    @property
    def realized(self) -> bool:
        return self.element is not None


def _place_bumps(
    n: int, coefficients: Sequence[int], lo: Dyadic, hi: Dyadic
) -> List[PLMap1P]:
    modulus = _modulus(n)
    wanted = [(r, alpha) for r, alpha in enumerate(coefficients) if alpha]
    for level in range(1, placement_attempts() + 1):
        bits = n * level
        unit = ONE.shift(-bits)
        j = lo.shift(bits).floor() + 1
        pieces = []
        for residue, alpha in wanted:
            j += (residue - j) % modulus
            start = Dyadic(j, bits)
            end = start + unit + unit.shift(n * alpha)
            if not end < hi:
                break
            pieces.append(balanced_bump(n, start, unit, alpha))
            j = end.shift(bits).ceil() + 1
        else:
            return pieces
    raise ConstructionError(f"bumps {wanted} do not fit in ({lo},{hi})")


def realize_xi(
    v: XiVector, window: Tuple[DyadicLike, DyadicLike], n: int
) -> Realization:
    """
    An F^c element supported in the window with Xi equal to v.

    Args:
        v: Target vector
        window: Open interval inside ``(0, 1)``
        n: Level

    Returns:
        The realization, or an unrealized value carrying the Hermite form
    """
    family = bump_family(n, window)
    lo, hi = family.window
    if not ZERO <= lo < hi <= ONE:
        raise PreconditionError(f"window ({lo},{hi}) must lie in (0,1)")
    coefficients = lattice_solve(v, family.basis)
    if coefficients is None:
        logger.info("Vector %s is outside the bump lattice at level %d", v, n)
        return Realization(None, None, family.basis.hermite)
    if not any(coefficients):
        return Realization(identity(), coefficients, family.basis.hermite)
    element = compose(*_place_bumps(n, coefficients, lo, hi))
    if xi(element, n) != v:
        raise ConstructionError(f"placed bumps realize {xi(element, n)} instead of {v}")
    logger.debug("Realized %s with coefficients %s in (%s,%s)", v, coefficients, lo, hi)
    return Realization(element, coefficients, family.basis.hermite)
