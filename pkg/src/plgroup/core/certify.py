"""
Width certificates and the seeded verification suite.

Certificates turn the exact distance from ``0·g`` to ``nZ`` into a lower
bound on the number of factors any product expression of g needs. The
suite samples elements from a seed and checks the algebraic properties the
library relies on; every trial has its own generator so results do not
depend on scheduling.
"""
import random
from dataclasses import dataclass
from enum import Enum, auto
from functools import partial
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.plgroup.core.cocycle import (
    doubling,
    gimel,
    lattice_contains,
    mod2_rank,
    nu,
    orbit_partition,
    psi_basis,
    sigma_kernel_generators,
    varsigma,
    xi,
    zeta_basis,
)
from src.plgroup.core.decompose import (
    find_disjoint_commutator,
    normal_form_near_zero,
    transport,
    verify_factorization,
    weak_generators_delta,
)
from src.plgroup.core.dyadic import ONE, ZERO, Dyadic, theta
from src.plgroup.core.errors import (
    ConstructionError,
    DegreeError,
    PLGroupError,
    ThetaMismatchError,
)
from src.plgroup.core.omega import (
    check_omega,
    degree,
    gamma_canonical,
    is_special,
    make_tau,
    make_translation,
    make_zeta,
)
from src.plgroup.core.plmap import (
    PLMap1P,
    commutator,
    compose,
    conjugate,
    evaluate,
    has_fixed_point,
    invert,
    is_identity,
    max_displacement,
    serialize,
    slopes_at,
    translation,
)
from src.plgroup.core.thompson import classify_thompson, transporter
from src.plgroup.models.report import CheckResult, SuiteReport
from src.plgroup.utils.config import config_manager
from src.plgroup.utils.logging import get_logger

logger = get_logger(__name__)


class CertificateKind(Enum):
    """Enumeration of width certificate kinds."""

    ULAM = auto()  # products of conjugates of fixed-point maps
    COMMUTATOR = auto()  # products of commutators

    @property
    def cap(self) -> int:
        """Strict bound on the displacement contributed by one factor."""
        return 1 if self is CertificateKind.ULAM else 2

    @property
    def label(self) -> str:
        return self.name.lower()


ASSUMPTIONS = {
    CertificateKind.ULAM: (
        "each factor is a conjugate of a 1-periodic map admitting a fixed point",
        "each factor displaces every point by less than 1",
        "the trailing power of t_n is free",
    ),
    CertificateKind.COMMUTATOR: (
        "each factor is a commutator of 1-periodic maps",
        "each factor displaces every point by less than 2",
        "the trailing power of t_n is free",
    ),
}


@dataclass(frozen=True)
class WidthCertificate:
    """Lower bound on the number of factors needed to express an element."""

    kind: CertificateKind
    level: int
    witness_point_image: Dyadic
    distance_to_nZ: Dyadic
    bound: int
    assumptions: Tuple[str, ...]

    def render(self) -> str:
        lines = [
            f"certificate kind={self.kind.label} n={self.level}",
            f"witness_point_image {self.witness_point_image}",
            f"distance_to_nZ {self.distance_to_nZ}",
            f"bound {self.bound}",
        ]
        lines.extend(f"assumption {text}" for text in self.assumptions)
        return "\n".join(lines) + "\n"


def distance_to_multiples(x: Dyadic, n: int) -> Dyadic:
    """Exact distance from x to the nearest multiple of n."""
    r = x - n * (x.floor() // n)
    return min(r, n - r)


def factor_bound(distance: Dyadic, cap: int) -> int:
    """Least k with ``k * cap > distance``, and 0 for distance 0."""
    if not distance:
        return 0
    return int(distance.to_fraction() // cap) + 1


def _certify(g: PLMap1P, n: int, kind: CertificateKind) -> WidthCertificate:
    """Certificate of one kind from the canonical lift of g."""
    rep = gamma_canonical(g, n).rep
    image = evaluate(rep, ZERO)
    distance = distance_to_multiples(image, n)
    return WidthCertificate(
        kind, n, image, distance, factor_bound(distance, kind.cap), ASSUMPTIONS[kind]
    )


def ulam_lower_certificate(g: PLMap1P, n: int) -> WidthCertificate:
    """
    Bound for products of conjugates of fixed-point maps times a power of t_n.

    Raises:
        MembershipError: If g is not in Omega_n
    """
    return _certify(g, n, CertificateKind.ULAM)


def commutator_lower_certificate(g: PLMap1P, n: int) -> WidthCertificate:
    """
    Bound for products of commutators times a power of t_n.

    Raises:
        MembershipError: If g is not in Omega_n
    """
    return _certify(g, n, CertificateKind.COMMUTATOR)


class ElementSampler:
    """
    Seeded source of random elements and points at one level.

    Words are products of tau, the zeta elements, their inverses and
    transporters between theta-matched tuples, so every word is in Omega_n.
    """

    def __init__(self, n: int, rng: random.Random, max_word_length: int = 4) -> None:
        """
        Args:
            n: Level
            rng: Source of randomness, seeded by the caller
            max_word_length: Longest word returned by :meth:`word`
        """
        self.n = n
        self.rng = rng
        self.max_word_length = max_word_length
        self.base = 1 << n
        self.modulus = self.base - 1

    def residues(self, count: int) -> List[int]:
        """Random residues modulo ``2^n - 1``."""
        return [self.rng.randrange(self.modulus) for _ in range(count)]

    def grid_points(
        self, residues: Sequence[int], lo: Dyadic = ZERO, hi: Dyadic = ONE
    ) -> List[Dyadic]:
        """Random increasing grid points in ``(lo, hi)`` with the given residues."""
        room = 4 * self.modulus * (len(residues) + 1)
        blocks = 1
        while (hi - lo).shift(self.n * blocks) <= room:
            blocks += 1
        bits = self.n * blocks
        m = lo.shift(bits).floor()
        points = []
        for residue in residues:
            m += 1
            m += (residue - m) % self.modulus + self.modulus * self.rng.randrange(3)
            points.append(Dyadic(m, bits))
        if points and not points[-1] < hi:
            raise ConstructionError(f"grid points overflow ({lo},{hi})")
        return points

    def point(self) -> Dyadic:
        """Random dyadic point in ``(0, 1)``."""
        bits = self.n * self.rng.randint(1, 4)
        return Dyadic(self.rng.randrange(1, 1 << bits), bits)

    def matched_tuple(
        self, size: Optional[int] = None, lo: Dyadic = ZERO, hi: Dyadic = ONE
    ) -> Tuple[List[Dyadic], List[Dyadic]]:
        """
        Two increasing tuples in ``(lo, hi)`` with equal residues pointwise.

        Args:
            size: Tuple length, random in 1..5 when omitted
            lo: Left end of the range
            hi: Right end of the range
        """
        size = size or self.rng.randint(1, 5)
        residues = self.residues(size)
        return self.grid_points(residues, lo, hi), self.grid_points(residues, lo, hi)

    def mismatched_tuple(self) -> Tuple[List[Dyadic], List[Dyadic]]:
        """Two tuples whose residues differ at exactly one position."""
        size = self.rng.randint(1, 5)
        residues = self.residues(size)
        changed = list(residues)
        i = self.rng.randrange(size)
        changed[i] = (changed[i] + 1 + self.rng.randrange(self.modulus - 1)) % self.modulus
        return self.grid_points(residues), self.grid_points(changed)

    def thompson_element(self) -> PLMap1P:
        xs, ys = self.matched_tuple()
        return transporter(self.n, xs, ys)

    def fc_element(self, lo: Optional[Dyadic] = None, hi: Optional[Dyadic] = None) -> PLMap1P:
        """Transporter supported in ``[lo, hi]``, by default ``[1/N, 1 - 1/N]``."""
        lo = lo if lo is not None else ONE.shift(-self.n)
        hi = hi if hi is not None else ONE - ONE.shift(-self.n)
        xs, ys = self.matched_tuple(self.rng.randint(1, 3), lo, hi)
        return transporter(self.n, xs, ys, lo, hi)

    def generator(self) -> PLMap1P:
        """tau, a zeta element or a transporter, inverted half the time."""
        kind = self.rng.randrange(3)
        if kind == 0:
            g = make_tau(self.n)
        elif kind == 1:
            g = make_zeta(self.n, self.rng.randint(1, self.base - 2))
        else:
            return self.thompson_element()
        return g if self.rng.randrange(2) else invert(g)

    def word(self, length: Optional[int] = None) -> PLMap1P:
        """
        Product of random generators.

        Args:
            length: Number of generators, random up to ``max_word_length`` when omitted

        Returns:
            An element of Omega_n
        """
        length = length or self.rng.randint(1, self.max_word_length)
        return compose(*(self.generator() for _ in range(length)))

    def periodic_map(self) -> PLMap1P:
        """A 1-periodic map, generally outside Omega_n."""
        shift = Dyadic(self.rng.randrange(-self.base, self.base), self.n)
        return compose(self.word(), translation(shift))

    def fixed_point_map(self) -> PLMap1P:
        """A word translated so that a random point becomes fixed."""
        w, x = self.word(), self.point()
        return compose(w, translation(x - evaluate(w, x)))

    def stabilizer_element(self) -> PLMap1P:
        """``w φ w⁻¹`` with φ in F supported away from ``0·w``, so 0 is fixed."""
        w = self.word()
        p = evaluate(w, ZERO).frac()
        lo, hi = (ZERO, ONE) if not p else ((ZERO, p) if p > ONE.shift(-1) else (p, ONE))
        xs, ys = self.matched_tuple(self.rng.randint(1, 3), lo, hi)
        return compose(w, transporter(self.n, xs, ys, lo, hi), invert(w))


Outcome = Tuple[bool, List[PLMap1P]]
RandomCheck = Callable[[ElementSampler], Outcome]


CHAIN_RULE_POINTS = 10


def _non_breakpoints(
    s: ElementSampler, f: PLMap1P, g: PLMap1P, count: int
) -> List[Dyadic]:
    """
    Random points where f, g and their product have no node.

    Args:
        s: Sampler providing the points
        f: First factor, nodes checked at x
        g: Second factor, nodes checked at ``x·f``
        count: Number of points wanted; fewer come back if draws keep hitting nodes
    """
    f_nodes = {x.frac() for x in f.xs}
    g_nodes = {x.frac() for x in g.xs}
    points: List[Dyadic] = []
    for _ in range(20 * count):
        if len(points) == count:
            break
        x = s.point()
        if x.frac() in f_nodes or evaluate(f, x).frac() in g_nodes or x in points:
            continue
        points.append(x)
    return points


def _closure(s: ElementSampler) -> Outcome:
    """Products stay in Omega_n and log slopes add along the chain rule."""
    f, g = s.word(), s.word()
    h = compose(f, g)
    ok = check_omega(h, s.n).passed
    for x in _non_breakpoints(s, f, g, CHAIN_RULE_POINTS):
        left, right = slopes_at(h, x)
        y = evaluate(f, x)
        ok = ok and left == right
        ok = ok and right == slopes_at(f, x)[1] + slopes_at(g, y)[1]
    return ok, [f, g]


def _inverse_closure(s: ElementSampler) -> Outcome:
    """Inverses stay in Omega_n and cancel."""
    f = s.word()
    inverse = invert(f)
    return check_omega(inverse, s.n).passed and is_identity(compose(f, inverse)), [f]


def _theta_invariance(s: ElementSampler) -> Outcome:
    """Residues of points in the unit interval are preserved."""
    f = s.word()
    inverse = invert(f)
    for _ in range(8):
        y = s.point()
        x = evaluate(inverse, y)
        if ZERO <= x <= ONE:
            return theta(x, s.n) == theta(y, s.n), [f]
    return True, [f]


def _orbit_soundness(s: ElementSampler) -> Outcome:
    """Transporters fix the integers and keep residues."""
    f, x = s.thompson_element(), s.point()
    ok = classify_thompson(f, s.n).in_F and theta(evaluate(f, x), s.n) == theta(x, s.n)
    return ok, [f]


def _stabilizer(s: ElementSampler) -> Outcome:
    """Conjugates of F elements by words fix 0 and stay in F."""
    f = s.stabilizer_element()
    in_omega = check_omega(f, s.n).passed
    return in_omega and evaluate(f, ZERO) == ZERO and classify_thompson(f, s.n).in_F, [f]


def _transporter(s: ElementSampler) -> Outcome:
    """Matched tuples are transported exactly; mismatched tuples are refused."""
    xs, ys = s.matched_tuple()
    f = transporter(s.n, xs, ys)
    ok = (
        check_omega(f, s.n).passed
        and classify_thompson(f, s.n).in_F
        and all(evaluate(f, x) == y for x, y in zip(xs, ys))
    )
    xs, ys = s.mismatched_tuple()
    try:
        transporter(s.n, xs, ys)
        ok = False
    except ThetaMismatchError:
        pass
    return ok, [f]


def _cocycle_homomorphism(s: ElementSampler) -> Outcome:
    """Xi is additive and invariant under conjugation in F^c."""
    f, g, h = s.fc_element(), s.fc_element(), s.fc_element()
    n = s.n
    ok = xi(compose(f, g), n) == xi(f, n) + xi(g, n) and xi(conjugate(f, h), n) == xi(f, n)
    return ok, [f, g, h]


def _gimel_factorization(s: ElementSampler) -> Outcome:
    """gimel equals varsigma applied to Xi on F^c."""
    f = s.fc_element()
    return gimel(f, s.n) == varsigma(xi(f, s.n), s.n), [f]


def _gimel_vanishing(s: ElementSampler) -> Outcome:
    """gimel vanishes on commutators."""
    f, g = s.word(), s.word()
    return gimel(commutator(f, g), s.n).is_zero(), [f, g]


def _small_interval(s: ElementSampler) -> Tuple[Dyadic, Dyadic]:
    x = s.point()
    width = ONE.shift(-s.n * s.rng.randint(2, 4))
    return x, min(x + width, ONE - ONE.shift(-8 * s.n))


def _degree_additivity(s: ElementSampler) -> Outcome:
    """Degrees add under composition, modulo n."""
    f, g = s.word(), s.word()
    lo, hi = _small_interval(s)
    try:
        first = degree(f, (lo, hi), s.n)
        second = degree(g, (evaluate(f, lo), evaluate(f, hi)), s.n)
        total = degree(compose(f, g), (lo, hi), s.n)
    except DegreeError:
        return True, [f, g]
    return total == (first + second) % s.n, [f, g]


def _degree_lift_independence(s: ElementSampler) -> Outcome:
    """Translating a lift by a multiple of n keeps the degree."""
    f = s.word()
    lo, hi = _small_interval(s)
    try:
        base = degree(f, (lo, hi), s.n)
    except DegreeError:
        return True, [f]
    lifts = (compose(f, translation(s.n * j)) for j in range(-2, 3))
    return all(degree(lift, (lo, hi), s.n) == base for lift in lifts), [f]


def _degree_zero_commutator(s: ElementSampler) -> Outcome:
    """A degree-zero pair commutes the local F^c element into F'."""
    n = s.n
    w = s.word()
    lo, hi = _small_interval(s)
    try:
        d = degree(w, (lo, hi), n)
    except DegreeError:
        return True, [w]
    image = (evaluate(w, lo), evaluate(w, hi))
    f = compose(w, transport(n, image, (ZERO, ONE), (-d) % n))
    h = s.fc_element(lo, hi)
    c = commutator(f, h)
    return degree(f, (lo, hi), n) == 0 and classify_thompson(c, n).in_Fprime, [f, h]


def _displacement(s: ElementSampler) -> Outcome:
    """Commutators move points by less than 2, fixed-point maps by less than 1."""
    f, g, h = s.periodic_map(), s.periodic_map(), s.fixed_point_map()
    ok = max_displacement(commutator(f, g)) < 2
    ok = ok and has_fixed_point(h) and max_displacement(h) < 1
    return ok, [f, g, h]


def _width_soundness(s: ElementSampler) -> Outcome:
    """k conjugates of fixed-point maps move 0 less than k from nZ."""
    count = s.rng.randint(1, 3)
    factors = [conjugate(s.fixed_point_map(), s.word()) for _ in range(count)]
    product = compose(*factors)
    ok = distance_to_multiples(evaluate(product, ZERO), s.n) < count
    g = s.word()
    shifted = compose(g, make_translation(s.n))
    ok = ok and ulam_lower_certificate(g, s.n).bound == ulam_lower_certificate(shifted, s.n).bound
    return ok, factors + [g]


def _disjoint_commutator(s: ElementSampler) -> Outcome:
    """Every non-translation yields a nontrivial iterated commutator in F'."""
    f = s.word()
    if len(f.nodes) == 1 and f.nodes[0][1].is_integer():
        return True, [f]
    found = find_disjoint_commutator(f, s.n)
    return not is_identity(found.result), [f]


def _normal_form(s: ElementSampler) -> Outcome:
    """Normal forms verify within the 2n + 4 factor bound."""
    g = s.word()
    fz = normal_form_near_zero(g, s.n)
    return not verify_factorization(fz, budget=2 * s.n + 4), [g]


# (anchor, check, heavy)
RANDOM_CHECKS: Tuple[Tuple[str, RandomCheck, bool], ...] = (
    ("closure", _closure, False),
    ("inverse-closure", _inverse_closure, False),
    ("theta-invariance", _theta_invariance, False),
    ("orbit-soundness", _orbit_soundness, False),
    ("stabilizer", _stabilizer, False),
    ("transporter", _transporter, False),
    ("cocycle-homomorphism", _cocycle_homomorphism, False),
    ("gimel-factorization", _gimel_factorization, False),
    ("gimel-vanishing", _gimel_vanishing, False),
    ("degree-additivity", _degree_additivity, False),
    ("degree-lift-independence", _degree_lift_independence, False),
    ("degree-zero-commutator", _degree_zero_commutator, True),
    ("displacement", _displacement, False),
    ("width-soundness", _width_soundness, False),
    ("disjoint-commutator", _disjoint_commutator, True),
    ("normal-form", _normal_form, True),
)


StructuralCheck = Callable[[int], Iterable[Tuple[bool, str]]]


def _zeta_table(n: int) -> Iterator[Tuple[bool, str]]:
    for k in range(1, (1 << n) - 1):
        value = xi(make_zeta(n, k), n)
        expected = -2 * nu(n, 2 + k) + nu(n, 2 + 2 * k)
        yield value == expected, f"zeta_{k}: xi {value} expected {expected}"


def _tau_table(n: int) -> Iterator[Tuple[bool, str]]:
    tau = make_tau(n)
    base = 1 << n
    yield is_special(tau, n), "tau is not special"
    yield evaluate(tau, ZERO) == Dyadic(2 * (base - 1), 2 * n), "0·tau is not 2(N-1)/N^2"
    yield set(tau.log_slopes) == {n, 1, -n, 0}, f"tau log slopes {tau.log_slopes}"


def _membership_trichotomy(n: int) -> Iterator[Tuple[bool, str]]:
    yield check_omega(make_tau(n), n).passed, "tau rejected"
    yield check_omega(make_translation(n), n).passed, "t_n rejected"
    rejected = check_omega(make_translation(1), n)
    yield not rejected.passed and rejected.first_violation is not None, "t_1 accepted"


def _orbit_partition(n: int) -> Iterator[Tuple[bool, str]]:
    partition = orbit_partition(n)
    yield partition.classes[0] == (2,), "2 is not a singleton class"
    for i, j in partition.class_of.items():
        yield partition.class_of[doubling(i, n)] == j, f"doubling leaves the class of {i}"


def _zeta_independence(n: int) -> Iterator[Tuple[bool, str]]:
    rank = mod2_rank(zeta_basis(n))
    yield rank == (1 << n) - 2, f"mod-2 rank {rank}"


def _varsigma_zeta(n: int) -> Iterator[Tuple[bool, str]]:
    for k in range(1, (1 << n) - 1):
        zeta = make_zeta(n, k)
        yield gimel(zeta, n) == varsigma(xi(zeta, n), n), f"zeta_{k}: gimel differs"
    for label, v in zip(sigma_kernel_generators(n).labels, sigma_kernel_generators(n).vectors):
        yield varsigma(v, n).is_zero(), f"{label} is not in the varsigma kernel"


def _psi_generation(n: int) -> Iterator[Tuple[bool, str]]:
    psi, kernel = psi_basis(n), sigma_kernel_generators(n)
    yield lattice_contains(psi, kernel) and lattice_contains(kernel, psi), "Psi != kernel"


def _weak_generators(n: int) -> Iterator[Tuple[bool, str]]:
    report = weak_generators_delta(n)
    yield report.ok, report.render()


# (anchor, check, runs without samples)
STRUCTURAL_CHECKS: Tuple[Tuple[str, StructuralCheck, bool], ...] = (
    ("zeta-table", _zeta_table, True),
    ("tau-table", _tau_table, True),
    ("membership-trichotomy", _membership_trichotomy, True),
    ("orbit-partition", _orbit_partition, True),
    ("zeta-independence", _zeta_independence, True),
    ("varsigma-zeta", _varsigma_zeta, True),
    ("psi-generation", _psi_generation, True),
    ("weak-generators", _weak_generators, False),
)


def _suite_setting(key: str, default: int) -> int:
    """Integer setting from the ``suite`` configuration section."""
    return int(config_manager.section("suite").get(key, default))


def run_trial(
    check: RandomCheck, anchor: str, n: int, seed: int, index: int, max_word_length: int
) -> Tuple[bool, str]:
    """Run one random trial; construction errors count as failures."""
    sampler = ElementSampler(n, random.Random(f"{seed}:{anchor}:{index}"), max_word_length)
    try:
        ok, witnesses = check(sampler)
    except PLGroupError as e:
        return False, f"trial {index}: {type(e).__name__}: {e}"
    if ok:
        return True, ""
    return False, f"trial {index}:\n" + "".join(serialize(w) for w in witnesses)


def _structural_result(anchor: str, check: StructuralCheck, n: int) -> CheckResult:
    """Collect one structural check; a library error counts as one failure."""
    result = CheckResult(anchor, n)
    try:
        for ok, message in check(n):
            result.record(ok, message)
    except PLGroupError as e:
        result.record(False, f"{type(e).__name__}: {e}")
    return result


def iter_lemma_suite(
    n: int,
    seed: int,
    iterations: int,
    max_word_length: Optional[int] = None,
    heavy_divisor: Optional[int] = None,
    map_fn: Callable = map,
) -> Iterator[CheckResult]:
    """
    Yield one CheckResult per anchor in a fixed order.

    Args:
        n: Level
        seed: Suite seed
        iterations: Trials per random check; heavy checks run a fraction
        max_word_length: Longest sampled word
        heavy_divisor: Divisor applied to iterations for heavy checks
        map_fn: Order-preserving map used to run trials, e.g. ``executor.map``
    """
    max_word_length = max_word_length or _suite_setting("max_word_length", 4)
    heavy_divisor = heavy_divisor or _suite_setting("heavy_divisor", 20)

    for anchor, check, always in STRUCTURAL_CHECKS:
        if always or iterations > 0:
            yield _structural_result(anchor, check, n)

    for anchor, check, heavy in RANDOM_CHECKS:
        trials = max(1, iterations // heavy_divisor) if heavy and iterations else iterations
        result = CheckResult(anchor, n)
        run = partial(
            run_trial, check, anchor, n, seed, max_word_length=max_word_length
        )
        for ok, counterexample in map_fn(run, range(trials)):
            result.record(ok, counterexample)
        logger.debug("%s: %d/%d passed", anchor, result.passed, result.trials)
        yield result


def run_lemma_suite(
    n: int, seed: int, iterations: int, map_fn: Callable = map, **settings: int
) -> SuiteReport:
    """Run every check and collect a SuiteReport."""
    report = SuiteReport(n, seed, iterations)
    report.results.extend(iter_lemma_suite(n, seed, iterations, map_fn=map_fn, **settings))
    logger.info(
        "Suite n=%d seed=%d: %d checks, %d failures", n, seed, len(report.results), report.failures
    )
    return report


def brute_force_width_check(
    n: int, seed: int, samples: int, max_factors: int = 3
) -> CheckResult:
    """
    Products of up to ``max_factors`` conjugates of fixed-point maps never
    move 0 as far from ``nZ`` as their factor count.
    """
    result = CheckResult("width-brute-force", n)
    for i in range(samples):
        sampler = ElementSampler(n, random.Random(f"{seed}:brute:{i}"))
        count = sampler.rng.randint(1, max_factors)
        factors = [conjugate(sampler.fixed_point_map(), sampler.word()) for _ in range(count)]
        product = compose(*factors)
        distance = distance_to_multiples(evaluate(product, ZERO), n)
        ok = factor_bound(distance, CertificateKind.ULAM.cap) <= count
        result.record(ok, "" if ok else "".join(serialize(f) for f in factors))
    return result
