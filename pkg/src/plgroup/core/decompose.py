"""
Constructions inside Omega_n: special elements of the derived subgroup,
germ correction at 0, the near-identity normal form and the weak
generating set of Delta_n.

Every construction is deterministic: contractions aim at the leftmost
admissible grid points and transport uses the fewest applications of the
special element.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

from src.plgroup.core.cocycle import (
    LatticeBasis,
    classify_subgroup,
    lattice_contains,
    psi_basis,
    realize_xi,
    sigma_kernel_generators,
    xi,
    zeta_image,
)
from src.plgroup.core.dyadic import ONE, ZERO, Dyadic, DyadicLike, as_dyadic
from src.plgroup.core.errors import ConstructionError, PLGroupError, PreconditionError
from src.plgroup.core.omega import (
    contracted_special,
    degree,
    is_special,
    make_tau,
    make_zeta,
    require_omega,
    zeta_window,
)
from src.plgroup.core.plmap import (
    PLMap1P,
    commutator,
    compose,
    evaluate,
    identity,
    invert,
    is_identity,
    is_supported_in,
    slopes_at,
    translation,
)
from src.plgroup.core.thompson import (
    balanced_bump,
    balanced_bump_ending,
    classify_thompson,
    grid_bump,
    placement_attempts,
    theta_matched_points,
    transporter,
)
from src.plgroup.models.factorization import Factor, Factorization, FactorTag
from src.plgroup.models.report import WeakGeneratorReport
from src.plgroup.utils.config import config_manager
from src.plgroup.utils.logging import get_logger

logger = get_logger(__name__)

Interval = Tuple[DyadicLike, DyadicLike]


def _step_cap(n: int) -> int:
    factor = config_manager.section("construction").get("transport_step_factor", 64)
    return int(factor) * n


def make_derived(f: PLMap1P, window: Interval, n: int) -> PLMap1P:
    """
    Multiply an F^c element by bumps in window so that Xi vanishes.

    The window should be disjoint from the support of f.

    Raises:
        ConstructionError: If the compensation cannot be realized
    """
    realization = realize_xi(-xi(f, n), window, n)
    if not realization.realized:
        raise ConstructionError(f"cannot cancel Xi = {xi(f, n)} inside {window}")
    return compose(f, realization.element)


def derived_bump(n: int, lo: DyadicLike, hi: DyadicLike) -> PLMap1P:
    """A nontrivial element of F' supported in ``[lo, hi] + Z``."""
    lo, hi = as_dyadic(lo), as_dyadic(hi)
    mid = (lo + hi).shift(-1)
    return make_derived(grid_bump(n, lo, mid), (mid, hi), n)


def derived_transporter(n: int, u: DyadicLike, v: DyadicLike) -> PLMap1P:
    """
    An element of F' mapping u to v, for theta-equal points of ``(0, 1)``.

    Raises:
        ThetaMismatchError: If the residues differ
    """
    u, v = as_dyadic(u), as_dyadic(v)
    if u == v:
        return identity()
    lo = min(u, v).shift(-1)
    hi = (max(u, v) + 1).shift(-1)
    return make_derived(transporter(n, [u], [v], lo, hi), (hi, ONE), n)


def _contract(
    n: int, lo: Dyadic, hi: Dyadic, target_lo: Dyadic, target_hi: Dyadic
) -> PLMap1P:
    """
    Thompson element mapping ``[lo, hi]`` into ``(target_lo, target_hi)``.

    The target must contain the same integer as ``[lo, hi]``, or lie in the
    same unit interval when ``[lo, hi]`` holds no integer.
    """
    if target_lo < lo and hi < target_hi:
        return identity()
    z = lo.ceil()
    if z > hi:
        m = lo.floor()
        sources = [lo - m] if lo == hi else [lo - m, hi - m]
        targets = theta_matched_points(n, sources, target_lo - m, target_hi - m)
        return transporter(n, sources, targets)
    sources, targets = [], []
    if z < hi:
        (right,) = theta_matched_points(n, [hi - z], ZERO, target_hi - z)
        sources.append(hi - z)
        targets.append(right)
    if lo < z:
        (left,) = theta_matched_points(n, [lo - z + 1], target_lo - z + 1, ONE)
        sources.append(lo - z + 1)
        targets.append(left)
    return transporter(n, sources, targets)


def transport(
    n: int,
    interval: Interval,
    target: Interval,
    target_degree: int,
    special: Optional[PLMap1P] = None,
    max_steps: Optional[int] = None,
) -> PLMap1P:
    """
    An Omega_n element moving I into ``U + m`` with ``m == target_degree (mod n)``.

    The word alternates Thompson contractions with the special element s
    (tau unless given): whatever lies in ``(m + 1 + left, m + 1)``, with
    ``left = 0·s⁻¹``, is carried by s into ``(m + 1, m + 2)``.

    Args:
        n: Level
        interval: Compact interval I of length below 1
        target: Open interval U inside ``(0, 1)``
        target_degree: Wanted number of unit crossings mod n
        special: Special element to use instead of tau
        max_steps: Cap on crossings, ``transport_step_factor * n`` by default

    Raises:
        PreconditionError: If I or U is out of range
        ConstructionError: If the step cap is exceeded
    """
    a, b = as_dyadic(interval[0]), as_dyadic(interval[1])
    u_lo, u_hi = as_dyadic(target[0]), as_dyadic(target[1])
    if b < a or b - a >= 1:
        raise PreconditionError(f"interval [{a},{b}] must have length below 1")
    if not ZERO <= u_lo < u_hi <= ONE:
        raise PreconditionError(f"target ({u_lo},{u_hi}) must be inside (0,1)")
    s = special if special is not None else make_tau(n)
    if not is_special(s, n):
        raise PreconditionError("transport needs a special element")
    left = evaluate(invert(s), ZERO)
    cap = max_steps if max_steps is not None else _step_cap(n)

    word: List[PLMap1P] = []
    lo, hi = a, b

    def push(g: PLMap1P) -> None:
        nonlocal lo, hi
        if not is_identity(g):
            word.append(g)
            lo, hi = evaluate(g, lo), evaluate(g, hi)

    if lo.ceil() <= hi.floor():
        base = lo.ceil()
        push(_contract(n, lo, hi, base + left, base + 1 + left))
        push(s)
    else:
        base = lo.floor()
    m = lo.floor()
    steps = 0
    while (m - base - target_degree) % n:
        steps += 1
        if steps > cap:
            raise ConstructionError(f"transport exceeded {cap} steps at level {n}")
        push(_contract(n, lo, hi, m + 1 + left, m + 1))
        push(s)
        m += 1
        logger.debug("transport step %d: image [%s,%s]", steps, lo, hi)
    push(_contract(n, lo, hi, u_lo + m, u_hi + m))
    return compose(*word) if word else identity()


@lru_cache(maxsize=None)
def _special_parts(n: int, wl: Dyadic, wr: Dyadic) -> Tuple[PLMap1P, PLMap1P, PLMap1P]:
    k_lo, k_hi = wl.shift(-1), wr.shift(-1)
    g1 = transport(n, (k_lo, k_hi), (ZERO, ONE), 0)
    shift = evaluate(g1, k_lo).floor()
    if shift:
        g1 = compose(g1, translation(-shift))
    a, b = evaluate(g1, k_lo), evaluate(g1, k_hi)
    p = evaluate(g1, ZERO)
    mid = (p + b).shift(-1)
    (q,) = theta_matched_points(n, [p], p, mid)
    g2 = make_derived(transporter(n, [p], [q], a, mid), (mid, b), n)
    f = compose(g1, g2, invert(g1))
    if not is_special(f, n) or not is_supported_in(f, wl, wr):
        raise ConstructionError(f"special element for ({wl},{wr}) failed its checks")
    return f, g1, g2


def special_in_derived(
    n: int, window: Interval = (Dyadic(-1, 3), Dyadic(1, 3))
) -> Tuple[PLMap1P, Factorization]:
    """
    A special element of the derived subgroup supported in ``window + Z``.

    It is ``g1 g2 g1⁻¹`` where g1 carries the half window into ``(0, 1)``
    and g2 in F' pushes ``0·g1`` to the right.

    Args:
        n: Level
        window: Open interval around 0 inside ``[-1/4, 1/4]``

    Returns:
        The element and a one-factor factorization recording the conjugacy
    """
    wl, wr = as_dyadic(window[0]), as_dyadic(window[1])
    if not Dyadic(-1, 2) <= wl < ZERO < wr <= Dyadic(1, 2):
        raise PreconditionError(f"window ({wl},{wr}) must contain 0 inside [-1/4,1/4]")
    f, g1, g2 = _special_parts(n, wl, wr)
    factor = Factor(f, FactorTag.CONJUGATED_FPRIME, witness=invert(g1), core=g2)
    return f, Factorization(f, n, [factor])


def _fitting_unit(n: int, room: Dyadic, alpha: int) -> Dyadic:
    for level in range(1, placement_attempts() + 1):
        unit = ONE.shift(-n * level)
        if unit + unit.shift(n * alpha) < room:
            return unit
    raise ConstructionError(f"no bump of exponent {alpha} fits in length {room}")


def zerofix_correctors(f: PLMap1P, n: int) -> Tuple[Factor, Factor]:
    """
    Two conjugates of F' elements cancelling the germs of f at 0.

    ``f·g1·g2`` is the identity near the integers; g1 fixes the right germ
    and g2 the left germ. A factor is the identity when its germ is trivial.

    Raises:
        PreconditionError: If f is not in Omega_n or moves 0
    """
    require_omega(f, n)
    if evaluate(f, ZERO) != ZERO:
        raise PreconditionError("zero-fixing correction needs 0·f == 0")
    left, right = slopes_at(f, ZERO)
    if left % n or right % n:
        raise PreconditionError(f"germ slopes at 0 are not powers of 2^{n}")
    h = contracted_special(n, Dyadic(-1, 3), Dyadic(1, 3))
    h_inv = invert(h)
    x, y = evaluate(h, ZERO), evaluate(h_inv, ONE)
    mid = (x + y).shift(-1)

    first = Factor(identity(), FactorTag.CONJUGATED_FPRIME, identity(), identity())
    if right:
        alpha = right // n
        unit = _fitting_unit(n, mid - x, alpha)
        bump = balanced_bump(n, x, unit, alpha)
        end = x + unit + unit.shift(n * alpha)
        core = invert(make_derived(bump, (end, mid), n))
        first = Factor(compose(h, core, h_inv), FactorTag.CONJUGATED_FPRIME, h_inv, core)

    second = Factor(identity(), FactorTag.CONJUGATED_FPRIME, identity(), identity())
    if left:
        alpha = -(left // n)
        unit = _fitting_unit(n, y - mid, alpha)
        bump = balanced_bump_ending(n, y, unit, alpha)
        start = y - unit.shift(n * alpha) - unit
        core = invert(make_derived(bump, (mid, start), n))
        second = Factor(compose(h_inv, core, h), FactorTag.CONJUGATED_FPRIME, h, core)
    return first, second


def normal_form_near_zero(g: PLMap1P, n: int) -> Factorization:
    """
    Write g as ``h · g_1 ··· g_k · t_n^l`` with h fixing a neighbourhood of 0.

    0·g is first translated into ``[-n, 0)`` (or to 0). The image of 0 then
    climbs one unit per step through theta-matched derived transporters
    followed by a special element alpha, lands in ``(0, 1)``, and is brought
    back to 0; the zero-fixing correctors finish the head.

    Raises:
        MembershipError: If g is not in Omega_n
        ConstructionError: If more than ``2n + 4`` conjugated factors appear
    """
    require_omega(g, n)
    alpha, alpha_fz = special_in_derived(n)
    alpha_factor = alpha_fz.factors[0]
    alpha_left = evaluate(invert(alpha), ZERO)
    alpha_zero = evaluate(alpha, ZERO)

    start = evaluate(g, ZERO)
    if start.is_integer() and start.floor() % n == 0:
        point = ZERO
    else:
        point = start - n * (start.floor() // n + 1)
    shift = point - start
    power = -shift.floor() // n

    word: List[Factor] = []
    y = point

    def push(factor: Factor) -> None:
        nonlocal y
        if not is_identity(factor.element):
            word.append(factor)
            y = evaluate(factor.element, y)

    def derived(element: PLMap1P) -> Factor:
        return Factor(element, FactorTag.CONJUGATED_FPRIME, identity(), element)

    if y != ZERO:
        while not ZERO < y < ONE:
            if not y.is_integer():
                (t,) = theta_matched_points(n, [y.frac()], ONE + alpha_left, ONE)
                push(derived(derived_transporter(n, y.frac(), t)))
            push(alpha_factor)
            logger.debug("normal form: image of 0 at %s", y)
        push(derived(derived_transporter(n, y, alpha_zero)))
        push(alpha_factor.inverse())

    fixed = compose(g, translation(shift), *(factor.element for factor in word))
    for corrector in zerofix_correctors(fixed, n):
        if not is_identity(corrector.element):
            word.append(corrector)
    head = compose(g, translation(shift), *(factor.element for factor in word))
    if evaluate(head, ZERO) != ZERO or slopes_at(head, ZERO) != (0, 0):
        raise ConstructionError("head does not fix a neighbourhood of 0")

    fz = Factorization(g, n, [Factor(head, FactorTag.HEAD)], translation_power=power)
    for factor in reversed(word):
        fz.add_factor(factor.inverse())
    if power:
        fz.add_factor(Factor(translation(n * power), FactorTag.TRANSLATION_POWER))

    if len(fz.conjugated) > 2 * n + 4:
        raise ConstructionError(
            f"{len(fz.conjugated)} conjugated factors exceed the bound {2 * n + 4}"
        )
    if fz.product() != g:
        raise ConstructionError("factors do not recompose to the target")
    return fz


def verify_factorization(fz: Factorization, budget: Optional[int] = None) -> List[str]:
    """
    Check a factorization and return its defects (empty when valid).

    Args:
        fz: Factorization to check
        budget: Maximum number of conjugated factors, if any
    """
    n = fz.level
    defects = []
    if fz.product() != fz.target:
        defects.append("factors do not recompose to the target")
    if budget is not None and len(fz.conjugated) > budget:
        defects.append(f"{len(fz.conjugated)} conjugated factors exceed {budget}")
    for i, factor in enumerate(fz.factors, start=1):
        if factor.tag is FactorTag.HEAD:
            element = factor.element
            if evaluate(element, ZERO) != ZERO or slopes_at(element, ZERO) != (0, 0):
                defects.append(f"factor {i}: head moves a neighbourhood of 0")
        elif factor.tag is FactorTag.TRANSLATION_POWER:
            if factor.element != translation(n * fz.translation_power):
                defects.append(f"factor {i}: not the translation by {n * fz.translation_power}")
        elif factor.witness is None or factor.core is None:
            defects.append(f"factor {i}: conjugacy witness missing")
        else:
            if compose(invert(factor.witness), factor.core, factor.witness) != factor.element:
                defects.append(f"factor {i}: witness does not conjugate core to element")
            if not classify_thompson(factor.core, n).in_Fprime:
                defects.append(f"factor {i}: core is not in F'")
    return defects


def _inside_unit(lo: Dyadic, hi: Dyadic) -> bool:
    return not lo.is_integer() and not hi.is_integer() and lo.floor() + 1 == hi.ceil()


def find_moving_interval(f: PLMap1P, n: int) -> Tuple[Dyadic, Dyadic]:
    """
    A small interval I in ``(0, 1)`` with I and I·f disjoint modulo 1.

    Candidates are the nodes, then points ``2^-(n·depth)`` of the way into
    each segment from the left; the first point whose displacement is not
    an integer wins. The interval has radius ``2^-(n·depth)`` for the
    smallest depth that works.

    Raises:
        PreconditionError: If f is a translation by an integer
    """
    if len(f.nodes) == 1 and f.nodes[0][1].is_integer():
        raise PreconditionError("integer translations move no interval off itself")

    def candidates():
        yield from f.xs
        ends = f.xs[1:] + [f.xs[0] + 1]
        for depth in range(1, placement_attempts() + 1):
            for x, end in zip(f.xs, ends):
                yield x + (end - x).shift(-n * depth)

    def clean(p: Dyadic) -> bool:
        q = evaluate(f, p)
        return not (p.is_integer() or q.is_integer() or (q - p).is_integer())

    x = next((p for p in candidates() if clean(p)), None)
    if x is None:
        raise ConstructionError("no point with non-integer displacement found")
    for depth in range(1, placement_attempts() + 1):
        delta = ONE.shift(-n * depth)
        lo, hi = x - delta, x + delta
        image_lo, image_hi = evaluate(f, lo), evaluate(f, hi)
        if not (_inside_unit(lo, hi) and _inside_unit(image_lo, image_hi)):
            continue
        offset = image_lo.floor() - lo.floor()
        if image_hi < lo + offset or hi + offset < image_lo:
            m = lo.floor()
            return lo - m, hi - m
    raise ConstructionError(f"no moving interval around {x}")


@dataclass(frozen=True)
class DisjointCommutator:
    """``result = [[f, alpha1], alpha2]`` with alpha1, alpha2 in F'."""

    alpha1: PLMap1P
    alpha2: PLMap1P
    inner: PLMap1P
    result: PLMap1P


def find_disjoint_commutator(f: PLMap1P, n: int) -> DisjointCommutator:
    """
    Two F' elements whose iterated commutator with f is a nontrivial F' element.

    Raises:
        PreconditionError: If f is an integer translation
        ConstructionError: If the result fails the F' test
    """
    require_omega(f, n)
    lo, hi = find_moving_interval(f, n)
    alpha1 = derived_bump(n, lo, hi)
    inner = commutator(f, alpha1)
    k_lo, k_hi = find_moving_interval(inner, n)
    alpha2 = derived_bump(n, k_lo, k_hi)
    result = commutator(inner, alpha2)
    if is_identity(result) or not classify_thompson(result, n).in_Fprime:
        raise ConstructionError("iterated commutator is not a nontrivial F' element")
    return DisjointCommutator(alpha1, alpha2, inner, result)


def weak_generators_delta(n: int) -> WeakGeneratorReport:
    """
    The commutators ``zeta_i f⁻¹ zeta_i⁻¹ f`` for i = 1 .. 2^n - 2.

    g is a special element of the derived subgroup supported left of the
    zeta window; f carries the window across one integer into ``J·g``
    where ``J`` sits just left of 1, so ``f g⁻¹`` has degree 0 there.
    Construction failures are report defects.

    Each pair is ``(c, g)`` with ``c = zeta_i f⁻¹ zeta_i⁻¹ f`` in word order
    (left acts first). The F' check is on ``compose(g, c, g⁻¹)``, which as a
    composition of functions written right to left is ``g⁻¹ ∘ c ∘ g``: the
    conjugate of the commutator by g.
    """
    report = WeakGeneratorReport(n)
    try:
        window = zeta_window(n)
        g, _ = special_in_derived(n, (Dyadic(-1, 3), window[0]))
        u = evaluate(invert(g), ZERO)
        j_lo, j_hi = ONE + u.shift(-1), ONE + u.shift(-2)
        target = (evaluate(g, j_lo) - 1, evaluate(g, j_hi) - 1)
        f = transport(n, window, target, 1, special=g)
        report.check("construction", degree(f, window, n) == 1, "degree of (f, I) is not 1")
        report.check(
            "construction",
            degree(compose(f, invert(g)), window, n) == 0,
            "degree of (f g^-1, I) is not 0",
        )
        report.check("construction", degree(g, (j_lo, j_hi), n) == 1, "degree of (g, J) is not 1")
    except PLGroupError as e:
        report.check("construction", False, str(e))
        return report

    vectors = []
    for i in range(1, (1 << n) - 1):
        zeta = make_zeta(n, i)
        c = compose(zeta, invert(f), invert(zeta), f)
        report.pairs.append((c, g))
        try:
            value = xi(c, n)
            vectors.append(value)
            expected = zeta_image(n, i) - zeta_image(n, 2 * i)
            report.check("xi-difference", value == expected, f"i={i}: {value} != {expected}")
            report.check("delta-membership", classify_subgroup(c, n).in_Delta, f"i={i}")
            conjugate_c = compose(g, c, invert(g))
            report.check(
                "fprime-conjugate", classify_thompson(conjugate_c, n).in_Fprime, f"i={i}"
            )
        except PLGroupError as e:
            report.check("xi-difference", False, f"i={i}: {e}")

    commutators = LatticeBasis(n, vectors)
    psi, kernel = psi_basis(n), sigma_kernel_generators(n)
    report.check(
        "psi-generation",
        lattice_contains(psi, commutators) and lattice_contains(commutators, psi),
        "commutator lattice differs from Psi",
    )
    report.check(
        "psi-generation",
        lattice_contains(psi, kernel) and lattice_contains(kernel, psi),
        "Psi differs from the varsigma kernel",
    )
    logger.info("Weak generators at level %d: %s", n, "ok" if report.ok else "defects")
    return report


def width_witness(n: int) -> PLMap1P:
    """An element moving 0 into ``(n // 2, n // 2 + 1)``."""
    return transport(n, (ZERO, ZERO), (ZERO, ONE), n // 2)
