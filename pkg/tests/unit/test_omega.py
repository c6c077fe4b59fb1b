"""
Unit tests for the omega module.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.plgroup.core.dyadic import ZERO, Dyadic
from src.plgroup.core.errors import DegreeError, MembershipError, PreconditionError
from src.plgroup.core.omega import (
    check_omega,
    contracted_special,
    degree,
    gamma_canonical,
    is_special,
    make_tau,
    make_translation,
    make_zeta,
    require_omega,
    zeta_window,
)
from src.plgroup.core.plmap import (
    compose,
    evaluate,
    identity,
    invert,
    is_identity,
    is_supported_in,
    slopes_at,
    translation,
)

LEVEL = 3
GENERATORS = [make_tau(LEVEL)] + [make_zeta(LEVEL, k) for k in range(1, 7)]

omega_words = st.lists(
    st.tuples(st.sampled_from(GENERATORS), st.booleans()), min_size=1, max_size=5
).map(lambda letters: compose(*(invert(g) if inv else g for g, inv in letters)))


class TestCheckOmega:
    """Tests for the membership certificate."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_tau_passes(self, n):
        assert check_omega(make_tau(n), n).passed

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_translation_by_level_passes(self, n):
        assert check_omega(translation(n), n).passed

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_unit_translation_fails(self, n):
        certificate = check_omega(translation(1), n)
        assert not certificate.passed
        bad = certificate.first_violation
        assert (bad.count, bad.slope_log2) == (1, 0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_zetas_pass(self, n):
        for k in range(1, (1 << n) - 1):
            assert check_omega(make_zeta(n, k), n).passed

    def test_render(self):
        assert check_omega(translation(1), 2).render() == (
            "seg [0,1): count=1 slope_log2=0 verdict=FAIL\nomega n=2: FAIL at [0,1)\n"
        )
        assert check_omega(identity(), 2).render().endswith("omega n=2: pass\n")

    def test_segments_cover_period(self):
        segments = check_omega(make_tau(3), 3).segments
        assert segments[0].lo == ZERO
        assert segments[-1].hi == Dyadic(1)
        assert all(a.hi == b.lo for a, b in zip(segments, segments[1:]))

    def test_require_omega(self):
        with pytest.raises(MembershipError) as info:
            require_omega(translation(1), 2)
        assert not info.value.certificate.passed

    def test_level_too_small(self):
        with pytest.raises(PreconditionError):
            check_omega(identity(), 1)

    @given(omega_words)
    @settings(max_examples=40, deadline=None)
    def test_closure(self, f):
        assert check_omega(f, LEVEL).passed

    @given(omega_words)
    @settings(max_examples=20, deadline=None)
    def test_unit_translation_leaves_omega(self, f):
        assert not check_omega(compose(f, translation(1)), LEVEL).passed


class TestNamedElements:
    """Tests for tau, zeta_k and translations."""

    def test_tau_pieces(self):
        tau = make_tau(2)
        assert evaluate(tau, Dyadic(-1, 2)) == Dyadic(-1, 2)
        assert evaluate(tau, Dyadic(-3, 4)) == ZERO
        assert evaluate(tau, Dyadic(1, 1)) == Dyadic(1, 1)
        assert tau.log_slopes == (-2, 0, 2, 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_tau_image_of_zero(self, n):
        assert evaluate(make_tau(n), ZERO) == Dyadic((1 << n) - 1, 2 * n - 1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_tau_slopes_at_zero(self, n):
        assert slopes_at(make_tau(n), ZERO) == (1, -n)

    def test_zeta_image(self):
        assert evaluate(make_zeta(2, 1), Dyadic(3, 8)) == Dyadic(6, 8)

    @pytest.mark.parametrize("n, k", [(2, 1), (2, 2), (3, 4), (4, 9)])
    def test_zeta_slopes(self, n, k):
        assert slopes_at(make_zeta(n, k), Dyadic(2 + k, 4 * n)) == (n, 0)

    @pytest.mark.parametrize("n", [2, 3])
    def test_zetas_inside_window(self, n):
        lo, hi = zeta_window(n)
        for k in range(1, (1 << n) - 1):
            assert is_supported_in(make_zeta(n, k), lo, hi)

    @pytest.mark.parametrize("k", [0, 3])
    def test_zeta_index_range(self, k):
        with pytest.raises(PreconditionError):
            make_zeta(2, k)

    def test_level_range(self):
        with pytest.raises(PreconditionError):
            make_tau(1)

    def test_make_translation(self):
        assert is_identity(make_translation(0))
        assert make_translation(Dyadic(3, 1)) == translation(Dyadic(3, 1))


class TestGamma:
    """Tests for Gamma_n lifts, degrees and special elements."""

    def test_kernel_generator(self):
        assert is_identity(gamma_canonical(translation(3), 3).rep)

    def test_tau_is_canonical(self):
        assert gamma_canonical(make_tau(3), 3).rep == make_tau(3)

    def test_lift_independent(self):
        tau = make_tau(2)
        assert gamma_canonical(compose(tau, translation(4)), 2) == gamma_canonical(tau, 2)
        assert gamma_canonical(compose(tau, translation(-6)), 2) == gamma_canonical(tau, 2)

    def test_gamma_requires_omega(self):
        with pytest.raises(MembershipError):
            gamma_canonical(translation(1), 2)

    def test_degree(self):
        assert degree(identity(), (Dyadic(1, 2), Dyadic(1, 1)), 2) == 0
        assert degree(translation(3), (Dyadic(1, 2), Dyadic(1, 1)), 3) == 0
        assert degree(make_tau(2), (Dyadic(-1, 3), Dyadic(-1, 3)), 2) == 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_tau_degree_on_small_interval(self, n):
        interval = (Dyadic(3, 2 * n + 1), Dyadic(1, n))
        assert degree(make_tau(n), interval, n) == 0

    def test_degree_refuses_integers(self):
        with pytest.raises(DegreeError):
            degree(identity(), (Dyadic(-1, 2), Dyadic(1, 2)), 2)
        with pytest.raises(DegreeError):
            degree(identity(), (Dyadic(1, 1), Dyadic(1, 2)), 2)
        with pytest.raises(DegreeError):
            degree(translation(Dyadic(1, 1)), (Dyadic(1, 2), Dyadic(3, 2)), 2)

    def test_is_special(self):
        assert is_special(make_tau(3), 3)
        assert not is_special(identity(), 3)
        assert not is_special(invert(make_tau(3)), 3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_contracted_special(self, n):
        lo, hi = Dyadic(-1, 3), Dyadic(1, 3)
        h = contracted_special(n, lo, hi)
        assert check_omega(h, n).passed
        assert is_special(h, n)
        assert is_supported_in(h, lo, hi)

    def test_contracted_special_window(self):
        with pytest.raises(PreconditionError):
            contracted_special(2, Dyadic(1, 3), Dyadic(1, 2))
