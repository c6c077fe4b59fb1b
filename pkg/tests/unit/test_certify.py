"""
Unit tests for width certificates and the verification suite.
"""
import random

import pytest

from src.plgroup.core.certify import (
    CHAIN_RULE_POINTS,
    RANDOM_CHECKS,
    STRUCTURAL_CHECKS,
    CertificateKind,
    ElementSampler,
    _non_breakpoints,
    brute_force_width_check,
    commutator_lower_certificate,
    distance_to_multiples,
    factor_bound,
    iter_lemma_suite,
    run_lemma_suite,
    run_trial,
    ulam_lower_certificate,
)
from src.plgroup.core.decompose import width_witness
from src.plgroup.core.dyadic import ZERO, Dyadic
from src.plgroup.core.errors import MembershipError, ThetaMismatchError
from src.plgroup.core.omega import check_omega, make_tau
from src.plgroup.core.plmap import (
    compose,
    evaluate,
    has_fixed_point,
    identity,
    slopes_at,
    translation,
)
from src.plgroup.core.thompson import transporter


class TestDistances:
    """Tests for the exact distance and factor bound helpers."""

    @pytest.mark.parametrize(
        "x, n, expected",
        [
            (Dyadic(5, 1), 2, Dyadic(1, 1)),
            (Dyadic(-1, 2), 2, Dyadic(1, 2)),
            (Dyadic(6, 0), 3, ZERO),
            (Dyadic(7, 1), 4, Dyadic(1, 1)),
        ],
    )
    def test_distance_to_multiples(self, x, n, expected):
        assert distance_to_multiples(x, n) == expected

    @pytest.mark.parametrize(
        "distance, cap, expected",
        [
            (ZERO, 1, 0),
            (Dyadic(1, 1), 1, 1),
            (Dyadic(1, 0), 1, 2),
            (Dyadic(3, 0), 2, 2),
            (Dyadic(7, 1), 2, 2),
        ],
    )
    def test_factor_bound(self, distance, cap, expected):
        assert factor_bound(distance, cap) == expected

    def test_caps(self):
        assert CertificateKind.ULAM.cap == 1
        assert CertificateKind.COMMUTATOR.cap == 2


class TestCertificates:
    """Tests for Ulam and commutator width certificates."""

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_ulam_bound_grows(self, n):
        certificate = ulam_lower_certificate(width_witness(n), n)
        assert certificate.bound >= n // 2

    def test_commutator_bound(self):
        certificate = commutator_lower_certificate(width_witness(8), 8)
        assert certificate.bound >= 2

    def test_tau_and_identity(self):
        assert ulam_lower_certificate(make_tau(2), 2).bound == 1
        assert ulam_lower_certificate(identity(), 2).bound == 0

    def test_translation_by_n_is_free(self):
        g = width_witness(4)
        shifted = compose(g, translation(4))
        assert ulam_lower_certificate(g, 4).bound == ulam_lower_certificate(shifted, 4).bound

    def test_render(self):
        text = ulam_lower_certificate(width_witness(4), 4).render()
        lines = text.splitlines()
        assert lines[0] == "certificate kind=ulam n=4"
        assert lines[1].startswith("witness_point_image ")
        assert lines[2].startswith("distance_to_nZ ")
        assert lines[3].startswith("bound ")
        assert sum(line.startswith("assumption ") for line in lines) == 3

    def test_outside_omega(self):
        with pytest.raises(MembershipError):
            ulam_lower_certificate(translation(1), 2)


class TestElementSampler:
    """Tests for the seeded element sampler."""

    @pytest.fixture
    def sampler(self):
        return ElementSampler(2, random.Random("sampler"))

    def test_matched_tuple(self, sampler):
        for _ in range(5):
            xs, ys = sampler.matched_tuple()
            f = transporter(2, xs, ys)
            assert [evaluate(f, x) for x in xs] == ys

    def test_mismatched_tuple(self, sampler):
        xs, ys = sampler.mismatched_tuple()
        with pytest.raises(ThetaMismatchError):
            transporter(2, xs, ys)

    def test_words_are_in_omega(self, sampler):
        for _ in range(5):
            assert check_omega(sampler.word(), 2).passed

    def test_fixed_point_and_stabilizer(self, sampler):
        assert has_fixed_point(sampler.fixed_point_map())
        assert evaluate(sampler.stabilizer_element(), ZERO) == ZERO

    def test_non_breakpoints_avoid_nodes(self, sampler):
        f, g = sampler.word(), sampler.word()
        points = _non_breakpoints(sampler, f, g, CHAIN_RULE_POINTS)
        assert 0 < len(points) <= CHAIN_RULE_POINTS
        assert len(set(points)) == len(points)
        for x in points:
            left, right = slopes_at(f, x)
            assert left == right
            left, right = slopes_at(g, evaluate(f, x))
            assert left == right

    def test_seeded(self):
        first = ElementSampler(3, random.Random(11)).word()
        second = ElementSampler(3, random.Random(11)).word()
        assert first == second


class TestSuite:
    """Tests for trials and the suite runner."""

    def test_run_trial_is_deterministic(self):
        anchor, check, _ = RANDOM_CHECKS[0]
        first = run_trial(check, anchor, 2, 7, 3, 4)
        assert first == run_trial(check, anchor, 2, 7, 3, 4)
        assert first == (True, "")

    def test_closure_over_many_products(self):
        """A thousand seeded products at level 3 pass the chain rule check."""
        anchor, check, _ = RANDOM_CHECKS[0]
        assert anchor == "closure"
        trials = (run_trial(check, anchor, 3, 2024, i, 4) for i in range(1000))
        failures = [message for ok, message in trials if not ok]
        assert failures == []

    def test_structural_only(self):
        report = run_lemma_suite(2, 0, 0)
        anchors = [result.anchor for result in report.results]
        assert "weak-generators" not in anchors
        assert len(anchors) == len(STRUCTURAL_CHECKS) - 1 + len(RANDOM_CHECKS)
        assert report.ok
        assert all(result.trials == 0 for result in report.results if result.anchor == "closure")

    def test_small_run(self):
        report = run_lemma_suite(2, 0, 3, max_word_length=2, heavy_divisor=10)
        assert report.ok, report.render()
        heavy = {anchor for anchor, _, is_heavy in RANDOM_CHECKS if is_heavy}
        for result in report.results:
            if result.anchor in heavy:
                assert result.trials == 1
        assert report.render().endswith("verdict=pass\n")

    def test_streamed_order(self):
        anchors = [
            result.anchor
            for result in iter_lemma_suite(2, 1, 0, max_word_length=2, heavy_divisor=10)
        ]
        expected = [a for a, _, always in STRUCTURAL_CHECKS if always]
        expected += [a for a, _, _ in RANDOM_CHECKS]
        assert anchors == expected

    def test_seed_reproducibility(self):
        first = run_lemma_suite(2, 5, 2, max_word_length=2, heavy_divisor=10).render()
        second = run_lemma_suite(2, 5, 2, max_word_length=2, heavy_divisor=10).render()
        assert first == second

    def test_brute_force(self):
        result = brute_force_width_check(2, 0, 5)
        assert result.anchor == "width-brute-force"
        assert result.trials == 5
        assert result.ok
