"""
Unit tests for the models module.
"""
import pytest

from src.plgroup.core.decompose import normal_form_near_zero, special_in_derived
from src.plgroup.core.errors import ParseError
from src.plgroup.core.omega import make_tau, make_zeta
from src.plgroup.core.plmap import compose, identity, invert, serialize, translation
from src.plgroup.models import (
    CheckResult,
    Factor,
    Factorization,
    FactorTag,
    SuiteReport,
    WeakGeneratorReport,
    read_manifest,
    write_manifest,
)


class TestFactorTag:
    """Tests for the FactorTag enum."""

    def test_labels_round_trip(self):
        for tag in FactorTag:
            assert FactorTag.from_label(tag.label) is tag

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            FactorTag.from_label("head")


class TestFactorization:
    """Tests for the Factor and Factorization classes."""

    def test_inverse_keeps_witness(self):
        zeta, witness = make_zeta(2, 1), make_tau(2)
        element = compose(invert(witness), zeta, witness)
        factor = Factor(element, FactorTag.CONJUGATED_FPRIME, witness, zeta)
        inverse = factor.inverse()
        assert inverse.witness == witness
        assert inverse.core == invert(zeta)
        assert compose(invert(witness), inverse.core, witness) == inverse.element

    def test_product_and_views(self):
        tau = make_tau(2)
        fz = Factorization(compose(tau, translation(2)), 2, translation_power=1)
        fz.add_factor(Factor(identity(), FactorTag.HEAD))
        fz.add_factor(Factor(tau, FactorTag.CONJUGATED_FPRIME, identity(), tau))
        fz.add_factor(Factor(translation(2), FactorTag.TRANSLATION_POWER))
        assert fz.product() == fz.target
        assert fz.head is fz.factors[0]
        assert fz.conjugated == [fz.factors[1]]

    def test_render(self):
        fz = Factorization(identity(), 3, [Factor(identity(), FactorTag.HEAD)])
        assert fz.render() == (
            "factorization n=3 factors=1 conjugated=0 l=0\n"
            "factor 1 head-fixing-0-neighborhood k=1\n"
        )


class TestManifest:
    """Tests for writing and reading factorization manifests."""

    def test_round_trip(self, tmp_path):
        fz = normal_form_near_zero(make_tau(2), 2)
        path = write_manifest(fz, tmp_path / "out")
        assert path.name == "manifest.txt"
        loaded = read_manifest(path)
        assert loaded.level == 2
        assert loaded.translation_power == fz.translation_power
        assert loaded.target == fz.target
        assert [f.tag for f in loaded.factors] == [f.tag for f in fz.factors]
        assert loaded.product() == make_tau(2)

    def test_witness_files(self, tmp_path):
        _, fz = special_in_derived(2)
        path = write_manifest(fz, tmp_path)
        assert (tmp_path / "witness_1.plmap").exists()
        assert (tmp_path / "core_1.plmap").exists()
        assert read_manifest(path).factors[0].core == fz.factors[0].core

    def write(self, directory, text):
        (directory / "target.plmap").write_text(serialize(identity()))
        path = directory / "manifest.txt"
        path.write_text(text)
        return path

    @pytest.mark.parametrize(
        "text, line",
        [
            ("", None),
            ("factorization v2 n=2 factors=0 l=0\ntarget target.plmap\n", 1),
            ("factorization v1 n=x factors=0 l=0\ntarget target.plmap\n", 1),
            ("factorization v1 k=2 factors=0 l=0\ntarget target.plmap\n", 1),
            ("factorization v1 n=2 factors=0 l=0\ngoal target.plmap\n", 2),
            ("factorization v1 n=2 factors=0 l=0\ntarget missing.plmap\n", 2),
            ("factorization v1 n=2 factors=1 l=0\ntarget target.plmap\n", 1),
            (
                "factorization v1 n=2 factors=1 l=0\ntarget target.plmap\n"
                "factor 1 unknown target.plmap\n",
                3,
            ),
            (
                "factorization v1 n=2 factors=1 l=0\ntarget target.plmap\n"
                "factor 1 conjugated-Fprime target.plmap target.plmap\n",
                3,
            ),
        ],
    )
    def test_malformed(self, tmp_path, text, line):
        path = self.write(tmp_path, text)
        with pytest.raises(ParseError) as info:
            read_manifest(path)
        assert info.value.line == line


class TestReports:
    """Tests for CheckResult, SuiteReport and WeakGeneratorReport."""

    def test_check_result(self):
        result = CheckResult("closure", 2)
        result.record(True)
        result.record(False, "trial 1:\nplmap1p k=1\n")
        assert not result.ok
        assert result.render() == (
            "LEMMA closure n=2 trials=2 pass=1 fail=1\n"
            "  trial 1:\n"
            "  plmap1p k=1\n"
        )

    def test_suite_report(self):
        report = SuiteReport(3, 7, 10)
        passing = CheckResult("closure", 3)
        passing.record(True)
        report.results.append(passing)
        assert report.ok
        assert report.summary() == "SUITE n=3 seed=7 iterations=10 checks=1 fail=0 verdict=pass\n"
        failing = CheckResult("transporter", 3)
        failing.record(False)
        report.results.append(failing)
        assert report.failures == 1
        assert report.render().endswith("checks=2 fail=1 verdict=FAIL\n")
        assert report.render().startswith("LEMMA closure n=3 trials=1 pass=1 fail=0\n")

    def test_weak_generator_report(self):
        report = WeakGeneratorReport(2)
        report.check("construction", True)
        report.check("xi-difference", False, "i=1")
        report.check("xi-difference", True)
        assert not report.ok
        assert report.items == {"construction": True, "xi-difference": False}
        assert report.render() == (
            "weak-generators n=2 commutators=0\n"
            "item construction ok\n"
            "item xi-difference FAIL\n"
            "defect xi-difference: i=1\n"
            "verdict FAIL\n"
        )
