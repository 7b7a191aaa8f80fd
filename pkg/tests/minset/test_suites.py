import pytest

from isobuild.core.exceptions import UnknownSuite
from isobuild.crystals import Isocrystal, NewtonPoint, standard_form
from isobuild.minset import SuiteConfig, describe_instance, verify_suite
from isobuild.padic import Matrix, make_field

SMALL = SuiteConfig(seed=7, samples=6, j_samples=3, transports=1)


def names(report) -> list[str]:
    return [c.name for c in report.checks]


class TestSuites:
    def test_prop1(self, trivial, half):
        for ic in (trivial, half):
            report = verify_suite(ic, "prop1", SMALL)
            assert report.passed, report.checks
            assert names(report) == [
                "midpoint_convexity",
                "power_min_inclusion",
                "power_displacement",
                "lemma5",
            ]

    @pytest.mark.slow
    def test_prop1_fifty_pairs(self, half, mixed):
        config = SuiteConfig(seed=3, samples=50, j_samples=3, transports=1)
        for ic in (half, mixed):
            report = verify_suite(ic, "prop1", config)
            assert report.passed, report.checks
            assert "50 Min pairs" in report.checks[0].detail

    def test_thm2(self, half, mixed):
        for ic in (half, mixed):
            report = verify_suite(ic, "thm2", SMALL)
            assert report.passed, report.checks
            assert report.seed == 7
            assert "sigma_conjugation_transport" in names(report)

    def test_bound37(self, half):
        report = verify_suite(half, "bound37", SMALL)
        assert report.passed, report.checks
        assert names(report) == [
            "displacement_lower_bound",
            "min_characterization",
            "kappa_positive",
            "kappa_stability",
            "lemma5",
        ]

    def test_bound37_without_estimate(self, qp):
        ic = Isocrystal(qp, Matrix.diagonal(qp, [3, 2]))
        report = verify_suite(ic, "bound37", SMALL)
        assert report.passed, report.checks
        statuses = {c.name: c.status for c in report.checks}
        assert statuses["kappa_positive"] == statuses["kappa_stability"] == "SKIP"

    def test_remark6(self, half):
        report = verify_suite(half, "remark6", SMALL)
        assert report.passed, report.checks
        assert names(report) == [
            "balls_are_crystals",
            "balls_enumerated",
            "crystals_are_balls",
            "minimal_crystals_connected",
            "lemma5",
        ]

    @pytest.mark.slow
    def test_remark6_mixed_slopes(self, mixed):
        report = verify_suite(mixed, "remark6", SMALL)
        assert report.passed, report.checks

    @pytest.mark.slow
    def test_remark6_odd_prime(self):
        ic = standard_form(NewtonPoint.from_pairs([("1/2", 2)]), make_field(3, 1, 20))
        report = verify_suite(ic, "remark6", SMALL)
        assert report.passed, report.checks

    def test_remark6_slope_range(self, qp):
        steep = standard_form(NewtonPoint.from_pairs([(2, 1)]), qp)
        report = verify_suite(steep, "remark6", SMALL)
        assert not report.passed
        assert report.checks[0].name == "slope_range"

    def test_unknown(self, half):
        with pytest.raises(UnknownSuite):
            verify_suite(half, "xyz")


def test_describe_instance(half):
    assert describe_instance(half) == {
        "p": 2,
        "m": 1,
        "n": 2,
        "s": 1,
        "N": 20,
        "newton_point": [{"num": 1, "den": 2, "mult": 2}],
    }
    assert verify_suite(half, "prop1", SMALL).instance == describe_instance(half)
