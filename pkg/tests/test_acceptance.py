"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

The lines bypass output capture, so they show up in a plain ``pytest`` run.
"""

import pytest

from imodleach.harness.checks import AcceptanceSuite


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite(seeds=range(1, 11), workers=1)


@pytest.fixture
def report(capsys):
    def check(result):
        with capsys.disabled():
            print("\n" + result.line())
        assert result.passed, result.line()
    return check


def test_criterion_01_lifetime_increases_with_p(suite, report):
    report(suite.lifetime_trend())


def test_criterion_02_stability_decreases_with_p(suite, report):
    report(suite.stability_trend())


def test_criterion_03_packet_trends(suite, report):
    report(suite.packet_trends())


def test_criterion_04_sink_position_effect(suite, report):
    report(suite.sink_effect())


def test_criterion_05_soft_threshold_insensitivity(suite, report):
    report(suite.soft_threshold_insensitivity())


def test_criterion_06_k1_bound(suite, report):
    report(suite.k1_bound())


def test_criterion_07_radio_units(suite, report):
    report(suite.radio_units())


def test_criterion_08_conservation_and_determinism(suite, report):
    report(suite.conservation_and_determinism())


def test_criterion_09_reactive_reduces_to_proactive(suite, report):
    report(suite.reactive_reduces_to_proactive())


def test_criterion_10_magnitude_band(suite, report):
    report(suite.magnitude_band())
