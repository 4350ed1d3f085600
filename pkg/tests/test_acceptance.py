"""Tests for the acceptance suite plumbing."""

import pytest

from driftwos.config import settings
from driftwos.models.validation import CheckResult
from driftwos.services import acceptance
from driftwos.services.acceptance import SELECTORS, UnknownSelectorError, run_suite


def test_every_selector_has_a_suite():
    assert set(SELECTORS) == set(acceptance.SUITES)


def test_unknown_selector_lists_the_choices():
    with pytest.raises(UnknownSelectorError, match="bessel, sampler"):
        run_suite("everything")


def test_sample_counts_follow_validation_scale(monkeypatch):
    monkeypatch.setattr(settings, "validation_scale", 0.01)
    assert acceptance._scaled(100_000) == 1000
    assert acceptance._scaled(5_000) == 100


def test_all_runs_every_suite_in_order(monkeypatch):
    for name in SELECTORS:
        monkeypatch.setitem(
            acceptance.SUITES,
            name,
            lambda name=name: [CheckResult(suite=name, name="stub", passed=name != "laplace")],
        )

    report = run_suite("all")
    assert [check.suite for check in report.checks] == list(SELECTORS)
    assert not report.passed


def test_bessel_suite_passes():
    report = run_suite("bessel")
    assert report.passed, [check.name for check in report.checks if not check.passed]


@pytest.mark.parametrize("selector", ["sampler", "oracle", "mvp", "laplace", "end2end"])
def test_suites_pass_at_reduced_scale(monkeypatch, selector):
    monkeypatch.setattr(settings, "validation_scale", 0.02)
    report = run_suite(selector)

    assert report.checks
    assert report.passed, [check.name for check in report.checks if not check.passed]


@pytest.mark.filterwarnings("error::DeprecationWarning")
def test_sampler_checks_report_plain_booleans(monkeypatch):
    monkeypatch.setattr(settings, "validation_scale", 0.01)
    checks = acceptance.check_sampler()

    assert {check.name for check in checks} >= {"azimuth-symmetry", "determinism"}
    assert all(isinstance(check.passed, bool) for check in checks)
