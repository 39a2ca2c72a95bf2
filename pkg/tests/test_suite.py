"""Library-level contracts of the verification driver and report plumbing."""

import json

import pytest

from kuznetsov_lab.reporting import (
    RunConfig,
    VerificationReport,
    input_digest,
    reports_to_csv,
    reports_to_json,
)
from kuznetsov_lab.suite import SELECTORS, run_suite, suite_exit_code


def make_report(**kw):
    base = dict(
        name="x", anchor="m.f", digest="0" * 12, passed=True, max_error=0.0, runtime=0.1
    )
    base.update(kw)
    return VerificationReport(**base)


class TestDriver:
    def test_selectors(self):
        assert set(SELECTORS) == {
            "combinatorics", "geometry", "special", "whittaker", "testfn", "trace", "all",
        }

    def test_unknown_selector_raises(self):
        with pytest.raises(ValueError, match="selector"):
            run_suite("bogus", RunConfig())

    def test_all_is_concatenation_in_group_order(self):
        cfg = RunConfig(seed=5)
        all_names = [r.name for r in run_suite("all", cfg)]
        concat = []
        for sel in SELECTORS[:-1]:
            concat += [r.name for r in run_suite(sel, cfg)]
        assert all_names == concat

    def test_full_battery_passes(self):
        reports = run_suite("all", RunConfig())
        assert all(r.passed for r in reports)
        assert suite_exit_code(reports) == 0

    def test_parallel_equals_serial(self):
        serial = run_suite("combinatorics", RunConfig(seed=2))
        parallel = run_suite("combinatorics", RunConfig(seed=2, jobs=4))
        assert [r.payload() for r in serial] == [r.payload() for r in parallel]

    def test_digest_tracks_seed_and_tolerance(self):
        base = input_digest("degree-closed-forms", RunConfig())
        assert base != input_digest("degree-closed-forms", RunConfig(seed=1))
        assert base != input_digest("degree-closed-forms", RunConfig(identity_tol=1e-3))
        assert base == input_digest("degree-closed-forms", RunConfig(jobs=8))
        assert base != input_digest("partition-identities", RunConfig())


class TestExitCodes:
    def test_all_pass(self):
        assert suite_exit_code([make_report()]) == 0

    def test_failure(self):
        assert suite_exit_code([make_report(), make_report(passed=False, max_error=0.5)]) == 1

    def test_crash_dominates(self):
        crashed = make_report(passed=False, max_error=float("inf"))
        assert suite_exit_code([make_report(passed=False, max_error=0.5), crashed]) == 2


class TestSerialization:
    def test_payload_excludes_runtime_by_default(self):
        r = make_report()
        assert "runtime" not in r.payload()
        assert r.payload(include_runtime=True)["runtime"] == 0.1

    def test_json_shape(self):
        text = reports_to_json([make_report()], include_runtime=False)
        data = json.loads(text)
        assert data == [
            {"name": "x", "anchor": "m.f", "digest": "0" * 12, "passed": True, "max_error": 0.0}
        ]
        assert text.endswith("\n")

    def test_csv_shape(self):
        lines = reports_to_csv([make_report(passed=False, max_error=2.0)], False).splitlines()
        assert lines[0] == "name,anchor,digest,passed,max_error"
        assert lines[1] == "x,m.f,000000000000,False,2.0"


class TestRunConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            RunConfig(quad_tol=0.0)
        with pytest.raises(ValueError):
            RunConfig(jobs=0)
        with pytest.raises(ValueError):
            RunConfig(out_format="xml")
