"""Verification suites: named invariant checks, runner, and CLI."""

from .runner import SUITES, CheckResult, SuiteConfig, emit_report, run_suite

__all__ = ["SUITES", "CheckResult", "SuiteConfig", "emit_report", "run_suite"]
