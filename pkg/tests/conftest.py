import numpy as np
import pytest

from univcheck.invariants import InvariantReport, gl_baseline

# every InvariantReport built during the session, for the run-wide lower-bound check
REPORTS: list[InvariantReport] = []
# (criterion, passed, detail) lines printed at the end of the run
ACCEPTANCE: list[tuple[str, bool, str]] = []

_orig_init = InvariantReport.__init__


def _recording_init(self, *args, **kwargs):
    _orig_init(self, *args, **kwargs)
    REPORTS.append(self)


InvariantReport.__init__ = _recording_init


def base_dim(report: InvariantReport) -> int | None:
    """``D`` with ``total_dim = D^{2k}``, or None for reports not about ``ρ_2k``."""
    if report.k is None:
        return None
    D = round(report.total_dim ** (1 / (2 * report.k)))
    for cand in (D - 1, D, D + 1):
        if cand >= 1 and cand ** (2 * report.k) == report.total_dim:
            return cand
    return None


def baseline_violations() -> list[InvariantReport]:
    bad = []
    for r in REPORTS:
        D = base_dim(r)
        if D is not None and r.certain and r.value < gl_baseline(D, r.k):
            bad.append(r)
    return bad


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE:
            terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
    bad = baseline_violations()
    certain = sum(1 for r in REPORTS if r.certain and base_dim(r) is not None)
    terminalreporter.write_line(
        f"criterion 8 (run-wide measured >= baseline): {'PASS' if not bad else 'FAIL'}  "
        f"({certain} certain reports checked, {len(bad)} violations)"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_sessionfinish(session, exitstatus):
    # a certain report below the full-group value fails the whole run
    if baseline_violations() and exitstatus == 0:
        session.exitstatus = 1
