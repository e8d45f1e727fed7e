import time

import pytest

from robust_risk import lp

SUITE_BUDGET_SECONDS = 60.0

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}
_session = {}
LP_AUDIT = {"optimal": 0, "violations": 0}


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


@pytest.fixture(autouse=True)
def audit_lp_certificates(monkeypatch):
    """Every OPTIMAL solve made during a test must carry a valid certificate."""
    seen = []
    original = lp.solve

    def recording_solve(problem):
        sol = original(problem)
        seen.append(sol)
        return sol

    monkeypatch.setattr(lp, "solve", recording_solve)
    yield seen
    optimal = [sol for sol in seen if sol.is_optimal]
    bad = [sol for sol in optimal if not (sol.primal_residual <= lp.PRIMAL_RESIDUAL_LIMIT
                                          and sol.dual_residual <= lp.DUAL_RESIDUAL_LIMIT
                                          and sol.duality_gap <= lp.GAP_LIMIT)]
    LP_AUDIT["optimal"] += len(optimal)
    LP_AUDIT["violations"] += len(bad)
    assert not bad, bad[0]


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _session["start"]
    _session["elapsed"] = elapsed
    if ACCEPTANCE and elapsed >= SUITE_BUDGET_SECONDS:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:2d}. {title}: {detail}")
    ok = LP_AUDIT["violations"] == 0
    tr.write_line(f"[{'PASS' if ok else 'FAIL'}] LP audit: {LP_AUDIT['optimal']} optimal solutions "
                  f"this session, {LP_AUDIT['violations']} above the certificate limits")
    elapsed = _session.get("elapsed", time.perf_counter() - _session["start"])
    ok = elapsed < SUITE_BUDGET_SECONDS
    tr.write_line(f"[{'PASS' if ok else 'FAIL'}] session runtime {elapsed:.1f} s "
                  f"(budget {SUITE_BUDGET_SECONDS:.0f} s)")
