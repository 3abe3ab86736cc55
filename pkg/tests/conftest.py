import pytest

# (criterion, description, passed, detail) lines collected by test_acceptance
ACCEPTANCE = []


@pytest.fixture(scope="session")
def subcritical_reports():
    from euler_alignment import harness as H
    import time
    t0 = time.perf_counter()
    reports = [H.run_campaign(c) for c in H.subcritical_matrix()]
    return reports, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, desc, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {crit}: {desc} ({detail})")
