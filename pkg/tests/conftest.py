def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status, key in (("PASS", "passed"), ("FAIL", "failed")):
        for report in terminalreporter.stats.get(key, []):
            if "test_acceptance.py" in report.nodeid and report.when == "call":
                lines.append((report.nodeid.split("::")[-1], status))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in lines:
            terminalreporter.write_line(f"{status}  {name}")
