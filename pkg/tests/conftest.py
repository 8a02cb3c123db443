import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or rep.when != "call" and outcome != "error":
                continue
            detail = dict(getattr(rep, "user_properties", [])).get("detail", "")
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((int(m.group(1)), f"CRITERION {int(m.group(1)):2d} {status}  "
                                           f"{m.group(2).replace('_', ' ')} "
                                           f"({rep.duration:.2f}s)  {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, text in sorted(lines):
            terminalreporter.write_line(text)
