def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                rows.append((props["criterion"], props["title"], outcome, props.get("seconds")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome, secs in sorted(rows):
        timing = f" ({secs:.2f}s)" if secs is not None else ""
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if outcome == 'passed' else 'FAIL'}  {title}{timing}")
