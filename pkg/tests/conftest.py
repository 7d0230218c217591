"""Acceptance bookkeeping: tests marked ``criterion(n)`` roll up into one
PASS/FAIL line per criterion in the terminal summary."""

DESCRIPTIONS = {
    1: "containment S^m inside A^4 on the instance pack, m in {2, 8, 48}, each run < 60 s",
    2: "wideness L <= floor(2K/t) at the plateau index, cover replays",
    3: "Ruzsa cover on 500 seeded random pairs",
    4: "plateau finder on 1000 seeded random f-vectors",
    5: "oracle equivalence on tiny instances",
    6: "normalized refinement replays (S^8)^A inside R^4; normal chains end A-normalized",
    7: "chain descent, subgroup closure at stabilization, subgroups stop at once",
    8: "growth |A^(3n+2)| >= (n+1)|A| across the pack",
    9: "local window pipeline (m = 8) never overflows",
}

_results: dict[int, list[bool]] = {}



def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _results.setdefault(marker.args[0], []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(DESCRIPTIONS):
        if n not in _results:
            continue
        runs = _results[n]
        status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(
            f"criterion {n}: {status} ({sum(runs)}/{len(runs)} tests) - {DESCRIPTIONS[n]}")
