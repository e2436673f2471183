import os
import time

import pytest
from hypothesis import HealthCheck, settings

from aimspectra.aim import spectrum
from aimspectra.cli import load_reference
from aimspectra.problem import ProblemSpec, parse_radius

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


class SpectrumCache:
    """Computes each (d, l, a, b, R) spectrum once per session, growing on demand."""

    def __init__(self):
        self._store = {}
        self.seconds_per_level = {}

    def get(self, spec: ProblemSpec, count: int):
        key = (spec.d, spec.l, str(spec.a), str(spec.b), str(spec.R))
        have = self._store.get(key)
        if have is None or len(have) < count:
            t0 = time.perf_counter()
            self._store[key] = spectrum(spec, count)
            self.seconds_per_level[key] = (time.perf_counter() - t0) / count
        return self._store[key][:count]

    def level(self, spec: ProblemSpec, n: int):
        return self.get(spec, n + 1)[n]


@pytest.fixture(scope="session")
def spectra():
    return SpectrumCache()


@pytest.fixture(scope="session")
def reference_rows():
    return load_reference()


def spec_of(row) -> ProblemSpec:
    return ProblemSpec(row["a"], row["b"], int(row["d"]), int(row["l"]), parse_radius(row["R"]))


# acceptance summary: tests marked ``criterion(i, title)`` report one line per criterion

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, {"title": title, "ok": True, "tests": []})
    entry["ok"] = entry["ok"] and report.passed
    entry["tests"].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        failed = [name for name, outcome in entry["tests"] if outcome != "passed"]
        line = f"criterion {num:2d} {'PASS' if entry['ok'] else 'FAIL'}  {entry['title']}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(line)
