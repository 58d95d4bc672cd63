import sys
import time
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sswm import correlations as corr  # noqa: E402
from sswm.params import load_preset  # noqa: E402

SESSION_START = time.perf_counter()

# criterion number -> (title, [(test id, outcome, details)])
_CRITERIA: "OrderedDict[int, tuple[str, list]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        n, title = marker.args
        details = [str(v) for k, v in item.user_properties if k == "detail"]
        _CRITERIA.setdefault(n, (title, []))[1].append((item.name, rep.outcome, details))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, runs = _CRITERIA[n]
        ok = all(outcome == "passed" for _, outcome, _ in runs)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
        for name, outcome, details in runs:
            extra = f"  [{'; '.join(details)}]" if details else ""
            tr.write_line(f"    {outcome:7s} {name}{extra}")
    tr.write_line(f"session wall time so far: {time.perf_counter() - SESSION_START:.1f} s")


class Fig3Run:
    """Kernel, amplitude and traces for one correlation preset, computed once."""

    def __init__(self, name):
        t0 = time.perf_counter()
        self.preset = load_preset(name)
        self.field = corr.kernel_field(self.preset.params, self.preset.grid)
        self.amplitude = corr.amplitude_a3(self.field)
        self.surface = corr.surface_from_amplitude(self.amplitude)
        self.r2_s1 = corr.conditional_from_kernel(self.field, "s1")
        self.r2_s2 = corr.conditional_from_kernel(self.field, "s2")
        self.seconds = time.perf_counter() - t0


_FIG3 = {}


def fig3_run(name):
    if name not in _FIG3:
        _FIG3[name] = Fig3Run(name)
    return _FIG3[name]


@pytest.fixture(scope="session")
def fig3():
    return fig3_run
