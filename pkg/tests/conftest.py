import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _CRITERIA.get(n, (title, True, ""))
        ok = prev[1] and report.outcome == "passed"
        detail = prev[2]
        if report.outcome != "passed":
            msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
            detail = (detail + "; " if detail else "") + msg.splitlines()[0][:160] if msg else detail
        _CRITERIA[n] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[n]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if not ok and detail:
            line += f"  ({detail})"
        tr.write_line(line)


@pytest.fixture(scope="session")
def desk_runs(tmp_path_factory):
    """Two desk-scale runs with the default seed: one single-threaded, one on four threads."""
    import time

    from tdamix.config import validate_config
    from tdamix.pipeline import run_pipeline

    cfg = validate_config({}, "desk")
    out = {}
    for workers in (1, 4):
        d = tmp_path_factory.mktemp(f"desk_w{workers}")
        t0 = time.perf_counter()
        manifest = run_pipeline(cfg, out_dir=d, workers=workers)
        out[workers] = {"dir": d, "manifest": manifest, "seconds": time.perf_counter() - t0}
    return out
