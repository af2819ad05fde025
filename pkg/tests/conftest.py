import os
import re
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

K148 = "3.3.148.1"
K404 = "3.3.404.1"
K564 = "3.3.564.1"
QUINTIC = "5.5.126032.1"
SEXTIC = "6.6.2803712.1"
K2 = "4.4.2048.1"
K3 = "8.8.2147483648.1"
SQRT2 = "2.2.8.1"
FS3 = "3.3.130964.1"
FS4 = "4.4.52816.1"


@pytest.fixture
def tmp_store(tmp_path):
    from fermatcheck.dataio import FixtureStore

    return FixtureStore(cache_root=tmp_path / "cache")


_CRIT = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    outcomes = defaultdict(list)
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call" and key == "passed":
                continue
            m = _CRIT.search(getattr(rep, "nodeid", ""))
            if m and "test_acceptance" in rep.nodeid:
                outcomes[int(m.group(1))].append(key == "passed")
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(outcomes):
        ok = all(outcomes[n])
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({sum(outcomes[n])}/{len(outcomes[n])} checks)")
