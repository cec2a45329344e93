import re

import numpy as np
import pytest

from steklov_extremal.bem import assemble
from steklov_extremal.geometry import make_disk
from steklov_extremal.spectrum import SpectralResult

HPS_SLACK = 1e-6

# Every SpectralResult built during the session is checked against
# λ_k ≤ 2πk / ∫ρ ds. Violations are attributed to the running test.
_hps = {"checked": 0, "violations": []}
_original_init = SpectralResult.__init__


def _checked_init(self, *args, **kwargs):
    _original_init(self, *args, **kwargs)
    mass = self.density.mass
    if mass > 0 and self.k_max:
        k = np.arange(1, self.k_max + 1)
        excess = self.eigenvalues - 2 * np.pi * k / mass
        _hps["checked"] += 1
        if np.any(excess > HPS_SLACK):
            _hps["violations"].append(float(excess.max()))


SpectralResult.__init__ = _checked_init


@pytest.fixture(autouse=True)
def hps_guard():
    before = len(_hps["violations"])
    yield
    new = _hps["violations"][before:]
    assert not new, f"HPS bound violated by {max(new):.3g}"


@pytest.fixture(scope="session")
def hps_stats():
    return _hps


@pytest.fixture(scope="session")
def disk256():
    return make_disk(256)


@pytest.fixture(scope="session")
def ops256(disk256):
    return assemble(disk256)


@pytest.fixture(scope="session")
def ops512():
    return assemble(make_disk(512))


# acceptance summary: one line per criterion, from tests named test_criterion_NN_*
_criteria: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(n, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({len(outcomes)} checks)")
    terminalreporter.write_line(f"HPS bound checked on {_hps['checked']} spectra, violations: {len(_hps['violations'])}")
