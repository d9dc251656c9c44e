import numpy as np
import pytest

from causalwick.fields import oscillator_spec, random_channel_spec, random_real_spec
from causalwick.specfile import bundled_spec_path, load_spec

BUNDLED = ("oscillator", "realfield", "channel_bose", "channel_fermi", "nonrel_fermi")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def osc():
    return oscillator_spec()


@pytest.fixture(params=["real", "bose", "fermi", "bose-nonrel", "fermi-nonrel"])
def any_spec(request):
    r = np.random.default_rng(7)
    kind = request.param
    if kind == "real":
        return random_real_spec(r)
    stat, _, nr = kind.partition("-")
    return random_channel_spec(r, statistics=stat, nonrel=bool(nr))


def bundled(name):
    return load_spec(bundled_spec_path(name))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
