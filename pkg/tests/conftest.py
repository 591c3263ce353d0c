import numpy as np
import pytest

from fdrelay.channel import NetworkConfig, sample_realization
from fdrelay.lift import build_lifted


def crand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_herm(rng, n):
    a = crand(rng, n, n)
    return a + a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["scalar", "strict"])
def mode(request):
    return request.param


def instance(n=2, mode="scalar", trial=0, seed=7, **kw):
    cfg = NetworkConfig(n=n, total_power=100.0, zfc_mode=mode, seed=seed, **kw)
    ch = sample_realization(cfg, trial)
    return cfg, ch, build_lifted(cfg, ch)


# one "criterion N: PASS/FAIL ..." line per acceptance criterion, printed at
# the end of the run so it is visible under output capture
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
