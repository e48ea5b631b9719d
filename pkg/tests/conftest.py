import numpy as np
import pytest

from relay_rates.params import FIG3, SystemParams


@pytest.fixture
def fig3():
    return FIG3


def random_stable_draws(n, seed=12345, edge=0.95):
    """(params, g) with gains in [0,1], powers in [0.1,100], g in [0, edge/(2 mu)]."""
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n):
        alpha, beta, gamma, eta, mu = rng.uniform(0, 1, 5)
        power_mt, power_rt, var_z, var_w = rng.uniform(0.1, 100, 4)
        p = SystemParams(alpha, beta, gamma, eta, mu, power_mt, power_rt, var_z, var_w, 1)
        g = rng.uniform(0, edge / (2 * mu))
        draws.append((p, float(g)))
    return draws


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance summary line; all lines are echoed at session end."""
    def _report(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
