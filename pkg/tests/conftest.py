import time

import numpy as np
import pytest

from multispecies_landau.dynamics import RunConfig, run
from multispecies_landau.landau import mixture_from_bumps
from multispecies_landau.species import make_species_set
from multispecies_landau.vgrid import make_grid

# Reference scenario: two species, masses 1 and 2, temperatures 0.5 and 2,
# opposite drifts along the first axis.
SCENARIO_BUMPS = [[(1.0, [0.5, 0.0], 0.5)], [(1.0, [-0.5, 0.0], 2.0)]]
# Centres of five equal subintervals of [0, 2].
SAMPLE_TIMES = (0.2, 0.6, 1.0, 1.4, 1.8)


def scenario_species(gamma=0.0):
    return make_species_set([1.0, 2.0], np.ones((2, 2)), gamma * np.ones((2, 2)), 2)


def scenario_state(n=32, gamma=0.0):
    grid = make_grid(2, 6.0, n)
    return mixture_from_bumps(scenario_species(gamma), grid, SCENARIO_BUMPS)


class ScenarioRun:
    """Records at every step plus the states at and around the sample times."""

    def __init__(self, n, gamma, dt, t_end=2.0, sample_times=SAMPLE_TIMES):
        self.n, self.gamma, self.dt = n, gamma, dt
        wanted = set()
        for t in sample_times:
            k = int(round(t / dt))
            wanted.update((k - 1, k, k + 1))
        self.states = {}

        def keep(rec, st):
            k = int(round(st.time / dt))
            if k in wanted:
                self.states[k] = st

        start = time.perf_counter()
        self.records = run(
            scenario_state(n, gamma),
            RunConfig(dt=dt, t_end=t_end, dissipation=False),
            on_record=keep,
        )
        self.seconds = time.perf_counter() - start
        self.times = np.array([r.time for r in self.records])
        self.H = np.array([r.entropy for r in self.records])
        self.I = np.array([r.fisher for r in self.records])

    def index(self, t):
        return int(round(t / self.dt))

    def central_difference(self, values, t):
        k = self.index(t)
        return (values[k + 1] - values[k - 1]) / (2.0 * self.dt)


_RUNS = {}


def scenario_run(n=32, gamma=0.0, dt=1e-3):
    """Cached reference run; the long runs are shared across test modules."""
    key = (n, gamma, dt)
    if key not in _RUNS:
        _RUNS[key] = ScenarioRun(n, gamma, dt)
    return _RUNS[key]


@pytest.fixture(scope="session")
def reference_run():
    return scenario_run(32, 0.0, 1e-3)


@pytest.fixture(scope="session")
def fine_run():
    # dt below the RK4 stability limit of the N=64 grid (about 3.9e-4).
    return scenario_run(64, 0.0, 2.5e-4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" and outcome != "error":
                continue
            name = rep.nodeid.rsplit("::", 1)[-1]
            if "test_acceptance" not in rep.nodeid or not name.startswith("test_criterion_"):
                continue
            num = int(name.split("_")[2])
            detail = dict(rep.user_properties).get("detail", "")
            lines.append((num, "PASS" if outcome == "passed" else "FAIL", name, detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, name, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {num:2d} {verdict}  {name}  {detail}")
