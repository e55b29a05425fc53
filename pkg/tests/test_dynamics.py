import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import scenario_run, scenario_state
from multispecies_landau.dynamics import RunConfig, run, step, suggest_dt
from multispecies_landau.equilibrium import GaussianSpec, MacroState, equilibrium_of, gaussian_field, gaussian_oracle, gaussian_moments, relative_entropy
from multispecies_landau.errors import BlowUpError, ParameterError
from multispecies_landau.landau import mixture_from_bumps, random_mixture
from multispecies_landau.species import make_species_set
from multispecies_landau.state import MixtureState
from multispecies_landau.vgrid import make_grid


def _species(c=1.0, gamma=0.0):
    return make_species_set([1.0, 2.0], c * np.ones((2, 2)), gamma * np.ones((2, 2)), 2)


@pytest.mark.parametrize(
    "kwargs",
    [{"flow": "boltzmann"}, {"scheme": "rk3"}, {"dt": 0.0}, {"dt": -1e-3}, {"t_end": -1.0}, {"diagnostics_every": 0}],
)
def test_run_config_validation(kwargs):
    with pytest.raises(ParameterError):
        RunConfig(**kwargs)


def test_t_end_must_be_a_multiple_of_dt():
    st = random_mixture(_species(), make_grid(2, 6.0, 8), np.random.default_rng(0))
    with pytest.raises(ParameterError):
        run(st, RunConfig(dt=0.3, t_end=1.0))


def test_equilibrium_is_a_fixed_point():
    grid = make_grid(2, 6.0, 16)
    st = mixture_from_bumps(_species(), grid, [[(1.0, [0.2, 0.0], 1.0)], [(0.5, [0.2, 0.0], 1.0)]])
    new, clamped = step(st, RunConfig(dt=1e-2))
    assert clamped == 0.0
    assert np.abs(new.fields - st.fields).max() < 1e-14 * st.fields.max()
    assert new.time == pytest.approx(1e-2)


def test_zero_coupling_leaves_state_unchanged():
    st = random_mixture(_species(c=0.0), make_grid(2, 6.0, 12), np.random.default_rng(3))
    records = run(st, RunConfig(dt=1e-2, t_end=0.05))
    assert len(records) == 6
    for rec in records[1:]:
        assert_allclose(rec.densities, records[0].densities, rtol=0, atol=0)
        assert rec.entropy == records[0].entropy


def test_records_schedule():
    st = random_mixture(_species(), make_grid(2, 6.0, 8), np.random.default_rng(1))
    assert [r.time for r in run(st, RunConfig(dt=1e-2, t_end=0.0))] == [0.0]
    times = [r.time for r in run(st, RunConfig(dt=1e-2, t_end=0.07, diagnostics_every=3, dissipation=False))]
    assert_allclose(times, [0.0, 0.03, 0.06, 0.07])


def test_on_record_sees_states():
    st = random_mixture(_species(), make_grid(2, 6.0, 8), np.random.default_rng(2))
    seen = []
    run(st, RunConfig(dt=1e-2, t_end=0.02, dissipation=False), on_record=lambda rec, s: seen.append((rec.time, s.time)))
    assert [a for a, b in seen] == [b for a, b in seen] == [0.0, 0.01, 0.02]


def test_blow_up_names_a_node():
    # Couplings of 1e200 overflow within one step.
    sp = make_species_set([1.0, 2.0], 1e200 * np.ones((2, 2)), np.ones((2, 2)), 2)
    st = random_mixture(sp, make_grid(2, 6.0, 8), np.random.default_rng(0))
    with pytest.raises(BlowUpError) as info, np.errstate(over="ignore", invalid="ignore"):
        run(st, RunConfig(scheme="euler", dt=1e-2, t_end=1.0, dissipation=False))
    err = info.value
    assert err.species in (0, 1)
    assert len(err.node) == 2 and all(isinstance(k, int) for k in err.node)
    assert str(err.node) in str(err)
    assert len(err.records) >= 1


def test_suggest_dt():
    grid = make_grid(2, 6.0, 16)
    bumps = [[(1.0, [0.5, 0.0], 0.8)], [(1.0, [-0.5, 0.0], 1.5)]]
    cfg = RunConfig(dt=1.0)
    eq = equilibrium_of(mixture_from_bumps(_species(), grid, bumps))
    # Only rounding-level rates at equilibrium, so the cap wins.
    assert suggest_dt(eq, RunConfig(dt=1e-3)) == 1e-3
    assert suggest_dt(mixture_from_bumps(_species(c=0.0), grid, bumps), cfg) == 1.0
    a = suggest_dt(mixture_from_bumps(_species(), grid, bumps), cfg)
    b = suggest_dt(mixture_from_bumps(_species(c=10.0), grid, bumps), cfg)
    assert a < 1.0
    assert_allclose(a / b, 10.0, rtol=1e-12)


def test_fokker_planck_run_follows_oracle():
    grid = make_grid(2, 6.0, 32)
    sp = make_species_set([2.0], [[1.0]], [[0.0]], 2)
    spec = GaussianSpec(np.array([0.5, 0.3]), np.array([[0.6, 0.1], [0.1, 0.8]]))
    macro = MacroState((1.0,), np.array([0.1, -0.2]), 1.0)
    st = MixtureState(sp, grid, gaussian_field(grid, spec)[None])
    kept = []
    run(st, RunConfig(flow="fokker_planck", dt=1e-3, t_end=0.3, diagnostics_every=100, equilibrium=macro),
        on_record=lambda rec, s: kept.append(s))
    for s in kept:
        want = gaussian_oracle(spec, 2.0, macro, s.time)
        got = gaussian_moments(grid, s.fields[0])
        assert np.abs(got.mean - want.mean).max() < 1e-3
        assert np.abs(got.covariance - want.covariance).max() < 2e-3


@pytest.mark.slow
def test_relative_entropy_to_equilibrium_decays():
    # Shares the cached reference run with the acceptance tests.
    sim = scenario_run(32, 0.0, 1e-3)
    eq = equilibrium_of(scenario_state(32, 0.0))

    def distance(state):
        return sum(relative_entropy(state.grid, f, g) for f, g in zip(state.fields, eq.fields))

    early = distance(sim.states[sim.index(0.2)])
    late = distance(sim.states[sim.index(1.8)])
    assert 0 < late < early / 10
    assert sim.records[-1].entropy < sim.records[0].entropy
