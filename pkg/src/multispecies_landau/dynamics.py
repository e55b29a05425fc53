"""Explicit time integration of the Landau and Fokker-Planck flows."""

import logging
from dataclasses import dataclass

import numpy as np

from .equilibrium import MacroState, fokker_planck_apply, maxwellian
from .errors import BlowUpError, ParameterError
from .functionals import diagnostics, moments
from .landau import rhs as landau_rhs
from .state import DEFAULT_FLOOR

__all__ = ["RunConfig", "flow_rhs", "step", "run", "suggest_dt"]

log = logging.getLogger(__name__)

# Runs whose clamped mass exceeds this fraction of the total are not valid
# evidence for monotonicity statements.
CLAMP_VALIDITY_FRACTION = 1e-8


@dataclass(frozen=True)
class RunConfig:
    flow: str = "landau"
    scheme: str = "rk4"
    dt: float = 1e-3
    t_end: float = 0.0
    diagnostics_every: int = 1
    floor: float = DEFAULT_FLOOR
    deterministic_reduction: bool = True
    dissipation: bool = True
    # Fokker-Planck equilibrium (u, theta); taken from the initial state when omitted.
    equilibrium: MacroState = None

    def __post_init__(self):
        if self.flow not in ("landau", "fokker_planck"):
            raise ParameterError(f"unknown flow {self.flow!r}")
        if self.scheme not in ("euler", "rk4"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ParameterError(f"t_end must be nonnegative, got {self.t_end}")
        if int(self.diagnostics_every) < 1:
            raise ParameterError("diagnostics_every must be >= 1")


def _fokker_planck_rhs(state, macro):
    sp = state.species
    out = np.empty_like(state.fields)
    for i in range(sp.count):
        mu = maxwellian(state.grid, sp.masses[i], 1.0, macro.bulk_velocity, macro.temperature)
        out[i] = fokker_planck_apply(state.grid, state.fields[i], mu, sp.masses[i], state.floor)
    return out


def _macro_of(state):
    mom = moments(state)
    return MacroState(tuple(mom.densities), mom.u, mom.theta)


def flow_rhs(state, config, macro=None):
    """Time derivative of every species under the configured flow."""
    if config.flow == "landau":
        return landau_rhs(state)
    macro = macro or config.equilibrium or _macro_of(state)
    return _fokker_planck_rhs(state, macro)


def _check_finite(values, time):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(k) for k in np.unravel_index(np.argmax(bad), values.shape))
        raise BlowUpError(
            f"non-finite time derivative at species {idx[0]}, node {idx[1:]} (t={time:g}); reduce dt",
            species=idx[0],
            node=idx[1:],
        )
    return values


def step(state, config, macro=None):
    """Advance one explicit Euler or RK4 step; negative values are reset to the floor.

    Returns ``(new_state, clamped_mass)`` where ``clamped_mass`` is the mass
    added by the reset.
    """
    dt = config.dt
    t = state.time

    def deriv(s):
        return _check_finite(flow_rhs(s, config, macro), s.time)

    k1 = deriv(state)
    if config.scheme == "euler":
        new = state.fields + dt * k1
    else:
        k2 = deriv(state.with_fields(state.fields + 0.5 * dt * k1, t + 0.5 * dt))
        k3 = deriv(state.with_fields(state.fields + 0.5 * dt * k2, t + 0.5 * dt))
        k4 = deriv(state.with_fields(state.fields + dt * k3, t + dt))
        new = state.fields + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_finite(new, t + dt)
    neg = new < 0
    added = 0.0
    if neg.any():
        added = state.grid.cell_volume * float(np.sum(state.floor - new[neg]))
        new = np.where(neg, state.floor, new)
    return state.with_fields(new, t + dt), added


def run(initial, config, on_record=None):
    """Integrate to ``t_end`` and return diagnostics records.

    Records are emitted at t=0, every ``diagnostics_every`` steps and at the
    final time.  ``on_record(record, state)`` is called for each record as it
    is produced.  A :class:`BlowUpError` propagates with ``records`` attached
    so partial output can be written.
    """
    n_steps = int(round(config.t_end / config.dt))
    if not np.isclose(n_steps * config.dt, config.t_end, rtol=1e-9, atol=1e-12):
        raise ParameterError(f"t_end={config.t_end} is not a multiple of dt={config.dt}")
    if config.flow == "fokker_planck" and config.equilibrium is None:
        macro = _macro_of(initial)
    else:
        macro = config.equilibrium
    state = initial
    clamped = 0.0
    records = []

    def emit(s):
        rec = diagnostics(s, dissipation=config.dissipation and config.flow == "landau", clamped_mass=clamped)
        records.append(rec)
        if on_record is not None:
            on_record(rec, s)

    emit(state)
    for k in range(1, n_steps + 1):
        try:
            state, added = step(state, config, macro)
        except BlowUpError as exc:
            exc.records = records
            raise
        # Keep the time grid exact instead of accumulating dt.
        state = state.with_fields(state.fields, k * config.dt)
        clamped += added
        if k % config.diagnostics_every == 0 or k == n_steps:
            emit(state)
    total = float(np.sum(records[0].densities))
    if clamped > CLAMP_VALIDITY_FRACTION * total:
        log.warning("clamped mass %.3e exceeds %.0e of total mass", clamped, CLAMP_VALIDITY_FRACTION)
    return records


def suggest_dt(state, config, threshold=1e3):
    """Largest ``dt <= config.dt`` with ``|rhs| dt <= 0.1 f`` wherever ``f >= threshold * floor``."""
    r = flow_rhs(state, config)
    f = state.fields
    mask = f >= threshold * state.floor
    rate = np.abs(r[mask]) / f[mask]
    peak = float(rate.max()) if rate.size else 0.0
    if peak == 0.0:
        return config.dt
    return min(config.dt, 0.1 / peak)
