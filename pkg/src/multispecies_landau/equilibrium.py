"""Maxwellian equilibria, relative entropy and the linear Fokker-Planck reference flow."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, ParameterError
from .state import DEFAULT_FLOOR, MixtureState
from .vgrid import divergence, gradient, integrate, log_field

__all__ = [
    "MacroState",
    "GaussianSpec",
    "maxwellian",
    "gaussian_field",
    "gaussian_moments",
    "equilibrium_of",
    "relative_entropy",
    "fokker_planck_apply",
    "gaussian_oracle",
]


@dataclass(frozen=True)
class MacroState:
    """Number densities ``n_i``, common bulk velocity ``u`` and temperature ``theta``."""

    densities: tuple
    bulk_velocity: np.ndarray
    temperature: float

    def __post_init__(self):
        if any(not n > 0 for n in self.densities):
            raise DegenerateStateError(f"densities must be positive, got {self.densities}")
        if not self.temperature > 0:
            raise DegenerateStateError(f"temperature must be positive, got {self.temperature}")


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian with the given mean, covariance and total mass ``int f dv``."""

    mean: np.ndarray
    covariance: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if not np.allclose(cov, cov.T) or np.any(np.linalg.eigvalsh(cov) <= 0):
            raise ParameterError("covariance must be symmetric positive definite")


def maxwellian(grid, mass, n, u, theta):
    """``n (m / 2 pi theta)^{d/2} exp(-m |v - u|^2 / 2 theta)`` sampled at the nodes."""
    if not theta > 0:
        raise ParameterError(f"temperature must be positive, got {theta}")
    if not n > 0:
        raise ParameterError(f"density must be positive, got {n}")
    d = grid.dim
    u = np.broadcast_to(np.asarray(u, dtype=float), (d,))
    x = grid.coordinates - u.reshape((d,) + (1,) * d)
    r2 = np.sum(x * x, axis=0)
    return n * (mass / (2.0 * np.pi * theta)) ** (d / 2.0) * np.exp(-mass * r2 / (2.0 * theta))


def gaussian_field(grid, spec):
    d = grid.dim
    cov = np.asarray(spec.covariance, dtype=float)
    prec = np.linalg.inv(cov)
    x = grid.coordinates - np.asarray(spec.mean, dtype=float).reshape((d,) + (1,) * d)
    q = np.einsum("a...,ab,b...->...", x, prec, x)
    norm = spec.mass / np.sqrt((2.0 * np.pi) ** d * np.linalg.det(cov))
    return norm * np.exp(-0.5 * q)


def gaussian_moments(grid, f):
    """Mass, mean and covariance of a grid field, returned as a :class:`GaussianSpec`."""
    d = grid.dim
    mass = integrate(grid, f)
    x = grid.coordinates
    mean = np.array([integrate(grid, x[a] * f) for a in range(d)]) / mass
    y = x - mean.reshape((d,) + (1,) * d)
    cov = np.array([[integrate(grid, y[a] * y[b] * f) for b in range(d)] for a in range(d)]) / mass
    return GaussianSpec(mean, cov, mass)


def equilibrium_of(state):
    """Multi-species Maxwellian sharing the state's ``n_i``, momentum and energy."""
    from .functionals import moments

    mom = moments(state)
    fields = np.stack(
        [
            maxwellian(state.grid, m, n, mom.u, mom.theta)
            for m, n in zip(state.species.masses, mom.densities)
        ]
    )
    return MixtureState(state.species, state.grid, fields, state.time, state.floor)


def relative_entropy(grid, f, mu, floor=DEFAULT_FLOOR):
    """``int f log(f / mu) dv`` with floored logarithms."""
    lf, _ = log_field(f, floor)
    lm, _ = log_field(mu, floor)
    return integrate(grid, np.asarray(f) * (lf - lm))


def fokker_planck_apply(grid, f, mu, mass, floor=DEFAULT_FLOOR):
    """``(1/m) div(f grad log(f / mu))`` with the adjoint-consistent grid operators."""
    lf, _ = log_field(f, floor)
    lm, _ = log_field(mu, floor)
    return divergence(grid, np.asarray(f) * gradient(grid, lf - lm)) / mass


def gaussian_oracle(spec0, mass, macro, t):
    """Exact Gaussian solution of the Fokker-Planck flow with equilibrium ``(u, theta)``.

    Mean relaxes at rate ``1/theta`` and covariance at rate ``2/theta`` toward
    ``(theta / m) I``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    theta = macro.temperature
    u = np.asarray(macro.bulk_velocity, dtype=float)
    mean0 = np.asarray(spec0.mean, dtype=float)
    cov0 = np.asarray(spec0.covariance, dtype=float)
    eq = (theta / mass) * np.eye(len(mean0))
    mean = u + np.exp(-t / theta) * (mean0 - u)
    cov = eq + np.exp(-2.0 * t / theta) * (cov0 - eq)
    return GaussianSpec(mean, cov, spec0.mass)
